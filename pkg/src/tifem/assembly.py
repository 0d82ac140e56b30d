"""Global assembly, boundary conditions, linear solve, and error norms.

Degrees of freedom are interleaved: node i owns dofs (2i, 2i+1) for the
x and y displacement components.  Dirichlet constraints are handled by
symmetric elimination at solve time; the assembled matrix always covers
all dofs.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .elements import (
    FormulationVariant,
    element_stiffness,
    edge_shape_functions,
    gauss_rule,
    shape_functions,
)


class UnknownBoundaryTag(KeyError):
    pass


class SingularSystem(ValueError):
    """The constrained system is singular (e.g. unresolved rigid-body modes)."""


@dataclass
class LinearSystem:
    stiffness: sp.csr_matrix
    load: np.ndarray
    mesh: object
    variant: FormulationVariant
    material: object
    frame: object
    constrained: dict = field(default_factory=dict)  # dof -> prescribed value

    @property
    def n_dofs(self):
        return self.load.shape[0]


@dataclass
class FieldSolution:
    mesh: object
    displacements: np.ndarray  # (2 * n_nodes,)
    variant: FormulationVariant
    material: object
    frame: object

    def at_node(self, node):
        return self.displacements[2 * node : 2 * node + 2]


def _as_vector_function(spec):
    if callable(spec):
        return spec
    vec = np.asarray(spec, dtype=float)
    return lambda x, y: vec


def assemble(mesh, mp, frame, variant, body_force=None, tractions=None):
    """Assemble the global stiffness and load for one formulation variant."""
    if variant.order != mesh.order:
        raise ValueError(f"{variant.value} needs an order-{variant.order} mesh")
    ndof = 2 * mesh.n_nodes
    n_en = mesh.elements.shape[1]
    n_edof = 2 * n_en

    rows = np.empty(mesh.n_elements * n_edof * n_edof, dtype=np.int64)
    cols = np.empty_like(rows)
    vals = np.empty(rows.shape[0])
    for e in range(mesh.n_elements):
        conn = mesh.elements[e]
        Ke = element_stiffness(mesh.nodes[conn], mp, frame, variant)
        edofs = np.empty(n_edof, dtype=np.int64)
        edofs[0::2] = 2 * conn
        edofs[1::2] = 2 * conn + 1
        base = e * n_edof * n_edof
        rows[base : base + n_edof * n_edof] = np.repeat(edofs, n_edof)
        cols[base : base + n_edof * n_edof] = np.tile(edofs, n_edof)
        vals[base : base + n_edof * n_edof] = Ke.ravel()
    K = sp.coo_matrix((vals, (rows, cols)), shape=(ndof, ndof)).tocsr()

    f = np.zeros(ndof)
    if body_force is not None:
        bf = _as_vector_function(body_force)
        rule = gauss_rule(mesh.order + 1)
        for e in range(mesh.n_elements):
            conn = mesh.elements[e]
            coords = mesh.nodes[conn]
            for xi, w in zip(rule.points, rule.weights):
                vals_n, grads = shape_functions(mesh.order, xi)
                J = coords.T @ grads
                detJ = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
                x, y = vals_n @ coords
                fx, fy = bf(x, y)
                f[2 * conn] += w * detJ * vals_n * fx
                f[2 * conn + 1] += w * detJ * vals_n * fy

    if tractions:
        # edge rule with order + 1 points (exact for the traction data used here)
        pts_1d, wts_1d = np.polynomial.legendre.leggauss(mesh.order + 1)
        for tag, spec in tractions.items():
            if tag not in mesh.boundary_edges:
                raise UnknownBoundaryTag(tag)
            trac = _as_vector_function(spec)
            for elem, edge in mesh.boundary_edges[tag]:
                enodes = mesh.edge_nodes(elem, edge)
                coords = mesh.nodes[enodes]
                for t, w in zip(pts_1d, wts_1d):
                    vals_n, ders = edge_shape_functions(mesh.order, t)
                    x, y = vals_n @ coords
                    dxdt = ders @ coords
                    ds = np.hypot(dxdt[0], dxdt[1])
                    tx, ty = trac(x, y)
                    f[2 * enodes] += w * ds * vals_n * tx
                    f[2 * enodes + 1] += w * ds * vals_n * ty

    return LinearSystem(
        stiffness=K, load=f, mesh=mesh, variant=variant,
        material=mp, frame=frame,
    )


def apply_dirichlet(system, bcs=None, node_constraints=()):
    """Record Dirichlet constraints on the system.

    bcs: tag -> callable (x, y) -> (gx, gy); a component returned as None is
    left free.  node_constraints: iterable of (node, component, value) for
    pointwise pins.  Returns the same system with `constrained` populated.
    """
    mesh = system.mesh
    for tag, func in (bcs or {}).items():
        if tag not in mesh.boundary_nodes:
            raise UnknownBoundaryTag(tag)
        for node in mesh.boundary_nodes[tag]:
            gx, gy = func(*mesh.nodes[node])
            if gx is not None:
                system.constrained[2 * node] = float(gx)
            if gy is not None:
                system.constrained[2 * node + 1] = float(gy)
    for node, comp, value in node_constraints:
        system.constrained[2 * node + comp] = float(value)
    return system


def solve(system):
    """Direct sparse solve with symmetric elimination of constrained dofs."""
    ndof = system.n_dofs
    u = np.zeros(ndof)
    cdofs = np.array(sorted(system.constrained), dtype=np.int64)
    cvals = np.array([system.constrained[d] for d in cdofs])
    u[cdofs] = cvals
    mask = np.ones(ndof, dtype=bool)
    mask[cdofs] = False
    free = np.nonzero(mask)[0]
    if free.size == 0:
        return FieldSolution(system.mesh, u, system.variant, system.material, system.frame)

    K = system.stiffness.tocsc()
    K_ff = K[free][:, free]
    rhs = system.load[free]
    if cdofs.size:
        rhs = rhs - K[free][:, cdofs] @ cvals
    try:
        lu = spla.splu(K_ff.tocsc())
        u_f = lu.solve(rhs)
    except RuntimeError as err:
        raise SingularSystem(str(err)) from err
    if not np.all(np.isfinite(u_f)):
        raise SingularSystem("solver produced non-finite values")
    # An exactly rank-deficient matrix can slip through factorisation with
    # roundoff-sized pivots; flag those explicitly.
    pivots = np.abs(lu.U.diagonal())
    if pivots.size and pivots.min() <= 1e-13 * pivots.max():
        raise SingularSystem("factorisation produced a negligible pivot")
    # One step of iterative refinement, then a backward-error check.  With
    # coefficient ratios up to 1e9 the plain load-relative residual floors
    # near eps * ||K|| * ||u||, so the contract is normwise backward error.
    r = rhs - K_ff @ u_f
    u_f = u_f + lu.solve(r)
    if not np.all(np.isfinite(u_f)):
        raise SingularSystem("solver produced non-finite values")
    r = rhs - K_ff @ u_f
    norm_K = spla.norm(K_ff, np.inf) if K_ff.shape[0] else 0.0
    denom = max(norm_K * np.linalg.norm(u_f) + np.linalg.norm(rhs), 1e-300)
    residual = np.linalg.norm(r) / denom
    if residual > 1e-10:
        raise SingularSystem(f"backward error {residual} exceeds 1e-10")
    u[free] = u_f
    return FieldSolution(system.mesh, u, system.variant, system.material, system.frame)


def h1_error(solution, exact_u, exact_grad, relative=False):
    """Full H1 and L2 errors against exact displacement and gradient fields.

    exact_u(x, y) -> (u, v); exact_grad(x, y) -> 2x2 array du_i/dx_j.
    Quadrature is two orders above the element order.  With relative=True
    both errors are normalized by the corresponding norms of the exact field.
    """
    mesh = solution.mesh
    rule = gauss_rule(mesh.order + 2)
    l2_sq = 0.0
    grad_sq = 0.0
    exact_l2_sq = 0.0
    exact_h1_sq = 0.0
    for e in range(mesh.n_elements):
        conn = mesh.elements[e]
        coords = mesh.nodes[conn]
        ue = np.column_stack(
            [solution.displacements[2 * conn], solution.displacements[2 * conn + 1]]
        )
        for xi, w in zip(rule.points, rule.weights):
            vals, grads = shape_functions(mesh.order, xi)
            J = coords.T @ grads
            detJ = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
            dN = grads @ np.linalg.inv(J)
            x, y = vals @ coords
            uh = vals @ ue                     # (2,)
            Gh = ue.T @ dN                     # (2, 2), du_i/dx_j
            ux = np.asarray(exact_u(x, y), dtype=float)
            Gx = np.asarray(exact_grad(x, y), dtype=float)
            l2_sq += w * detJ * np.sum((uh - ux) ** 2)
            grad_sq += w * detJ * np.sum((Gh - Gx) ** 2)
            exact_l2_sq += w * detJ * np.sum(ux**2)
            exact_h1_sq += w * detJ * (np.sum(ux**2) + np.sum(Gx**2))
    l2 = np.sqrt(l2_sq)
    h1 = np.sqrt(l2_sq + grad_sq)
    if relative:
        l2 /= max(np.sqrt(exact_l2_sq), 1e-300)
        h1 /= max(np.sqrt(exact_h1_sq), 1e-300)
    return h1, l2
