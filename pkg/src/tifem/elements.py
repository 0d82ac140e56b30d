"""Reference-element machinery: shape functions, quadrature, element stiffness.

The bilinear form is split into an isotropic part (volumetric lambda-term plus
the 2 mu_t deviatoric-type term) and the anisotropic part (alpha coupling,
beta extensional term, gamma shear-difference term).  The under-integrated
variants evaluate the designated term with the one-point Gauss rule; the
mixed variant condenses an elementwise-constant multiplier, which is the
elementwise L2 projection of the extensional strain onto constants.
"""

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class NonPositiveJacobian(ValueError):
    """Element geometry has a non-positive Jacobian determinant."""


class FormulationVariant(enum.Enum):
    Q1_CG = "Q1_CG"
    Q2_CG = "Q2_CG"
    Q1_CG_UI_lambda = "Q1_CG_UI_lambda"
    Q1_CG_UI_beta = "Q1_CG_UI_beta"
    Q1_CG_UI_betalambda = "Q1_CG_UI_betalambda"
    Q1_MIXED_P0_beta = "Q1_MIXED_P0_beta"

    @property
    def order(self):
        return 2 if self is FormulationVariant.Q2_CG else 1

    @property
    def underintegrate_lambda(self):
        return self in (
            FormulationVariant.Q1_CG_UI_lambda,
            FormulationVariant.Q1_CG_UI_betalambda,
        )

    @property
    def underintegrate_beta(self):
        return self in (
            FormulationVariant.Q1_CG_UI_beta,
            FormulationVariant.Q1_CG_UI_betalambda,
        )


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray   # (k, 2)
    weights: np.ndarray  # (k,)


@lru_cache(maxsize=None)
def gauss_rule(n):
    """Tensor-product Gauss-Legendre rule with n points per direction."""
    x, w = np.polynomial.legendre.leggauss(n)
    pts = np.array([(xi, eta) for eta in x for xi in x])
    wts = np.array([wi * wj for wj in w for wi in w])
    return QuadratureRule(points=pts, weights=wts)


def _lagrange_quadratic(t):
    # 1D quadratic Lagrange basis at nodes (-1, 1, 0), with derivatives.
    vals = np.array([0.5 * t * (t - 1.0), 0.5 * t * (t + 1.0), 1.0 - t * t])
    ders = np.array([t - 0.5, t + 0.5, -2.0 * t])
    return vals, ders


def shape_functions(order, xi):
    """Shape function values and reference gradients at a reference point.

    Returns (values (n,), gradients (n, 2)) with n = 4 (Q1) or 9 (Q2),
    node ordering matching the mesh connectivity.
    """
    s, t = float(xi[0]), float(xi[1])
    if order == 1:
        vals = 0.25 * np.array(
            [(1 - s) * (1 - t), (1 + s) * (1 - t), (1 + s) * (1 + t), (1 - s) * (1 + t)]
        )
        grads = 0.25 * np.array(
            [
                [-(1 - t), -(1 - s)],
                [(1 - t), -(1 + s)],
                [(1 + t), (1 + s)],
                [-(1 + t), (1 - s)],
            ]
        )
        return vals, grads
    if order == 2:
        ls, dls = _lagrange_quadratic(s)
        lt, dlt = _lagrange_quadratic(t)
        # local (i, j) index into the 1D bases per node: corners, midsides, center
        pattern = [(0, 0), (1, 0), (1, 1), (0, 1), (2, 0), (1, 2), (2, 1), (0, 2), (2, 2)]
        vals = np.array([ls[i] * lt[j] for i, j in pattern])
        grads = np.array([[dls[i] * lt[j], ls[i] * dlt[j]] for i, j in pattern])
        return vals, grads
    raise ValueError("order must be 1 or 2")


def edge_shape_functions(order, t):
    """1D edge basis (values, derivatives) in edge-node ordering."""
    t = float(t)
    if order == 1:
        return np.array([0.5 * (1 - t), 0.5 * (1 + t)]), np.array([-0.5, 0.5])
    vals, ders = _lagrange_quadratic(t)
    return vals, ders


# Voigt selectors (strain ordering 11, 22, 2*12).
_B_VOL = np.array([1.0, 1.0, 0.0])


def _extensional_selector(frame):
    a1, a2 = frame.vec[:2]
    return np.array([a1 * a1, a2 * a2, a1 * a2])


def _gamma_matrix(frame):
    a1, a2 = frame.vec[:2]
    return np.array(
        [
            [2.0 * a1 * a1, 0.0, a1 * a2],
            [0.0, 2.0 * a2 * a2, a1 * a2],
            [a1 * a2, a1 * a2, 0.5],
        ]
    )


def _geometry_at(coords, order, xi):
    """B matrix (3 x 2n) and Jacobian determinant at a reference point."""
    vals, grads = shape_functions(order, xi)
    J = coords.T @ grads                     # (2, 2), J[i, j] = dx_i/dxi_j
    detJ = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    if detJ <= 0.0:
        raise NonPositiveJacobian(f"det J = {detJ} at {tuple(xi)}")
    dN = grads @ np.linalg.inv(J)            # (n, 2) physical gradients
    n = coords.shape[0]
    B = np.zeros((3, 2 * n))
    B[0, 0::2] = dN[:, 0]
    B[1, 1::2] = dN[:, 1]
    B[2, 0::2] = dN[:, 1]
    B[2, 1::2] = dN[:, 0]
    return vals, B, detJ


def element_stiffness(coords, mp, frame, variant):
    """Element stiffness matrix for one formulation variant.

    coords: (n, 2) node coordinates matching the variant's order.
    """
    coords = np.asarray(coords, dtype=float)
    order = variant.order
    n_expected = 4 if order == 1 else 9
    if coords.shape != (n_expected, 2):
        raise ValueError(
            f"{variant.value} expects {n_expected} nodes, got {coords.shape[0]}"
        )

    m_ext = _extensional_selector(frame)
    G = _gamma_matrix(frame)
    D_base = (
        2.0 * mp.mu_t * np.diag([1.0, 1.0, 0.5])
        + mp.alpha * (np.outer(_B_VOL, m_ext) + np.outer(m_ext, _B_VOL))
        + mp.gamma * G
    )

    full = gauss_rule(order + 1)
    ndof = 2 * coords.shape[0]
    K_base = np.zeros((ndof, ndof))
    K_lam = np.zeros((ndof, ndof))
    K_beta = np.zeros((ndof, ndof))
    for xi, w in zip(full.points, full.weights):
        _, B, detJ = _geometry_at(coords, order, xi)
        K_base += w * detJ * (B.T @ D_base @ B)
        gv = B.T @ _B_VOL
        gm = B.T @ m_ext
        K_lam += w * detJ * np.outer(gv, gv)
        K_beta += w * detJ * np.outer(gm, gm)

    if variant.underintegrate_lambda:
        K_lam = _one_point_term(coords, order, _B_VOL)
    if variant.underintegrate_beta:
        K_beta = _one_point_term(coords, order, m_ext)
    if variant is FormulationVariant.Q1_MIXED_P0_beta:
        K_beta = _p0_term(coords, order, m_ext)

    K = K_base + mp.lam * K_lam + mp.beta * K_beta
    return 0.5 * (K + K.T)


def _one_point_term(coords, order, selector):
    """Unit-coefficient rank-one term from the one-point Gauss rule."""
    rule = gauss_rule(1)
    xi, w = rule.points[0], rule.weights[0]
    _, B, detJ = _geometry_at(coords, order, xi)
    g = B.T @ selector
    return w * detJ * np.outer(g, g)


def _p0_term(coords, order, selector):
    """Unit-coefficient term with the integrand projected onto constants.

    The projected bilinear term reduces to (1/|E|) (int g)(int g)^T; the
    integrals are polynomial of low enough degree for the 2x2 rule to be
    exact on bilinearly mapped elements.
    """
    rule = gauss_rule(2)
    g = np.zeros(2 * coords.shape[0])
    area = 0.0
    for xi, w in zip(rule.points, rule.weights):
        _, B, detJ = _geometry_at(coords, order, xi)
        g += w * detJ * (B.T @ selector)
        area += w * detJ
    return np.outer(g, g) / area


def p0_projected_term(coords, coefficient, which, frame=None):
    """Stiffness term built with elementwise L2 projection onto constants.

    which: "volumetric" (divergence integrand) or "extensional" (fibre-strain
    integrand, requires a frame).  Order-1 elements only.
    """
    coords = np.asarray(coords, dtype=float)
    if coords.shape[0] != 4:
        raise ValueError("P0 projection is defined for order-1 elements")
    if which == "volumetric":
        selector = _B_VOL
    elif which == "extensional":
        if frame is None:
            raise ValueError("extensional term needs a fibre frame")
        selector = _extensional_selector(frame)
    else:
        raise ValueError(f"unknown term selector {which!r}")
    return coefficient * _p0_term(coords, 1, selector)


def one_point_term(coords, coefficient, which, frame=None):
    """One-point under-integrated counterpart of p0_projected_term."""
    coords = np.asarray(coords, dtype=float)
    if coords.shape[0] != 4:
        raise ValueError("under-integration is defined for order-1 elements")
    if which == "volumetric":
        selector = _B_VOL
    elif which == "extensional":
        if frame is None:
            raise ValueError("extensional term needs a fibre frame")
        selector = _extensional_selector(frame)
    else:
        raise ValueError(f"unknown term selector {which!r}")
    return coefficient * _one_point_term(coords, 1, selector)
