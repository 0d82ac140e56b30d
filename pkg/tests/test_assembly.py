import math

import numpy as np
import pytest

from tifem import (
    FibreFrame,
    FormulationVariant,
    MaterialParameters,
    SingularSystem,
    UnknownBoundaryTag,
    apply_dirichlet,
    assemble,
    derive_parameters,
    element_stiffness,
    h1_error,
    rectangle_mesh,
    solve,
)
from tifem import EngineeringConstants
from conftest import sample_admissible

V = FormulationVariant

MP_ISO = MaterialParameters(lam=2.0, mu_t=1.0, mu_l=1.0, alpha=0.0, beta=0.0)
FRAME0 = FibreFrame.from_angle(0.0)


class TestAssemble:
    def test_single_element_equals_element_matrix(self, rng):
        mesh = rectangle_mesh(2.0, 1.0, 1, 1, order=1)
        ec = sample_admissible(rng)
        mp = derive_parameters(ec)
        frame = FibreFrame.from_angle(0.3)
        system = assemble(mesh, mp, frame, V.Q1_CG)
        Ke = element_stiffness(mesh.nodes[mesh.elements[0]], mp, frame, V.Q1_CG)
        conn = mesh.elements[0]
        edofs = np.empty(8, dtype=int)
        edofs[0::2] = 2 * conn
        edofs[1::2] = 2 * conn + 1
        K = system.stiffness.toarray()
        assert np.allclose(K[np.ix_(edofs, edofs)], Ke)

    def test_two_element_hand_scatter(self):
        # independent bookkeeping: scatter the two element matrices by hand
        mesh = rectangle_mesh(2.0, 1.0, 2, 1, order=1)
        system = assemble(mesh, MP_ISO, FRAME0, V.Q1_CG)
        K_oracle = np.zeros((2 * mesh.n_nodes, 2 * mesh.n_nodes))
        for e in range(2):
            conn = mesh.elements[e]
            Ke = element_stiffness(mesh.nodes[conn], MP_ISO, FRAME0, V.Q1_CG)
            for i_loc, i_node in enumerate(conn):
                for j_loc, j_node in enumerate(conn):
                    for ci in range(2):
                        for cj in range(2):
                            K_oracle[2 * i_node + ci, 2 * j_node + cj] += Ke[
                                2 * i_loc + ci, 2 * j_loc + cj
                            ]
        assert np.allclose(system.stiffness.toarray(), K_oracle)

    def test_zero_loads(self):
        mesh = rectangle_mesh(1.0, 1.0, 2, 2, order=1)
        system = assemble(mesh, MP_ISO, FRAME0, V.Q1_CG)
        assert np.all(system.load == 0.0)

    def test_global_symmetry(self, rng):
        mesh = rectangle_mesh(2.0, 1.0, 3, 2, order=2)
        ec = sample_admissible(rng)
        mp = derive_parameters(ec)
        system = assemble(mesh, mp, FibreFrame.from_angle(0.9), V.Q2_CG)
        diff = (system.stiffness - system.stiffness.T).toarray()
        assert np.abs(diff).max() <= 1e-12 * np.abs(system.stiffness.toarray()).max()

    def test_unknown_traction_tag(self):
        mesh = rectangle_mesh(1.0, 1.0, 1, 1, order=1)
        with pytest.raises(UnknownBoundaryTag):
            assemble(mesh, MP_ISO, FRAME0, V.Q1_CG, tractions={"front": (1.0, 0.0)})

    def test_order_mismatch(self):
        mesh = rectangle_mesh(1.0, 1.0, 1, 1, order=2)
        with pytest.raises(ValueError):
            assemble(mesh, MP_ISO, FRAME0, V.Q1_CG)

    def test_constant_traction_resultant(self):
        mesh = rectangle_mesh(2.0, 1.0, 2, 2, order=2)
        system = assemble(
            mesh, MP_ISO, FRAME0, V.Q2_CG, tractions={"right": (0.0, 3.0)}
        )
        # total vertical load equals traction * edge length
        assert system.load[1::2].sum() == pytest.approx(3.0 * 1.0, rel=1e-12)
        assert system.load[0::2].sum() == pytest.approx(0.0, abs=1e-12)

    def test_body_force_resultant(self):
        mesh = rectangle_mesh(2.0, 1.0, 3, 2, order=1)
        system = assemble(mesh, MP_ISO, FRAME0, V.Q1_CG, body_force=(0.0, -5.0))
        assert system.load[1::2].sum() == pytest.approx(-5.0 * 2.0, rel=1e-12)


class TestDirichletAndSolve:
    def test_homogeneous_constraints_leave_load(self):
        mesh = rectangle_mesh(1.0, 1.0, 2, 1, order=1)
        system = assemble(mesh, MP_ISO, FRAME0, V.Q1_CG, tractions={"right": (1.0, 0.0)})
        load_before = system.load.copy()
        apply_dirichlet(system, {"left": lambda x, y: (0.0, 0.0)})
        assert np.array_equal(system.load, load_before)
        assert all(system.constrained[d] == 0.0 for d in system.constrained)

    def test_all_dofs_constrained(self):
        mesh = rectangle_mesh(1.0, 1.0, 1, 1, order=1)
        system = assemble(mesh, MP_ISO, FRAME0, V.Q1_CG)
        apply_dirichlet(
            system, {tag: lambda x, y: (x, 2 * y) for tag in ("left", "right")}
        )
        sol = solve(system)
        assert np.allclose(sol.displacements[0::2], mesh.nodes[:, 0])
        assert np.allclose(sol.displacements[1::2], 2 * mesh.nodes[:, 1])

    def test_single_element_against_dense_oracle(self):
        mesh = rectangle_mesh(1.0, 1.0, 1, 1, order=1)
        system = assemble(mesh, MP_ISO, FRAME0, V.Q1_CG, tractions={"right": (2.0, 1.0)})
        apply_dirichlet(system, {"left": lambda x, y: (0.0, 0.0)})
        sol = solve(system)

        K = system.stiffness.toarray()
        free = [d for d in range(8) if d not in system.constrained]
        u_oracle = np.zeros(8)
        u_oracle[free] = np.linalg.solve(K[np.ix_(free, free)], system.load[free])
        assert np.abs(sol.displacements - u_oracle).max() < 1e-12

    def test_unconstrained_system_is_singular(self):
        mesh = rectangle_mesh(1.0, 1.0, 2, 2, order=1)
        system = assemble(mesh, MP_ISO, FRAME0, V.Q1_CG, tractions={"right": (1.0, 0.0)})
        with pytest.raises(SingularSystem):
            solve(system)

    def test_inhomogeneous_dirichlet_moves_to_load(self):
        # prescribing u = (x, 0) on all edges of a homogeneous block must
        # reproduce the linear field in the interior
        mesh = rectangle_mesh(1.0, 1.0, 3, 3, order=1)
        system = assemble(mesh, MP_ISO, FRAME0, V.Q1_CG)
        apply_dirichlet(
            system,
            {tag: lambda x, y: (x, 0.0) for tag in ("left", "right", "top", "bottom")},
        )
        sol = solve(system)
        assert np.allclose(sol.displacements[0::2], mesh.nodes[:, 0], atol=1e-12)
        assert np.allclose(sol.displacements[1::2], 0.0, atol=1e-12)

    def test_solver_determinism(self, rng):
        ec = sample_admissible(rng)
        mp = derive_parameters(ec)
        mesh = rectangle_mesh(2.0, 1.0, 6, 3, order=1)
        results = []
        for _ in range(2):
            system = assemble(
                mesh, mp, FibreFrame.from_angle(0.7), V.Q1_CG,
                tractions={"right": (0.5, 1.5)},
            )
            apply_dirichlet(system, {"left": lambda x, y: (0.0, 0.0)})
            results.append(solve(system).displacements.tobytes())
        assert results[0] == results[1]


class TestH1Error:
    def test_zero_fields(self):
        mesh = rectangle_mesh(1.0, 1.0, 2, 2, order=1)
        system = assemble(mesh, MP_ISO, FRAME0, V.Q1_CG)
        apply_dirichlet(
            system, {tag: lambda x, y: (0.0, 0.0) for tag in ("left", "right")}
        )
        sol = solve(system)
        h1, l2 = h1_error(sol, lambda x, y: (0.0, 0.0), lambda x, y: np.zeros((2, 2)))
        assert h1 == 0.0
        assert l2 == 0.0

    def test_interpolation_error_positive(self):
        mesh = rectangle_mesh(1.0, 1.0, 2, 2, order=1)
        system = assemble(mesh, MP_ISO, FRAME0, V.Q1_CG)
        exact = lambda x, y: (x * x, 0.0)
        grad = lambda x, y: np.array([[2 * x, 0.0], [0.0, 0.0]])
        apply_dirichlet(
            system,
            {tag: lambda x, y: (x * x, 0.0) for tag in ("left", "right", "top", "bottom")},
        )
        sol = solve(system)
        h1, l2 = h1_error(sol, exact, grad)
        assert h1 > 0.0
        assert l2 > 0.0
        assert h1 >= l2

    def test_exact_linear_field_reproduced(self):
        # linear exact field lies in the Q1 space; errors vanish
        mesh = rectangle_mesh(2.0, 1.0, 3, 2, order=1)
        system = assemble(mesh, MP_ISO, FRAME0, V.Q1_CG)
        apply_dirichlet(
            system,
            {tag: lambda x, y: (0.1 * x + 0.2 * y, -0.3 * x) for tag in
             ("left", "right", "top", "bottom")},
        )
        sol = solve(system)
        grad = lambda x, y: np.array([[0.1, 0.2], [-0.3, 0.0]])
        h1, _ = h1_error(sol, lambda x, y: (0.1 * x + 0.2 * y, -0.3 * x), grad)
        assert h1 < 1e-12


class TestFrameInvariance:
    def test_global_energy_under_rotation(self, rng):
        ec = sample_admissible(rng)
        mp = derive_parameters(ec)
        theta = 0.83
        R = np.array(
            [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
        )

        def run(rotate):
            mesh = rectangle_mesh(2.0, 1.0, 4, 2, order=1)
            angle = 0.4
            trac = np.array([0.3, 1.1])
            if rotate:
                mesh.nodes = mesh.nodes @ R.T
                angle += theta
                trac = R @ trac
            system = assemble(
                mesh, mp, FibreFrame.from_angle(angle), V.Q1_CG,
                tractions={"right": tuple(trac)},
            )
            apply_dirichlet(system, {"left": lambda x, y: (0.0, 0.0)})
            sol = solve(system)
            return sol.displacements @ system.stiffness @ sol.displacements

        e0, e1 = run(False), run(True)
        assert e1 == pytest.approx(e0, rel=1e-10)
