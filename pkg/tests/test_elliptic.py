import numpy as np
import pytest

from detnodes import NodeSet, ScalarField, eigen_laplacian, zero_field
from detnodes.elliptic import (
    find_nontrivial,
    newton_solve,
    node_coincidence_test,
    residual,
    symmetry_defect,
)
from detnodes.experiments import manufactured_forcing
from detnodes.norms import l2_norm, sup_norm

from conftest import random_fields

FOUR_NODES = np.array([[0.25, 0.25], [0.25, 0.75], [0.75, 0.25], [0.75, 0.75]])


class TestResidual:
    def test_trivial_solution(self, unit_grid_64):
        z = zero_field(unit_grid_64)
        assert residual(z, z, 1.0, 3.0) == 0.0

    def test_manufactured_discretization_error(self, unit_grid_128):
        fbar, u1 = manufactured_forcing(unit_grid_128, 1.0, 3.0)
        assert residual(u1, fbar, 1.0, 3.0) <= 1e-2

    def test_forcing_perturbation_triangle(self, unit_grid_64):
        fbar, u1 = manufactured_forcing(unit_grid_64, 1.0, 3.0)
        (g,) = random_fields(unit_grid_64, 1, seed=51, scale=0.1)
        r0 = residual(u1, fbar, 1.0, 3.0)
        r1 = residual(u1, fbar + g, 1.0, 3.0)
        assert abs(r1 - r0) <= l2_norm(g) + 1e-12


class TestNewtonSolve:
    def test_exact_root_immediately(self, unit_grid_64):
        z = zero_field(unit_grid_64)
        res = newton_solve(z, z, 1.0, 3.0, tol=1e-10)
        assert res.converged
        assert res.iterations <= 1

    def test_manufactured_root(self, unit_grid_128):
        fbar, u1 = manufactured_forcing(unit_grid_128, 1.0, 3.0)
        res = newton_solve(0.9 * u1, fbar, 1.0, 3.0, tol=1e-9)
        assert res.converged
        assert l2_norm(res.field - u1) <= 1e-3

    def test_tiny_noise_attracted_to_trivial(self, unit_grid_64):
        rng = np.random.default_rng(52)
        noise = ScalarField(unit_grid_64, 1e-8 * rng.standard_normal(unit_grid_64.shape))
        res = newton_solve(noise, zero_field(unit_grid_64), 1.0, 3.0, tol=1e-10)
        assert res.converged
        assert sup_norm(res.field) <= 1e-6

    def test_residual_history_quadratic_tail(self, unit_grid_64):
        fbar, u1 = manufactured_forcing(unit_grid_64, 1.0, 3.0)
        res = newton_solve(0.8 * u1, fbar, 1.0, 3.0, tol=1e-11)
        assert res.converged
        tail = res.residual_history[-3:]
        assert all(b < a for a, b in zip(tail, tail[1:]))

    def test_converged_residual_below_tol(self, unit_grid_64):
        fbar, u1 = manufactured_forcing(unit_grid_64, 1.0, 3.0)
        res = newton_solve(1.2 * u1, fbar, 1.0, 3.0, tol=1e-8)
        assert res.converged
        assert residual(res.field, fbar, 1.0, 3.0) <= 1e-8


@pytest.fixture(scope="module")
def ground_state(unit_grid_128):
    return find_nontrivial(1.0, 3.0, unit_grid_128, tol=1e-8)


class TestFindNontrivial:
    def test_nontrivial_and_converged(self, ground_state):
        assert ground_state.converged
        assert sup_norm(ground_state.field) > 0.1
        assert ground_state.residual <= 1e-8

    def test_positive_interior(self, ground_state):
        assert ground_state.field.values.min() > 0

    def test_dihedral_symmetry(self, ground_state):
        assert symmetry_defect(ground_state.field) <= 1e-6

    def test_maximum_at_center(self, unit_grid_128, ground_state):
        vals = ground_state.field.values
        i, j = np.unravel_index(np.argmax(vals), vals.shape)
        assert (i + 1) * unit_grid_128.hx == pytest.approx(0.5, abs=1e-12)
        assert (j + 1) * unit_grid_128.hy == pytest.approx(0.5, abs=1e-12)

    def test_sign_flip_gives_negated_root(self, unit_grid_128, ground_state):
        _, e1 = eigen_laplacian(unit_grid_128, 1, 1)
        res = newton_solve(-4.0 * e1, zero_field(unit_grid_128), 1.0, 3.0, tol=1e-8)
        assert res.converged
        flip_gap = sup_norm(res.field + ground_state.field)
        assert flip_gap <= 1e-6


class TestNodeCoincidence:
    def test_identical_fields(self, unit_grid_128, first_eigenfield_128):
        ns = NodeSet(FOUR_NODES)
        rep = node_coincidence_test(first_eigenfield_128, first_eigenfield_128, ns, 1e-3)
        assert rep.max_node_discrepancy == 0.0
        assert rep.h1_distance == 0.0
        assert rep.nodes_match

    def test_distinct_roots_differ_at_nodes(self, unit_grid_128):
        nontrivial = find_nontrivial(1.0, 3.0, unit_grid_128, tol=1e-8)
        ns = NodeSet(FOUR_NODES)
        rep = node_coincidence_test(zero_field(unit_grid_128), nontrivial.field, ns, 1e-3)
        assert rep.max_node_discrepancy > 0.1
        assert not rep.nodes_match

    def test_same_root_twice_coincides(self, unit_grid_128):
        fbar, u1 = manufactured_forcing(unit_grid_128, 1.0, 3.0)
        ra = newton_solve(0.9 * u1, fbar, 1.0, 3.0, tol=1e-9)
        rb = newton_solve(1.1 * u1, fbar, 1.0, 3.0, tol=1e-9)
        ns = NodeSet(FOUR_NODES)
        rep = node_coincidence_test(ra.field, rb.field, ns, 1e-3)
        assert rep.max_node_discrepancy <= 1e-3
        assert rep.h1_distance <= 1e-3
        assert rep.nodes_match
