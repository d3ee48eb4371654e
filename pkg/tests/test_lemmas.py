import numpy as np
import pytest

from detnodes import ConstantLedger, NodeSet, zero_field
from detnodes.grid import eigen_laplacian
from detnodes.lemmas import (
    check_b_bound,
    check_lemma,
    constants_csv,
    estimate_cb,
    estimate_constants,
    random_band_limited,
    semigroup_bound,
)
from detnodes.nodes import nodes_for_density
from detnodes.norms import da_norm, h1_norm, l2_norm, sup_norm

FOUR_NODES = np.array([[0.25, 0.25], [0.25, 0.75], [0.75, 0.25], [0.75, 0.75]])


class TestRandomBandLimited:
    def test_single_mode_is_eigenfield_multiple(self, unit_grid_64):
        fam = random_band_limited(unit_grid_64, 1, 1, seed=61)
        _, e1 = eigen_laplacian(unit_grid_64, 1, 1)
        f = fam.fields[0]
        mask = np.abs(e1.values) > 1e-12
        ratios = f.values[mask] / e1.values[mask]
        assert np.max(np.abs(ratios - ratios.flat[0])) <= 1e-12 * abs(ratios.flat[0])

    def test_deterministic(self, unit_grid_64):
        a = random_band_limited(unit_grid_64, 8, 5, seed=62)
        b = random_band_limited(unit_grid_64, 8, 5, seed=62)
        for fa, fb in zip(a, b):
            assert np.array_equal(fa.values, fb.values)

    def test_distinct_nonzero_members(self, unit_grid_64):
        fam = random_band_limited(unit_grid_64, 16, 100, seed=63)
        norms = [l2_norm(f) for f in fam]
        assert all(n > 0 for n in norms)
        assert len({round(n, 14) for n in norms}) == len(norms)

    def test_bad_cutoff(self, unit_grid_64):
        with pytest.raises(ValueError):
            random_band_limited(unit_grid_64, 0, 1, seed=0)
        with pytest.raises(ValueError):
            random_band_limited(unit_grid_64, 1000, 1, seed=0)


@pytest.fixture(scope="module")
def ones_ledger():
    return ConstantLedger.all_ones()


class TestCheckLemma:
    def test_zero_field_satisfied(self, unit_grid_128, ones_ledger):
        ns = NodeSet(FOUR_NODES)
        chk = check_lemma(zero_field(unit_grid_128), ns, "sup", ones_ledger)
        assert chk.lhs == 0.0
        assert chk.satisfied

    def test_h1_reference_numbers(self, unit_grid_128, first_eigenfield_128, ones_ledger):
        ns = NodeSet(FOUR_NODES)
        chk = check_lemma(first_eigenfield_128, ns, "h1", ones_ledger)
        d = np.sqrt(0.125)
        expected_rhs = d**-0.25 * 0.5 + d**0.25 * np.pi**2
        assert chk.lhs == pytest.approx(2.277, abs=2e-3)
        assert chk.rhs == pytest.approx(expected_rhs, rel=2e-3)
        assert chk.rhs == pytest.approx(8.26, abs=2e-2)
        assert chk.satisfied

    def test_sup_with_saturating_node(self, unit_grid_128, first_eigenfield_128, ones_ledger):
        ns = NodeSet(np.array([[0.5, 0.5]]))
        chk = check_lemma(first_eigenfield_128, ns, "sup", ones_ledger)
        assert chk.lhs == pytest.approx(1.0, abs=1e-12)
        assert chk.satisfied

    def test_ratio_scale_invariant(self, unit_grid_64, ones_ledger):
        fam = random_band_limited(unit_grid_64, 6, 3, seed=64)
        ns = NodeSet(FOUR_NODES)
        for which in ("sup", "l2", "h1"):
            for f in fam:
                r1 = check_lemma(f, ns, which, ones_ledger)
                r2 = check_lemma(-7.5 * f, ns, which, ones_ledger)
                assert r2.lhs / r2.rhs == pytest.approx(r1.lhs / r1.rhs, rel=1e-10)

    def test_unknown_lemma(self, unit_grid_64, ones_ledger):
        with pytest.raises(ValueError):
            check_lemma(zero_field(unit_grid_64), NodeSet(FOUR_NODES), "h2", ones_ledger)


@pytest.fixture(scope="module")
def estimation_setup(unit_grid_128):
    g = unit_grid_128
    fam = random_band_limited(g, 16, 40, seed=65)
    nodesets = [nodes_for_density(g.domain, g, d) for d in (0.35, 0.18)]
    return g, fam, nodesets


class TestEstimateConstants:
    def test_scale_invariant_family_single_ratio(self, unit_grid_64):
        fam = random_band_limited(unit_grid_64, 4, 1, seed=66)
        f = fam.fields[0]
        from detnodes.lemmas import FamilySpec, FunctionFamily

        multiples = FunctionFamily(FamilySpec(4, 3, 66), [f, 2.0 * f, -3.0 * f])
        ns = NodeSet(FOUR_NODES)
        est = estimate_constants(multiples, [ns])
        from detnodes.nodes import density, eta

        d = density(ns, unit_grid_64)
        expected_c1 = max(0.0, (sup_norm(f) - eta(ns, f)) / (d**0.5 * da_norm(f, 1.0)))
        assert est["c1"] == pytest.approx(expected_c1, rel=1e-12)

    def test_rechecking_same_sweep_zero_violations(self, estimation_setup):
        _, fam, nodesets = estimation_setup
        led = ConstantLedger()
        estimate_constants(fam, nodesets, ledger=led)
        for ns in nodesets:
            for f in fam:
                for which in ("sup", "l2", "h1"):
                    assert check_lemma(f, ns, which, led).satisfied

    def test_growing_family_never_lowers_estimates(self, estimation_setup):
        g, fam, nodesets = estimation_setup
        from detnodes.lemmas import FamilySpec, FunctionFamily

        half = FunctionFamily(FamilySpec(16, 20, 65), fam.fields[:20])
        est_half = estimate_constants(half, nodesets)
        est_full = estimate_constants(fam, nodesets)
        for name in ("c1", "c2", "c3", "c4", "c5"):
            assert est_full[name] >= est_half[name] - 1e-12

    def test_csv_layout(self, estimation_setup):
        _, fam, nodesets = estimation_setup
        est = estimate_constants(fam, nodesets)
        text = constants_csv(est, fam, nodesets)
        lines = text.strip().splitlines()
        assert lines[0] == "lemma,constant,estimate,family,densities"
        assert len(lines) == 6


class TestCheckBBound:
    def test_reference_ratio(self, unit_grid_128, first_eigenfield_128):
        z = zero_field(unit_grid_128)
        ratio = check_b_bound(first_eigenfield_128, z, 3.0)
        expected = (5 / 16) / h1_norm(first_eigenfield_128) ** 3
        assert ratio == pytest.approx(expected, rel=1e-3)
        assert ratio == pytest.approx(0.02647, abs=1e-3)

    def test_pointwise_spot_check(self):
        # |b(2) - b(1)| = 7 <= (3/2)(|2|^2 + |1|^2)|2 - 1| = 7.5 at p = 3
        assert abs((-8.0) - (-1.0)) <= 1.5 * (4 + 1) * 1

    def test_swap_symmetry(self, unit_grid_64):
        fam = random_band_limited(unit_grid_64, 5, 2, seed=67)
        u, v = fam.fields
        assert check_b_bound(u, v, 3.0) == check_b_bound(v, u, 3.0)

    def test_joint_scaling_identity(self, unit_grid_64):
        fam = random_band_limited(unit_grid_64, 5, 2, seed=68)
        u, v = fam.fields
        p = 3.0
        c = 2.5
        base = check_b_bound(u, v, p)
        scaled = check_b_bound(c * u, c * v, p)
        # numerator scales as c^p, denominator as c^(p-1) * c: ratio invariant
        assert scaled == pytest.approx(base, rel=1e-10)

    def test_equal_fields_rejected(self, unit_grid_64):
        fam = random_band_limited(unit_grid_64, 5, 1, seed=69)
        with pytest.raises(ValueError):
            check_b_bound(fam.fields[0], fam.fields[0], 3.0)

    def test_estimate_cb_positive(self, unit_grid_64):
        fam = random_band_limited(unit_grid_64, 8, 10, seed=70)
        assert estimate_cb(fam, 3.0) > 0


class TestSemigroupBound:
    def test_alpha_zero_first_mode_dominates(self, unit_grid_64):
        val, _, ok = semigroup_bound(0.0, 0.0, 0.1, unit_grid_64, mode_budget=100)
        assert val == pytest.approx(np.exp(-2 * np.pi**2 * 0.1), rel=1e-12)
        assert val == pytest.approx(0.138911, abs=1e-5)
        assert ok

    def test_alpha_half_reference(self, unit_grid_64):
        val, c_emp, ok = semigroup_bound(0.5, 0.0, 0.1, unit_grid_64, mode_budget=100)
        assert val == pytest.approx(0.6173, abs=1e-3)
        assert np.isfinite(c_emp)
        assert ok

    def test_monotone_in_t_at_alpha_zero(self, unit_grid_64):
        vals = [
            semigroup_bound(0.0, 0.0, t, unit_grid_64, mode_budget=50)[0]
            for t in np.linspace(0.01, 2.0, 25)
        ]
        assert all(b <= a for a, b in zip(vals, vals[1:]))

    def test_lam_above_lambda1_rejected(self, unit_grid_64):
        with pytest.raises(ValueError):
            semigroup_bound(0.0, 100.0, 0.1, unit_grid_64)

    def test_sweep_constant_bounds_requested_time(self, unit_grid_64):
        # existence of the decay constant: value * t^alpha stays bounded by
        # sup_x sqrt(x) e^(-x) = sqrt(1/2) e^(-1/2) ~ 0.4289 over the sweep
        vals = []
        for t in np.geomspace(0.01, 10, 40):
            v, _, _ = semigroup_bound(0.5, 0.0, t, unit_grid_64, mode_budget=60)
            vals.append(v * t**0.5)
        assert 0.0 < max(vals) <= np.sqrt(0.5) * np.exp(-0.5) + 1e-12
