"""Acceptance suite: one test per headline criterion, one printed line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the pass lines; the
shared nonlinear pair run (the most expensive fixture) is reused by the
energy, Gronwall and end-to-end criteria.
"""

import numpy as np
import pytest

from detnodes import (
    CoefficientField,
    ConstantLedger,
    Domain,
    ForcingSpec,
    NodeSet,
    ScalarField,
    SolverConfig,
    eigen_laplacian,
    holder_quotient,
    l2_norm,
    make_grid,
    solve,
)
from detnodes.elliptic import find_nontrivial, newton_solve, node_coincidence_test
from detnodes.energy import (
    build_trace,
    check_energy_inequality,
    check_gronwall,
    delta1,
    delta3,
    tail_eps,
)
from detnodes.experiments import manufactured_forcing
from detnodes.heat import estimate_embedding_constant, smallness_bounds
from detnodes.lemmas import (
    check_lemma,
    estimate_cb,
    estimate_constants,
    random_band_limited,
    semigroup_bound,
)
from detnodes.nodes import density, eta, nodes_for_density
from detnodes.norms import (
    equivalence_constants,
    h1_norm,
    h1_seminorm,
    poincare_constant,
)

TRAIN_SEED = 100
FRESH_SEED = 5
DENSITIES = (0.35, 0.18, 0.09)


def report(name: str, detail: str = ""):
    suffix = f" ({detail})" if detail else ""
    print(f"\nACCEPTANCE {name}: PASS{suffix}")


@pytest.fixture(scope="module")
def grid96():
    return make_grid(Domain(1.0, 1.0), 95, 95)


@pytest.fixture(scope="module")
def grid128():
    return make_grid(Domain(1.0, 1.0), 127, 127)


@pytest.fixture(scope="module")
def grid256():
    return make_grid(Domain(1.0, 1.0), 255, 255)


@pytest.fixture(scope="module")
def estimated_ledger_96(grid96):
    led = ConstantLedger()
    fam = random_band_limited(grid96, 16, 100, TRAIN_SEED)
    nodesets = [nodes_for_density(grid96.domain, grid96, d) for d in DENSITIES]
    for name, val in estimate_constants(fam, nodesets).items():
        led.set(name, max(val, 1e-12), "estimated")
    led.set("c_b", estimate_cb(fam, 3.0), "estimated")
    a3, a4 = equivalence_constants(CoefficientField.identity(), fam.fields)
    led.set("a3", a3, "estimated")
    led.set("a4", a4, "estimated")
    led.set("a1", 1.0, "assumed")
    led.set("a2", 1.0, "assumed")
    return led, fam


@pytest.fixture(scope="module")
def nonlinear_pair(grid96, estimated_ledger_96):
    """Small-data pair with the diffusivity tuned so the true decay rate of
    the energy distance sits between lambda and 2*lambda (about 1.5x)."""
    led, _ = estimated_ledger_96
    k = 0.038
    cfg = SolverConfig(k=k, p=3.0, dt=2e-3, horizon=20.0, t0=1.0)
    _, e1 = eigen_laplacian(grid96, 1, 1)
    _, e21 = eigen_laplacian(grid96, 2, 1)
    u0 = ScalarField(grid96, 0.15 * e1.values + 0.02 * e21.values)
    v0 = ScalarField(grid96, -0.15 * e1.values + 0.02 * e21.values)
    u_traj = solve(u0, ForcingSpec.zero(), cfg, sample_every=25)
    v_traj = solve(v0, ForcingSpec.zero(), cfg, sample_every=25)
    ns = nodes_for_density(grid96.domain, grid96, 0.09)
    trace = build_trace(u_traj, v_traj, ns, CoefficientField.identity(), k, led, "thm3")
    return dict(cfg=cfg, u0=u0, v0=v0, u=u_traj, v=v_traj, ns=ns, trace=trace, ledger=led)


def test_eigenmode_oracle():
    grid = make_grid(Domain(1.0, 1.0), 63, 63)
    worst = 0.0
    runs = 0
    for j, k_mode in [(1, 1), (2, 1), (3, 3), (5, 2), (7, 7)]:
        mu_h, s = eigen_laplacian(grid, j, k_mode, discrete=True)
        for dt, k in [(1e-3, 1.0), (5e-3, 0.25), (2e-3, 2.0)]:
            # keep the total decay above the rounding floor: comparing a
            # trajectory that has shrunk by 30+ digits only measures noise
            steps = max(3, min(50, int(4.0 / np.log1p(dt * k * mu_h))))
            cfg = SolverConfig(k=k, p=3.0, dt=dt, horizon=steps * dt, nonlinearity_on=False)
            traj = solve(s, ForcingSpec.zero(), cfg, sample_every=steps)
            n = len(traj.diag_times) - 1
            expected = l2_norm(s) * (1 + dt * k * mu_h) ** -n
            rel = abs(traj.diag_l2[-1] - expected) / expected
            worst = max(worst, rel)
            runs += 1
            assert rel <= 1e-12
    report("eigenmode-oracle", f"worst relative error {worst:.2e} over {runs} runs")


def test_manufactured_stationary_and_order(grid128, grid256):
    errs = {}
    for grid in (grid128, grid256):
        fbar, u1 = manufactured_forcing(grid, 1.0, 3.0)
        res = newton_solve(0.9 * u1, fbar, 1.0, 3.0, tol=1e-10)
        assert res.converged
        errs[grid.nx] = h1_norm(res.field - u1)
    assert errs[255] <= 1e-3
    order = np.log2(errs[127] / errs[255])
    assert order >= 1.8
    report(
        "manufactured-stationary",
        f"H1 error {errs[255]:.2e} at 256^2, observed order {order:.2f}",
    )


def test_lemma_suite_generalizes(grid128):
    nodesets = [nodes_for_density(grid128.domain, grid128, d) for d in DENSITIES]
    train = random_band_limited(grid128, 16, 100, TRAIN_SEED)
    led = ConstantLedger()
    est = estimate_constants(train, nodesets, ledger=led)

    est2 = estimate_constants(random_band_limited(grid128, 16, 200, TRAIN_SEED), nodesets)
    for name, val in est.items():
        if val > 0:
            assert abs(est2[name] / val - 1) <= 0.10, f"{name} drifted on doubling"

    fresh = random_band_limited(grid128, 16, 100, FRESH_SEED)
    violations = 0
    for ns in nodesets:
        for f in fresh:
            for which in ("sup", "l2", "h1"):
                if not check_lemma(f, ns, which, led).satisfied:
                    violations += 1
    assert violations == 0
    report(
        "lemma-suite",
        f"0 violations on {3 * len(nodesets) * len(fresh)} fresh checks; "
        f"doubling drift within 10%",
    )


def test_smallness_hypothesis_of_pair_run(grid96, estimated_ledger_96, nonlinear_pair):
    # the pair experiment must actually sit in the small-data regime
    _, fam = estimated_ledger_96
    c_hat = estimate_embedding_constant(grid96, fam.fields, 3.0)
    lam1 = 2 * np.pi**2
    f_bound, u0_bound = smallness_bounds(nonlinear_pair["cfg"].k, 3.0, c_hat, lam1)
    for field in (nonlinear_pair["u0"], nonlinear_pair["v0"]):
        assert h1_seminorm(field) ** 2 <= u0_bound
    assert 0.0 <= f_bound  # zero forcing trivially below the bound
    report(
        "smallness-hypothesis",
        f"grad^2 data {h1_seminorm(nonlinear_pair['u0'])**2:.3f} <= bound {u0_bound:.3f}",
    )


def test_energy_inequality_with_negative_control(nonlinear_pair):
    trace = nonlinear_pair["trace"]
    honest = check_energy_inequality(trace, tol=0.05)
    assert honest.ok, f"violations at indices {honest.violations}"
    control = check_energy_inequality(trace, tol=0.05, lam=2 * trace.lam)
    assert len(control.violations) >= 1
    report(
        "energy-inequality",
        f"0 violations at lambda={trace.lam:.3f}; "
        f"{len(control.violations)} violations with lambda doubled",
    )


def test_gronwall_linear_exact_and_nonlinear(grid96, nonlinear_pair):
    # linear pair: negligible node coefficient makes the envelope a pure
    # exponential comparison, tight to rounding
    led = ConstantLedger.all_ones()
    led.set("c4", 1e-12, "assumed")
    k = 0.038
    cfg = SolverConfig(k=k, p=3.0, dt=2e-3, horizon=5.0, nonlinearity_on=False, t0=0.5)
    _, e1 = eigen_laplacian(grid96, 1, 1)
    u0 = ScalarField(grid96, 0.15 * e1.values)
    v0 = ScalarField(grid96, -0.15 * e1.values)
    ut = solve(u0, ForcingSpec.zero(), cfg, sample_every=25)
    vt = solve(v0, ForcingSpec.zero(), cfg, sample_every=25)
    ns = nonlinear_pair["ns"]
    linear_trace = build_trace(ut, vt, ns, CoefficientField.identity(), k, led, "thm3")
    lin = check_gronwall(linear_trace, tail_eps(linear_trace, cfg.t0), tol=1e-6)
    assert lin.passed

    trace = nonlinear_pair["trace"]
    eps = tail_eps(trace, t_start=max(trace.constants["t0"], trace.times[-1] * 0.5))
    non = check_gronwall(trace, eps, tol=0.05)
    assert non.passed
    report(
        "gronwall-envelope",
        f"linear worst ratio {lin.worst_ratio:.3f} (tol 1e-6), "
        f"nonlinear worst ratio {non.worst_ratio:.3f} (tol 0.05)",
    )


def _interior_node_sets(seed=12345):
    """Offset lattices (plus jittered copies) with covering radius <= 0.35,
    every node strictly inside the square."""
    rng = np.random.default_rng(seed)
    sets = []
    for m in (3, 4, 5, 6):
        base = np.array([[(i + 0.5) / m, (j + 0.5) / m] for i in range(m) for j in range(m)])
        sets.append(NodeSet(base))
        if m <= 4:
            for _ in range(3):
                jitter = rng.uniform(-0.02, 0.02, size=base.shape)
                sets.append(NodeSet(np.clip(base + jitter, 0.03, 0.97)))
    return sets


def test_stationary_contrapositive_and_same_root(grid128):
    nontrivial = find_nontrivial(1.0, 3.0, grid128, tol=1e-8)
    trivial = ScalarField(grid128, np.zeros(grid128.shape))
    checked = 0
    for ns in _interior_node_sets():
        d = density(ns, grid128)
        assert d <= 0.35 + 1e-9
        rep = node_coincidence_test(trivial, nontrivial.field, ns, match_tol=0.1)
        assert rep.max_node_discrepancy > 0.1
        checked += 1

    fbar, u1 = manufactured_forcing(grid128, 1.0, 3.0)
    ra = newton_solve(0.9 * u1, fbar, 1.0, 3.0, tol=1e-9)
    rb = newton_solve(1.1 * u1, fbar, 1.0, 3.0, tol=1e-9)
    same = node_coincidence_test(ra.field, rb.field, _interior_node_sets()[1], match_tol=1e-3)
    assert same.nodes_match
    assert same.h1_distance <= 1e-3
    report(
        "stationary-contrapositive",
        f"{checked} interior node sets all see gap > 0.1; "
        f"same-root H1 gap {same.h1_distance:.2e}",
    )


def test_pair_convergence_end_to_end(nonlinear_pair):
    trace = nonlinear_pair["trace"]
    u_final = nonlinear_pair["u"].final
    v_final = nonlinear_pair["v"].final
    w = u_final - v_final

    eta_final = eta(nonlinear_pair["ns"], w)
    h1_final = h1_norm(w)
    holder_q = {mu: holder_quotient(w, mu, budget=200_000, seed=1) for mu in (0.25, 0.49)}

    assert eta_final <= 1e-4
    assert h1_final <= 1e-3
    assert all(q <= 1e-2 for q in holder_q.values())
    report(
        "pair-convergence-e2e",
        f"node gap {eta_final:.1e}, H1 gap {h1_final:.1e}, "
        f"Hoelder(0.25/0.49) {holder_q[0.25]:.1e}/{holder_q[0.49]:.1e} at t=20",
    )


def test_threshold_hand_evaluations():
    assert delta1(1.0, 1.0, 1.0, 2.0) == pytest.approx(0.0625, abs=1e-12)
    assert delta1(1.5, 2.0, 1.0, 3.0) == pytest.approx(6.0**-4, abs=1e-12)
    assert delta3(1.0, 1.0, 1.0, 1.0, 2.0) == pytest.approx(1 / 256, abs=1e-12)
    report(
        "thresholds",
        "delta1=0.0625, delta1'=6^-4, delta3=1/256 reproduced to 1e-12",
    )


def test_semigroup_decay_constant(grid96):
    val, c_emp, ok = semigroup_bound(0.5, 0.0, 0.1, grid96, mode_budget=100)
    assert val == pytest.approx(0.6173, abs=1e-3)
    assert ok
    sweep_vals = [
        semigroup_bound(0.5, 0.0, t, grid96, mode_budget=100)[0] * t**0.5
        for t in np.geomspace(0.01, 10.0, 60)
    ]
    bound = np.sqrt(0.5) * np.exp(-0.5)
    assert max(sweep_vals) <= bound + 1e-12
    report(
        "semigroup-decay",
        f"sup value {val:.4f} at t=0.1; value*sqrt(t) <= {max(sweep_vals):.4f} over sweep",
    )


def test_poincare_saturation(grid128):
    mu_h, e1 = eigen_laplacian(grid128, 1, 1, discrete=True)
    ratio = l2_norm(e1) / h1_seminorm(e1)
    assert ratio == pytest.approx(1 / np.sqrt(mu_h), rel=1e-10)
    assert ratio == pytest.approx(poincare_constant(grid128), rel=1e-10)
    report("poincare-saturation", f"ratio matches 1/sqrt(mu) to {abs(ratio*np.sqrt(mu_h)-1):.1e}")
