"""Energy bookkeeping for pairs of trajectories.

For two evolutions u, v the squared energy distance ||u-v||_a^2 obeys a
one-sided differential inequality

    d_t ||u-v||_a^2 + lambda ||u-v||_a^2 <= h(t),

where lambda is built from the operator equivalence constants, the
nonlinearity constant, the interpolation constants, the trajectory bound M
and the node density, and h(t) collects the node observation maximum and
the forcing mismatch.  This module computes the density thresholds under
which lambda is positive, builds the discrete trace of every series, and
checks the inequality and its Gronwall envelope sample by sample.

Two variants are carried throughout: 'thm2' compares a trajectory with its
own time shift (single solution tracking a limit), 'thm3' compares two
different solutions; they differ in the factor in front of the node and
nonlinearity terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from io import StringIO

import numpy as np

from .heat import Trajectory
from .nodes import NodeSet, density, eta
from .norms import CoefficientField, ConstantLedger, a_norm, da_norm

VARIANTS = ("thm2", "thm3")


def _inv_fourth(base: float) -> float:
    """base^(-4), diverging to +inf as the base underflows to 0."""
    if base <= 0:
        return float("inf")
    try:
        return float(base**-4)
    except OverflowError:
        return float("inf")


def delta1(c_b: float, c5: float, m_fbar: float, p: float) -> float:
    """Density threshold (2 c_b c5 M^(p-1))^(-4) for stationary uniqueness."""
    _check_positive(c_b=c_b, c5=c5, m_fbar=m_fbar)
    if p <= 1:
        raise ValueError("exponent p must exceed 1")
    return _inv_fourth(2.0 * c_b * c5 * m_fbar ** (p - 1))


def delta2(c_b: float, c5: float, m_f_u0_t0: float, p: float, delta1_at_finf: float) -> float:
    """Threshold for limit tracking: min of the stationary threshold at the
    limiting forcing and (4 c_b c5 M^(p-1))^(-4)."""
    _check_positive(c_b=c_b, c5=c5, m_f_u0_t0=m_f_u0_t0, delta1_at_finf=delta1_at_finf)
    if p <= 1:
        raise ValueError("exponent p must exceed 1")
    own = _inv_fourth(4.0 * c_b * c5 * m_f_u0_t0 ** (p - 1))
    return float(min(delta1_at_finf, own))


def delta3(c_b: float, c5: float, m_f: float, m_g: float, p: float) -> float:
    """Threshold (2 c_b c5 (M_f^(p-1) + M_g^(p-1)))^(-4) for pair convergence."""
    _check_positive(c_b=c_b, c5=c5, m_f=m_f, m_g=m_g)
    if p <= 1:
        raise ValueError("exponent p must exceed 1")
    m_sum = m_f ** (p - 1) + m_g ** (p - 1)
    return _inv_fourth(2.0 * c_b * c5 * m_sum)


def lambda_rate(
    a1: float,
    a4: float,
    c_b: float,
    c5: float,
    m: float,
    p: float,
    d_n: float,
    variant: str,
) -> float:
    """Decay rate (a1^2/a4^2) * (1 - factor * c_b * c5 * m_term * d_n^(1/4)).

    variant 'thm2': factor 4 with m_term = M^(p-1) for the self-comparison;
    variant 'thm3': factor 2 with m_term = M (already the summed power).
    Raises if the node density is too large for the bracket to be positive.
    """
    _check_variant(variant)
    _check_positive(a1=a1, a4=a4, c_b=c_b, c5=c5, d_n=d_n)
    if m < 0:
        raise ValueError("trajectory bound m must be nonnegative")
    if variant == "thm2":
        bracket = 1.0 - 4.0 * c_b * c5 * m ** (p - 1) * d_n**0.25
        limit_name = "limit-tracking density threshold"
    else:
        bracket = 1.0 - 2.0 * c_b * c5 * m * d_n**0.25
        limit_name = "pair-convergence density threshold"
    if bracket <= 0:
        raise ValueError(
            f"node density {d_n:g} violates the {limit_name}: bracket = {bracket:g}"
        )
    return float((a1 / a4) ** 2 * bracket)


def h_function(
    c_b: float,
    c4: float,
    m: float,
    p: float,
    d_n: float,
    eta_val: float,
    fg_sq: float,
    variant: str,
) -> float:
    """Right-hand side h(t) of the energy inequality.

    'thm2': 8 c_b^2 c4^2 M^(2(p-1)) d^(-1/2) eta^2 + 2 |f-g|^2
    'thm3': 2 c_b^2 c4^2 M^2        d^(-1/2) eta^2 + 2 |f-g|^2
    (for 'thm3', m is the summed power M_f^(p-1) + M_g^(p-1)).
    """
    _check_variant(variant)
    if d_n <= 0:
        raise ValueError("node density must be positive")
    if variant == "thm2":
        coeff = 8.0 * c_b**2 * c4**2 * m ** (2 * (p - 1))
    else:
        coeff = 2.0 * c_b**2 * c4**2 * m**2
    return float(coeff * d_n**-0.5 * eta_val**2 + 2.0 * fg_sq)


def gronwall_bound(y0: float, lam: float, eps: float, t: float) -> float:
    """Envelope y0 e^(-lam t) + (eps/lam)(1 - e^(-lam t)) of y' + lam y <= eps."""
    if lam <= 0:
        raise ValueError("decay rate must be positive")
    if t < 0:
        raise ValueError("time must be nonnegative")
    decay = np.exp(-lam * t)
    return float(y0 * decay + eps / lam * (1.0 - decay))


@dataclass
class EnergyTrace:
    """All series of the discrete energy inequality for one trajectory pair."""

    times: np.ndarray
    w_a_sq: np.ndarray
    w_da_sq: np.ndarray
    eta_series: np.ndarray
    fg_sq: np.ndarray
    h_series: np.ndarray
    residual_series: np.ndarray
    lam: float
    variant: str
    d_n: float
    m_used: float
    constants: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        n = len(self.times)
        for name in ("w_a_sq", "w_da_sq", "eta_series", "fg_sq", "h_series", "residual_series"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"series {name} has wrong length")
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    def to_csv(self) -> str:
        buf = StringIO()
        buf.write("t,w_a_sq,w_da_sq,eta,fg_sq,h,residual\n")
        rows = zip(
            self.times, self.w_a_sq, self.w_da_sq, self.eta_series,
            self.fg_sq, self.h_series, self.residual_series,
        )
        for row in rows:
            buf.write(",".join(repr(float(v)) for v in row) + "\n")
        return buf.getvalue()


@dataclass
class ThresholdReport:
    delta: float
    variant: str
    inputs: dict

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("threshold must be positive")


def estimate_M(traj: Trajectory, k: float, t0: float) -> float:
    """Sup of the graph norm k*||Lap u(t)|| over snapshots with t >= t0."""
    if t0 > traj.times[-1]:
        raise ValueError(f"t0={t0:g} beyond the trajectory horizon {traj.times[-1]:g}")
    sel = traj.times >= t0
    return float(max(da_norm(traj.snapshots[i], k) for i in np.nonzero(sel)[0]))


def build_trace(
    u_traj: Trajectory,
    v_traj: Trajectory,
    ns: NodeSet,
    a: CoefficientField,
    k: float,
    ledger: ConstantLedger,
    variant: str,
    t0: float | None = None,
) -> EnergyTrace:
    """Assemble every series of the energy inequality for a trajectory pair.

    The trajectory bound M is estimated from the trajectories themselves
    (sup of the graph norm past the burn-in t0); the equivalence and
    interpolation constants come from the ledger.  The discrete residual is
      (w_a_sq[i+1] - w_a_sq[i]) / dt + lam * w_a_sq[i] - h[i]
    with a zero placeholder at the final index.
    """
    _check_variant(variant)
    if u_traj.grid != v_traj.grid:
        raise ValueError("trajectories live on different grids")
    if len(u_traj.times) != len(v_traj.times) or not np.allclose(u_traj.times, v_traj.times):
        raise ValueError("trajectories have mismatched sampling")
    grid = u_traj.grid
    if t0 is None:
        t0 = u_traj.cfg.t0
    a1, a4, c_b, c4, c5 = ledger.require("a1", "a4", "c_b", "c4", "c5")
    p = u_traj.cfg.p

    d_n = density(ns, grid)
    m_f = estimate_M(u_traj, k, t0)
    m_g = estimate_M(v_traj, k, t0)
    if variant == "thm2":
        m_used = max(m_f, m_g)
    else:
        m_used = m_f ** (p - 1) + m_g ** (p - 1)
    lam = lambda_rate(a1, a4, c_b, c5, m_used, p, d_n, variant)

    times = np.asarray(u_traj.times, dtype=float)
    n = len(times)
    w_a_sq = np.empty(n)
    w_da_sq = np.empty(n)
    eta_series = np.empty(n)
    fg_sq = np.empty(n)
    for i in range(n):
        w = u_traj.snapshots[i] - v_traj.snapshots[i]
        w_a_sq[i] = a_norm(w, a) ** 2
        w_da_sq[i] = da_norm(w, k) ** 2
        eta_series[i] = eta(ns, w)
        fg_sq[i] = u_traj.forcing.difference_l2(v_traj.forcing, times[i], grid) ** 2

    h_series = np.array([
        h_function(c_b, c4, m_used, p, d_n, eta_series[i], fg_sq[i], variant)
        for i in range(n)
    ])
    residual_series = np.zeros(n)
    if n > 1:
        dt = np.diff(times)
        residual_series[:-1] = np.diff(w_a_sq) / dt + lam * w_a_sq[:-1] - h_series[:-1]

    return EnergyTrace(
        times=times,
        w_a_sq=w_a_sq,
        w_da_sq=w_da_sq,
        eta_series=eta_series,
        fg_sq=fg_sq,
        h_series=h_series,
        residual_series=residual_series,
        lam=lam,
        variant=variant,
        d_n=d_n,
        m_used=m_used,
        constants={
            "a1": a1, "a4": a4, "c_b": c_b, "c4": c4, "c5": c5,
            "m_f": m_f, "m_g": m_g, "p": p, "t0": t0,
        },
    )


@dataclass
class InequalityReport:
    violations: list
    worst_excess: float
    tol: float

    @property
    def ok(self) -> bool:
        return not self.violations


def check_energy_inequality(trace: EnergyTrace, tol: float = 0.05, lam: float | None = None) -> InequalityReport:
    """List sample indices where the discrete inequality residual exceeds
    tol * (1 + |h|).  Passing lam overrides the trace rate (negative
    controls deliberately inflate it)."""
    if lam is None:
        residual = trace.residual_series
    else:
        residual = np.zeros_like(trace.residual_series)
        if len(trace.times) > 1:
            dt = np.diff(trace.times)
            residual[:-1] = (
                np.diff(trace.w_a_sq) / dt + lam * trace.w_a_sq[:-1] - trace.h_series[:-1]
            )
    allowed = tol * (1.0 + np.abs(trace.h_series))
    bad = [i for i in range(len(trace.times) - 1) if residual[i] > allowed[i]]
    worst = float(np.max(residual[:-1] - allowed[:-1])) if len(trace.times) > 1 else 0.0
    return InequalityReport(violations=bad, worst_excess=worst, tol=tol)


@dataclass
class GronwallReport:
    passed: bool
    start_index: int
    eps: float
    worst_ratio: float
    tol: float


def check_gronwall(trace: EnergyTrace, eps_estimate: float, tol: float = 0.05) -> GronwallReport:
    """Verify the trace against its Gronwall envelope.

    The envelope starts at the first sample from which h stays at or below
    eps_estimate; every later sample must satisfy
      w_a_sq[i] <= envelope(w_a_sq[i0], lam, eps, t_i - t_i0) * (1 + tol).
    """
    if trace.lam <= 0:
        raise ValueError("trace has no positive decay rate")
    if eps_estimate < 0:
        raise ValueError("eps must be nonnegative")
    n = len(trace.times)
    below = trace.h_series <= eps_estimate + 1e-300
    i0 = n - 1
    for i in range(n):
        if np.all(below[i:]):
            i0 = i
            break
    worst = 0.0
    passed = True
    y0 = trace.w_a_sq[i0]
    for i in range(i0, n):
        env = gronwall_bound(y0, trace.lam, eps_estimate, trace.times[i] - trace.times[i0])
        if env > 0:
            worst = max(worst, trace.w_a_sq[i] / env)
        if trace.w_a_sq[i] > env * (1.0 + tol) + 1e-300:
            passed = False
    return GronwallReport(passed=passed, start_index=i0, eps=eps_estimate, worst_ratio=worst, tol=tol)


def tail_eps(trace: EnergyTrace, t_start: float) -> float:
    """Max of h over samples with t >= t_start (the measured epsilon)."""
    sel = trace.times >= t_start
    if not np.any(sel):
        raise ValueError("no samples past t_start")
    return float(np.max(trace.h_series[sel]))


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


def _check_positive(**kwargs) -> None:
    for name, val in kwargs.items():
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val}")
