"""Semilinear heat flow  d_t u - k*Lap u - |u|^(p-1) u = f  with zero boundary.

Time stepping is IMEX: the stiff diffusion is implicit and solved exactly
by diagonalization in the discrete sine basis, the power nonlinearity and
the forcing are explicit.  One step costs two 2-D sine transforms, and a
sampled sine mode obeys the scalar recurrence u -> u / (1 + dt*k*mu)
to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from io import StringIO

import numpy as np
from scipy.fft import dstn

from .grid import Grid, ScalarField
from .norms import h1_seminorm, lp_norm

BLOWUP_THRESHOLD = 1e8


class BlowUpError(RuntimeError):
    """Raised when the explicit nonlinear term leaves the resolvable range."""

    def __init__(self, t: float, peak: float):
        self.t = t
        self.peak = peak
        super().__init__(f"solution blow-up at t={t:g} (max |u| = {peak:g})")


@dataclass(frozen=True)
class SolverConfig:
    """Time-integration parameters for one run."""

    k: float
    p: float
    dt: float
    horizon: float
    nonlinearity_on: bool = True
    t0: float = 0.0

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("diffusivity k must be positive")
        if self.p <= 1:
            raise ValueError("exponent p must exceed 1")
        if self.dt <= 0 or self.horizon <= 0 or self.dt >= self.horizon:
            raise ValueError("need 0 < dt < horizon")
        if self.t0 < 0:
            raise ValueError("burn-in time t0 must be nonnegative")


@dataclass(frozen=True)
class ForcingSpec:
    """Time profile of the source term.

    kinds:
      zero            f(t) = 0
      constant        f(t) = F
      converging      f(t) = F + exp(-rate*t) * G   (tends to F)
      pair_difference f(t) = exp(-rate*t) * G       (tends to 0)
    """

    kind: str
    F: ScalarField | None = None
    G: ScalarField | None = None
    rate: float = 1.0

    _KINDS = ("zero", "constant", "converging", "pair_difference")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown forcing kind {self.kind!r}")
        if self.kind == "constant" and self.F is None:
            raise ValueError("constant forcing needs F")
        if self.kind == "converging" and (self.F is None or self.G is None):
            raise ValueError("converging forcing needs F and G")
        if self.kind == "pair_difference" and self.G is None:
            raise ValueError("pair_difference forcing needs G")
        if self.kind in ("converging", "pair_difference") and not self.rate > 0:
            raise ValueError("decay rate must be positive")

    @classmethod
    def zero(cls) -> "ForcingSpec":
        return cls("zero")

    @classmethod
    def constant(cls, F: ScalarField) -> "ForcingSpec":
        return cls("constant", F=F)

    @classmethod
    def converging(cls, F: ScalarField, G: ScalarField, rate: float) -> "ForcingSpec":
        return cls("converging", F=F, G=G, rate=rate)

    @classmethod
    def pair_difference(cls, G: ScalarField, rate: float) -> "ForcingSpec":
        return cls("pair_difference", G=G, rate=rate)

    def values_at(self, t: float, grid: Grid) -> np.ndarray:
        if self.kind == "zero":
            return np.zeros(grid.shape)
        if self.kind == "constant":
            return self.F.values
        if self.kind == "converging":
            return self.F.values + np.exp(-self.rate * t) * self.G.values
        return np.exp(-self.rate * t) * self.G.values

    def at(self, t: float, grid: Grid) -> ScalarField:
        return ScalarField(grid, self.values_at(t, grid))

    def difference_l2(self, other: "ForcingSpec", t: float, grid: Grid) -> float:
        d = self.values_at(t, grid) - other.values_at(t, grid)
        return float(np.sqrt(np.sum(d * d) * grid.hx * grid.hy))


class _SineSolver:
    """Cached diagonalization of (I + dt*k*(-Lap_h)) in the sine basis."""

    def __init__(self, grid: Grid, dtk: float):
        j = np.arange(1, grid.nx + 1)
        k = np.arange(1, grid.ny + 1)
        mux = 4.0 / grid.hx**2 * np.sin(j * np.pi / (2 * (grid.nx + 1))) ** 2
        muy = 4.0 / grid.hy**2 * np.sin(k * np.pi / (2 * (grid.ny + 1))) ** 2
        self.mu = mux[:, None] + muy[None, :]
        self.denom = 1.0 + dtk * self.mu
        self.cell = grid.hx * grid.hy

    def solve(self, rhs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return (solution values, solution sine coefficients)."""
        coef = dstn(rhs, type=1, norm="ortho") / self.denom
        return dstn(coef, type=1, norm="ortho"), coef


def apply_b(u: ScalarField, p: float) -> ScalarField:
    """Pointwise nonlinearity -|u|^(p-1) u."""
    if p <= 1:
        raise ValueError("exponent p must exceed 1")
    v = u.values
    return ScalarField(u.grid, -np.abs(v) ** (p - 1) * v)


def _explicit_rhs(values: np.ndarray, f_vals: np.ndarray, cfg: SolverConfig, t: float) -> np.ndarray:
    rhs = values.copy()
    if cfg.nonlinearity_on:
        nl = np.abs(values) ** (cfg.p - 1) * values
        if not np.all(np.isfinite(nl)):
            raise BlowUpError(t, float(np.nanmax(np.abs(values))))
        rhs += cfg.dt * nl
    if f_vals is not None:
        rhs += cfg.dt * f_vals
    return rhs


def step(u: ScalarField, f_now: ScalarField | None, cfg: SolverConfig, t: float = 0.0) -> ScalarField:
    """One IMEX step: explicit nonlinearity/forcing, exact implicit diffusion."""
    if f_now is not None and f_now.grid != u.grid:
        raise ValueError("forcing and state live on different grids")
    peak = float(np.max(np.abs(u.values)))
    if peak > BLOWUP_THRESHOLD:
        raise BlowUpError(t, peak)
    solver = _SineSolver(u.grid, cfg.dt * cfg.k)
    rhs = _explicit_rhs(u.values, None if f_now is None else f_now.values, cfg, t)
    vals, _ = solver.solve(rhs)
    return ScalarField(u.grid, vals)


@dataclass
class Trajectory:
    """Snapshots plus per-step scalar diagnostics of one run."""

    grid: Grid
    cfg: SolverConfig
    forcing: ForcingSpec
    times: np.ndarray                      # snapshot times
    snapshots: list                        # ScalarField at each snapshot time
    diag_times: np.ndarray                 # every step, including t=0
    diag_l2: np.ndarray
    diag_h1: np.ndarray
    diag_da: np.ndarray
    meta: dict = dc_field(default_factory=dict)

    def field_at(self, i: int) -> ScalarField:
        return self.snapshots[i]

    @property
    def final(self) -> ScalarField:
        return self.snapshots[-1]

    def diagnostics_csv(self) -> str:
        buf = StringIO()
        buf.write("t,l2,h1,da\n")
        for row in zip(self.diag_times, self.diag_l2, self.diag_h1, self.diag_da):
            buf.write(",".join(repr(float(v)) for v in row) + "\n")
        return buf.getvalue()

    def snapshots_csv(self) -> str:
        """One row per snapshot: t followed by row-major nodal values."""
        buf = StringIO()
        for t, snap in zip(self.times, self.snapshots):
            flat = ",".join(repr(float(v)) for v in snap.values.ravel())
            buf.write(f"{float(t)!r},{flat}\n")
        return buf.getvalue()


def solve(
    u0: ScalarField,
    forcing: ForcingSpec,
    cfg: SolverConfig,
    sample_every: int = 1,
) -> Trajectory:
    """March the IMEX scheme to the horizon, sampling every sample_every steps."""
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    grid = u0.grid
    n_steps = int(round(cfg.horizon / cfg.dt))
    solver = _SineSolver(grid, cfg.dt * cfg.k)
    cell = grid.hx * grid.hy

    values = u0.values.copy()
    coef = dstn(values, type=1, norm="ortho")

    times = [0.0]
    snapshots = [ScalarField(grid, values.copy())]
    diag_t, diag_l2, diag_h1, diag_da = [], [], [], []

    def record_diag(t, coef):
        # Parseval: the sine transform is orthonormal, and -Lap_h is diagonal
        # with eigenvalues mu, so L2/H1/graph norms are weighted coefficient sums.
        c2 = coef * coef
        diag_t.append(t)
        diag_l2.append(np.sqrt(np.sum(c2) * cell))
        diag_h1.append(np.sqrt(np.sum(solver.mu * c2) * cell))
        diag_da.append(cfg.k * np.sqrt(np.sum(solver.mu**2 * c2) * cell))

    record_diag(0.0, coef)
    for n in range(n_steps):
        t = n * cfg.dt
        peak = float(np.max(np.abs(values)))
        if peak > BLOWUP_THRESHOLD:
            raise BlowUpError(t, peak)
        f_vals = None if forcing.kind == "zero" else forcing.values_at(t, grid)
        rhs = _explicit_rhs(values, f_vals, cfg, t)
        values, coef = solver.solve(rhs)
        t_next = (n + 1) * cfg.dt
        record_diag(t_next, coef)
        if (n + 1) % sample_every == 0 or n + 1 == n_steps:
            if not times or t_next > times[-1]:
                times.append(t_next)
                snapshots.append(ScalarField(grid, values.copy()))

    return Trajectory(
        grid=grid,
        cfg=cfg,
        forcing=forcing,
        times=np.array(times),
        snapshots=snapshots,
        diag_times=np.array(diag_t),
        diag_l2=np.array(diag_l2),
        diag_h1=np.array(diag_h1),
        diag_da=np.array(diag_da),
    )


def smallness_bounds(k: float, p: float, c_hat: float, lambda1: float) -> tuple[float, float]:
    """Data-size bounds under which the flow stays globally regular.

    Returns (f_bound, u0_bound): the squared sup-in-time L2 forcing bound
    (k^2 lambda1 / (4 C^(2p)))^(p/(p-1)) and the squared initial gradient
    bound (same base to the power 1/(p-1)).
    """
    if min(k, p - 1, c_hat, lambda1) <= 0:
        raise ValueError("all inputs must be positive with p > 1")
    base = k**2 * lambda1 / (4.0 * c_hat ** (2 * p))
    return base ** (p / (p - 1)), base ** (1.0 / (p - 1))


def apriori_check(traj: Trajectory, k: float, p: float, c_hat: float, lambda1: float) -> dict:
    """Check sup_t |grad u|^2 against the small-data gradient bound.

    Report-only: callers decide whether the run was inside the smallness
    regime to begin with.
    """
    _, u0_bound = smallness_bounds(k, p, c_hat, lambda1)
    sup_grad_sq = max((h1_seminorm(s) ** 2 for s in traj.snapshots), default=0.0)
    return {
        "sup_grad_sq": sup_grad_sq,
        "u0_bound": u0_bound,
        "ratio": sup_grad_sq / u0_bound,
        "within_bound": sup_grad_sq <= u0_bound,
    }


def estimate_embedding_constant(grid: Grid, family, p: float) -> float:
    """Empirical constant of ||u||_{L^{2p}} <= C |grad u| over a field family."""
    fields = list(family)
    if not fields:
        raise ValueError("family must be nonempty")
    best = 0.0
    for f in fields:
        semi = h1_seminorm(f)
        if semi == 0.0:
            raise ValueError("family contains a constant-zero field")
        best = max(best, lp_norm(f, 2 * p) / semi)
    return best
