"""Discrete norms on interior-lattice fields.

L2 and sup are plain lattice reductions.  The H1 seminorm uses forward
differences on the faces of the closed lattice, which makes the discrete
Green identity  |grad f|^2 = (-Lap f, f)  hold to rounding, so eigenfields
saturate the Poincare bound exactly.  The energy norm ||.||_a is the same
face-based quadratic form weighted by a symmetric coefficient matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .grid import Grid, ScalarField, discrete_eigenvalue, laplacian


def l2_norm(f: ScalarField) -> float:
    g = f.grid
    return float(np.sqrt(np.sum(f.values**2) * g.hx * g.hy))


def l2_inner(f: ScalarField, g: ScalarField) -> float:
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    return float(np.sum(f.values * g.values) * f.grid.hx * f.grid.hy)


def lp_norm(f: ScalarField, q: float) -> float:
    """Discrete L^q norm, q >= 1."""
    g = f.grid
    return float((np.sum(np.abs(f.values) ** q) * g.hx * g.hy) ** (1.0 / q))


def sup_norm(f: ScalarField) -> float:
    """Max of |f| over the closed lattice; the boundary ring contributes 0."""
    return float(np.max(np.abs(f.values))) if f.values.size else 0.0


def _face_gradients(f: ScalarField) -> tuple[np.ndarray, np.ndarray]:
    """Forward differences on x-faces (nx+1, ny) and y-faces (nx, ny+1).

    Zero boundary values are included, so the one-sided boundary cells
    contribute their full jump.
    """
    g = f.grid
    px = np.zeros((g.nx + 2, g.ny))
    px[1:-1, :] = f.values
    py = np.zeros((g.nx, g.ny + 2))
    py[:, 1:-1] = f.values
    dx = np.diff(px, axis=0) / g.hx
    dy = np.diff(py, axis=1) / g.hy
    return dx, dy


def h1_seminorm(f: ScalarField) -> float:
    g = f.grid
    dx, dy = _face_gradients(f)
    return float(np.sqrt((np.sum(dx**2) + np.sum(dy**2)) * g.hx * g.hy))


def h1_norm(f: ScalarField) -> float:
    return float(np.hypot(l2_norm(f), h1_seminorm(f)))


def da_norm(f: ScalarField, k: float) -> float:
    """Graph norm k*||Lap_h f||_2 of the diffusion operator."""
    if k <= 0:
        raise ValueError("diffusivity k must be positive")
    return k * l2_norm(laplacian(f))


def holder_quotient(f: ScalarField, mu: float, budget: int = 1_000_000, seed: int = 0) -> float:
    """Sampled Hoelder quotient sup |f(x)-f(y)| / |x-y|^mu over lattice pairs.

    Evaluates all pairs joining the extremal points of f (max and min over
    the closed lattice) to every lattice point, plus `budget` seeded random
    pairs.  A lower bound of the true seminorm that grows with the budget.
    """
    if not (0 < mu <= 1):
        raise ValueError(f"exponent mu must be in (0, 1], got {mu}")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    g = f.grid
    pts = g.closure_lattice()
    padded = np.zeros((g.nx + 2, g.ny + 2))
    padded[1:-1, 1:-1] = f.values
    vals = padded.ravel()
    n = len(vals)

    def quotients(ia: np.ndarray, ib: np.ndarray) -> float:
        keep = ia != ib
        ia, ib = ia[keep], ib[keep]
        if len(ia) == 0:
            return 0.0
        dv = np.abs(vals[ia] - vals[ib])
        dist = np.linalg.norm(pts[ia] - pts[ib], axis=1)
        return float(np.max(dv / dist**mu))

    best = 0.0
    extremes = [int(np.argmax(vals)), int(np.argmin(vals))]
    everything = np.arange(n)
    for e in extremes:
        best = max(best, quotients(np.full(n, e), everything))

    # fixed-size draws so a larger budget evaluates a superset of the pairs
    # of a smaller one (same seed), making the result monotone in budget
    rng = np.random.default_rng(seed)
    chunk = 65536
    remaining = int(budget)
    while remaining > 0:
        ia = rng.integers(0, n, chunk)
        ib = rng.integers(0, n, chunk)
        m = min(remaining, chunk)
        best = max(best, quotients(ia[:m], ib[:m]))
        remaining -= m
    return best


class CoefficientField:
    """Symmetric 2x2 coefficient matrix a_ij over the closed domain.

    Each entry is a constant, a callable (x, y) -> values, or an array of
    samples on the interior lattice.  Uniform ellipticity (smallest local
    eigenvalue bounded away from 0) is checked where the entries are used.
    """

    def __init__(self, a11=1.0, a22=1.0, a12=0.0):
        self.a11 = a11
        self.a22 = a22
        self.a12 = a12

    @classmethod
    def identity(cls) -> "CoefficientField":
        return cls(1.0, 1.0, 0.0)

    @classmethod
    def isotropic(cls, c: float) -> "CoefficientField":
        return cls(c, c, 0.0)

    def _entry_at(self, entry, X: np.ndarray, Y: np.ndarray, grid: Grid) -> np.ndarray:
        if callable(entry):
            return np.broadcast_to(np.asarray(entry(X, Y), dtype=float), X.shape).copy()
        arr = np.asarray(entry, dtype=float)
        if arr.ndim == 0:
            return np.full(X.shape, float(arr))
        if arr.shape != grid.shape:
            raise ValueError("per-grid-point coefficient has wrong shape")
        # replicate interior samples to the closed lattice, then bin to targets
        padded = np.pad(arr, 1, mode="edge")
        ix = np.clip(np.rint(X / grid.hx).astype(int), 0, grid.nx + 1)
        iy = np.clip(np.rint(Y / grid.hy).astype(int), 0, grid.ny + 1)
        return padded[ix, iy]

    def at(self, X: np.ndarray, Y: np.ndarray, grid: Grid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (
            self._entry_at(self.a11, X, Y, grid),
            self._entry_at(self.a22, X, Y, grid),
            self._entry_at(self.a12, X, Y, grid),
        )

    def check_ellipticity(self, grid: Grid, floor: float = 1e-12) -> float:
        """Smallest local eigenvalue over cell centers; raises if <= floor."""
        xc = np.arange(0, grid.nx + 1) * grid.hx + grid.hx / 2
        yc = np.arange(0, grid.ny + 1) * grid.hy + grid.hy / 2
        X, Y = np.meshgrid(xc, yc, indexing="ij")
        a11, a22, a12 = self.at(X, Y, grid)
        lam_min = (a11 + a22) / 2 - np.sqrt(((a11 - a22) / 2) ** 2 + a12**2)
        worst = float(np.min(lam_min))
        if worst <= floor:
            raise ValueError(f"coefficient matrix not uniformly elliptic (min eigenvalue {worst:g})")
        return worst


def a_norm(f: ScalarField, a: CoefficientField) -> float:
    """Energy norm (sum_ij a_ij d_i f d_j f)^(1/2) on the face stencil.

    Diagonal terms use the face gradients directly (identity coefficients
    reproduce h1_seminorm exactly); the cross term pairs cell-centered
    averages of the two staggered gradients.
    """
    g = f.grid
    a.check_ellipticity(g)
    dx, dy = _face_gradients(f)

    xf = np.arange(0, g.nx + 1) * g.hx + g.hx / 2  # x-face centers
    yi = g.ys()
    X1, Y1 = np.meshgrid(xf, yi, indexing="ij")
    a11 = a._entry_at(a.a11, X1, Y1, g)

    xi = g.xs()
    yf = np.arange(0, g.ny + 1) * g.hy + g.hy / 2
    X2, Y2 = np.meshgrid(xi, yf, indexing="ij")
    a22 = a._entry_at(a.a22, X2, Y2, g)

    total = np.sum(a11 * dx**2) + np.sum(a22 * dy**2)

    needs_cross = callable(a.a12) or np.any(np.asarray(a.a12, dtype=float) != 0.0)
    if needs_cross:
        # average both gradients onto cell centers (gradient is zero along
        # the tangential boundary since f vanishes there)
        dx_pad = np.zeros((g.nx + 1, g.ny + 2))
        dx_pad[:, 1:-1] = dx
        dx_cc = 0.5 * (dx_pad[:, :-1] + dx_pad[:, 1:])
        dy_pad = np.zeros((g.nx + 2, g.ny + 1))
        dy_pad[1:-1, :] = dy
        dy_cc = 0.5 * (dy_pad[:-1, :] + dy_pad[1:, :])
        Xc, Yc = np.meshgrid(xf, yf, indexing="ij")
        a12 = a._entry_at(a.a12, Xc, Yc, g)
        total += 2.0 * np.sum(a12 * dx_cc * dy_cc)

    return float(np.sqrt(max(total, 0.0) * g.hx * g.hy))


def equivalence_constants(a: CoefficientField, family) -> tuple[float, float]:
    """Empirical (a3, a4) with a3*||f||_H1 <= ||f||_a <= a4*||f||_H1 over the family."""
    fields = list(family)
    if not fields:
        raise ValueError("family must be nonempty")
    ratios = []
    for f in fields:
        h1 = h1_norm(f)
        if h1 == 0.0:
            raise ValueError("family contains a zero field")
        ratios.append(a_norm(f, a) / h1)
    return float(min(ratios)), float(max(ratios))


def poincare_constant(grid: Grid) -> float:
    """Best constant with l2_norm(f) <= C * h1_seminorm(f) on this lattice.

    Equals 1/sqrt(mu) for the smallest discrete eigenvalue; the first
    sampled sine mode attains it exactly.
    """
    return 1.0 / np.sqrt(discrete_eigenvalue(grid, 1, 1))


@dataclass
class ConstantLedger:
    """Every constant the decay thresholds need, with provenance.

    Interpolation constants c1..c5 tie the node observation maximum and
    the covering radius to the sup/L2/H1 norms; c_b bounds the nonlinearity
    increment; a1..a4 are the operator-norm equivalence constants; lambda1
    is the first eigenvalue.  Provenance records whether a value was assumed
    or estimated from a field family.
    """

    c1: float | None = None
    c2: float | None = None
    c3: float | None = None
    c4: float | None = None
    c5: float | None = None
    c_b: float | None = None
    a1: float | None = None
    a2: float | None = None
    a3: float | None = None
    a4: float | None = None
    lambda1: float | None = None
    m_bounds: dict = dc_field(default_factory=dict)
    provenance: dict = dc_field(default_factory=dict)

    _CONSTANTS = ("c1", "c2", "c3", "c4", "c5", "c_b", "a1", "a2", "a3", "a4", "lambda1")

    def set(self, name: str, value: float, provenance: str) -> None:
        if name not in self._CONSTANTS:
            raise KeyError(f"unknown ledger constant {name!r}")
        if not value > 0:
            raise ValueError(f"ledger constant {name} must be positive, got {value}")
        setattr(self, name, float(value))
        self.provenance[name] = provenance

    def set_m_bound(self, name: str, value: float, provenance: str) -> None:
        if value < 0:
            raise ValueError("M bounds must be nonnegative")
        self.m_bounds[name] = float(value)
        self.provenance[f"m:{name}"] = provenance

    def require(self, *names: str) -> list[float]:
        out = []
        for name in names:
            val = getattr(self, name)
            if val is None:
                raise ValueError(f"ledger constant {name} is not set")
            out.append(val)
        return out

    @classmethod
    def all_ones(cls) -> "ConstantLedger":
        led = cls()
        for name in cls._CONSTANTS:
            led.set(name, 1.0, "assumed")
        return led

    def items(self):
        for name in self._CONSTANTS:
            val = getattr(self, name)
            if val is not None:
                yield name, val, self.provenance.get(name, "unknown")
