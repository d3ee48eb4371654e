"""Stationary states:  -k*Lap u - |u|^(p-1) u = fbar  on the interior lattice.

Newton's method with a damped line search; each linear correction is solved
by MINRES preconditioned with the exact sine-basis inverse of the diffusion
part (the Jacobian can be indefinite near nontrivial roots, so plain CG is
not safe).  A nontrivial positive root for fbar = 0 is found by walking an
amplitude ladder of first-eigenfield starts.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.fft import dstn
from scipy.sparse.linalg import LinearOperator, minres

from .grid import Grid, ScalarField, eigen_laplacian, laplacian
from .nodes import NodeSet, density, eval_field_many
from .norms import h1_norm, sup_norm

JACOBIAN_SMOOTHING = 1e-12


class JacobianSolveError(RuntimeError):
    """Inner linear solve stalled (singular or near-singular Jacobian)."""


class NontrivialNotFound(RuntimeError):
    """Amplitude ladder exhausted without a nontrivial stationary root."""


@dataclass
class StationaryResult:
    field: ScalarField
    residual: float
    iterations: int
    converged: bool
    residual_history: list = dc_field(default_factory=list)

    def summary(self) -> dict:
        return {
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "sup_norm": sup_norm(self.field),
            "symmetry_defect": symmetry_defect(self.field),
        }


def residual(u: ScalarField, fbar: ScalarField, k: float, p: float) -> float:
    """L2 norm of  -k*Lap u - |u|^(p-1) u - fbar."""
    if u.grid != fbar.grid:
        raise ValueError("fields live on different grids")
    r = _residual_values(u.values, fbar.values, u.grid, k, p)
    return float(np.sqrt(np.sum(r * r) * u.grid.hx * u.grid.hy))


def _residual_values(v: np.ndarray, fbar: np.ndarray, grid: Grid, k: float, p: float) -> np.ndarray:
    lap = laplacian(ScalarField(grid, v)).values
    return -k * lap - np.abs(v) ** (p - 1) * v - fbar


def _sine_preconditioner(grid: Grid, k: float) -> LinearOperator:
    j = np.arange(1, grid.nx + 1)
    kk = np.arange(1, grid.ny + 1)
    mux = 4.0 / grid.hx**2 * np.sin(j * np.pi / (2 * (grid.nx + 1))) ** 2
    muy = 4.0 / grid.hy**2 * np.sin(kk * np.pi / (2 * (grid.ny + 1))) ** 2
    mu = mux[:, None] + muy[None, :]

    def apply(x):
        coef = dstn(x.reshape(grid.shape), type=1, norm="ortho")
        return dstn(coef / (k * mu), type=1, norm="ortho").ravel()

    n = grid.nx * grid.ny
    return LinearOperator((n, n), matvec=apply)


def newton_solve(
    guess: ScalarField,
    fbar: ScalarField,
    k: float,
    p: float,
    tol: float = 1e-8,
    max_iter: int = 40,
    inner_tol: float = 1e-10,
) -> StationaryResult:
    """Damped Newton iteration on F(u) = -k*Lap u - |u|^(p-1) u - fbar.

    The Jacobian diagonal uses the smoothed weight p*(u^2 + eps^2)^((p-1)/2)
    so exponents below 2 keep a bounded derivative at u = 0.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    grid = guess.grid
    if fbar.grid != grid:
        raise ValueError("fields live on different grids")
    n = grid.nx * grid.ny
    cell = grid.hx * grid.hy
    M = _sine_preconditioner(grid, k)

    v = guess.values.copy()
    history = []

    def res_norm(vals):
        r = _residual_values(vals, fbar.values, grid, k, p)
        return float(np.sqrt(np.sum(r * r) * cell)), r

    rnorm, rvals = res_norm(v)
    history.append(rnorm)
    for it in range(max_iter):
        if rnorm <= tol:
            return StationaryResult(ScalarField(grid, v), rnorm, it, True, history)

        weight = p * (v * v + JACOBIAN_SMOOTHING**2) ** ((p - 1) / 2)

        def matvec(x):
            xg = x.reshape(grid.shape)
            lap = laplacian(ScalarField(grid, xg)).values
            return (-k * lap - weight * xg).ravel()

        A = LinearOperator((n, n), matvec=matvec)
        b = -rvals.ravel()
        delta, info = minres(A, b, M=M, rtol=inner_tol, maxiter=min(2000, 10 * n))
        lin_res = np.linalg.norm(A @ delta - b)
        if info != 0 or not np.all(np.isfinite(delta)) or lin_res > 1e-6 * max(np.linalg.norm(b), 1e-300):
            raise JacobianSolveError(
                f"linear correction stalled at Newton iteration {it} (info={info})"
            )

        delta = delta.reshape(grid.shape)
        lam = 1.0
        for _ in range(40):
            trial_norm, trial_vals = res_norm(v + lam * delta)
            if trial_norm < rnorm:
                break
            lam /= 2
        else:
            # no descent along the Newton direction; report non-convergence
            return StationaryResult(ScalarField(grid, v), rnorm, it + 1, False, history)
        v = v + lam * delta
        rnorm, rvals = trial_norm, trial_vals
        history.append(rnorm)

    converged = rnorm <= tol
    return StationaryResult(ScalarField(grid, v), rnorm, max_iter, converged, history)


def symmetry_defect(f: ScalarField) -> float:
    """Sup distance of a field to its reflections (and transpose on squares)."""
    v = f.values
    defect = max(
        float(np.max(np.abs(v - v[::-1, :]))),
        float(np.max(np.abs(v - v[:, ::-1]))),
    )
    g = f.grid
    if g.nx == g.ny and g.domain.lx == g.domain.ly:
        defect = max(defect, float(np.max(np.abs(v - v.T))))
    return defect


AMPLITUDE_LADDER = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)


def find_nontrivial(
    k: float,
    p: float,
    grid: Grid,
    tol: float = 1e-8,
    symmetry_tol: float = 1e-6,
) -> StationaryResult:
    """Continuation to a positive nontrivial root of -k*Lap u = |u|^(p-1) u.

    Newton starts from s * (first eigenfield) for an increasing amplitude
    ladder; the first converged result with sup norm above 0.1, positive
    interior values and square dihedral symmetry is returned.
    """
    if p <= 1:
        raise ValueError("exponent p must exceed 1")
    _, e1 = eigen_laplacian(grid, 1, 1)
    fbar = ScalarField(grid, np.zeros(grid.shape))
    failures = []
    for s in AMPLITUDE_LADDER:
        try:
            result = newton_solve(s * e1, fbar, k, p, tol=tol)
        except JacobianSolveError as exc:
            failures.append(f"s={s:g}: {exc}")
            continue
        if not result.converged or sup_norm(result.field) <= 0.1:
            failures.append(f"s={s:g}: trivial or unconverged")
            continue
        if np.min(result.field.values) <= 0:
            failures.append(f"s={s:g}: not positive")
            continue
        if symmetry_defect(result.field) > symmetry_tol:
            failures.append(f"s={s:g}: asymmetric")
            continue
        return result
    raise NontrivialNotFound("amplitude ladder exhausted: " + "; ".join(failures))


@dataclass
class CoincidenceReport:
    max_node_discrepancy: float
    h1_distance: float
    node_density: float
    nodes_match: bool
    match_tol: float

    def as_dict(self) -> dict:
        return {
            "max_node_discrepancy": self.max_node_discrepancy,
            "h1_distance": self.h1_distance,
            "node_density": self.node_density,
            "nodes_match": self.nodes_match,
            "match_tol": self.match_tol,
        }


def node_coincidence_test(
    ubar: ScalarField, vbar: ScalarField, ns: NodeSet, match_tol: float
) -> CoincidenceReport:
    """Compare two stationary fields at the nodes and globally.

    Distinct stationary states with a dense enough node set must disagree at
    some node; two runs converging to the same root agree both at the nodes
    and in H1.
    """
    if ubar.grid != vbar.grid:
        raise ValueError("fields live on different grids")
    w = ubar - vbar
    disc = float(np.max(np.abs(eval_field_many(ubar, ns.points) - eval_field_many(vbar, ns.points))))
    return CoincidenceReport(
        max_node_discrepancy=disc,
        h1_distance=h1_norm(w),
        node_density=density(ns, ubar.grid),
        nodes_match=disc <= match_tol,
        match_tol=match_tol,
    )
