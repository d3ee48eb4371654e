"""Uniform rectangular grids with zero Dirichlet boundary.

A field lives on the interior lattice of a rectangle (0,Lx) x (0,Ly);
the boundary ring is implicitly zero everywhere.  All solvers and norms
in this package are built on the 5-point Laplacian of this lattice,
whose eigenpairs are the sampled sine modes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Domain:
    """Axis-aligned rectangle (0, lx) x (0, ly)."""

    lx: float
    ly: float

    def __post_init__(self):
        if not (self.lx > 0 and self.ly > 0):
            raise ValueError(f"domain extents must be positive, got {self.lx}, {self.ly}")

    @property
    def corners(self) -> np.ndarray:
        return np.array([[0.0, 0.0], [self.lx, 0.0], [0.0, self.ly], [self.lx, self.ly]])

    @property
    def area(self) -> float:
        return self.lx * self.ly


@dataclass(frozen=True)
class Grid:
    """Interior lattice of a Domain: nx-by-ny points with spacings hx, hy.

    Point (i, j), 0-based, sits at ((i+1)*hx, (j+1)*hy); index -1 and nx/ny
    would be the zero boundary ring.
    """

    domain: Domain
    nx: int
    ny: int

    @property
    def hx(self) -> float:
        return self.domain.lx / (self.nx + 1)

    @property
    def hy(self) -> float:
        return self.domain.ly / (self.ny + 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    def xs(self) -> np.ndarray:
        return np.arange(1, self.nx + 1) * self.hx

    def ys(self) -> np.ndarray:
        return np.arange(1, self.ny + 1) * self.hy

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.xs(), self.ys(), indexing="ij")

    def closure_lattice(self) -> np.ndarray:
        """All lattice points including the boundary ring, shape ((nx+2)*(ny+2), 2).

        Contains the four domain corners exactly.
        """
        x = np.arange(0, self.nx + 2) * self.hx
        y = np.arange(0, self.ny + 2) * self.hy
        X, Y = np.meshgrid(x, y, indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel()])


def make_grid(domain: Domain, nx: int, ny: int) -> Grid:
    """Build the interior lattice; counts below 3 cannot carry a 5-point stencil."""
    if nx < 3 or ny < 3:
        raise ValueError(f"interior point counts must be >= 3, got nx={nx}, ny={ny}")
    return Grid(domain, int(nx), int(ny))


@dataclass
class ScalarField:
    """Nodal values on the interior lattice of a grid; zero on the boundary."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())

    def __add__(self, other: "ScalarField") -> "ScalarField":
        _check_same_grid(self, other)
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        _check_same_grid(self, other)
        return ScalarField(self.grid, self.values - other.values)

    def __mul__(self, c: float) -> "ScalarField":
        return ScalarField(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarField":
        return ScalarField(self.grid, -self.values)


def _check_same_grid(f: ScalarField, g: ScalarField) -> None:
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")


def zero_field(grid: Grid) -> ScalarField:
    return ScalarField(grid, np.zeros(grid.shape))


def field_from_function(grid: Grid, fn) -> ScalarField:
    """Sample fn(x, y) on the interior lattice (fn must broadcast over arrays)."""
    X, Y = grid.meshgrid()
    return ScalarField(grid, np.asarray(fn(X, Y), dtype=float))


def eval_field(f: ScalarField, point) -> float:
    """Bilinear interpolation of the nodal values at a point of the closed domain.

    The boundary ring counts as zero, so interpolation is defined on every
    cell of the closure.  Reproduces nodal values exactly at lattice points.
    """
    x, y = float(point[0]), float(point[1])
    return float(eval_field_many(f, np.array([[x, y]]))[0])


def eval_field_many(f: ScalarField, points: np.ndarray) -> np.ndarray:
    """Vectorized bilinear interpolation; points is (m, 2) in the closure."""
    g = f.grid
    pts = np.asarray(points, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    eps = 1e-12 * max(g.domain.lx, g.domain.ly)
    if np.any(x < -eps) or np.any(x > g.domain.lx + eps) or np.any(y < -eps) or np.any(y > g.domain.ly + eps):
        raise ValueError("point outside the domain closure")
    x = np.clip(x, 0.0, g.domain.lx)
    y = np.clip(y, 0.0, g.domain.ly)

    padded = np.zeros((g.nx + 2, g.ny + 2))
    padded[1:-1, 1:-1] = f.values

    # cell index on the closed lattice: point lies in [i*hx, (i+1)*hx]
    ix = np.minimum((x / g.hx).astype(int), g.nx)
    iy = np.minimum((y / g.hy).astype(int), g.ny)
    tx = x / g.hx - ix
    ty = y / g.hy - iy
    v00 = padded[ix, iy]
    v10 = padded[ix + 1, iy]
    v01 = padded[ix, iy + 1]
    v11 = padded[ix + 1, iy + 1]
    return (
        v00 * (1 - tx) * (1 - ty)
        + v10 * tx * (1 - ty)
        + v01 * (1 - tx) * ty
        + v11 * tx * ty
    )


def laplacian(f: ScalarField) -> ScalarField:
    """5-point Laplacian with zero ghost values outside the interior lattice."""
    g = f.grid
    v = f.values
    out = -2.0 * v / g.hx**2 - 2.0 * v / g.hy**2
    out[1:, :] += v[:-1, :] / g.hx**2
    out[:-1, :] += v[1:, :] / g.hx**2
    out[:, 1:] += v[:, :-1] / g.hy**2
    out[:, :-1] += v[:, 1:] / g.hy**2
    return ScalarField(g, out)


def continuous_eigenvalue(grid: Grid, j: int, k: int) -> float:
    """Eigenvalue pi^2 ((j/Lx)^2 + (k/Ly)^2) of -Laplace on the rectangle."""
    d = grid.domain
    return np.pi**2 * ((j / d.lx) ** 2 + (k / d.ly) ** 2)


def discrete_eigenvalue(grid: Grid, j: int, k: int) -> float:
    """Eigenvalue of the 5-point -Laplacian for the sampled (j,k) sine mode."""
    return 4.0 / grid.hx**2 * np.sin(j * np.pi * grid.hx / (2 * grid.domain.lx)) ** 2 + (
        4.0 / grid.hy**2 * np.sin(k * np.pi * grid.hy / (2 * grid.domain.ly)) ** 2
    )


def eigen_laplacian(grid: Grid, j: int, k: int, discrete: bool = False):
    """Return (eigenvalue, sampled eigenfield) of -Laplace for mode (j, k).

    With discrete=True the eigenvalue is the one of the 5-point stencil,
    which the sampled field satisfies exactly; otherwise the continuum value.
    """
    if not (1 <= j <= grid.nx and 1 <= k <= grid.ny):
        raise ValueError(f"mode index out of range: j={j}, k={k}")
    d = grid.domain
    X, Y = grid.meshgrid()
    s = np.sin(j * np.pi * X / d.lx) * np.sin(k * np.pi * Y / d.ly)
    mu = discrete_eigenvalue(grid, j, k) if discrete else continuous_eigenvalue(grid, j, k)
    return mu, ScalarField(grid, s)
