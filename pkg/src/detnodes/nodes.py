"""Measurement node sets: covering radius, node observation maximum, placement.

The covering radius (density) of a node set is the largest distance from a
point of the closed rectangle to its nearest node; it is evaluated on the
closed lattice, which contains the four corners, so the worst case of the
usual suspects is exact.  Placement uses the greedy farthest-point rule,
a 2-approximation of the optimal covering for a given node count.
"""

from __future__ import annotations

from dataclasses import dataclass
from io import StringIO

import numpy as np
from scipy.spatial import cKDTree

from .grid import Domain, Grid, ScalarField, eval_field_many


@dataclass(frozen=True)
class NodeSet:
    """Finite set of measurement points inside the closed domain."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise ValueError("points must be a nonempty (N, 2) array")
        if len(np.unique(pts, axis=0)) != len(pts):
            raise ValueError("duplicate nodes are not allowed")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points)

    def validate_in(self, domain: Domain) -> None:
        x, y = self.points[:, 0], self.points[:, 1]
        if np.any(x < 0) or np.any(x > domain.lx) or np.any(y < 0) or np.any(y > domain.ly):
            raise ValueError("node outside the domain closure")

    def all_on_boundary(self, domain: Domain) -> bool:
        x, y = self.points[:, 0], self.points[:, 1]
        on = (x == 0) | (x == domain.lx) | (y == 0) | (y == domain.ly)
        return bool(np.all(on))

    def to_csv(self) -> str:
        buf = StringIO()
        buf.write("j,x,y\n")
        for j, (x, y) in enumerate(self.points, start=1):
            buf.write(f"{j},{float(x)!r},{float(y)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "NodeSet":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        if not lines or lines[0].split(",")[0] != "j":
            raise ValueError("node CSV must start with header 'j,x,y'")
        pts = [[float(p) for p in ln.split(",")[1:3]] for ln in lines[1:]]
        return cls(np.array(pts))


def density(ns: NodeSet, grid: Grid) -> float:
    """Covering radius of the node set over the closed lattice.

    A lower approximation of the true supremum with error at most half a
    cell diagonal; the corners are lattice points, so corner-dominated
    configurations are exact.
    """
    ns.validate_in(grid.domain)
    lattice = grid.closure_lattice()
    dist, _ = cKDTree(ns.points).query(lattice)
    return float(np.max(dist))


def eta(ns: NodeSet, f: ScalarField) -> float:
    """Node observation maximum max_j |f(x_j)| (bilinear interpolation)."""
    return float(np.max(np.abs(eval_field_many(f, ns.points))))


def _greedy_fill(grid: Grid, count: int | None = None, target: float | None = None):
    """Greedy farthest-point nodes over the closed lattice.

    Returns (points, density_after_each_node), stopping at `count` nodes or
    as soon as the covering radius drops to `target`.  The first node is the
    domain center; every later node is the lattice point farthest from the
    current set, ties broken lexicographically by (x, y).
    """
    lattice = grid.closure_lattice()
    limit = len(lattice) + 1 if count is None else count
    if limit > len(lattice) + 1:
        raise ValueError("more nodes requested than candidate points")
    # lexicographic order of candidates so that argmax on a sorted copy
    # breaks distance ties by (x, y)
    order = np.lexsort((lattice[:, 1], lattice[:, 0]))
    cand = lattice[order]

    center = np.array([grid.domain.lx / 2, grid.domain.ly / 2])
    chosen = [center]
    dist = np.linalg.norm(cand - center, axis=1)
    densities = [float(dist.max())]
    while len(chosen) < limit and (target is None or densities[-1] > target):
        best = int(np.argmax(dist))
        nxt = cand[best]
        chosen.append(nxt)
        dist = np.minimum(dist, np.linalg.norm(cand - nxt, axis=1))
        densities.append(float(dist.max()))
    return np.array(chosen), densities


def farthest_point_fill(domain: Domain, grid: Grid, count: int) -> NodeSet:
    """Place `count` nodes by greedy farthest-point traversal."""
    if grid.domain != domain:
        raise ValueError("grid does not discretize the given domain")
    if count < 1:
        raise ValueError("need at least one node")
    pts, _ = _greedy_fill(grid, count)
    return NodeSet(pts)


def nodes_for_density(domain: Domain, grid: Grid, target: float) -> NodeSet:
    """Smallest greedy prefix whose covering radius is at most `target`."""
    if grid.domain != domain:
        raise ValueError("grid does not discretize the given domain")
    if target <= 0:
        raise ValueError("target density must be positive")
    limit = float(np.hypot(grid.hx, grid.hy)) / 2
    if target < limit:
        raise ValueError(
            f"target density {target:g} below the grid resolution limit {limit:g}"
        )
    pts, densities = _greedy_fill(grid, target=target)
    if densities[-1] > target:
        raise ValueError(f"target density {target:g} not reachable on this grid")
    return NodeSet(pts)
