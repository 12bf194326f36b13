"""Points, distances, direction nets, grid and strip partitions.

Everything here is pure and operates on float64 numpy arrays.  Cells and
strips are half-open with boundary points assigned to the higher index, so
each partition is an exact partition under floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

Point = np.ndarray  # shape (d,)


def as_point(coords) -> Point:
    p = np.asarray(coords, dtype=np.float64)
    if p.ndim != 1 or p.size < 1:
        raise ValueError("a point is a 1-d sequence of coordinates")
    if not np.all(np.isfinite(p)):
        raise ValueError("coordinates must be finite")
    return p


def distance(p: Point, q: Point) -> float:
    """Euclidean distance ||pq||."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    return float(np.linalg.norm(p - q))


def score(p: Point, theta) -> float:
    """Inner product <p, theta> used to order points along a direction."""
    p = np.asarray(p, dtype=np.float64)
    t = theta.vector if isinstance(theta, Direction) else np.asarray(theta, dtype=np.float64)
    if p.shape != t.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {t.shape}")
    return float(p @ t)


@dataclass(frozen=True)
class Direction:
    """A unit vector in R^d."""

    vector: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.vector, dtype=np.float64)
        object.__setattr__(self, "vector", v)
        if abs(float(np.linalg.norm(v)) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit vector")

    @property
    def d(self) -> int:
        return self.vector.size


def circle_direction(i: int, angle: float) -> np.ndarray:
    return np.array([math.cos(i * angle), math.sin(i * angle)])


def _facet_direction(d: int, per_axis: int, facet: int, grid: tuple[int, ...]) -> np.ndarray:
    """Direction #(facet, grid) of the cube-facet net, projected to the sphere."""
    axis, sign = divmod(facet, 2)
    v = np.empty(d, dtype=np.float64)
    v[axis] = 1.0 if sign == 0 else -1.0
    others = [a for a in range(d) if a != axis]
    step = 2.0 / per_axis
    for a, g in zip(others, grid):
        v[a] = -1.0 + (g + 0.5) * step
    return v / np.linalg.norm(v)


def direction_net_size(d: int, angle: float) -> int:
    if not (0.0 < angle < 1.0):
        raise ValueError("angle must be in (0, 1)")
    if d == 1:
        return 2
    if d == 2:
        return math.ceil(2.0 * math.pi / angle)
    per_axis = math.ceil(2.0 * math.sqrt(d) / angle)
    return 2 * d * per_axis ** (d - 1)


def direction_by_index(d: int, angle: float, index: int) -> np.ndarray:
    """The index-th net vector, without materializing the whole net."""
    if d == 1:
        return np.array([1.0]) if index == 0 else np.array([-1.0])
    if d == 2:
        return circle_direction(index, angle)
    per_axis = math.ceil(2.0 * math.sqrt(d) / angle)
    block = per_axis ** (d - 1)
    facet, rest = divmod(index, block)
    grid = []
    for _ in range(d - 1):
        rest, g = divmod(rest, per_axis)
        grid.append(g)
    return _facet_direction(d, per_axis, facet, tuple(grid))


def nearest_net_index(d: int, angle: float, v: np.ndarray) -> int:
    """Index of a net vector within `angle` of v (deterministic)."""
    v = np.asarray(v, dtype=np.float64)
    if d == 2:
        n = direction_net_size(2, angle)
        i = int(round(math.atan2(v[1], v[0]) / angle)) % n
        return i
    if d == 1:
        return 0 if v[0] >= 0 else 1
    per_axis = math.ceil(2.0 * math.sqrt(d) / angle)
    axis = int(np.argmax(np.abs(v)))
    sign = 0 if v[axis] >= 0 else 1
    facet = axis * 2 + sign
    scale = abs(v[axis]) if v[axis] != 0 else 1.0
    w = v / scale  # cube point with w[axis] == +-1, matching the facet sign
    step = 2.0 / per_axis
    grid = []
    for a in range(d):
        if a == axis:
            continue
        g = int(math.floor((w[a] + 1.0) / step))
        grid.append(min(max(g, 0), per_axis - 1))
    block = per_axis ** (d - 1)
    idx = 0
    for g in reversed(grid):
        idx = idx * per_axis + g
    return facet * block + idx


def direction_net(d: int, angle: float) -> list[np.ndarray]:
    """Materialized net of unit vectors with pairwise coverage `angle`.

    Size O(angle^{1-d}); only call with moderate angles.  For d >= 3 the
    vectors come from uniform grids on the cube facets projected to the
    sphere.
    """
    n = direction_net_size(d, angle)
    if d == 1:
        return [np.array([1.0]), np.array([-1.0])]
    return [direction_by_index(d, angle, i) for i in range(n)]


def orthonormal_complement(theta: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of the hyperplane orthogonal to theta.

    Returns an array of shape (d-1, d).  For d == 2 this is the rotation
    theta_perp = (-theta_y, theta_x).
    """
    theta = np.asarray(theta, dtype=np.float64)
    d = theta.size
    if d == 1:
        return np.zeros((0, 1))
    if d == 2:
        return np.array([[-theta[1], theta[0]]])
    # Householder reflection mapping e_k -> theta, k = argmax |theta_a|;
    # the remaining columns form the orthonormal complement.
    k = int(np.argmax(np.abs(theta)))
    sign = 1.0 if theta[k] >= 0 else -1.0
    u = theta.copy()
    u[k] += sign
    u /= np.linalg.norm(u)
    H = np.eye(d) - 2.0 * np.outer(u, u)
    cols = [a for a in range(d) if a != k]
    return -sign * H[:, cols].T


@dataclass(frozen=True)
class GridPartition:
    """Axis-aligned partition of R^d into half-open hypercubes."""

    d: int
    side: float
    shift: np.ndarray

    def __post_init__(self) -> None:
        if self.side <= 0:
            raise ValueError("side must be positive")
        object.__setattr__(self, "shift", np.asarray(self.shift, dtype=np.float64))

    def cell_of(self, p: Point) -> tuple[int, ...]:
        p = np.asarray(p, dtype=np.float64)
        if p.size != self.d:
            raise ValueError("dimension mismatch")
        return tuple(int(v) for v in np.floor((p - self.shift) / self.side))


def shifted_grid_family(d: int, delta: float) -> list[GridPartition]:
    """O(d) shifted hypercube partitions co-celling every pair within delta.

    Cells have side (4*ceil(d/2)+2)*delta and the j-th partition is shifted
    by j*side/(2*ceil(d/2)+1) along the all-ones direction; any pair at
    distance <= delta lands in one cell of at least one partition (at most
    one shift per axis is ruined, and there are more shifts than axes).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    side = (4 * math.ceil(d / 2) + 2) * delta
    m = 2 * math.ceil(d / 2) + 1
    return [GridPartition(d, side, np.full(d, j * side / m)) for j in range(m)]


@dataclass(frozen=True)
class StripPartition:
    """Partition of R^d into strips parallel to `direction`.

    Membership is determined by the coordinates along `basis` (an
    orthonormal set of vectors orthogonal to the direction): the strip index
    of p is floor((basis @ p - shift) / width), computed per basis vector.
    For minor partitions the basis is the direction itself (strips in the
    orthogonal direction, indexed by score).
    """

    direction: np.ndarray
    width: float
    shift: float
    basis: np.ndarray  # (k, d) rows

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise ValueError("width must be positive")
        object.__setattr__(self, "direction", np.asarray(self.direction, dtype=np.float64))
        b = np.asarray(self.basis, dtype=np.float64)
        if b.ndim == 1:
            b = b[None, :]
        object.__setattr__(self, "basis", b)


def strip_index(p: Point, partition: StripPartition) -> tuple[int, ...]:
    """Half-open strip assignment; boundary points go to the higher index."""
    p = np.asarray(p, dtype=np.float64)
    if p.size != partition.basis.shape[1]:
        raise ValueError("dimension mismatch")
    coords = partition.basis @ p
    return tuple(int(v) for v in np.floor((coords - partition.shift) / partition.width))
