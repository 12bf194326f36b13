"""Steiner (mu, Delta)-partial tree covers via axis slabs and middle nets.

Each tree is a star centered at one Steiner net point on the bisecting patch
of one axis slab, with an edge to every input point; a far pair is served by
the net point nearest to where its segment crosses a separating slab's
middle hyperplane.  Tree count: d * ceil(3*sqrt(d)*mu) slabs times
floor(2*mu/sqrt(eps))^(d-1) net points per slab.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import CoverParams


@dataclass(frozen=True)
class SlabFamily:
    """Axis slabs of one cell and the Steiner nets on their middle patches.

    The slab/net *counts* are pure formulas of (d, eps); the net spacing and
    the slab coordinate are capped to the occupied region [corner,
    corner+extents] so every Steiner point stays inside the region's bounding
    box (this is what keeps each star's diameter below 3*Delta).
    """

    params: CoverParams
    delta: float
    corner: np.ndarray   # min corner of the region
    extents: np.ndarray  # per-axis extent of the region

    def __post_init__(self) -> None:
        object.__setattr__(self, "corner", np.asarray(self.corner, dtype=np.float64))
        object.__setattr__(self, "extents", np.asarray(self.extents, dtype=np.float64))

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def thickness(self) -> float:
        return self.delta / (3.0 * math.sqrt(self.d) * self.params.mu)

    @property
    def slabs_per_axis(self) -> int:
        return self.params.slabs_per_axis

    @property
    def n_slabs(self) -> int:
        return self.params.n_slabs

    @property
    def net_spacing(self) -> float:
        return math.sqrt(self.params.eps_internal) * self.delta / (2.0 * self.params.mu)

    @property
    def net_per_axis(self) -> int:
        return self.params.net_per_axis

    @property
    def net_size(self) -> int:
        return self.params.net_size

    def size(self) -> int:
        return self.n_slabs * self.net_size

    # -- k-index arithmetic --------------------------------------------------

    def k_of(self, axis: int, slab: int, net: tuple[int, ...]) -> int:
        net_idx = 0
        for g in reversed(net):
            net_idx = net_idx * self.net_per_axis + g
        return (axis * self.slabs_per_axis + slab) * self.net_size + net_idx

    def k_split(self, k: int) -> tuple[int, int, tuple[int, ...]]:
        slab_idx, net_idx = divmod(k, self.net_size)
        axis, slab = divmod(slab_idx, self.slabs_per_axis)
        net = []
        for _ in range(self.d - 1):
            net_idx, g = divmod(net_idx, self.net_per_axis)
            net.append(g)
        return axis, slab, tuple(net)

    def axis_spacing(self, axis: int) -> float:
        if self.net_per_axis <= 1 or self.extents[axis] <= 0.0:
            return 0.0
        return float(self.extents[axis]) / (self.net_per_axis - 1)

    def center(self, k: int) -> np.ndarray:
        """Location of the Steiner point of tree k."""
        axis, slab, net = self.k_split(k)
        c = self.corner.copy()
        c[axis] += min((slab + 0.5) * self.thickness, float(self.extents[axis]))
        others = [a for a in range(self.d) if a != axis]
        for a, g in zip(others, net):
            c[a] += g * self.axis_spacing(a)
        return c

    # -- witnesses -------------------------------------------------------------

    def separating_slabs(self, p: np.ndarray, q: np.ndarray) -> list[tuple[int, int]]:
        """(axis, slab) pairs whose slab lies strictly between p and q."""
        out: list[tuple[int, int]] = []
        T = self.thickness
        for axis in range(self.d):
            lo = min(p[axis], q[axis]) - self.corner[axis]
            hi = max(p[axis], q[axis]) - self.corner[axis]
            t_lo = math.ceil(lo / T)
            t_hi = math.floor(hi / T) - 1
            t_lo = max(t_lo, 0)
            t_hi = min(t_hi, self.slabs_per_axis - 1)
            if t_lo <= t_hi:
                out.append((axis, t_lo))
                if t_hi != t_lo:
                    out.append((axis, (t_lo + t_hi) // 2))
        return out

    def witness_candidates(self, p: np.ndarray, q: np.ndarray) -> list[int]:
        """Candidate tree indices serving the pair (deterministic order)."""
        ks: list[int] = []
        for axis, slab in self.separating_slabs(p, q):
            mid = self.corner[axis] + min((slab + 0.5) * self.thickness,
                                          float(self.extents[axis]))
            denom = q[axis] - p[axis]
            s = (mid - p[axis]) / denom
            s = min(max(s, 0.0), 1.0)
            r = p + s * (q - p)
            others = [a for a in range(self.d) if a != axis]
            base = []
            for a in others:
                sp = self.axis_spacing(a)
                base.append(0 if sp == 0.0 else int(round((r[a] - self.corner[a]) / sp)))
            seen: set[tuple[int, ...]] = set()
            for shifts in _neighbor_offsets(self.d - 1):
                net = tuple(min(max(b + s_, 0), self.net_per_axis - 1)
                            for b, s_ in zip(base, shifts))
                if net in seen:
                    continue
                seen.add(net)
                ks.append(self.k_of(axis, slab, net))
        return ks


def _neighbor_offsets(dim: int) -> list[tuple[int, ...]]:
    if dim == 0:
        return [()]
    out = [(0,) * dim]
    for a in range(dim):
        for s in (-1, 1):
            off = [0] * dim
            off[a] = s
            out.append(tuple(off))
    return out


def build_slabs(params: CoverParams, delta: float, corner=None,
                extents=None) -> SlabFamily:
    if delta <= 0:
        raise ValueError("delta must be positive")
    d = params.d
    corner = np.zeros(d) if corner is None else np.asarray(corner, dtype=np.float64)
    extents = np.full(d, delta) if extents is None else np.asarray(extents, dtype=np.float64)
    return SlabFamily(params=params, delta=delta, corner=corner, extents=extents)


class SteinerPartialFamily:
    """Lazy sequence of Steiner-star trees of one (mu, Delta)-partial cover."""

    def __init__(self, points: np.ndarray, delta: float, params: CoverParams):
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if pts.shape[1] != params.d:
            raise ValueError("point dimension does not match params.d")
        n = pts.shape[0]
        if n >= 2:
            diam = max(float(np.max(np.linalg.norm(pts - pts[i], axis=1)))
                       for i in range(n))
            if diam > delta * (1.0 + 1e-9):
                raise ValueError("point set diameter exceeds delta")
        self.points = pts
        self.delta = delta
        self.params = params
        if n:
            corner = pts.min(axis=0)
            extents = pts.max(axis=0) - corner
        else:
            corner = np.zeros(params.d)
            extents = np.full(params.d, delta)
        self.slabs = SlabFamily(params=params, delta=delta, corner=corner,
                                extents=extents)

    def __len__(self) -> int:
        return self.slabs.size()

    def size(self) -> int:
        return len(self)

    def pair_distance(self, k: int, a: int, b: int) -> float:
        c = self.slabs.center(k)
        return float(np.linalg.norm(self.points[a] - c) + np.linalg.norm(c - self.points[b]))

    def best_witness(self, a: int, b: int) -> tuple[int, float] | None:
        """Best candidate tree for the pair and the distance through it."""
        cands = self.slabs.witness_candidates(self.points[a], self.points[b])
        if not cands:
            return None
        best_k, best_d = None, math.inf
        for k in cands:
            dk = self.pair_distance(k, a, b)
            if dk < best_d:
                best_k, best_d = k, dk
        return best_k, best_d

    def tree_diameter(self, k: int) -> float:
        """Exact star diameter: the two largest center-to-point edges."""
        c = self.slabs.center(k)
        if self.points.shape[0] == 0:
            return 0.0
        dists = np.linalg.norm(self.points - c, axis=1)
        if dists.size == 1:
            return float(dists[0])
        top2 = np.partition(dists, -2)[-2:]
        return float(top2.sum())

    def max_tree_diameter(self) -> float:
        """Upper bound on the star diameter over ALL k, without enumerating k.

        Every Steiner center lies in the region box [corner, corner+extents];
        the norm is convex, so the farthest center from any point sits at a
        box corner.  Returns 2 * max edge, a sound bound on every diameter.
        """
        s = self.slabs
        lo = s.corner
        hi = s.corner + s.extents
        max_edge = 0.0
        corners = [lo, hi]
        d = s.d
        for mask in range(1 << d):
            c = np.array([corners[(mask >> a) & 1][a] for a in range(d)])
            if self.points.shape[0]:
                max_edge = max(max_edge, float(np.max(np.linalg.norm(self.points - c, axis=1))))
        return 2.0 * max_edge

    def __getitem__(self, k: int):
        from .tree_model import CoverTree, TreeNode

        if not (0 <= k < len(self)):
            raise IndexError("tree index out of range")
        c = self.slabs.center(k)
        nodes = [TreeNode(0, None, c)]
        edges = []
        for i in range(self.points.shape[0]):
            nodes.append(TreeNode(i + 1, i, self.points[i]))
            edges.append((i + 1, 0, float(np.linalg.norm(self.points[i] - c))))
        return CoverTree(nodes, edges, 0, index=(0, 0, k))


def partial_cover_steiner(points: np.ndarray, delta: float,
                          params: CoverParams) -> SteinerPartialFamily:
    """The Steiner (mu, Delta)-partial tree cover, as a lazy family of stars."""
    return SteinerPartialFamily(points, delta, params)
