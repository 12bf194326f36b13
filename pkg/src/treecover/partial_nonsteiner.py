"""(mu, Delta)-partial tree covers without Steiner points.

Trees are indexed by k = (major partition, minor strip pair).  The k-th tree
places, in every major strip of the partition, a per-strip tree between the
strip's points in the two minor strips (strategy-dependent shape), joins the
per-strip roots and all remaining points by a balanced binary join, and so
spans the whole input.  Counts follow the exact family formulas; trees are
only materialized on demand (the full family is astronomically large for
small eps).

Strip membership is computed from *quantized* cell-relative positions (grid
eps_int*side/(256*mu)) so that the routing decoder, which only sees quantized
coordinates, reproduces the builder's bucketing bit-exactly.  All bucketing
arithmetic goes through the scalar helpers here (one code path shared by the
builder, the virtual evaluator and the decoder); edge weights always use
exact locations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .geometry import StripPartition, direction_by_index, orthonormal_complement
from .params import CoverParams, pair_index, pair_unindex

QUANT_DIV = 256.0  # quantization grid = eps_int * side / (QUANT_DIV * mu)


def _dot(a, b) -> float:
    """Sequential left-to-right dot product.

    The order matches the numpy expression a[:,0]*b0 + a[:,1]*b1 + ... used
    by the bulk bucketing, so scalar and vector classification agree
    bit-exactly.
    """
    s = a[0] * b[0]
    for x, y in zip(a[1:], b[1:]):
        s = s + x * y
    return s


def _col_dot(arr: np.ndarray, vec) -> np.ndarray:
    s = arr[:, 0] * vec[0]
    for a in range(1, len(vec)):
        s = s + arr[:, a] * vec[a]
    return s


@dataclass(frozen=True)
class StripFamily:
    """The major/minor strip partition family at one scale Delta.

    Partitions are generated by index; `n_partitions` of them, each paired
    with the minor partition of its direction.
    """

    params: CoverParams
    delta: float
    _dirs: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def major_width(self) -> float:
        if self.d >= 3:
            return self.params.eps_internal * self.delta / (2.0 * self.params.mu * self.d)
        return self.params.eps_internal * self.delta / (2.0 * self.params.mu)

    @property
    def minor_width(self) -> float:
        return self.delta / (2.0 * self.params.mu)

    @property
    def angle(self) -> float:
        if self.d == 2:
            return self.params.eps_internal / (4.0 * self.params.mu)
        return self.params.eps_internal / (10.0 * self.params.mu * self.d * self.d)

    @property
    def n_directions(self) -> int:
        return self.params.n_directions()

    @property
    def n_grid_shifts(self) -> int:
        return self.params.n_grid_shifts()

    @property
    def n_partitions(self) -> int:
        return self.params.n_major_partitions()

    def size(self) -> int:
        """tau: number of trees in the partial cover."""
        return self.n_partitions * self.params.minor_pair_count

    # -- per-direction data ----------------------------------------------------

    def split_index(self, p_idx: int) -> tuple[int, int]:
        """(direction index, shift index) of a partition."""
        if not (0 <= p_idx < self.n_partitions):
            raise IndexError("partition index out of range")
        return divmod(p_idx, self.n_grid_shifts)

    def dir_data(self, dir_idx: int) -> tuple[tuple[float, ...], tuple[tuple[float, ...], ...]]:
        """(theta, orthonormal basis rows of the orthogonal hyperplane)."""
        got = self._dirs.get(dir_idx)
        if got is None:
            if self.d == 1:
                theta = (1.0,)
                basis: tuple = ()
            elif self.d == 2:
                a = dir_idx * self.angle
                theta = (math.cos(a), math.sin(a))
                basis = ((-theta[1], theta[0]),)
            else:
                vec = direction_by_index(self.d, self.angle, dir_idx)
                theta = tuple(float(v) for v in vec)
                basis = tuple(tuple(float(v) for v in row)
                              for row in orthonormal_complement(np.array(theta)))
            got = (theta, basis)
            if len(self._dirs) > 100000:
                self._dirs.clear()
            self._dirs[dir_idx] = got
        return got

    def direction(self, dir_idx: int) -> np.ndarray:
        return np.array(self.dir_data(dir_idx)[0])

    def partition(self, p_idx: int) -> StripPartition:
        """Materialize one major StripPartition (for tests and audits)."""
        dir_idx, g = self.split_index(p_idx)
        theta, basis = self.dir_data(dir_idx)
        if self.d == 1:
            return StripPartition(direction=np.array(theta),
                                  width=max(self.delta * 4.0, 1.0),
                                  shift=0.0, basis=np.zeros((0, 1)))
        w = self.major_width
        shift = g * w / self.n_grid_shifts
        return StripPartition(direction=np.array(theta), width=w, shift=shift,
                              basis=np.array(basis))

    def minor_for(self, dir_idx: int) -> StripPartition:
        theta, basis = self.dir_data(dir_idx)
        perp = np.array(basis[0]) if self.d >= 2 else np.array([1.0])
        return StripPartition(direction=perp, width=self.minor_width, shift=0.0,
                              basis=np.array(theta))

    # -- scalar membership helpers (the one true bucketing code path) ----------

    def s_major(self, pos, p_idx: int) -> tuple[int, ...]:
        if self.d == 1:
            return ()
        dir_idx, g = self.split_index(p_idx)
        _, basis = self.dir_data(dir_idx)
        w = self.major_width
        shift = g * w / self.n_grid_shifts
        return tuple(math.floor((_dot(row, pos) - shift) / w) for row in basis)

    def s_minor_offset(self, pos, dir_idx: int) -> int:
        M = self.params.minor_halfwindow
        theta, _ = self.dir_data(dir_idx)
        u = math.floor(_dot(theta, pos) / self.minor_width) + M
        return min(max(u, 0), 2 * M)

    def _candidate_partitions(self, v) -> list[int]:
        d = self.d
        if d == 1:
            return [0]
        if d == 2:
            n = self.n_directions
            base = int(round(math.atan2(v[1], v[0]) / self.angle)) % n
            return [((base + o) % n) * 2 + s for o in (0, -1, 1) for s in (0, 1)]
        per_axis = math.ceil(2.0 * math.sqrt(d) / self.angle)
        block = per_axis ** (d - 1)
        amax = max(abs(x) for x in v)
        cands: list[int] = []
        for axis in range(d):
            if abs(v[axis]) < amax * (1.0 - 4.0 / per_axis):
                continue
            sign = 0 if v[axis] > 0 else 1
            facet = axis * 2 + sign
            w = [x / abs(v[axis]) for x in v]
            others = [a for a in range(d) if a != axis]
            step = 2.0 / per_axis
            base = [min(max(int(math.floor((w[a] + 1.0) / step)), 0), per_axis - 1)
                    for a in others]
            for deltas in product((0, -1, 1), repeat=d - 1):
                grid = [min(max(b + dd, 0), per_axis - 1) for b, dd in zip(base, deltas)]
                idx = 0
                for gval in reversed(grid):
                    idx = idx * per_axis + gval
                dir_idx = facet * block + idx
                for g in range(self.n_grid_shifts):
                    cand = dir_idx * self.n_grid_shifts + g
                    if cand not in cands:
                        cands.append(cand)
        return cands

    def witness(self, rel_p, rel_q) -> tuple[int, int, int] | None:
        """A (partition, u1, u2) whose tree serves the pair, or None.

        Deterministic: first qualifying candidate in scan order.  Guaranteed
        to exist for (mu, Delta)-far pairs by the strip co-cover property.
        """
        v = tuple(q - p for p, q in zip(rel_p, rel_q))
        if not any(v):
            return None
        for p_idx in self._candidate_partitions(v):
            if self.d >= 2 and self.s_major(rel_p, p_idx) != self.s_major(rel_q, p_idx):
                continue
            dir_idx, _ = self.split_index(p_idx)
            up = self.s_minor_offset(rel_p, dir_idx)
            uq = self.s_minor_offset(rel_q, dir_idx)
            if up == uq:
                continue
            return p_idx, min(up, uq), max(up, uq)
        return None

    # -- vector membership (bulk audits/tests) ----------------------------------

    def major_ids(self, rel: np.ndarray, p_idx: int) -> np.ndarray:
        return np.array([self.s_major(tuple(row), p_idx) for row in rel],
                        dtype=np.int64).reshape(rel.shape[0], -1)

    def minor_offsets(self, rel: np.ndarray, dir_idx: int) -> np.ndarray:
        return np.array([self.s_minor_offset(tuple(row), dir_idx) for row in rel],
                        dtype=np.int64)

    # -- k-index arithmetic -------------------------------------------------------

    def k_of(self, p_idx: int, u1: int, u2: int) -> int:
        return p_idx * self.params.minor_pair_count + pair_index(u1, u2, self.params.minor_count)

    def k_split(self, k: int) -> tuple[int, int, int]:
        p_idx, rest = divmod(k, self.params.minor_pair_count)
        u1, u2 = pair_unindex(rest, self.params.minor_count)
        return p_idx, u1, u2


def build_strip_family(params: CoverParams, delta: float) -> StripFamily:
    if delta <= 0:
        raise ValueError("delta must be positive")
    return StripFamily(params=params, delta=delta)


# ---------------------------------------------------------------------------
# Cell frames: quantized member positions at one cell
# ---------------------------------------------------------------------------


class CellFrame:
    """Members of one cell, with quantized cell-relative positions."""

    def __init__(self, family: StripFamily, corner: np.ndarray, side: float,
                 locations: np.ndarray):
        self.family = family
        self.corner = np.asarray(corner, dtype=np.float64)
        self.side = float(side)
        self.locations = np.asarray(locations, dtype=np.float64)
        p = family.params
        self.qgrid = p.eps_internal * self.side / (QUANT_DIV * p.mu)
        rel = self.locations - self.corner
        self.qpos = np.floor(rel / self.qgrid) * self.qgrid
        self.qpos_t = [tuple(row) for row in self.qpos]
        self.loc_t = [tuple(row) for row in self.locations]
        self._buckets: dict[int, tuple] = {}

    @property
    def m(self) -> int:
        return self.locations.shape[0]

    def quantized_distance(self, a: int, b: int) -> float:
        return math.dist(self.qpos_t[a], self.qpos_t[b])

    def far_gate(self, a: int, b: int) -> bool:
        """Quantized far test; accepts every exactly-(mu,Delta)-far pair."""
        tol = 4.0 * self.qgrid * math.sqrt(self.family.d)
        return self.quantized_distance(a, b) >= self.family.delta / self.family.params.mu - tol

    def witness(self, a: int, b: int) -> tuple[int, int, int] | None:
        return self.family.witness(self.qpos_t[a], self.qpos_t[b])

    def bucket(self, p_idx: int) -> tuple[np.ndarray, np.ndarray]:
        """(major ids (m, d-1), minor offsets (m,)) of all members.

        Bulk twin of s_major / s_minor_offset with identical float order.
        """
        got = self._buckets.get(p_idx)
        if got is not None:
            return got
        fam = self.family
        dir_idx, g = fam.split_index(p_idx)
        theta, basis = fam.dir_data(dir_idx)
        m = self.m
        if fam.d == 1:
            major = np.zeros((m, 0), dtype=np.int64)
        else:
            w = fam.major_width
            shift = g * w / fam.n_grid_shifts
            cols = [np.floor((_col_dot(self.qpos, row) - shift) / w).astype(np.int64)
                    for row in basis]
            major = np.stack(cols, axis=1)
        M = fam.params.minor_halfwindow
        s = _col_dot(self.qpos, theta)
        minor = np.clip(np.floor(s / fam.minor_width).astype(np.int64) + M, 0, 2 * M)
        got = (major, minor)
        if len(self._buckets) > 8192:
            self._buckets.clear()
        self._buckets[p_idx] = got
        return got


# ---------------------------------------------------------------------------
# Per-strip strategy trees and the layer (one tree at one cell)
# ---------------------------------------------------------------------------


@dataclass
class LayerView:
    """The k-th partial tree at one cell, as rooted member-level structure."""

    root: int
    parent: dict[int, tuple[int, float]]     # member -> (parent member, weight)
    children: dict[int, list[int]]
    dist_to_root: dict[int, float]
    edges: list[tuple[int, int, float]]
    strip_members: set[int]                  # members in a strategy tree

    def path_to_root(self, a: int) -> float:
        return self.dist_to_root[a]

    def path(self, a: int, b: int) -> float:
        """Weight of the a-b path inside the layer."""
        da, db = self.dist_to_root[a], self.dist_to_root[b]
        dist = 0.0
        while a != b:
            if da >= db:
                pa, w = self.parent[a]
                dist += w
                a, da = pa, self.dist_to_root[pa]
            else:
                pb, w = self.parent[b]
                dist += w
                b, db = pb, self.dist_to_root[pb]
        return dist


def _strip_tree_edges(strategy: str, A: list[int], B: list[int], scores,
                      offsets, box) -> tuple[list[tuple[int, int]], int]:
    """Edges (child, parent) of one per-strip tree and its root member.

    A-side points sit in the lower minor strip; a* is the A point of maximum
    score.  `offsets(i)` yields cross-section coordinates inside the strip
    (used by the dyadic strategies), `box` the per-axis cross-section widths.
    """
    a_star = max(A, key=lambda i: (scores[i], -i))
    edges: list[tuple[int, int]] = []
    rest_a = sorted((i for i in A if i != a_star), key=lambda i: (-scores[i], i))
    rest_b = sorted(B, key=lambda i: (scores[i], i))

    dd = len(box)
    if dd == 0:
        # d=1: empty cross-section; a score-sorted path is exact and degree <= 2
        chain = sorted(A + B, key=lambda i: (scores[i], i))
        for prev, cur in zip(chain, chain[1:]):
            edges.append((cur, prev))
        return edges, chain[0]

    if strategy == "star":
        for i in rest_a + rest_b:
            edges.append((i, a_star))
        return edges, a_star

    if strategy == "balanced-score":
        for seq in (rest_a, rest_b):
            for t, i in enumerate(seq):
                parent = a_star if t == 0 else seq[(t - 1) // 2]
                edges.append((i, parent))
        return edges, a_star

    binary = strategy == "dyadic-binary"
    for seq in (rest_a, rest_b):
        if not seq:
            continue
        root = seq[0]
        edges.append((root, a_star))
        # trie node: member -> (lo, hi, depth, children dict)
        tree: dict[int, tuple[list[float], list[float], int, dict]] = {
            root: (list([0.0] * dd), list(box), 0, {})}
        for i in seq[1:]:
            off = offsets(i)
            node = root
            while True:
                lo, hi, depth, kids = tree[node]
                if binary:
                    axis = depth % dd
                    mid = (lo[axis] + hi[axis]) / 2.0
                    key = int(off[axis] >= mid)
                else:
                    mids = [(lo[a] + hi[a]) / 2.0 for a in range(dd)]
                    key = sum((off[a] >= mids[a]) << a for a in range(dd))
                child = kids.get(key)
                if child is None:
                    nlo, nhi = list(lo), list(hi)
                    if binary:
                        if key:
                            nlo[axis] = mid
                        else:
                            nhi[axis] = mid
                    else:
                        for a in range(dd):
                            if (key >> a) & 1:
                                nlo[a] = mids[a]
                            else:
                                nhi[a] = mids[a]
                    kids[key] = i
                    tree[i] = (nlo, nhi, depth + 1, {})
                    edges.append((i, node))
                    break
                node = child
    return edges, a_star


def _strip_groups(frame: CellFrame, p_idx: int, u1: int, u2: int):
    """Members of the two minor strips, grouped by major strip id."""
    major, minor = frame.bucket(p_idx)
    strips: dict[tuple, tuple[list[int], list[int]]] = {}
    for i in np.nonzero((minor == u1) | (minor == u2))[0]:
        i = int(i)
        key = tuple(major[i])
        a, b = strips.setdefault(key, ([], []))
        (a if minor[i] == u1 else b).append(i)
    return strips


def _strip_context(frame: CellFrame, p_idx: int):
    """(scores, offsets fn factory, box) for the strategy builders."""
    fam = frame.family
    dir_idx, g = fam.split_index(p_idx)
    theta, basis = fam.dir_data(dir_idx)
    scores = [_dot(theta, frame.loc_t[i]) for i in range(frame.m)]
    if fam.d == 1:
        return scores, (lambda key: (lambda i: ())), []
    w = fam.major_width
    shift = g * w / fam.n_grid_shifts
    box = [w] * (fam.d - 1)

    def offsets_for(key):
        lower = [kk * w + shift for kk in key]
        def off(i):
            pos = frame.qpos_t[i]
            return [_dot(row, pos) - lo for row, lo in zip(basis, lower)]
        return off

    return scores, offsets_for, box


def build_layer(frame: CellFrame, k: int, strategy: str, rep_member: int,
                spanning: bool = True) -> LayerView:
    """Materialize the k-th partial tree on a cell's members.

    With spanning=True (the assembly's mode) every member enters the balanced
    binary join; otherwise only the per-strip trees and their root join are
    built (the paper's literal subset tree).
    """
    fam = frame.family
    p_idx, u1, u2 = fam.k_split(k)
    m = frame.m
    strips = _strip_groups(frame, p_idx, u1, u2)
    scores, offsets_for, box = _strip_context(frame, p_idx)

    in_strip_tree: set[int] = set()
    raw_edges: list[tuple[int, int]] = []
    roots: list[int] = []
    for key in sorted(strips):
        A, B = strips[key]
        if not A or not B:
            continue
        edges, root = _strip_tree_edges(strategy, A, B, scores,
                                        offsets_for(key), box)
        raw_edges.extend(edges)
        roots.append(root)
        in_strip_tree.update(A)
        in_strip_tree.update(B)

    # balanced binary join over strip roots (and every leftover member when spanning)
    groups = list(roots)
    if spanning:
        groups += [i for i in range(m) if i not in in_strip_tree]
    for t in range(1, len(groups)):
        raw_edges.append((groups[t], groups[(t - 1) // 2]))

    if spanning or rep_member in in_strip_tree:
        root_member = rep_member
    else:
        root_member = groups[0] if groups else rep_member

    # orient everything toward the root member
    adj: dict[int, list[tuple[int, float]]] = {i: [] for i in range(m)}
    edges_w: list[tuple[int, int, float]] = []
    for a, b in raw_edges:
        w = math.dist(frame.loc_t[a], frame.loc_t[b])
        adj[a].append((b, w))
        adj[b].append((a, w))
        edges_w.append((a, b, w))
    parent: dict[int, tuple[int, float]] = {}
    children: dict[int, list[int]] = {i: [] for i in range(m)}
    dist: dict[int, float] = {root_member: 0.0}
    stack = [root_member]
    while stack:
        u = stack.pop()
        for v, w in adj[u]:
            if v not in dist:
                parent[v] = (u, w)
                children[u].append(v)
                dist[v] = dist[u] + w
                stack.append(v)
    for lst in children.values():
        lst.sort()
    return LayerView(root=root_member, parent=parent, children=children,
                     dist_to_root=dist, edges=edges_w, strip_members=in_strip_tree)


def strip_pair_path(frame: CellFrame, p_idx: int, u1: int, u2: int,
                    strategy: str, ta: int, tb: int) -> float:
    """Path weight between two members through their common strip tree.

    Both members must be co-stripped under partition p_idx with minor
    offsets u1 and u2; this is the fast path of the virtual evaluator (the
    strip tree is built on the one strip that contains the pair).
    """
    fam = frame.family
    major, minor = frame.bucket(p_idx)
    key = tuple(major[ta])
    sel = (minor == u1) | (minor == u2)
    if fam.d >= 2:
        same = np.ones(frame.m, dtype=bool)
        for a in range(major.shape[1]):
            same &= major[:, a] == key[a]
        sel &= same
    A: list[int] = []
    B: list[int] = []
    for i in np.nonzero(sel)[0]:
        i = int(i)
        (A if minor[i] == u1 else B).append(i)
    scores, offsets_for, box = _strip_context(frame, p_idx)
    edges, root = _strip_tree_edges(strategy, A, B, scores, offsets_for(key), box)
    parent: dict[int, int] = {}
    for c, p in edges:
        parent[c] = p
    wcache: dict[int, float] = {root: 0.0}

    def depth_dist(i: int) -> float:
        path = []
        while i not in wcache:
            path.append(i)
            i = parent[i]
        base = wcache[i]
        for j in reversed(path):
            base += math.dist(frame.loc_t[j], frame.loc_t[parent[j]])
            wcache[j] = base
        return wcache[path[0]] if path else base

    # ta and tb lie on opposite sides of a*; their path goes through the root
    da = depth_dist(ta)
    db = depth_dist(tb)
    # walk to the common ancestor explicitly (handles same-side queries too)
    anc_a = set()
    i = ta
    while True:
        anc_a.add(i)
        if i == root:
            break
        i = parent[i]
    j = tb
    while j not in anc_a:
        j = parent[j]
    return da + db - 2.0 * depth_dist(j)


# ---------------------------------------------------------------------------
# Standalone partial cover over a point set (the spec operation)
# ---------------------------------------------------------------------------


def build_strip_pair_tree(A: np.ndarray, B: np.ndarray, theta: np.ndarray,
                          strategy: str = "star"):
    """Tree on A u B for one strip pair; A must be nonempty.

    Returns a CoverTree with node ids 0..len(A)+len(B)-1 (A first).
    """
    from .tree_model import CoverTree, TreeNode

    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.asarray(B, dtype=np.float64)
    B = B.reshape(0, A.shape[1]) if B.size == 0 else np.atleast_2d(B)
    if A.shape[0] == 0:
        raise ValueError("A must be nonempty")
    locs = np.vstack([A, B])
    theta_t = tuple(np.asarray(theta, dtype=np.float64))
    loc_t = [tuple(row) for row in locs]
    scores = [_dot(theta_t, p) for p in loc_t]
    a_ids = list(range(A.shape[0]))
    b_ids = list(range(A.shape[0], locs.shape[0]))
    d = locs.shape[1]
    if d >= 2:
        basis = [tuple(row) for row in orthonormal_complement(np.array(theta_t))]
        proj = [[_dot(row, p) for row in basis] for p in loc_t]
        lower = [min(pr[a] for pr in proj) for a in range(d - 1)]
        box = [max(max(pr[a] for pr in proj) - lower[a], 1e-300) * (1 + 1e-12)
               for a in range(d - 1)]
        def offsets(i):
            return [proj[i][a] - lower[a] for a in range(d - 1)]
    else:
        box = []
        def offsets(i):
            return ()
    edges, root = _strip_tree_edges(strategy, a_ids, b_ids, scores, offsets, box)
    nodes = [TreeNode(i, i, locs[i]) for i in range(locs.shape[0])]
    tree_edges = [(a, b, math.dist(loc_t[a], loc_t[b])) for a, b in edges]
    return CoverTree(nodes, tree_edges, root)


class PartialCoverFamily:
    """Lazy sequence of the tau trees of one (mu, Delta)-partial cover."""

    def __init__(self, points: np.ndarray, delta: float, params: CoverParams,
                 strategy: str = "dyadic-binary", spanning: bool = True):
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
        self.strategy = strategy
        self.spanning = spanning
        self.family = build_strip_family(params, delta)
        side = delta / math.sqrt(params.d)
        corner = pts.min(axis=0) if n else np.zeros(params.d)
        self.frame = CellFrame(family=self.family, corner=corner, side=side,
                               locations=pts)
        cand = [(pts[i], i) for i in range(n)]
        self.rep_member = _lex_min(cand) if n else 0
        self._cache: dict[int, LayerView] = {}

    def __len__(self) -> int:
        return self.family.size()

    def size(self) -> int:
        return len(self)

    def witness(self, a: int, b: int) -> int | None:
        """k-index of a tree serving the (quantized-far) pair, or None."""
        if not self.frame.far_gate(a, b):
            return None
        found = self.frame.witness(a, b)
        if found is None:
            return None
        p_idx, u1, u2 = found
        return self.family.k_of(p_idx, u1, u2)

    def layer(self, k: int) -> LayerView:
        view = self._cache.get(k)
        if view is None:
            view = build_layer(self.frame, k, self.strategy, self.rep_member,
                               spanning=self.spanning)
            self._cache[k] = view
        return view

    def pair_distance(self, k: int, a: int, b: int) -> float:
        return self.layer(k).path(a, b)

    def __getitem__(self, k: int):
        """Materialize tree k as a CoverTree over the input point ids."""
        from .tree_model import CoverTree, TreeNode

        if not (0 <= k < len(self)):
            raise IndexError("tree index out of range")
        view = self.layer(k)
        if self.spanning:
            keep = list(range(self.frame.m))
        else:
            keep = sorted(view.dist_to_root)
        keep_set = set(keep)
        nodes = [TreeNode(i, i, self.points[i]) for i in keep]
        edges = [(a, b, w) for a, b, w in view.edges if a in keep_set and b in keep_set]
        return CoverTree(nodes, edges, view.root, index=(0, 0, k))

    def witness_indices(self) -> list[int]:
        """The k of every far pair's witness tree (exhaustive over pairs)."""
        ks: set[int] = set()
        m = self.frame.m
        for a in range(m):
            for b in range(a + 1, m):
                k = self.witness(a, b)
                if k is not None:
                    ks.add(k)
        return sorted(ks)


def _lex_min(candidates) -> int:
    best = 0
    bkey = tuple(candidates[0][0]) + (candidates[0][1],)
    for t in range(1, len(candidates)):
        key = tuple(candidates[t][0]) + (candidates[t][1],)
        if key < bkey:
            best, bkey = t, key
    return best


def partial_cover_nonsteiner(points: np.ndarray, delta: float, params: CoverParams,
                             strategy: str = "dyadic-binary",
                             spanning: bool = True) -> PartialCoverFamily:
    """The (mu, Delta)-partial tree cover of a point set, as a lazy family."""
    return PartialCoverFamily(points, delta, params, strategy, spanning)
