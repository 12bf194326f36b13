"""Shifted compressed quadtrees and their congruence-class (contracted) views.

Coordinates are normalized so the minimum coordinate is 0, then snapped to an
integer grid of 2^RES_BITS cells spanning [0, 2*Lhat), where Lhat is the
extent rounded up to a power of two.  Dyadic cell arithmetic is exact on the
integer grid; a cell at integer level w has float side h * 2^w.

The shifts are nu_i = i * Lhat / (D+1).  Rounding the extent to a power of
two makes the shifts equidistributed modulo every cell side (D+1 is odd), so
for any pair some shift places both points in a cell of side at most
(4*ceil(d/2)+2) * ||pq||.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import CoverParams

RES_BITS = 42


@dataclass(eq=False)
class CompressedNode:
    """A branching cell (or collapsed leaf) of one compressed quadtree."""

    level: int
    coords: tuple[int, ...]
    children: list["CompressedNode"] = field(default_factory=list)
    point_ids: tuple[int, ...] = ()  # nonempty only at leaves

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class CompressedQuadtree:
    shift_index: int
    shift: float
    root: CompressedNode | None
    leaf_level: dict[int, tuple[int, ...]]  # point id -> integer leaf coords

    def iter_nodes(self):
        if self.root is None:
            return
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children)


def _build_compressed(q: np.ndarray, ids: np.ndarray) -> CompressedNode:
    """Iterative compressed build over distinct integer rows."""
    d = q.shape[1]
    sentinel = CompressedNode(level=-1, coords=())
    stack: list[tuple[np.ndarray, np.ndarray, CompressedNode]] = [(q, ids, sentinel)]
    while stack:
        rows, rids, parent = stack.pop()
        m = rows.shape[0]
        if m == 1:
            parent.children.append(
                CompressedNode(level=0, coords=tuple(int(v) for v in rows[0]),
                               point_ids=tuple(int(i) for i in rids)))
            continue
        lo = rows.min(axis=0)
        hi = rows.max(axis=0)
        level = max(int(int(h) ^ int(l)).bit_length() for h, l in zip(hi, lo))
        node = CompressedNode(level=level, coords=tuple(int(v) for v in rows[0] >> level))
        parent.children.append(node)
        child_keys = rows >> (level - 1)
        order = np.lexsort(tuple(child_keys[:, a] for a in range(d - 1, -1, -1)))
        ck = child_keys[order]
        breaks = np.nonzero(np.any(ck[1:] != ck[:-1], axis=1))[0] + 1
        bounds = [0, *breaks.tolist(), m]
        for s, e in zip(bounds[:-1], bounds[1:]):
            idx = order[s:e]
            stack.append((rows[idx], rids[idx], node))
    return sentinel.children[0]


@dataclass
class ShiftedQuadtreeFamily:
    """D+1 compressed quadtrees over shifted copies of the normalized points."""

    params: CoverParams
    points: np.ndarray          # normalized, shape (n, d)
    translation: np.ndarray     # original = normalized + translation
    extent: float               # L
    extent_pow2: float          # Lhat
    h: float                    # base (level-0) cell side
    trees: list[CompressedQuadtree]
    int_coords: list[np.ndarray]  # per shift, (n, d) int64

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def cell_side(self, level: int) -> float:
        return self.h * (1 << level) if level >= 0 else self.h

    def cell_corner(self, shift_index: int, level: int, coords) -> np.ndarray:
        """Corner of a cell in the normalized frame."""
        side = self.cell_side(level)
        return np.asarray(coords, dtype=np.float64) * side - self.trees[shift_index].shift

    def smallest_common_side(self, shift_index: int, x: int, y: int) -> float:
        """Side of the smallest dyadic cell containing both points under a shift."""
        qx = self.int_coords[shift_index][x]
        qy = self.int_coords[shift_index][y]
        level = max(int(int(a) ^ int(b)).bit_length() for a, b in zip(qx, qy))
        return self.cell_side(level)

    def min_common_side(self, x: int, y: int) -> float:
        return min(self.smallest_common_side(i, x, y) for i in range(len(self.trees)))


def build_family(points: np.ndarray, params: CoverParams) -> ShiftedQuadtreeFamily:
    """Build the D+1 shifted compressed quadtrees of Lemma-2.1 style."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[0] < 1:
        raise ValueError("point set must be nonempty")
    if pts.shape[1] != params.d:
        raise ValueError("point dimension does not match params.d")
    if not np.all(np.isfinite(pts)):
        raise ValueError("coordinates must be finite")

    translation = pts.min(axis=0)
    normalized = pts - translation
    extent = float(normalized.max()) if normalized.size else 0.0
    if extent <= 0.0:
        extent_pow2 = 1.0
    else:
        extent_pow2 = float(2.0 ** math.ceil(math.log2(extent)))
    h = 2.0 * extent_pow2 / float(1 << RES_BITS)

    n_shifts = params.n_shifts
    trees: list[CompressedQuadtree] = []
    int_coords: list[np.ndarray] = []
    n = normalized.shape[0]
    all_ids = np.arange(n)
    for i in range(n_shifts):
        shift = i * extent_pow2 / n_shifts
        q = np.floor((normalized + shift) / h).astype(np.int64)
        int_coords.append(q)
        uniq, inverse = np.unique(q, axis=0, return_inverse=True)
        # group original ids by distinct grid row (exact duplicates collapse)
        rep_ids = [[] for _ in range(uniq.shape[0])]
        for pid, u in zip(all_ids, inverse):
            rep_ids[int(u)].append(int(pid))
        if uniq.shape[0] == 1:
            root = CompressedNode(level=0, coords=tuple(int(v) for v in uniq[0]),
                                  point_ids=tuple(rep_ids[0]))
        else:
            root = _build_compressed(uniq, np.arange(uniq.shape[0]))
            root = _attach_ids(root, rep_ids)
        leaf_level = {}
        for pid in range(n):
            leaf_level[pid] = tuple(int(v) for v in q[pid])
        trees.append(CompressedQuadtree(shift_index=i, shift=shift, root=root,
                                        leaf_level=leaf_level))
    return ShiftedQuadtreeFamily(params=params, points=normalized,
                                 translation=translation, extent=extent,
                                 extent_pow2=extent_pow2, h=h, trees=trees,
                                 int_coords=int_coords)


def _attach_ids(root: CompressedNode, rep_ids: list[list[int]]) -> CompressedNode:
    """Rewrite leaf point_ids (indices into distinct rows) to original ids."""
    stack = [root]
    while stack:
        node = stack.pop()
        if node.is_leaf:
            ids: list[int] = []
            for row in node.point_ids:
                ids.extend(rep_ids[row])
            node.point_ids = tuple(sorted(ids))
        else:
            stack.extend(node.children)
    return root


# ---------------------------------------------------------------------------
# Contracted (congruence class) views
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class CNode:
    """A cell of the contracted quadtree (levels == j mod ell only)."""

    index: int
    level: int
    coords: tuple[int, ...]
    parent: "CNode | None" = None
    cell_children: list["CNode"] = field(default_factory=list)
    point_children: list[int] = field(default_factory=list)
    depth: int = 0

    @property
    def n_children(self) -> int:
        return len(self.cell_children) + len(self.point_children)


@dataclass
class ContractedQuadtree:
    """Compressed view of one (shift i, congruence class j) hierarchy."""

    family: ShiftedQuadtreeFamily
    shift_index: int
    class_index: int
    root: CNode
    nodes: list[CNode]            # topological: children before parents
    attach: dict[int, CNode]      # point id -> lowest containing class cell

    def side(self, node: CNode) -> float:
        return self.family.cell_side(node.level)

    def corner(self, node: CNode) -> np.ndarray:
        return self.family.cell_corner(self.shift_index, node.level, node.coords)

    def delta(self, node: CNode) -> float:
        """Delta_w = side * sqrt(d), the diameter bound of the cell."""
        return self.side(node) * math.sqrt(self.family.params.d)

    def lca(self, a: CNode, b: CNode) -> CNode:
        while a.depth > b.depth:
            a = a.parent
        while b.depth > a.depth:
            b = b.parent
        while a is not b:
            a = a.parent
            b = b.parent
        return a

    def lca_cell(self, x: int, y: int) -> CNode:
        """Smallest-diameter contracted cell containing both points."""
        if x not in self.attach or y not in self.attach:
            raise KeyError("point id not in contracted quadtree")
        return self.lca(self.attach[x], self.attach[y])


def contract(family: ShiftedQuadtreeFamily, shift_index: int, class_index: int) -> ContractedQuadtree:
    ell = family.params.ell
    if not (0 <= class_index < ell):
        raise ValueError("class index out of range")
    tree = family.trees[shift_index]
    j = class_index

    def class_key(node: CompressedNode) -> tuple[int, tuple[int, ...]]:
        w = node.level + ((j - node.level) % ell)
        shift = w - node.level
        return w, tuple(c >> shift for c in node.coords)

    cnodes: dict[tuple[int, tuple[int, ...]], CNode] = {}
    counter = 0

    def get_node(key: tuple[int, tuple[int, ...]], parent: CNode | None) -> CNode:
        nonlocal counter
        node = cnodes.get(key)
        if node is None:
            node = CNode(index=counter, level=key[0], coords=key[1], parent=parent)
            counter += 1
            cnodes[key] = node
            if parent is not None:
                parent.cell_children.append(node)
        return node

    root_comp = tree.root
    root_key = class_key(root_comp)
    root = get_node(root_key, None)

    stack: list[tuple[CompressedNode, CNode]] = [(root_comp, root)]
    attach: dict[int, CNode] = {}
    while stack:
        comp, cur = stack.pop()
        if comp.is_leaf:
            for pid in comp.point_ids:
                attach[pid] = cur
                cur.point_children.append(pid)
            continue
        for child in comp.children:
            if child.is_leaf:
                # points attach at the deepest branching class cell
                stack.append((child, cur))
                continue
            key = class_key(child)
            nxt = cur if key == (cur.level, cur.coords) else get_node(key, cur)
            stack.append((child, nxt))

    # deterministic order + depths + topological list
    ordered: list[CNode] = []

    def finalize(node: CNode, depth: int) -> None:
        node.depth = depth
        node.cell_children.sort(key=lambda c: (c.level, c.coords))
        node.point_children.sort()
        for c in node.cell_children:
            finalize(c, depth + 1)
        ordered.append(node)

    finalize(root, 0)
    return ContractedQuadtree(family=family, shift_index=shift_index,
                              class_index=class_index, root=root,
                              nodes=ordered, attach=attach)


def lca_cell(contracted: ContractedQuadtree, x: int, y: int) -> CNode:
    return contracted.lca_cell(x, y)
