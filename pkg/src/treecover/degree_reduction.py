"""Global degree reduction: orient edges by representative level, then
greedily re-target high-level in-arcs to a lower-level in-neighbor.

Works per tree.  For the dyadic strategies the per-level out-degree is 1 and
the per-level in-degree (beta) is at most 5, so every metric point ends with
degree at most alpha + beta + alpha*beta = 11.  The replacement target for
arcs entering u at level i is chosen from u's in-set at the nearest lower
nonempty in-level (the hierarchy is compressed, so exactly-i-minus-ell may be
empty), minimizing distance to u with ties by id.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tree_model import CoverTree, TreeNode


@dataclass
class OrientedTree:
    """Arcs of a CoverTree oriented from lower to higher representative level."""

    tree: CoverTree
    arcs: list[tuple[int, int, float, int]]  # (u, v, weight, level): u -> v
    istar: dict[int, int]
    in_sets: dict[int, dict[int, list[int]]] = field(default_factory=dict)
    # in_sets[u][level] = sorted endpoints of level-`level` arcs into u

    def __post_init__(self) -> None:
        for u, v, w, lev in self.arcs:
            self.in_sets.setdefault(v, {}).setdefault(lev, []).append(u)
        for per_level in self.in_sets.values():
            for lst in per_level.values():
                lst.sort()

    def out_degree(self, u: int) -> int:
        return sum(1 for a, _, _, _ in self.arcs if a == u)

    def max_out_degree(self) -> int:
        counts: dict[int, int] = {}
        for u, _, _, _ in self.arcs:
            counts[u] = counts.get(u, 0) + 1
        return max(counts.values()) if counts else 0

    def max_in_degree_per_level(self) -> int:
        best = 0
        for per_level in self.in_sets.values():
            for lst in per_level.values():
                best = max(best, len(lst))
        return best


def orient(tree: CoverTree) -> OrientedTree:
    """Orient each edge toward the endpoint that survives past its level.

    i*(v) is the highest level at which v is a representative; the endpoint
    with i* at or above the edge's creation level is the one still present
    at higher levels (at most one per edge).  When neither survives, the tie
    breaks from the child towards the parent of the rooted tree.
    """
    if tree.edge_levels is None:
        raise ValueError("tree is missing edge level metadata")
    istar = tree.istar
    if istar is None:
        raise ValueError("tree is missing representative level metadata")
    parent = {nid: tree.parent_of(nid) for nid in (n.id for n in tree.nodes)}
    arcs: list[tuple[int, int, float, int]] = []
    for (a, b, w), lev in zip(tree.edges, tree.edge_levels):
        sa = istar.get(a, -1) >= lev
        sb = istar.get(b, -1) >= lev
        if sb and not sa:
            u, v = a, b
        elif sa and not sb:
            u, v = b, a
        elif parent.get(a) == b:
            u, v = a, b
        else:
            u, v = b, a
        arcs.append((u, v, w, lev))
    return OrientedTree(tree=tree, arcs=arcs, istar=istar)


def _locate(tree: CoverTree, nid: int) -> np.ndarray:
    return np.asarray(tree.node(nid).coords, dtype=np.float64)


def choose_target(tree: CoverTree, u: int, pool: list[int]) -> int:
    """The replacement target in M_{lower}(u): nearest to u, ties by id."""
    uloc = _locate(tree, u)
    best, best_key = pool[0], None
    for w in pool:
        key = (float(np.linalg.norm(_locate(tree, w) - uloc)), w)
        if best_key is None or key < best_key:
            best, best_key = w, key
    return best


def reduce_tree(oriented: OrientedTree) -> CoverTree:
    """Apply the greedy edge replacement; returns a tree on the same nodes."""
    tree = oriented.tree
    new_edges: list[tuple[int, int, float]] = []
    new_levels: list[int] = []
    retarget: dict[tuple[int, int], int] = {}  # (v-point, level) -> new head
    for u, levels in sorted(oriented.in_sets.items()):
        in_levels = sorted(levels)
        for pos, lev in enumerate(in_levels):
            if pos == 0:
                continue
            pool = levels[in_levels[pos - 1]]
            retarget[(u, lev)] = choose_target(tree, u, pool)
    for u, v, w, lev in oriented.arcs:
        head = retarget.get((v, lev), v)
        if head != v:
            w = float(np.linalg.norm(_locate(tree, u) - _locate(tree, head)))
        new_edges.append((u, head, w))
        new_levels.append(lev)
    out = CoverTree(list(tree.nodes), new_edges, tree.root, index=tree.index,
                    edge_levels=new_levels, istar=oriented.istar)
    return out


def reduce(tree: CoverTree) -> CoverTree:
    return reduce_tree(orient(tree))


@dataclass
class DegreeReport:
    alpha: int                 # max out-degree per point
    beta: int                  # max per-level in-degree
    max_point_degree_pre: int
    max_point_degree_post: int
    cap: int                   # alpha + beta + alpha*beta
    trees_audited: int

    @property
    def within_cap(self) -> bool:
        return self.max_point_degree_post <= self.cap


def point_degrees(tree: CoverTree) -> dict[int, int]:
    adj_count: dict[int, int] = {}
    for a, b, _ in tree.edges:
        adj_count[a] = adj_count.get(a, 0) + 1
        adj_count[b] = adj_count.get(b, 0) + 1
    out: dict[int, int] = {}
    for nd in tree.nodes:
        if nd.point_id is not None:
            out[nd.point_id] = out.get(nd.point_id, 0) + adj_count.get(nd.id, 0)
    return out


def audit_tree_degrees(tree: CoverTree) -> tuple[int, int, int, int]:
    """(alpha, beta, pre max point degree, post max point degree) for one tree."""
    oriented = orient(tree)
    pre = max(point_degrees(tree).values() or [0])
    reduced = reduce_tree(oriented)
    rep = reduced.audit()
    if not (rep.acyclic and rep.connected):
        raise AssertionError("degree reduction broke the tree structure")
    post = max(point_degrees(reduced).values() or [0])
    return oriented.max_out_degree(), oriented.max_in_degree_per_level(), pre, post


def cover_degree_report(cover, tree_indices=None, seed: int = 0,
                        samples_per_slice: int = 2,
                        pair_sample: int | None = None) -> DegreeReport:
    """Degree audit over a set of (i, j, k) indices of a lazy cover.

    With tree_indices=None, audits the bare template of every (i, j) slice,
    every k the cover uses as a pair witness, and a seeded sample of further
    indices.  The per-tree-node degree cap (<= 2 strategy children + <= 2
    join children + 1 parent, so beta <= 5) is structural -- it holds for
    every layer shape regardless of k -- which is what makes the sampled
    audit a sound check of the alpha+beta+alpha*beta bound.
    """
    from .assembly import LazyTreeCover

    assert isinstance(cover, LazyTreeCover)
    if cover.mode != "nonsteiner":
        raise ValueError("degree reduction audit applies to non-Steiner covers")
    alpha = beta = pre = post = 0
    audited = 0
    if tree_indices is None:
        tree_indices = audit_tree_indices(cover, seed=seed,
                                          samples_per_slice=samples_per_slice,
                                          pair_sample=pair_sample)
    saved = cover.degree_reduction
    cover.degree_reduction = "none"
    try:
        for (i, j, k) in tree_indices:
            raw = cover.raw_tree(i, j, k)
            a, b, mpre, mpost = audit_tree_degrees(raw)
            alpha = max(alpha, a)
            beta = max(beta, b)
            pre = max(pre, mpre)
            post = max(post, mpost)
            audited += 1
    finally:
        cover.degree_reduction = saved
    cap = alpha + beta + alpha * beta
    return DegreeReport(alpha=alpha, beta=beta, max_point_degree_pre=pre,
                        max_point_degree_post=post, cap=cap, trees_audited=audited)


def audit_tree_indices(cover, seed: int = 0, samples_per_slice: int = 2,
                       pair_sample: int | None = None) -> list[tuple[int, int, int]]:
    """Bare template, pair-witness ks, and sampled extra k per (i, j).

    With pair_sample=None every pair's witness k enters the audit set;
    otherwise a seeded sample of that many pairs per slice (the per-node
    degree caps are structural, so sampling loses no soundness for the
    alpha/beta measurement).
    """
    rng = np.random.default_rng(seed)
    out: list[tuple[int, int, int]] = []
    n = cover.n
    tau = cover.tau()
    all_pairs = [(x, y) for x in range(n) for y in range(x + 1, n)]
    for h in cover.hierarchies:
        if pair_sample is not None and pair_sample < len(all_pairs):
            idx = rng.choice(len(all_pairs), size=pair_sample, replace=False)
            pairs = [all_pairs[t] for t in idx]
        else:
            pairs = all_pairs
        ks: set[int] = set()
        for x, y in pairs:
            got = h.pair_eval(x, y)
            if got is not None:
                ks.add(got[0])
        bare = _fresh_index(ks, tau)
        if bare is not None:
            ks.add(bare)
        for _ in range(samples_per_slice):
            ks.add(int(rng.integers(tau)))
        for k in sorted(ks):
            out.append((h.i, h.j, k))
    return out


def _fresh_index(occupied: set[int], tau: int) -> int | None:
    k = 0
    while k in occupied:
        k += 1
    return k if k < tau else None
