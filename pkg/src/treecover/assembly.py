"""Hierarchical assembly: per-cell partial covers merged across congruence
classes and shifts into the full tree cover.

The cover is *lazy*: the count is the exact formula (D+1) * ell * tau, and a
tree T_{i,j,k} is only materialized on demand.  Tree distances are evaluated
virtually: climb from each endpoint through its representative chain to the
pair's LCA cell, cross the cell's k-th partial tree, climb down.  Virtual
and materialized distances agree exactly (same layers, same floats).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import CoverParams, NONSTEINER, STEINER
from .quadtree import CNode, ContractedQuadtree, ShiftedQuadtreeFamily, build_family, contract
from .partial_nonsteiner import (CellFrame, LayerView, build_layer,
                                 build_strip_family, strip_pair_path)
from .partial_steiner import SlabFamily
from .tree_model import CoverTree, TreeNode


def select_representative(candidates: list[tuple[np.ndarray, int]]) -> int:
    """Index of the candidate with lexicographically smallest location, ties by id."""
    if not candidates:
        raise ValueError("candidate list must be nonempty")
    best = 0
    for idx in range(1, len(candidates)):
        loc, cid = candidates[idx]
        bloc, bcid = candidates[best]
        key = tuple(loc) + (cid,)
        bkey = tuple(bloc) + (bcid,)
        if key < bkey:
            best = idx
    return best


@dataclass
class Member:
    location: np.ndarray
    origin: tuple           # ('p', point id) or ('c', child CNode index)
    pid: int | None         # canonical point id (None for steiner cell children)


@dataclass
class CellContext:
    """Everything the lazy evaluator needs at one contracted cell."""

    node: CNode
    corner: np.ndarray
    side: float
    delta: float
    members: list[Member]
    member_index: dict[tuple, int]
    rep_member: int = -1          # nonsteiner only
    frame: CellFrame | None = None
    slab_family: SlabFamily | None = None
    layers: dict[int, LayerView] = field(default_factory=dict)

    @property
    def rep(self) -> Member:
        return self.members[self.rep_member]


class ClassHierarchy:
    """One (shift i, class j) slice of the cover."""

    def __init__(self, cover: "LazyTreeCover", i: int, j: int):
        self.cover = cover
        self.i = i
        self.j = j
        self.contracted: ContractedQuadtree = contract(cover.family, i, j)
        self.ctx: dict[int, CellContext] = {}
        self._build_contexts()
        self.chains: dict[int, list[CNode]] = {}
        for pid, node in self.contracted.attach.items():
            chain = [node]
            while chain[-1].parent is not None:
                chain.append(chain[-1].parent)
            self.chains[pid] = chain

    # -- construction ---------------------------------------------------------

    def _build_contexts(self) -> None:
        cover = self.cover
        params = cover.params
        steiner = params.mode == STEINER
        for node in self.contracted.nodes:  # children before parents
            corner = self.contracted.corner(node)
            side = self.contracted.side(node)
            delta = self.contracted.delta(node)
            members: list[Member] = []
            for child in node.cell_children:
                cctx = self.ctx[child.index]
                if steiner:
                    members.append(Member(location=None, origin=("c", child.index),
                                          pid=None))
                else:
                    members.append(Member(location=cctx.rep.location,
                                          origin=("c", child.index),
                                          pid=cctx.rep.pid))
            for pid in node.point_children:
                members.append(Member(location=cover.points_norm[pid],
                                      origin=("p", pid), pid=pid))
            index = {m.origin: t for t, m in enumerate(members)}
            ctx = CellContext(node=node, corner=corner, side=side, delta=delta,
                              members=members, member_index=index)
            if steiner:
                ctx.slab_family = SlabFamily(params=params, delta=delta,
                                             corner=corner,
                                             extents=np.full(params.d, side))
            else:
                ctx.rep_member = select_representative(
                    [(m.location, m.pid) for m in members])
            self.ctx[node.index] = ctx

    def frame(self, ctx: CellContext) -> CellFrame:
        if ctx.frame is None:
            fam = self.cover.strip_family(ctx.delta)
            locs = np.array([m.location for m in ctx.members])
            ctx.frame = CellFrame(family=fam, corner=ctx.corner, side=ctx.side,
                                  locations=locs)
        return ctx.frame

    def layer(self, ctx: CellContext, k: int) -> LayerView:
        view = ctx.layers.get(k)
        if view is None:
            view = build_layer(self.frame(ctx), k, self.cover.strategy,
                               ctx.rep_member, spanning=True)
            ctx.layers[k] = view
        return view

    # -- steiner geometry ------------------------------------------------------

    def steiner_center(self, ctx: CellContext, k: int) -> np.ndarray:
        return ctx.slab_family.center(k)

    def steiner_member_location(self, ctx: CellContext, t: int, k: int) -> np.ndarray:
        m = ctx.members[t]
        if m.origin[0] == "p":
            return m.location
        return self.steiner_center(self.ctx[m.origin[1]], k)

    # -- chains ----------------------------------------------------------------

    def chain(self, pid: int) -> list[CNode]:
        return self.chains[pid]

    def member_on_chain(self, node: CNode, pid: int) -> int:
        """Member index, at `node`, of the branch containing point pid."""
        chain = self.chains[pid]
        ctx = self.ctx[node.index]
        pos = chain.index(node)
        if pos == 0:
            return ctx.member_index[("p", pid)]
        return ctx.member_index[("c", chain[pos - 1].index)]

    # -- virtual distances -------------------------------------------------------

    def climb_nonsteiner(self, pid: int, top: CNode, k: int) -> float:
        """Path weight from point pid up to the representative of its child-of-top."""
        total = 0.0
        chain = self.chains[pid]
        for node in chain:
            if node is top:
                break
            ctx = self.ctx[node.index]
            t = self.member_on_chain(node, pid)
            if t != ctx.rep_member:
                total += self.layer(ctx, k).path_to_root(t)
        return total

    def climb_steiner(self, pid: int, top: CNode, k: int) -> float:
        """Path weight from point pid to the Steiner center of `top` for tree k."""
        chain = self.chains[pid]
        loc = tuple(self.cover.points_norm[pid])
        total = 0.0
        for node in chain:
            ctx = self.ctx[node.index]
            center = tuple(self.steiner_center(ctx, k))
            total += math.dist(loc, center)
            if node is top:
                break
            loc = center
        return total

    def pair_eval(self, x: int, y: int) -> tuple[int, float] | None:
        """(k, delta_T(x,y)) through this slice's witness tree, or None."""
        cq = self.contracted
        ax, ay = cq.attach[x], cq.attach[y]
        node = cq.lca(ax, ay)
        ctx = self.ctx[node.index]
        if self.cover.params.mode == STEINER:
            return self._pair_eval_steiner(ctx, node, x, y)
        tx = self.member_on_chain(node, x)
        ty = self.member_on_chain(node, y)
        if tx == ty:
            return None
        frame = self.frame(ctx)
        if not frame.far_gate(tx, ty):
            return None
        found = frame.witness(tx, ty)
        if found is None:
            return None
        p_idx, u1, u2 = found
        k = frame.family.k_of(p_idx, u1, u2)
        if ax is node and ay is node:
            # both endpoints are direct point children: no climb, and the
            # pair's path stays inside its strip tree
            return k, strip_pair_path(frame, p_idx, u1, u2,
                                      self.cover.strategy, tx, ty)
        dist = (self.climb_nonsteiner(x, node, k)
                + self.layer(ctx, k).path(tx, ty)
                + self.climb_nonsteiner(y, node, k))
        return k, dist

    def _pair_eval_steiner(self, ctx: CellContext, node: CNode,
                           x: int, y: int) -> tuple[int, float] | None:
        px = self.cover.points_norm[x]
        py = self.cover.points_norm[y]
        cands = ctx.slab_family.witness_candidates(px, py)
        if not cands:
            return None
        best_k, best_d = None, math.inf
        for k in cands:
            d = self.climb_steiner(x, node, k) + self.climb_steiner(y, node, k)
            if d < best_d:
                best_k, best_d = k, d
        return best_k, best_d

    def cell_radius(self, ctx: CellContext, k: int,
                    memo: dict[int, float] | None = None) -> float:
        """Max distance from the cell's piece root to any of its points (tree k)."""
        if memo is None:
            memo = {}
        got = memo.get(ctx.node.index)
        if got is not None:
            return got
        best = 0.0
        for t, m in enumerate(ctx.members):
            if self.cover.params.mode == STEINER:
                base = float(np.linalg.norm(
                    self.steiner_member_location(ctx, t, k) - self.steiner_center(ctx, k)))
            else:
                base = self.layer(ctx, k).path_to_root(t)
            if m.origin[0] == "c":
                base += self.cell_radius(self.ctx[m.origin[1]], k, memo)
            best = max(best, base)
        memo[ctx.node.index] = best
        return best


class LazyTreeCover:
    """The (D+1)*ell*tau tree cover, materialized on demand."""

    def __init__(self, points: np.ndarray, params: CoverParams,
                 degree_reduction: str = "none"):
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if pts.shape[0] < 1:
            raise ValueError("point set must be nonempty")
        self.points = pts
        self.params = params
        self.mode = params.mode
        self.strategy = params.strategy
        if degree_reduction not in ("none", "global"):
            raise ValueError("degree_reduction must be 'none' or 'global'")
        if degree_reduction == "global" and self.mode == STEINER:
            raise ValueError("degree reduction applies to the non-Steiner cover only")
        self.degree_reduction = degree_reduction
        self.family: ShiftedQuadtreeFamily = build_family(pts, params)
        self.points_norm = self.family.points
        self.hierarchies: list[ClassHierarchy] = [
            ClassHierarchy(self, i, j)
            for i in range(params.n_shifts) for j in range(params.ell)]
        self._strip_families: dict[float, object] = {}
        self._tree_cache: dict[tuple[int, int, int], CoverTree] = {}

    # -- shared geometry -------------------------------------------------------

    def strip_family(self, delta: float):
        fam = self._strip_families.get(delta)
        if fam is None:
            fam = build_strip_family(self.params, delta)
            self._strip_families[delta] = fam
        return fam

    # -- index plumbing ----------------------------------------------------------

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def tree_count(self) -> int:
        return self.params.tree_count()

    def __len__(self) -> int:
        return self.tree_count()

    def tau(self) -> int:
        return self.params.tau()

    def hierarchy(self, i: int, j: int) -> ClassHierarchy:
        return self.hierarchies[i * self.params.ell + j]

    def flat_index(self, i: int, j: int, k: int) -> int:
        return (i * self.params.ell + j) * self.tau() + k

    def split_index(self, t: int) -> tuple[int, int, int]:
        ij, k = divmod(t, self.tau())
        i, j = divmod(ij, self.params.ell)
        return i, j, k

    # -- pair evaluation -----------------------------------------------------------

    def pair_candidates(self, x: int, y: int) -> list[tuple[int, int, int, float]]:
        """Witness trees (i, j, k, virtual distance) of all (i, j) slices."""
        out = []
        for h in self.hierarchies:
            got = h.pair_eval(x, y)
            if got is not None:
                out.append((h.i, h.j, got[0], got[1]))
        return out

    def best_candidate(self, x: int, y: int,
                       early_exit: float = 1e-4) -> tuple[int, int, int, float] | None:
        """Best witness tree over the (i, j) slices.

        Tree distances never undercut the Euclidean distance, so the scan
        stops once a candidate is within (1 + early_exit) of it; pass
        early_exit=None to always evaluate every slice.
        """
        floor_d = None
        if early_exit is not None:
            floor_d = (1.0 + early_exit) * float(
                np.linalg.norm(self.points_norm[x] - self.points_norm[y]))
        best = None
        for h in self.hierarchies:
            got = h.pair_eval(x, y)
            if got is None:
                continue
            cand = (h.i, h.j, got[0], got[1])
            if best is None or (cand[3], cand[:3]) < (best[3], best[:3]):
                best = cand
            if floor_d is not None and best[3] <= floor_d:
                break
        return best

    # -- materialization ---------------------------------------------------------

    def raw_tree(self, i: int, j: int, k: int) -> CoverTree:
        """Materialize T_{i,j,k} before any degree reduction."""
        if not (0 <= k < self.tau()):
            raise IndexError("partial index out of range")
        h = self.hierarchy(i, j)
        n = self.n
        translation = self.family.translation
        if self.mode == STEINER:
            return self._raw_tree_steiner(h, i, j, k)
        nodes: dict[int, TreeNode] = {}
        edges: list[tuple[int, int, float]] = []
        edge_levels: list[int] = []
        for pid in range(n):
            level = h.chains[pid][0].level
            nodes[pid] = TreeNode(pid, pid, self.points[pid], level=level)
        root_pid = 0
        for node in h.contracted.nodes:
            ctx = h.ctx[node.index]
            if len(ctx.members) > 1:
                view = h.layer(ctx, k)
                for a, b, w in view.edges:
                    pa, pb = ctx.members[a].pid, ctx.members[b].pid
                    edges.append((pa, pb, w))
                    edge_levels.append(node.level)
            if node.parent is None:
                root_pid = ctx.rep.pid
        # i*: highest level at which a point is a representative (never: -1)
        istar: dict[int, int] = {}
        for node in h.contracted.nodes:
            ctx = h.ctx[node.index]
            rep_pid = ctx.rep.pid
            istar[rep_pid] = max(istar.get(rep_pid, -1), node.level)
        tree = CoverTree(list(nodes.values()), edges, root_pid, index=(i, j, k),
                         edge_levels=edge_levels, istar=istar)
        if self.degree_reduction == "global":
            from .degree_reduction import orient, reduce_tree
            tree = reduce_tree(orient(tree))
        return tree

    def _raw_tree_steiner(self, h: ClassHierarchy, i: int, j: int, k: int) -> CoverTree:
        n = self.n
        nodes: dict[int, TreeNode] = {}
        edges: list[tuple[int, int, float]] = []
        edge_levels: list[int] = []
        for pid in range(n):
            nodes[pid] = TreeNode(pid, pid, self.points[pid],
                                  level=h.chains[pid][0].level)
        root_id = 0
        for node in h.contracted.nodes:
            ctx = h.ctx[node.index]
            sid = n + node.index
            center = h.steiner_center(ctx, k)
            nodes[sid] = TreeNode(sid, None, center + self.family.translation,
                                  level=node.level)
            for t, m in enumerate(ctx.members):
                other = m.origin[1] if m.origin[0] == "p" else n + m.origin[1]
                loc = h.steiner_member_location(ctx, t, k)
                w = float(np.linalg.norm(loc - center))
                edges.append((other, sid, w))
                edge_levels.append(node.level)
            if node.parent is None:
                root_id = sid
        return CoverTree(list(nodes.values()), edges, root_id, index=(i, j, k),
                         edge_levels=edge_levels)

    def tree(self, i: int, j: int, k: int) -> CoverTree:
        key = (i, j, k)
        cached = self._tree_cache.get(key)
        if cached is None:
            cached = self.raw_tree(i, j, k)
            if len(self._tree_cache) > 20000:
                self._tree_cache.clear()
            self._tree_cache[key] = cached
        return cached

    def pair_tree_distance(self, i: int, j: int, k: int, x: int, y: int,
                           materialized: bool = False) -> float:
        """delta_{T_{i,j,k}}(x, y); virtual unless `materialized`."""
        if materialized or self.degree_reduction == "global":
            return self.tree(i, j, k).tree_distance(x, y)
        h = self.hierarchy(i, j)
        cq = h.contracted
        node = cq.lca(cq.attach[x], cq.attach[y])
        ctx = h.ctx[node.index]
        if self.mode == STEINER:
            return h.climb_steiner(x, node, k) + h.climb_steiner(y, node, k)
        tx = h.member_on_chain(node, x)
        ty = h.member_on_chain(node, y)
        return (h.climb_nonsteiner(x, node, k) + h.layer(ctx, k).path(tx, ty)
                + h.climb_nonsteiner(y, node, k))


def merge_level(previous_pieces: dict[int, CoverTree], partial_tree: CoverTree,
                k: int) -> CoverTree:
    """Identify the roots of child pieces with the vertices of a partial tree.

    `previous_pieces` maps a partial-tree node id to the piece whose root is
    that vertex.  No new edges are added at the junction; the merged object
    is a single tree.  Raises if a piece's root is not a partial-tree vertex.
    """
    part_ids = {nd.id for nd in partial_tree.nodes}
    for vid in previous_pieces:
        if vid not in part_ids:
            raise ValueError(f"piece root {vid} is not a vertex of the partial tree")
    nodes: list[TreeNode] = []
    edges: list[tuple[int, int, float]] = []
    remap: dict[tuple[str, int, int], int] = {}
    next_id = 0

    def add_node(tag: int, nd: TreeNode) -> int:
        nonlocal next_id
        key = ("n", tag, nd.id)
        if key not in remap:
            remap[key] = next_id
            nodes.append(TreeNode(next_id, nd.point_id, nd.coords, nd.level))
            next_id += 1
        return remap[key]

    for nd in partial_tree.nodes:
        add_node(-1, nd)
    for u, v, w in partial_tree.edges:
        edges.append((remap[("n", -1, u)], remap[("n", -1, v)], w))
    for vid, piece in previous_pieces.items():
        # identify piece root with the partial-tree vertex vid
        remap[("n", vid, piece.root)] = remap[("n", -1, vid)]
        for nd in piece.nodes:
            if nd.id != piece.root:
                add_node(vid, nd)
        for u, v, w in piece.edges:
            edges.append((remap[("n", vid, u)], remap[("n", vid, v)], w))
    root = remap[("n", -1, partial_tree.root)]
    return CoverTree(nodes, edges, root)


def build_tree_cover(points: np.ndarray, eps: float, mode: str = NONSTEINER,
                     strategy: str = "dyadic-binary",
                     degree_reduction: str = "none",
                     scaling: float | None = None) -> LazyTreeCover:
    """Build the full (1+eps)-stretch tree cover of a point set."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    params = CoverParams(d=pts.shape[1], eps=eps, mode=mode, strategy=strategy,
                         scaling=scaling)
    return LazyTreeCover(pts, params, degree_reduction=degree_reduction)
