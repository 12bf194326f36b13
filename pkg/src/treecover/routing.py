"""Compact routing on the tree cover: interval routing, labeling, decoding.

Per point, the label holds (a) its leaf DFS timestamp in every contracted
quadtree and (b) one record per apex cell (parents of light ancestors, at
most ceil(log2 n)+1 of them): the cell's DFS interval and depth, which child
holds the point (L1), which child is heavy (L2), and the quantized
cell-relative coordinates of the point's representative and of the heavy
child's representative (L3).  Strip indices and tree IDs are *derived* from
the quantized coordinates by the same scalar code the builder uses, so the
decoder reproduces the builder's bucketing bit-exactly; storing one index
per major partition, as the paper's label does, would be hopeless at
~1/eps^{d-1} partitions per scale and is redundant anyway.

Routing itself is stock interval routing with h_u = the maximum timestamp in
u's subtree, in the fixed-port model (ports are a seeded permutation per
node).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import CoverParams
from .quadtree import CNode
from .tree_model import CoverTree


# ---------------------------------------------------------------------------
# Interval routing on one tree
# ---------------------------------------------------------------------------


@dataclass
class NodeTable:
    node: int
    l: int
    h: int
    parent_port: int | None
    children: list[tuple[int, int, int]]  # (port, l_child, h_child)

    def bit_size(self, ts_bits: int, port_bits: int) -> int:
        per_child = port_bits + 2 * ts_bits
        base = 2 * ts_bits + (port_bits if self.parent_port is not None else 0)
        return base + per_child * len(self.children)


@dataclass
class IntervalRouting:
    tree: CoverTree
    tables: dict[int, NodeTable]
    labels: dict[int, int]                 # node -> DFS timestamp
    ports: dict[int, dict[int, int]]       # node -> neighbor -> port
    port_to: dict[int, dict[int, int]]     # node -> port -> neighbor

    def label_of_point(self, pid: int) -> int:
        nodes = self.tree.nodes_of_point(pid)
        if not nodes:
            raise KeyError(f"point {pid} not in tree")
        return self.labels[nodes[0]]

    def node_of_point(self, pid: int) -> int:
        return self.tree.nodes_of_point(pid)[0]


def assign_ports(tree: CoverTree, seed: int = 0) -> dict[int, dict[int, int]]:
    """Adversarial stand-in: a seeded random permutation of ports per node."""
    rng = np.random.default_rng(seed)
    adj = tree.adjacency()
    ports: dict[int, dict[int, int]] = {}
    for nid in sorted(adj):
        nbrs = sorted(v for v, _ in adj[nid])
        perm = rng.permutation(len(nbrs))
        ports[nid] = {nbr: int(perm[t]) for t, nbr in enumerate(nbrs)}
    return ports


def build_interval_routing(tree: CoverTree,
                           ports: dict[int, dict[int, int]] | None = None,
                           seed: int = 0) -> IntervalRouting:
    """DFS-timestamp interval routing tables for every node of the tree."""
    if ports is None:
        ports = assign_ports(tree, seed=seed)
    for nid, pmap in ports.items():
        if sorted(pmap.values()) != list(range(len(pmap))):
            raise ValueError(f"ports at node {nid} are not a bijection")
    adj = tree.adjacency()
    labels: dict[int, int] = {}
    hmax: dict[int, int] = {}
    parent: dict[int, int | None] = {tree.root: None}
    order: list[int] = []
    counter = 0
    stack: list[tuple[int, int | None, bool]] = [(tree.root, None, False)]
    while stack:
        u, p, done = stack.pop()
        if done:
            h = labels[u]
            for v, _ in adj[u]:
                if v != p:
                    h = max(h, hmax[v])
            hmax[u] = h
            continue
        labels[u] = counter
        counter += 1
        parent[u] = p
        order.append(u)
        stack.append((u, p, True))
        for v, _ in sorted(adj[u], reverse=True):
            if v != p:
                stack.append((v, u, False))
    tables: dict[int, NodeTable] = {}
    for u in order:
        p = parent[u]
        kids = [(ports[u][v], labels[v], hmax[v]) for v, _ in sorted(adj[u]) if v != p]
        tables[u] = NodeTable(node=u, l=labels[u], h=hmax[u],
                              parent_port=None if p is None else ports[u][p],
                              children=sorted(kids))
    port_to = {u: {port: v for v, port in pmap.items()} for u, pmap in ports.items()}
    return IntervalRouting(tree=tree, tables=tables, labels=labels, ports=ports,
                           port_to=port_to)


def route_step(table: NodeTable, target_label: int) -> int | None:
    """Next port toward the target, or None when the packet has arrived."""
    if target_label == table.l:
        return None
    for port, l, h in table.children:
        if l <= target_label <= h:
            return port
    if table.parent_port is None:
        raise ValueError("malformed label: target outside the tree's interval")
    return table.parent_port


def route_path(routing: IntervalRouting, s: int, t: int,
               max_hops: int | None = None) -> list[int]:
    """Node path from s to t following the tables (node ids)."""
    if max_hops is None:
        max_hops = len(routing.tree.nodes) + 1
    target = routing.labels[t]
    path = [s]
    node = s
    for _ in range(max_hops):
        port = route_step(routing.tables[node], target)
        if port is None:
            return path
        node = routing.port_to[node][port]
        path.append(node)
    raise RuntimeError("routing did not terminate")


# ---------------------------------------------------------------------------
# Far labels (Lemma 6.2 style)
# ---------------------------------------------------------------------------


def far_labels(points: np.ndarray, mu: float, delta: float) -> np.ndarray:
    """Per-coordinate floor(x / (delta/(4*mu*d))) labels, origin at the min."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    d = pts.shape[1]
    quantum = delta / (4.0 * mu * d)
    rel = pts - pts.min(axis=0)
    return np.floor(rel / quantum).astype(np.int64)


def far_decide(label_a: np.ndarray, label_b: np.ndarray, mu: float,
               delta: float) -> str:
    """"far" certifies distance >= delta/(4 mu); "notfar" refutes (mu, delta)-far.

    Both are sound: the per-coordinate quantum is delta/(4 mu d), so the
    estimated distance is within +-delta/(4 mu) of the truth.
    """
    a = np.asarray(label_a, dtype=np.float64)
    b = np.asarray(label_b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("far labels of different builds")
    d = a.size
    quantum = delta / (4.0 * mu * d)
    est = float(np.linalg.norm((a - b) * quantum))
    return "far" if est >= delta / (2.0 * mu) else "notfar"


# ---------------------------------------------------------------------------
# Apex labels over the contracted quadtrees
# ---------------------------------------------------------------------------


@dataclass
class ApexRecord:
    node_index: int                  # build-side cell reference
    level: int
    depth: int
    l: int
    h: int
    child_idx: int                   # L1
    heavy_idx: int                   # L2, -1 if no heavy child
    rep_q: tuple[int, ...]           # L3: own representative, quantized
    heavy_rep_q: tuple[int, ...] | None


@dataclass
class SliceLabels:
    """Labels of all points for one contracted quadtree (i, j)."""

    i: int
    j: int
    ts: dict[int, int]
    records: dict[int, list[ApexRecord]]
    n_leaves: int
    max_children: int
    max_q: int

    @property
    def ts_bits(self) -> int:
        return max(1, math.ceil(math.log2(max(self.n_leaves, 2))))

    @property
    def child_bits(self) -> int:
        return max(1, math.ceil(math.log2(max(self.max_children, 2))))

    @property
    def q_bits(self) -> int:
        return max(1, math.ceil(math.log2(max(self.max_q + 1, 2))))

    def record_bits(self, d: int) -> int:
        # interval + depth + level + L1 + L2 + two quantized coordinate vectors
        return (2 * self.ts_bits + 8 + 8 + 2 * self.child_bits
                + 2 * d * self.q_bits)

    def label_bits(self, pid: int, d: int) -> int:
        return self.ts_bits + len(self.records[pid]) * self.record_bits(d)


def _build_slice_labels(cover, h) -> SliceLabels:
    """DFS timestamps, subtree weights and apex records for one (i, j)."""
    cq = h.contracted
    ts: dict[int, int] = {}
    node_lo: dict[int, int] = {}
    node_hi: dict[int, int] = {}
    weight: dict[int, int] = {}
    counter = 0

    def child_list(node: CNode) -> list:
        return list(node.cell_children) + [("p", pid) for pid in node.point_children]

    stack: list[tuple[CNode, bool]] = [(cq.root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            lo, hi, w = 1 << 60, -1, 0
            for c in node.cell_children:
                lo = min(lo, node_lo[c.index])
                hi = max(hi, node_hi[c.index])
                w += weight[c.index]
            for pid in node.point_children:
                lo = min(lo, ts[pid])
                hi = max(hi, ts[pid])
                w += 1
            node_lo[node.index], node_hi[node.index] = lo, hi
            weight[node.index] = w
            continue
        stack.append((node, True))
        for pid in reversed(node.point_children):
            ts[pid] = counter
            counter += 1
        for c in reversed(node.cell_children):
            stack.append((c, False))
    # note: the loop above assigns point timestamps before visiting subcells;
    # order is deterministic and immaterial, intervals stay nested

    records: dict[int, list[ApexRecord]] = {pid: [] for pid in ts}
    max_children = 1
    max_q = 0
    qcache: dict[int, tuple] = {}

    def cell_record_data(node: CNode):
        got = qcache.get(node.index)
        if got is None:
            ctx = h.ctx[node.index]
            frame = h.frame(ctx)
            qints = np.floor((frame.locations - frame.corner) / frame.qgrid).astype(np.int64)
            kids = child_list(node)
            heavy = -1
            wnode = weight[node.index]
            for t, c in enumerate(kids):
                wc = weight[c.index] if isinstance(c, CNode) else 1
                if 2 * wc > wnode:
                    heavy = t
            got = (kids, heavy, qints)
            qcache[node.index] = got
        return got

    for pid in ts:
        chain = h.chains[pid]
        prev: object = ("p", pid)
        prev_weight = 1
        for node in chain:
            kids, heavy, qints = cell_record_data(node)
            max_children = max(max_children, len(kids))
            wnode = weight[node.index]
            if 2 * prev_weight <= wnode:  # prev child is light: node is an apex
                child_idx = kids.index(prev)
                ctx = h.ctx[node.index]
                t_child = ctx.member_index[prev if isinstance(prev, tuple)
                                           else ("c", prev.index)]
                rep_q = tuple(int(v) for v in qints[t_child])
                if heavy >= 0:
                    hk = kids[heavy]
                    t_heavy = ctx.member_index[hk if isinstance(hk, tuple)
                                               else ("c", hk.index)]
                    heavy_rep_q = tuple(int(v) for v in qints[t_heavy])
                else:
                    heavy_rep_q = None
                rec = ApexRecord(node_index=node.index, level=node.level,
                                 depth=node.depth, l=node_lo[node.index],
                                 h=node_hi[node.index], child_idx=child_idx,
                                 heavy_idx=heavy, rep_q=rep_q,
                                 heavy_rep_q=heavy_rep_q)
                records[pid].append(rec)
                max_q = max(max_q, max(rep_q, default=0),
                            max(heavy_rep_q or (0,)))
            prev = node
            prev_weight = wnode
    return SliceLabels(i=h.i, j=h.j, ts=ts, records=records,
                       n_leaves=len(ts), max_children=max_children, max_q=max_q)


class RoutingBundle:
    """Labels, decoders and per-tree routing state over a lazy cover."""

    def __init__(self, cover, seed: int = 0):
        if cover.mode != "nonsteiner":
            raise ValueError("routing runs on the non-Steiner cover")
        self.cover = cover
        self.seed = seed
        self.slices: list[SliceLabels] = [
            _build_slice_labels(cover, h) for h in cover.hierarchies]
        self._routing_cache: dict[tuple[int, int, int], IntervalRouting] = {}

    # -- label sizes ------------------------------------------------------------

    def label_bits(self, pid: int) -> int:
        d = self.cover.params.d
        return sum(s.label_bits(pid, d) for s in self.slices)

    def max_label_bits(self) -> int:
        return max(self.label_bits(pid) for pid in range(self.cover.n))

    def apex_counts(self) -> list[int]:
        return [sum(len(s.records[pid]) for s in self.slices)
                for pid in range(self.cover.n)]

    def size_manifest(self) -> dict:
        d = self.cover.params.d
        tau = self.cover.tau()
        return {
            "points": self.cover.n,
            "slices": len(self.slices),
            "max_label_bits": self.max_label_bits(),
            "tree_id_bits": max(1, math.ceil(math.log2(max(tau, 2))))
            + max(1, math.ceil(math.log2(max(len(self.slices), 2)))),
            "max_apices_per_point": max(
                max((len(s.records[p]) for p in range(self.cover.n)), default=0)
                for s in self.slices),
            "per_layer_bits": {
                "timestamps": sum(s.ts_bits for s in self.slices),
                "apex_records_max": max(self.label_bits(p) for p in range(self.cover.n)),
            },
        }

    # -- decoding -----------------------------------------------------------------

    def decode_tree_id(self, x: int, y: int) -> tuple[int, int, int] | None:
        """The (i, j, k) of a distance-preserving tree, from labels alone.

        Case 1 uses both endpoints' apex records at the LCA cell; Case 2
        falls back to the heavy-child payload of the one available record.
        Among qualifying slices the smallest LCA cell wins (it maximizes the
        far ratio, hence the stretch quality).  None only for x == y.
        """
        if x == y:
            return None
        best: tuple | None = None
        for si, s in enumerate(self.slices):
            got = self._decode_slice(s, x, y)
            if got is None:
                continue
            level, k = got
            key = (level, s.i, s.j)
            if best is None or key < best[0]:
                best = (key, (s.i, s.j, k))
        return None if best is None else best[1]

    def _decode_slice(self, s: SliceLabels, x: int, y: int) -> tuple[int, int] | None:
        lx, ly = s.ts[x], s.ts[y]
        lca_rec_x = lca_rec_y = None
        lca_depth = -1
        for rec in s.records[x]:
            if rec.l <= lx <= rec.h and rec.l <= ly <= rec.h and rec.depth > lca_depth:
                lca_depth, lca_rec_x, lca_rec_y = rec.depth, rec, None
        for rec in s.records[y]:
            if rec.l <= lx <= rec.h and rec.l <= ly <= rec.h:
                if rec.depth > lca_depth:
                    lca_depth, lca_rec_x, lca_rec_y = rec.depth, None, rec
                elif rec.depth == lca_depth and lca_rec_x is not None \
                        and rec.node_index == lca_rec_x.node_index:
                    lca_rec_y = rec
        if lca_rec_x is None and lca_rec_y is None:
            return None
        if lca_rec_x is not None and lca_rec_y is not None:
            qx, qy = lca_rec_x.rep_q, lca_rec_y.rep_q
            level = lca_rec_x.level
        elif lca_rec_x is not None:
            # Case 2: y's side is the heavy child of the cell
            if lca_rec_x.heavy_rep_q is None or lca_rec_x.heavy_idx == lca_rec_x.child_idx:
                return None
            qx, qy = lca_rec_x.rep_q, lca_rec_x.heavy_rep_q
            level = lca_rec_x.level
        else:
            if lca_rec_y.heavy_rep_q is None or lca_rec_y.heavy_idx == lca_rec_y.child_idx:
                return None
            qx, qy = lca_rec_y.heavy_rep_q, lca_rec_y.rep_q
            level = lca_rec_y.level
        params = self.cover.params
        side = self.cover.family.cell_side(level)
        delta = side * math.sqrt(params.d)
        fam = self.cover.strip_family(delta)
        qgrid = params.eps_internal * side / (256.0 * params.mu)
        pos_x = tuple(v * qgrid for v in qx)
        pos_y = tuple(v * qgrid for v in qy)
        dist_q = math.dist(pos_x, pos_y)
        tol = 4.0 * qgrid * math.sqrt(params.d)
        if dist_q < delta / params.mu - tol:
            return None
        found = fam.witness(pos_x, pos_y)
        if found is None:
            return None
        return level, fam.k_of(*found)

    # -- simulation ----------------------------------------------------------------

    def routing_for(self, i: int, j: int, k: int) -> IntervalRouting:
        key = (i, j, k)
        got = self._routing_cache.get(key)
        if got is None:
            tree = self.cover.tree(i, j, k)
            got = build_interval_routing(tree, seed=self.seed + 977 * (k % 65536))
            if len(self._routing_cache) > 8192:
                self._routing_cache.clear()
            self._routing_cache[key] = got
        return got

    def simulate_route(self, s: int, t: int) -> tuple[list[int], float, float]:
        """(node path, path weight, stretch ratio) routing s -> t."""
        decoded = self.decode_tree_id(s, t)
        if decoded is None:
            raise ValueError("decode failed: points coincide or labels mismatched")
        i, j, k = decoded
        routing = self.routing_for(i, j, k)
        ns, nt = routing.node_of_point(s), routing.node_of_point(t)
        path = route_path(routing, ns, nt)
        tree = routing.tree
        weight = 0.0
        for a, b in zip(path, path[1:]):
            wa = next(w for v, w in tree.adjacency()[a] if v == b)
            weight += wa
        exact = float(np.linalg.norm(self.cover.points[s] - self.cover.points[t]))
        return path, weight, weight / exact if exact > 0 else 1.0

    # -- serialization ----------------------------------------------------------------

    def serialize_labels(self) -> str:
        """Text `LABELS v1` wire format with a bit-count manifest."""
        out = [f"LABELS v1 n={self.cover.n} slices={len(self.slices)}"]
        man = self.size_manifest()
        out.append(f"# max_label_bits={man['max_label_bits']} "
                   f"tree_id_bits={man['tree_id_bits']} "
                   f"max_apices={man['max_apices_per_point']}")
        for pid in range(self.cover.n):
            payload = bytearray()
            for s in self.slices:
                payload += s.ts[pid].to_bytes(4, "big")
                recs = s.records[pid]
                payload += len(recs).to_bytes(2, "big")
                for r in recs:
                    for v in (r.level, r.depth, r.l, r.h, r.child_idx,
                              r.heavy_idx & 0xFFFFFFFF):
                        payload += int(v).to_bytes(4, "big")
                    for q in r.rep_q:
                        payload += (int(q) & 0xFFFFFFFF).to_bytes(4, "big")
                    for q in (r.heavy_rep_q or tuple([0] * self.cover.params.d)):
                        payload += (int(q) & 0xFFFFFFFF).to_bytes(4, "big")
            out.append(f"L {pid} {payload.hex()}")
        return "\n".join(out) + "\n"


def build_routing(cover, seed: int = 0) -> RoutingBundle:
    return RoutingBundle(cover, seed=seed)
