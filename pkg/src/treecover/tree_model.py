"""Weighted tree / tree cover data model, metric queries, audits, text format."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from io import StringIO

import numpy as np

WEIGHT_RTOL = 1e-9


@dataclass
class TreeNode:
    id: int
    point_id: int | None          # None for Steiner nodes
    coords: np.ndarray | None     # may be None for deserialized point nodes
    level: int = 0


@dataclass
class AuditReport:
    acyclic: bool
    connected: bool
    max_node_degree: int
    max_point_degree: int
    diameter: float
    weights_exact: bool

    @property
    def ok(self) -> bool:
        return self.acyclic and self.connected and self.weights_exact


class CoverTree:
    """A weighted tree over point references and optional Steiner locations.

    Edge weights equal the Euclidean distance between endpoint locations.
    The same point id may appear in several nodes (copies across levels);
    `tree_distance` minimizes over copies.
    """

    def __init__(self, nodes: list[TreeNode], edges: list[tuple[int, int, float]],
                 root: int, index: tuple[int, int, int] | None = None,
                 edge_levels: list[int] | None = None,
                 istar: dict[int, int] | None = None):
        self.nodes = nodes
        self.edges = edges
        self.root = root
        self.index = index
        self.edge_levels = edge_levels   # creation level per edge (assembly trees)
        self.istar = istar               # point id -> highest representative level
        self._by_id = {n.id: n for n in nodes}
        self._point_nodes: dict[int, list[int]] = {}
        for n in nodes:
            if n.point_id is not None:
                self._point_nodes.setdefault(n.point_id, []).append(n.id)
        self._adj: dict[int, list[tuple[int, float]]] | None = None
        self._updist: dict[int, tuple[int | None, float, int]] | None = None

    # -- structure ----------------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def node(self, node_id: int) -> TreeNode:
        return self._by_id[node_id]

    def nodes_of_point(self, point_id: int) -> list[int]:
        return self._point_nodes.get(point_id, [])

    def adjacency(self) -> dict[int, list[tuple[int, float]]]:
        if self._adj is None:
            adj: dict[int, list[tuple[int, float]]] = {n.id: [] for n in self.nodes}
            for u, v, w in self.edges:
                adj[u].append((v, w))
                adj[v].append((u, w))
            self._adj = adj
        return self._adj

    def _rooted(self) -> dict[int, tuple[int | None, float, int]]:
        """node -> (parent, edge weight, depth), BFS from the root."""
        if self._updist is None:
            adj = self.adjacency()
            info: dict[int, tuple[int | None, float, int]] = {self.root: (None, 0.0, 0)}
            queue = [self.root]
            while queue:
                nxt: list[int] = []
                for u in queue:
                    du = info[u][2]
                    for v, w in adj[u]:
                        if v not in info:
                            info[v] = (u, w, du + 1)
                            nxt.append(v)
                queue = nxt
            self._updist = info
        return self._updist

    def parent_of(self, node_id: int) -> int | None:
        return self._rooted()[node_id][0]

    def node_path_distance(self, a: int, b: int) -> float:
        """Weight of the unique a-b path (node ids)."""
        info = self._rooted()
        dist = 0.0
        pa, pb = a, b
        da, db = info[a][2], info[b][2]
        while da > db:
            dist += info[pa][1]
            pa = info[pa][0]
            da -= 1
        while db > da:
            dist += info[pb][1]
            pb = info[pb][0]
            db -= 1
        while pa != pb:
            dist += info[pa][1] + info[pb][1]
            pa, pb = info[pa][0], info[pb][0]
        return dist

    def tree_distance(self, a: int, b: int) -> float:
        """delta_T between two point ids, minimized over node copies."""
        na = self.nodes_of_point(a)
        nb = self.nodes_of_point(b)
        if not na:
            raise KeyError(f"point {a} does not occur in the tree")
        if not nb:
            raise KeyError(f"point {b} does not occur in the tree")
        if a == b:
            return 0.0
        return min(self.node_path_distance(u, v) for u in na for v in nb)

    # -- audit ---------------------------------------------------------------

    def audit(self) -> AuditReport:
        adj = self.adjacency()
        n = len(self.nodes)
        connected = len(self._rooted()) == n
        acyclic = len(self.edges) == n - 1 and connected
        degrees = {nid: len(nbrs) for nid, nbrs in adj.items()}
        max_node_degree = max(degrees.values()) if degrees else 0
        point_deg: dict[int, int] = {}
        for node in self.nodes:
            if node.point_id is not None:
                point_deg[node.point_id] = point_deg.get(node.point_id, 0) + degrees[node.id]
        max_point_degree = max(point_deg.values()) if point_deg else 0
        weights_exact = True
        for u, v, w in self.edges:
            cu, cv = self._by_id[u].coords, self._by_id[v].coords
            if cu is None or cv is None:
                continue
            true = float(np.linalg.norm(np.asarray(cu) - np.asarray(cv)))
            if abs(true - w) > WEIGHT_RTOL * max(1.0, true):
                weights_exact = False
                break
        diameter = self._diameter() if connected else math.inf
        return AuditReport(acyclic=acyclic, connected=connected,
                           max_node_degree=max_node_degree,
                           max_point_degree=max_point_degree,
                           diameter=diameter, weights_exact=weights_exact)

    def _diameter(self) -> float:
        if len(self.nodes) <= 1:
            return 0.0
        far, _ = self._farthest(self.root)
        _, diam = self._farthest(far)
        return diam

    def _farthest(self, src: int) -> tuple[int, float]:
        adj = self.adjacency()
        best, best_d = src, 0.0
        stack = [(src, None, 0.0)]
        while stack:
            u, p, d = stack.pop()
            if d > best_d:
                best, best_d = u, d
            for v, w in adj[u]:
                if v != p:
                    stack.append((v, u, d + w))
        return best, best_d


@dataclass
class TreeCover:
    """An explicit (fully materialized) tree cover."""

    d: int
    eps: float
    mode: str
    trees: list[CoverTree] = field(default_factory=list)
    total_trees: int | None = None  # formula count when `trees` is a support subset

    def __len__(self) -> int:
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)

    def __getitem__(self, k: int) -> CoverTree:
        return self.trees[k]


# ---------------------------------------------------------------------------
# Text serialization (.tc)
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def serialize(cover: TreeCover) -> str:
    out = StringIO()
    total = cover.total_trees if cover.total_trees is not None else len(cover.trees)
    out.write(f"TREECOVER v1 d={cover.d} eps={_fmt(cover.eps)} mode={cover.mode} "
              f"trees={len(cover.trees)} total={total}\n")
    for t in cover.trees:
        i, j, k = t.index if t.index is not None else (0, 0, 0)
        out.write(f"T {i} {j} {k} root={t.root}\n")
        for node in t.nodes:
            if node.point_id is not None:
                out.write(f"N {node.id} P {node.point_id}\n")
            else:
                coords = " ".join(_fmt(c) for c in node.coords)
                out.write(f"N {node.id} S {coords}\n")
        for u, v, w in t.edges:
            out.write(f"E {u} {v} {_fmt(w)}\n")
    return out.getvalue()


class FormatError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def deserialize(text: str, points: np.ndarray | None = None) -> TreeCover:
    """Parse a .tc stream; `points` (original coordinates) resolves P-node coords."""
    lines = text.splitlines()
    if not lines:
        raise FormatError(1, "empty stream")
    head = lines[0].split()
    if len(head) < 5 or head[0] != "TREECOVER" or head[1] != "v1":
        raise FormatError(1, "expected 'TREECOVER v1' header")
    fields = dict(part.split("=", 1) for part in head[2:] if "=" in part)
    try:
        d = int(fields["d"])
        eps = float(fields["eps"])
        mode = fields["mode"]
    except (KeyError, ValueError) as exc:
        raise FormatError(1, f"malformed header fields: {exc}") from None
    total = int(fields["total"]) if "total" in fields else None

    pts = None if points is None else np.asarray(points, dtype=np.float64)
    cover = TreeCover(d=d, eps=eps, mode=mode, total_trees=total)
    nodes: list[TreeNode] = []
    edges: list[tuple[int, int, float]] = []
    index: tuple[int, int, int] | None = None
    root = 0

    def flush() -> None:
        if index is not None or nodes:
            cover.trees.append(CoverTree(list(nodes), list(edges), root, index))
            nodes.clear()
            edges.clear()

    for no, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "T":
                flush()
                index = (int(parts[1]), int(parts[2]), int(parts[3]))
                root = int(parts[4].split("=", 1)[1])
            elif parts[0] == "N":
                nid = int(parts[1])
                if parts[2] == "P":
                    pid = int(parts[3])
                    coords = pts[pid] if pts is not None else None
                    nodes.append(TreeNode(nid, pid, coords))
                elif parts[2] == "S":
                    coords = np.array([float(c) for c in parts[3:]])
                    if coords.size != d:
                        raise ValueError(f"expected {d} coordinates")
                    nodes.append(TreeNode(nid, None, coords))
                else:
                    raise ValueError(f"unknown node kind {parts[2]!r}")
            elif parts[0] == "E":
                edges.append((int(parts[1]), int(parts[2]), float(parts[3])))
            else:
                raise ValueError(f"unknown record {parts[0]!r}")
        except (IndexError, ValueError) as exc:
            raise FormatError(no, str(exc)) from None
    flush()
    return cover
