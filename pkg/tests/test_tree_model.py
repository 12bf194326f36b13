from __future__ import annotations

import heapq

import numpy as np
import pytest

from treecover.tree_model import (CoverTree, FormatError, TreeCover, TreeNode,
                                  deserialize, serialize)


def _tree(coords, edges, root=0, point_ids=None):
    coords = [np.asarray(c, dtype=float) for c in coords]
    if point_ids is None:
        point_ids = list(range(len(coords)))
    nodes = [TreeNode(i, point_ids[i], coords[i]) for i in range(len(coords))]
    ed = [(u, v, float(np.linalg.norm(coords[u] - coords[v]))) for u, v in edges]
    return CoverTree(nodes, ed, root)


def test_tree_distance_identity():
    t = _tree([[0, 0], [1, 0]], [(0, 1)])
    assert t.tree_distance(0, 0) == 0.0


def test_tree_distance_star_through_center():
    center = [0.0, 0.0]
    a, b = [3.0, 0.0], [0.0, 4.0]
    t = _tree([center, a, b], [(0, 1), (0, 2)])
    assert t.tree_distance(1, 2) == pytest.approx(7.0)


def _dijkstra(adj, src):
    dist = {src: 0.0}
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, np.inf):
            continue
        for v, w in adj[u]:
            nd = d + w
            if nd < dist.get(v, np.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def test_tree_distance_matches_graph_search_oracle():
    rng = np.random.default_rng(0)
    n = 40
    coords = rng.random((n, 2))
    edges = [(i, int(rng.integers(i))) for i in range(1, n)]
    t = _tree(coords, edges)
    adj = t.adjacency()
    pairs = [(int(a), int(b)) for a, b in rng.integers(n, size=(100, 2)) if a != b]
    for a, b in pairs:
        oracle = _dijkstra(adj, a)[b]
        assert t.tree_distance(a, b) == pytest.approx(oracle, rel=1e-12)


def test_tree_distance_missing_point():
    t = _tree([[0, 0], [1, 0]], [(0, 1)])
    with pytest.raises(KeyError):
        t.tree_distance(0, 5)


def test_audit_path():
    t = _tree([[0, 0], [1, 0], [2, 0], [3, 0]], [(0, 1), (1, 2), (2, 3)])
    rep = t.audit()
    assert rep.diameter == pytest.approx(3.0)
    assert rep.max_node_degree == 2
    assert rep.acyclic and rep.connected and rep.weights_exact


def test_audit_star_degree():
    coords = [[0, 0]] + [[np.cos(a), np.sin(a)] for a in np.linspace(0, 5, 5)]
    t = _tree(coords, [(0, i) for i in range(1, 6)])
    assert t.audit().max_node_degree == 5


def test_audit_point_degree_over_copies():
    # two copies of point 7, each of degree 3 -> maxPointDegree 6
    coords = [[0, 0], [0, 1], [0, -1], [1, 0], [2, 0], [2, 1], [2, -1]]
    pids = [7, 1, 2, 3, 7, 5, 6]
    edges = [(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (4, 6)]
    t = _tree(coords, edges, point_ids=pids)
    rep = t.audit()
    assert rep.max_point_degree == 6


def test_metric_lower_bound_property():
    rng = np.random.default_rng(1)
    n = 30
    coords = rng.random((n, 2))
    edges = [(i, int(rng.integers(i))) for i in range(1, n)]
    t = _tree(coords, edges)
    for a in range(0, n, 3):
        for b in range(a + 1, n, 5):
            eu = float(np.linalg.norm(coords[a] - coords[b]))
            assert t.tree_distance(a, b) >= eu - 1e-9 * eu


def test_serialize_empty_cover_round_trip():
    cover = TreeCover(d=2, eps=0.05, mode="nonsteiner", trees=[])
    text = serialize(cover)
    back = deserialize(text)
    assert len(back.trees) == 0 and back.d == 2 and back.eps == 0.05
    assert serialize(back) == text


def test_serialize_single_edge_bit_exact():
    t = _tree([[0.1, 0.2], [0.30000000000000004, 0.7]], [(0, 1)])
    t.index = (1, 2, 3)
    cover = TreeCover(d=2, eps=0.1, mode="nonsteiner", trees=[t])
    text = serialize(cover)
    back = deserialize(text)
    assert serialize(back) == text
    assert back.trees[0].edges[0][2] == t.edges[0][2]
    assert back.trees[0].index == (1, 2, 3)


def test_serialize_random_cover_round_trip():
    rng = np.random.default_rng(2)
    trees = []
    pts = rng.random((50, 2))
    for k in range(4):
        edges = [(i, int(rng.integers(i))) for i in range(1, 50)]
        t = _tree(pts, edges)
        t.index = (0, 0, k)
        trees.append(t)
    cover = TreeCover(d=2, eps=0.1, mode="nonsteiner", trees=trees)
    text = serialize(cover)
    back = deserialize(text, points=pts)
    assert serialize(back) == text
    assert back.trees[2].tree_distance(0, 17) == pytest.approx(
        trees[2].tree_distance(0, 17))


def test_steiner_node_serialization():
    nodes = [TreeNode(0, None, np.array([0.5, 0.5])), TreeNode(1, 3, np.array([0.0, 0.0]))]
    t = CoverTree(nodes, [(1, 0, float(np.hypot(0.5, 0.5)))], 0)
    cover = TreeCover(d=2, eps=0.1, mode="steiner", trees=[t])
    back = deserialize(serialize(cover))
    assert back.trees[0].node(0).point_id is None
    assert np.allclose(back.trees[0].node(0).coords, [0.5, 0.5])


def test_deserialize_malformed_diagnostics():
    with pytest.raises(FormatError):
        deserialize("BOGUS header\n")
    text = "TREECOVER v1 d=2 eps=0.1 mode=nonsteiner trees=1\nT 0 0 0 root=0\nN zero P 0\n"
    with pytest.raises(FormatError) as exc:
        deserialize(text)
    assert exc.value.line_no == 3
