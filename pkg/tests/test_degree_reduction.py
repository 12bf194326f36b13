from __future__ import annotations

import numpy as np
import pytest

from treecover.assembly import build_tree_cover
from treecover.degree_reduction import (audit_tree_degrees, cover_degree_report,
                                        orient, point_degrees, reduce_tree)
from treecover.tree_model import CoverTree, TreeNode


def _tree(coords, edges, levels, istar, root=0, pids=None):
    coords = [np.asarray(c, dtype=float) for c in coords]
    pids = pids or list(range(len(coords)))
    nodes = [TreeNode(i, pids[i], coords[i]) for i in range(len(coords))]
    ed = [(u, v, float(np.linalg.norm(coords[u] - coords[v]))) for u, v in edges]
    return CoverTree(nodes, ed, root, edge_levels=levels,
                     istar={pids[i]: istar[i] for i in range(len(coords))})


def test_orient_low_to_high_istar():
    t = _tree([[0, 0], [1, 0]], [(0, 1)], levels=[5], istar=[2, 8], root=1)
    arcs = orient(t).arcs
    assert arcs == [(0, 1, 1.0, 5)]


def test_orient_tie_child_toward_parent():
    t = _tree([[0, 0], [1, 0], [2, 0]], [(1, 0), (1, 2)], levels=[3, 3],
              istar=[3, 3, 3], root=1)
    arcs = orient(t).arcs
    heads = {v for _, v, _, _ in arcs}
    assert heads == {1}  # both siblings point toward the root side


def test_orient_requires_metadata():
    t = CoverTree([TreeNode(0, 0, np.zeros(2))], [], 0)
    with pytest.raises(ValueError):
        orient(t)


def test_reduce_no_trigger_is_identity():
    # every point has in-edges at a single level: nothing is replaced
    t = _tree([[0, 0], [1, 0], [2, 0]], [(1, 0), (2, 0)], levels=[4, 4],
              istar=[9, 1, 1], root=0)
    reduced = reduce_tree(orient(t))
    assert sorted((u, v) for u, v, _ in reduced.edges) == [(1, 0), (2, 0)]


def test_reduce_retargets_higher_level_arcs():
    # point 0 has in-sets at levels 4 and 7; the level-7 arc must re-target
    # the nearest member of the level-4 in-set
    coords = [[0.0, 0.0], [0.2, 0.0], [0.3, 0.1], [5.0, 0.0]]
    edges = [(1, 0), (2, 0), (3, 0)]
    levels = [4, 4, 7]
    istar = [9, 1, 1, 6]
    t = _tree(coords, edges, levels, istar, root=0)
    reduced = reduce_tree(orient(t))
    pairs = sorted((u, v) for u, v, _ in reduced.edges)
    assert (3, 1) in pairs  # retargeted to nearest level-4 in-neighbor of 0
    assert (3, 0) not in pairs
    rep = reduced.audit()
    assert rep.acyclic and rep.connected and rep.weights_exact


def test_reduce_weights_recomputed():
    coords = [[0.0, 0.0], [0.2, 0.0], [3.0, 4.0]]
    t = _tree(coords, [(1, 0), (2, 0)], levels=[2, 9], istar=[9, 1, 3], root=0)
    reduced = reduce_tree(orient(t))
    for u, v, w in reduced.edges:
        assert w == pytest.approx(float(np.linalg.norm(
            np.asarray(coords[u]) - np.asarray(coords[v]))))


def test_end_to_end_degree_cap_small():
    rng = np.random.default_rng(0)
    X = rng.random((60, 2))
    cover = build_tree_cover(X, eps=0.1, strategy="dyadic-binary")
    report = cover_degree_report(cover, seed=1, samples_per_slice=1, pair_sample=60)
    assert report.alpha <= 1
    assert report.beta <= 5, (report.alpha, report.beta)
    assert report.max_point_degree_post <= 11
    assert report.trees_audited > 0


def test_aspect_ratio_independence():
    rng = np.random.default_rng(1)
    reports = []
    for spread in (1e-3, 1e-6):
        blocks = [rng.random((10, 2)) * spread + np.array(c)
                  for c in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]]
        X = np.vstack(blocks)
        cover = build_tree_cover(X, eps=0.1, strategy="dyadic-binary")
        reports.append(cover_degree_report(cover, seed=2, samples_per_slice=1, pair_sample=60))
    assert all(r.max_point_degree_post <= 11 for r in reports)


def test_reduction_preserves_stretch_factor():
    rng = np.random.default_rng(2)
    X = rng.random((40, 2))
    cover = build_tree_cover(X, eps=0.1, strategy="dyadic-binary")
    for x, y in [(0, 20), (5, 35), (1, 2)]:
        i, j, k, dv = cover.best_candidate(x, y)
        raw = cover.raw_tree(i, j, k)
        red = reduce_tree(orient(raw))
        eu = float(np.linalg.norm(X[x] - X[y]))
        assert red.tree_distance(x, y) <= (1 + 0.1) * eu + 1e-12
        assert red.tree_distance(x, y) >= eu - 1e-9


def test_reduced_cover_materialization():
    rng = np.random.default_rng(3)
    X = rng.random((30, 2))
    cover = build_tree_cover(X, eps=0.1, degree_reduction="global")
    i, j, k, _ = cover.best_candidate(0, 15)
    t = cover.tree(i, j, k)
    rep = t.audit()
    assert rep.acyclic and rep.connected
    assert max(point_degrees(t).values()) <= 11


def test_audit_tree_degrees_consistency():
    rng = np.random.default_rng(4)
    X = rng.random((25, 2))
    cover = build_tree_cover(X, eps=0.1)
    i, j, k, _ = cover.best_candidate(3, 19)
    raw = cover.raw_tree(i, j, k)
    alpha, beta, pre, post = audit_tree_degrees(raw)
    assert alpha <= 1 and beta <= 5 and post <= 11
    assert pre >= post or pre == post
