from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from treecover.assembly import (LazyTreeCover, build_tree_cover, merge_level,
                                select_representative)
from treecover.params import CoverParams
from treecover.tree_model import CoverTree, TreeNode


def test_select_representative_single():
    assert select_representative([(np.array([1.0, 2.0]), 5)]) == 0


def test_select_representative_lexicographic():
    cands = [(np.array([1.0, 0.0]), 0), (np.array([0.0, 1.0]), 1)]
    assert select_representative(cands) == 1  # (0,1) < (1,0)


def test_select_representative_permutation_invariant():
    rng = np.random.default_rng(0)
    cands = [(rng.random(2), i) for i in range(8)]
    chosen = {tuple(cands[select_representative(cands)][0])}
    for perm in itertools.islice(itertools.permutations(range(8)), 30):
        shuffled = [cands[i] for i in perm]
        chosen.add(tuple(shuffled[select_representative(shuffled)][0]))
    assert len(chosen) == 1


def test_single_point_cover():
    cover = build_tree_cover(np.array([[0.25, 0.5]]), eps=0.04)
    p = cover.params
    assert cover.tree_count() == (p.D + 1) * p.ell * p.tau()
    for (i, j, k) in [(0, 0, 0), (1, 2, 12345), (2, p.ell - 1, 777)]:
        t = cover.raw_tree(i, j, k)
        assert len(t.nodes) == 1 and len(t.edges) == 0


def test_count_identity():
    for d in (1, 2, 3):
        for eps in (0.04, 0.01):
            p = CoverParams(d=d, eps=eps)
            assert p.tree_count() == (p.D + 1) * p.ell * p.tau()


def test_global_stretch_small_instances():
    for d in (1, 2, 3):
        rng = np.random.default_rng(d)
        n = 25
        X = rng.random((n, d))
        cover = build_tree_cover(X, eps=0.1)
        worst = 0.0
        for x in range(n):
            for y in range(x + 1, n):
                got = cover.best_candidate(x, y)
                assert got is not None, (d, x, y)
                eu = float(np.linalg.norm(X[x] - X[y]))
                worst = max(worst, got[3] / eu)
        assert worst <= 1.0 + 0.1 + 1e-9


def test_virtual_equals_materialized():
    rng = np.random.default_rng(5)
    X = rng.random((40, 2))
    cover = build_tree_cover(X, eps=0.1, strategy="dyadic-binary")
    for x, y in [(0, 1), (3, 30), (12, 25), (7, 8), (0, 39)]:
        got = cover.best_candidate(x, y)
        i, j, k, dv = got
        dm = cover.raw_tree(i, j, k).tree_distance(x, y)
        assert dv == pytest.approx(dm, rel=1e-9)


def test_virtual_equals_materialized_clustered():
    # aspect-ratio-heavy instance exercises real climb chains
    rng = np.random.default_rng(6)
    blocks = [rng.random((8, 2)) * 1e-5 + np.array(c)
              for c in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]]
    X = np.vstack(blocks)
    cover = build_tree_cover(X, eps=0.1)
    for x, y in [(0, 8), (0, 16), (9, 17), (1, 2), (0, 23)]:
        got = cover.best_candidate(x, y)
        i, j, k, dv = got
        dm = cover.raw_tree(i, j, k).tree_distance(x, y)
        assert dv == pytest.approx(dm, rel=1e-9)


def test_materialized_tree_audits():
    rng = np.random.default_rng(7)
    X = rng.random((30, 2))
    cover = build_tree_cover(X, eps=0.1)
    for (i, j, k) in [(0, 0, 0), (1, 3, 999999), (2, 5, 123456789)]:
        rep = cover.raw_tree(i, j, k).audit()
        assert rep.acyclic and rep.connected and rep.weights_exact


def test_steiner_cover_stretch():
    rng = np.random.default_rng(8)
    X = rng.random((25, 2))
    cover = build_tree_cover(X, eps=0.1, mode="steiner")
    worst = 0.0
    for x in range(25):
        for y in range(x + 1, 25):
            got = cover.best_candidate(x, y)
            assert got is not None
            worst = max(worst, got[3] / float(np.linalg.norm(X[x] - X[y])))
    assert worst <= 1.1 + 1e-9


def test_steiner_materialized_consistency():
    rng = np.random.default_rng(9)
    X = rng.random((20, 2))
    cover = build_tree_cover(X, eps=0.1, mode="steiner")
    for x, y in [(0, 10), (3, 15), (1, 19)]:
        i, j, k, dv = cover.best_candidate(x, y)
        t = cover.raw_tree(i, j, k)
        dm = t.tree_distance(x, y)
        assert dm <= dv * (1 + 1e-9)
        assert t.audit().acyclic


def test_merge_level_two_pieces():
    # two subcell roots joined by a one-edge partial tree:
    # merged node count = n1 + n2, edge count = n1 + n2 - 1
    p1 = CoverTree([TreeNode(0, 0, np.array([0.0, 0.0])),
                    TreeNode(1, 1, np.array([0.1, 0.0]))],
                   [(0, 1, 0.1)], root=0)
    p2 = CoverTree([TreeNode(0, 2, np.array([1.0, 0.0])),
                    TreeNode(1, 3, np.array([1.1, 0.0]))],
                   [(0, 1, 0.1)], root=0)
    partial = CoverTree([TreeNode(10, 0, np.array([0.0, 0.0])),
                         TreeNode(11, 2, np.array([1.0, 0.0]))],
                        [(10, 11, 1.0)], root=10)
    merged = merge_level({10: p1, 11: p2}, partial, k=0)
    assert len(merged.nodes) == 4
    assert len(merged.edges) == 3
    rep = merged.audit()
    assert rep.acyclic and rep.connected


def test_merge_level_single_subcell():
    piece = CoverTree([TreeNode(0, 0, np.array([0.0])),
                       TreeNode(1, 1, np.array([0.5]))], [(0, 1, 0.5)], root=0)
    partial = CoverTree([TreeNode(7, 0, np.array([0.0]))], [], root=7)
    merged = merge_level({7: piece}, partial, k=0)
    assert len(merged.nodes) == 2
    assert len(merged.edges) == 1


def test_merge_level_vertex_mismatch():
    piece = CoverTree([TreeNode(0, 0, np.array([0.0]))], [], root=0)
    partial = CoverTree([TreeNode(7, 0, np.array([0.0]))], [], root=7)
    with pytest.raises(ValueError):
        merge_level({8: piece}, partial, k=0)


def test_merge_repeated_levels_acyclic():
    # three-level repeated merge stays acyclic
    leaves = [CoverTree([TreeNode(0, i, np.array([float(i)]))], [], root=0)
              for i in range(4)]
    mid1 = CoverTree([TreeNode(0, 0, np.array([0.0])),
                      TreeNode(1, 1, np.array([1.0]))], [(0, 1, 1.0)], root=0)
    m1 = merge_level({0: leaves[0], 1: leaves[1]}, mid1, k=0)
    mid2 = CoverTree([TreeNode(0, 2, np.array([2.0])),
                      TreeNode(1, 3, np.array([3.0]))], [(0, 1, 1.0)], root=0)
    m2 = merge_level({0: leaves[2], 1: leaves[3]}, mid2, k=0)
    top = CoverTree([TreeNode(5, 0, np.array([0.0])),
                     TreeNode(6, 2, np.array([2.0]))], [(5, 6, 2.0)], root=5)
    m1.root = next(n.id for n in m1.nodes if n.point_id == 0)
    m2.root = next(n.id for n in m2.nodes if n.point_id == 2)
    merged = merge_level({5: m1, 6: m2}, top, k=0)
    rep = merged.audit()
    assert rep.acyclic and rep.connected
    assert len(merged.nodes) == 4


def test_eps_range_validation():
    with pytest.raises(ValueError):
        build_tree_cover(np.array([[0.0, 0.0]]), eps=0.5)
    with pytest.raises(ValueError):
        build_tree_cover(np.array([[0.0, 0.0]]), eps=0.0)


def test_duplicate_points_handled():
    X = np.array([[0.1, 0.1], [0.1, 0.1], [0.8, 0.3], [0.4, 0.9]])
    cover = build_tree_cover(X, eps=0.1)
    got = cover.best_candidate(0, 2)
    assert got is not None
    t = cover.raw_tree(*got[:3])
    assert sorted(n.point_id for n in t.nodes) == [0, 1, 2, 3]
    assert t.tree_distance(0, 1) >= 0.0


def test_level_diameter_bound():
    from treecover.verify import level_diameter_audit
    rng = np.random.default_rng(11)
    X = rng.random((20, 2))
    cover = build_tree_cover(X, eps=0.1)
    ok, worst = level_diameter_audit(cover)
    assert ok, worst
