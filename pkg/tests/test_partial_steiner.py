from __future__ import annotations

import math

import numpy as np
import pytest

from treecover.params import CoverParams
from treecover.partial_steiner import build_slabs, partial_cover_steiner
from treecover.verify import partial_oracle


def _params(d=2, eps=0.04, scaling=1.0):
    return CoverParams(d=d, eps=eps, mode="steiner", scaling=scaling)


def test_vertical_pair_separated_by_horizontal_slab():
    p = _params()
    delta = 1.0
    slabs = build_slabs(p, delta)
    a = np.array([0.0, 0.0])
    b = np.array([0.0, delta / p.mu])
    seps = slabs.separating_slabs(a, b)
    assert any(axis == 1 for axis, _ in seps)


def test_identical_points_never_separated():
    p = _params()
    slabs = build_slabs(p, 1.0)
    a = np.array([0.3, 0.4])
    assert slabs.separating_slabs(a, a) == []


def test_far_pairs_separated_d3():
    p = _params(d=3)
    delta = math.sqrt(3.0)
    slabs = build_slabs(p, delta)
    rng = np.random.default_rng(0)
    count = 0
    while count < 1000:
        a = rng.random(3)
        v = rng.standard_normal(3)
        r = rng.uniform(delta / p.mu, delta / math.sqrt(3))
        b = a + v / np.linalg.norm(v) * r
        if np.any(b < 0) or np.any(b > 1):
            continue
        count += 1
        assert slabs.separating_slabs(a, b), (a, b)


def test_slab_count_formula():
    p = _params()
    slabs = build_slabs(p, 1.0)
    assert slabs.slabs_per_axis == math.ceil(3 * math.sqrt(2) * p.mu)
    assert slabs.n_slabs == 2 * slabs.slabs_per_axis


def test_crossing_example_d2():
    p = _params()
    delta = 1.0
    X = np.array([[0.5, 0.25 + 0.5], [0.5, -0.25 + 0.5]]) - [0.0, 0.0]
    fam = partial_cover_steiner(X, delta, p)
    got = fam.best_witness(0, 1)
    assert got is not None
    k, dist = got
    eu = 0.5
    assert dist <= (1 + p.eps_internal) * eu


def test_single_point_stars():
    p = _params()
    fam = partial_cover_steiner(np.array([[0.25, 0.75]]), 1.0, p)
    t = fam[3]
    assert len(t.nodes) == 2  # steiner center + one leaf
    assert t.node(0).point_id is None


def test_count_scaling_quartering_eps():
    t1 = CoverParams(d=2, eps=0.16, mode="steiner").tau()
    t2 = CoverParams(d=2, eps=0.04, mode="steiner").tau()
    assert 1.6 <= t2 / t1 <= 2.4


def test_tree_diameter_bound_3delta():
    for d in (1, 2, 3):
        p = _params(d=d)
        rng = np.random.default_rng(d)
        X = rng.random((20, d))
        delta = float(math.sqrt(d))
        fam = partial_cover_steiner(X, delta, p)
        assert fam.max_tree_diameter() <= 3 * delta * (1 + 1e-9)
        for k in (0, len(fam) // 2, len(fam) - 1):
            assert fam.tree_diameter(k) <= 3 * delta * (1 + 1e-9)


def test_partial_oracle_steiner_d2_d3():
    for d in (2, 3):
        p = _params(d=d)
        rng = np.random.default_rng(10 + d)
        X = rng.random((25, d))
        delta = float(math.sqrt(d))
        fam = partial_cover_steiner(X, delta, p)
        rep = partial_oracle(X, fam, p.mu, delta, p.eps_internal)
        assert rep.ok, rep.counterexample
        assert rep.far_pairs > 0


def test_trees_are_stars_spanning_x():
    p = _params()
    rng = np.random.default_rng(4)
    X = rng.random((15, 2))
    fam = partial_cover_steiner(X, math.sqrt(2.0), p)
    t = fam[10]
    rep = t.audit()
    assert rep.connected and rep.acyclic
    assert len(t.nodes) == 16
    assert rep.max_node_degree == 15  # the Steiner center


def test_diameter_precondition():
    p = _params()
    with pytest.raises(ValueError):
        partial_cover_steiner(np.array([[0.0, 0.0], [5.0, 0.0]]), 1.0, p)
