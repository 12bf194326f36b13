from __future__ import annotations

import math

import numpy as np
import pytest

from treecover.params import CoverParams
from treecover import quadtree as qt


def _family(X, d=None, eps=0.1):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    p = CoverParams(d=X.shape[1], eps=eps)
    return qt.build_family(X, p), p


def test_lemma21_d1_example():
    fam, _ = _family(np.array([[0.30], [0.42]]))
    assert fam.min_common_side(0, 1) <= 0.72  # 6 * ||pq|| = 6 * 0.12


def test_single_point_single_leaf():
    fam, _ = _family(np.array([[0.3, 0.7]]))
    for tree in fam.trees:
        assert tree.root.is_leaf
        assert tree.root.point_ids == (0,)


def test_lemma21_random_pairs_d2():
    rng = np.random.default_rng(0)
    X = rng.random((60, 2))
    fam, _ = _family(X)
    bound = 4 * math.ceil(2 / 2) + 2  # = 6 for d=2
    pairs = [(x, y) for x in range(60) for y in range(x + 1, 60)]
    rng.shuffle(pairs)
    for x, y in pairs[:1000]:
        d = float(np.linalg.norm(X[x] - X[y]))
        assert fam.min_common_side(x, y) <= bound * d * (1 + 1e-12)


def test_lemma21_adversarial_dyadic_straddle():
    # pair straddling a power-of-two boundary in the unshifted tree
    eps = 1e-6
    fam, _ = _family(np.array([[0.5 - eps], [0.5 + eps], [0.0]]))
    d = 2 * eps
    assert fam.min_common_side(0, 1) <= 6 * d * (1 + 1e-9)


def test_compressedness():
    rng = np.random.default_rng(1)
    X = rng.random((50, 2))
    fam, _ = _family(X)
    for tree in fam.trees:
        for node in tree.iter_nodes():
            if not node.is_leaf:
                assert len(node.children) >= 2


def test_point_leaf_bijection():
    rng = np.random.default_rng(2)
    X = rng.random((40, 3))
    fam, _ = _family(X)
    for tree in fam.trees:
        seen = []
        for node in tree.iter_nodes():
            if node.is_leaf:
                seen.extend(node.point_ids)
        assert sorted(seen) == list(range(40))


def test_duplicates_collapse():
    X = np.array([[0.1, 0.2], [0.1, 0.2], [0.7, 0.9]])
    fam, _ = _family(X)
    tree = fam.trees[0]
    leaves = [n for n in tree.iter_nodes() if n.is_leaf]
    assert any(set(n.point_ids) == {0, 1} for n in leaves)


def test_contract_levels_are_congruent():
    rng = np.random.default_rng(3)
    X = rng.random((30, 2))
    fam, p = _family(X)
    c = qt.contract(fam, 0, 2)
    for node in c.nodes:
        assert node.level % p.ell == 2 % p.ell
        for child in node.cell_children:
            assert (node.level - child.level) % p.ell == 0
            assert child.level < node.level


def test_contract_ell1_identity_on_levels():
    # with ell=1 every level is kept: contracted internal levels equal the
    # compressed branching levels
    X = np.random.default_rng(4).random((20, 1))
    p = CoverParams(d=1, eps=0.1, scaling=12.0)
    fam = qt.build_family(X, p)
    object.__setattr__(p, "ell", 1)
    c = qt.contract(fam, 0, 0)
    comp_levels = sorted({n.level for n in fam.trees[0].iter_nodes() if not n.is_leaf})
    cont_levels = sorted({n.level for n in c.nodes})
    assert comp_levels == cont_levels


def test_contract_leaves_are_points():
    rng = np.random.default_rng(5)
    X = rng.random((25, 2))
    fam, p = _family(X)
    for j in range(p.ell):
        c = qt.contract(fam, 1, j)
        assert sorted(c.attach) == list(range(25))


def test_lca_cell_self_is_leaf_cell():
    rng = np.random.default_rng(6)
    X = rng.random((10, 2))
    fam, _ = _family(X)
    c = qt.contract(fam, 0, 0)
    assert c.lca_cell(3, 3) is c.attach[3]


def test_lca_cell_sibling_children():
    X = np.array([[0.1], [0.9]])
    fam, _ = _family(X)
    c = qt.contract(fam, 0, 0)
    node = c.lca_cell(0, 1)
    assert node is c.root or node.parent is c.root


def test_lca_ancestor_property_random_triples():
    rng = np.random.default_rng(7)
    X = rng.random((30, 2))
    fam, _ = _family(X)
    c = qt.contract(fam, 0, 1)

    def ancestors(node):
        out = []
        while node is not None:
            out.append(node)
            node = node.parent
        return out

    for _ in range(200):
        x, y, z = rng.integers(30, size=3)
        lxz = c.lca_cell(int(x), int(z))
        lxy = c.lca_cell(int(x), int(y))
        if c.attach[int(y)] in _subtree(lxz):
            assert lxz in ancestors(lxy)


def _subtree(node):
    out = set()
    stack = [node]
    while stack:
        cur = stack.pop()
        out.add(cur)
        stack.extend(cur.cell_children)
    return out


def test_contracted_child_diameter_ratio():
    # child cell diameter <= (eps_int/(gamma d sqrt(d))) * parent diameter
    # whenever levels differ by exactly ell
    rng = np.random.default_rng(8)
    X = rng.random((60, 2))
    fam, p = _family(X)
    c = qt.contract(fam, 0, 0)
    ratio = p.eps_internal / (p.gamma * p.d * math.sqrt(p.d))
    for node in c.nodes:
        for child in node.cell_children:
            if node.level - child.level == p.ell:
                assert c.delta(child) <= ratio * c.delta(node) * (1 + 1e-9)


def test_empty_input_rejected():
    p = CoverParams(d=2, eps=0.1)
    with pytest.raises(ValueError):
        qt.build_family(np.zeros((0, 2)), p)
