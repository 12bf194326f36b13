from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from treecover import geometry as g


def test_distance_pythagorean():
    assert g.distance(np.array([0.0, 0.0]), np.array([3.0, 4.0])) == 5.0


def test_distance_identity_and_symmetry():
    p = np.array([1.3, -2.0, 0.25])
    q = np.array([0.5, 0.75, -1.0])
    assert g.distance(p, p) == 0.0
    assert g.distance(p, q) == g.distance(q, p)


def test_distance_matches_extended_precision():
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = rng.random(3)
        q = rng.random(3)
        exact = math.sqrt(float(sum((Fraction(a) - Fraction(b)) ** 2
                                    for a, b in zip(p, q))))
        assert g.distance(p, q) == pytest.approx(exact, rel=1e-14)


def test_distance_dimension_mismatch():
    with pytest.raises(ValueError):
        g.distance(np.array([1.0]), np.array([1.0, 2.0]))


def test_score_basic_and_linearity():
    theta = np.array([1.0, 0.0])
    assert g.score(np.array([2.0, 0.0]), theta) == 2.0
    p = np.array([0.3, 0.7])
    alpha = 1.375  # dyadic, exact under floating point
    assert g.score(p + alpha * theta, theta) - g.score(p, theta) == alpha


def test_score_matches_per_coordinate_oracle():
    rng = np.random.default_rng(1)
    for _ in range(50):
        p = rng.standard_normal(4)
        t = rng.standard_normal(4)
        t /= np.linalg.norm(t)
        brute = sum(float(a) * float(b) for a, b in zip(p, t))
        assert g.score(p, t) == pytest.approx(brute, rel=1e-12)


def test_direction_net_d2_explicit_family():
    mu, eps = 10.0, 0.2
    angle = eps / (4 * mu)
    net = g.direction_net(2, angle)
    assert len(net) == math.ceil(8 * math.pi * mu / eps)
    for i in (0, 1, 7):
        assert np.allclose(net[i], [math.cos(i * angle), math.sin(i * angle)])


def test_direction_net_d1():
    net = g.direction_net(1, 0.5)
    assert [tuple(v) for v in net] == [(1.0,), (-1.0,)]


def test_direction_net_angle_validation():
    with pytest.raises(ValueError):
        g.direction_net(2, 0.0)
    with pytest.raises(ValueError):
        g.direction_net(2, 1.5)


@pytest.mark.parametrize("d,angle", [(2, 0.1), (3, 0.1), (4, 0.3)])
def test_direction_net_coverage(d, angle):
    # 10^4 random unit vectors each have a net vector within the angle
    rng = np.random.default_rng(d)
    samples = rng.standard_normal((10_000, d))
    samples /= np.linalg.norm(samples, axis=1, keepdims=True)
    for v in samples:
        idx = g.nearest_net_index(d, angle, v)
        cand = g.direction_by_index(d, angle, idx)
        cos = float(np.clip(np.dot(cand, v), -1.0, 1.0))
        assert math.acos(cos) <= angle + 1e-12


def test_direction_net_size_bound():
    for d in (2, 3, 4):
        assert g.direction_net_size(d, 0.2) <= 40 * (1.0 / 0.2) ** (d - 1) * d * d


def test_shifted_grid_family_d1_example():
    parts = g.shifted_grid_family(1, 1.0)
    assert len(parts) == 3  # 2*ceil(1/2)+1
    assert all(p.side == 6.0 for p in parts)
    shared = [p for p in parts
              if p.cell_of(np.array([0.9])) == p.cell_of(np.array([1.7]))]
    assert shared


def test_shifted_grid_single_point_in_one_cell():
    parts = g.shifted_grid_family(2, 0.5)
    p = np.array([0.3, 0.4])
    for part in parts:
        assert part.cell_of(p) == part.cell_of(p)


def test_shifted_grid_completeness_random_pairs():
    rng = np.random.default_rng(2)
    delta = 0.37
    parts = g.shifted_grid_family(2, delta)
    for _ in range(1000):
        p = rng.random(2) * 10
        v = rng.standard_normal(2)
        v *= rng.random() * delta / np.linalg.norm(v)
        q = p + v
        assert any(part.cell_of(p) == part.cell_of(q) for part in parts)


def _axis_strips(width=1.0, shift=0.0):
    return g.StripPartition(direction=np.array([1.0, 0.0]), width=width,
                            shift=shift, basis=np.array([[0.0, 1.0]]))


def test_strip_index_boundary_goes_higher():
    part = _axis_strips()
    # point exactly on the boundary between strips 0 and 1
    assert g.strip_index(np.array([5.0, 1.0]), part) == (1,)


def test_strip_index_translation():
    part = _axis_strips(width=0.25)
    p = np.array([0.3, 0.37])
    n = np.array([0.0, 1.0])
    base = g.strip_index(p, part)
    stepped = g.strip_index(p + 0.25 * n, part)
    assert stepped[0] == base[0] + 1


def test_strip_index_hand_example():
    # d=2, theta=(1,0), w=1, shift 0: p=(5, 3.2) -> index 3
    part = g.StripPartition(direction=np.array([1.0, 0.0]), width=1.0, shift=0.0,
                            basis=np.array([[-0.0, 1.0]]))
    assert g.strip_index(np.array([5.0, 3.2]), part) == (3,)


def test_strip_index_is_partition():
    rng = np.random.default_rng(3)
    part = _axis_strips(width=0.2, shift=0.05)
    for _ in range(200):
        p = rng.standard_normal(2) * 3
        idx = g.strip_index(p, part)
        lo = idx[0] * 0.2 + 0.05
        assert lo <= p[1] < lo + 0.2 or p[1] == pytest.approx(lo)


def test_orthonormal_complement():
    rng = np.random.default_rng(4)
    for d in (2, 3, 4):
        for _ in range(20):
            t = rng.standard_normal(d)
            t /= np.linalg.norm(t)
            basis = g.orthonormal_complement(t)
            assert basis.shape == (d - 1, d)
            assert np.allclose(basis @ t, 0.0, atol=1e-12)
            assert np.allclose(basis @ basis.T, np.eye(d - 1), atol=1e-12)


def test_direction_unit_invariant():
    with pytest.raises(ValueError):
        g.Direction(np.array([1.0, 1.0]))
    g.Direction(np.array([1.0, 0.0]))
