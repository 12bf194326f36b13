"""Brute-force oracles and audits grounding the acceptance criteria.

`stretch_oracle` is exact (full enumeration of trees) on explicit covers;
on lazy covers it evaluates, per pair, the deterministic witness tree of
every (shift, class) slice and reports the max over pairs of the min over
those candidates -- an upper bound on the true stretch, which is sound for
every <=-style criterion, and it fails loudly if any pair has no candidate.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .tree_model import CoverTree, TreeCover


@dataclass
class StretchReport:
    max_stretch: float
    witness_pair: tuple[int, int] | None
    per_pair_best_tree: dict[tuple[int, int], tuple]
    pairs_checked: int
    uncovered: list[tuple[int, int]]

    @property
    def ok(self) -> bool:
        return not self.uncovered


def _pairs(n: int, pairs) -> list[tuple[int, int]]:
    if pairs is None or pairs == "all":
        return [(x, y) for x in range(n) for y in range(x + 1, n)]
    return list(pairs)


def sample_pairs(n: int, m: int, seed: int = 0) -> list[tuple[int, int]]:
    rng = np.random.default_rng(seed)
    out = set()
    while len(out) < min(m, n * (n - 1) // 2):
        x, y = rng.integers(n, size=2)
        if x != y:
            out.add((min(int(x), int(y)), max(int(x), int(y))))
    return sorted(out)


def stretch_oracle(points: np.ndarray, cover, pairs=None,
                   reduced: bool | None = None) -> StretchReport:
    """Max over pairs of the min over trees of delta_T / Euclidean distance.

    `cover` is either an explicit TreeCover/list of CoverTree (exact, every
    tree enumerated) or a lazy cover (per-pair witness candidates).  With
    reduced=True (default when the lazy cover was built with global degree
    reduction) distances are measured on the reduced materialized trees.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n = pts.shape[0]
    todo = _pairs(n, pairs)
    best: dict[tuple[int, int], tuple] = {}
    uncovered: list[tuple[int, int]] = []
    max_stretch = 0.0
    witness = None

    if isinstance(cover, (TreeCover, list, tuple)):
        trees = list(cover)
        for (x, y) in todo:
            d = float(np.linalg.norm(pts[x] - pts[y]))
            if d == 0.0:
                continue
            best_d, best_t = math.inf, None
            for t, tree in enumerate(trees):
                try:
                    dt = tree.tree_distance(x, y)
                except KeyError:
                    continue
                if dt < best_d:
                    best_d, best_t = dt, (tree.index or (0, 0, t))
            if best_t is None:
                uncovered.append((x, y))
                continue
            best[(x, y)] = best_t + (best_d,)
            s = best_d / d
            if s > max_stretch:
                max_stretch, witness = s, (x, y)
        return StretchReport(max_stretch, witness, best, len(todo), uncovered)

    # lazy cover
    if reduced is None:
        reduced = cover.degree_reduction == "global"
    groups: dict[tuple, list[tuple[int, int]]] = {}
    for (x, y) in todo:
        d = float(np.linalg.norm(pts[x] - pts[y]))
        if d == 0.0:
            continue
        got = cover.best_candidate(x, y)
        if got is None:
            uncovered.append((x, y))
            continue
        i, j, k, dv = got
        best[(x, y)] = (i, j, k, dv)
        if reduced:
            groups.setdefault((i, j, k), []).append((x, y))
        else:
            s = dv / d
            if s > max_stretch:
                max_stretch, witness = s, (x, y)
    if reduced:
        for (i, j, k), grp in groups.items():
            tree = cover.tree(i, j, k)
            for (x, y) in grp:
                d = float(np.linalg.norm(pts[x] - pts[y]))
                dt = tree.tree_distance(x, y)
                best[(x, y)] = (i, j, k, dt)
                s = dt / d
                if s > max_stretch:
                    max_stretch, witness = s, (x, y)
    return StretchReport(max_stretch, witness, best, len(todo), uncovered)


@dataclass
class PartialOracleReport:
    ok: bool
    counterexample: tuple[int, int] | None
    far_pairs: int
    max_stretch: float


def partial_oracle(points: np.ndarray, family, mu: float, delta: float,
                   eps: float) -> PartialOracleReport:
    """Check that every (mu, Delta)-far pair has a witness tree at 1 + eps.

    `family` is a lazy partial cover (non-Steiner or Steiner) or an explicit
    list of CoverTree.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n = pts.shape[0]
    far = 0
    worst = 0.0
    for x in range(n):
        for y in range(x + 1, n):
            d = float(np.linalg.norm(pts[x] - pts[y]))
            if not (delta / mu <= d <= delta * (1 + 1e-12)):
                continue
            far += 1
            dt = _partial_pair_distance(family, x, y)
            if dt is None:
                return PartialOracleReport(False, (x, y), far, math.inf)
            worst = max(worst, dt / d)
            if dt > (1.0 + eps) * d * (1 + 1e-12):
                return PartialOracleReport(False, (x, y), far, worst)
    return PartialOracleReport(True, None, far, worst)


def _partial_pair_distance(family, x: int, y: int) -> float | None:
    if isinstance(family, (list, tuple, TreeCover)):
        best = None
        for tree in family:
            try:
                dt = tree.tree_distance(x, y)
            except KeyError:
                continue
            best = dt if best is None else min(best, dt)
        return best
    if hasattr(family, "best_witness"):        # Steiner family
        got = family.best_witness(x, y)
        return None if got is None else got[1]
    k = family.witness(x, y)                   # non-Steiner family
    if k is None:
        return None
    return family.pair_distance(k, x, y)


def audit_cover_trees(cover, indices) -> list:
    """Audit reports of the materialized trees at the given (i, j, k)."""
    return [cover.tree(i, j, k).audit() for (i, j, k) in indices]


def level_diameter_audit(cover) -> tuple[bool, float]:
    """Check every assembled piece's diameter against 2*gamma*Delta_w.

    Audits, per (i, j) slice and cell, the bare template plus every witness
    layer the instance can use; reports (ok, worst diameter / bound ratio).
    The radius recursion bounds the diameter by twice the root radius.
    """
    from .degree_reduction import audit_tree_indices

    worst = 0.0
    gamma = cover.params.gamma
    by_slice: dict[tuple[int, int], set[int]] = {}
    for (i, j, k) in audit_tree_indices(cover, samples_per_slice=1):
        by_slice.setdefault((i, j), set()).add(k)
    for h in cover.hierarchies:
        for k in by_slice.get((h.i, h.j), {0}):
            memo: dict[int, float] = {}
            for node in h.contracted.nodes:
                ctx = h.ctx[node.index]
                radius = h.cell_radius(ctx, k, memo)
                bound = 2.0 * gamma * ctx.delta
                if bound > 0:
                    worst = max(worst, 2.0 * radius / bound)
    return worst <= 1.0 + 1e-9, worst


@dataclass
class BenchRow:
    n: int
    build_ms: float
    trees: int
    max_point_degree: int
    max_stretch: float

    def csv(self) -> str:
        return (f"{self.n},{self.build_ms:.3f},{self.trees},"
                f"{self.max_point_degree},{self.max_stretch:.6f}")


BENCH_HEADER = "n,build_ms,trees,max_point_degree,max_stretch"


def bench(sizes, eps: float, d: int, mode: str = "nonsteiner",
          strategy: str = "dyadic-binary", seed: int = 0, repeats: int = 3,
          sample: int = 300) -> list[BenchRow]:
    """Wall-clock medians over `repeats` runs; deterministic seeds."""
    from .assembly import build_tree_cover
    from .degree_reduction import point_degrees

    rows: list[BenchRow] = []
    for n in sizes:
        rng = np.random.default_rng(seed)
        pts = rng.random((n, d))
        times = []
        cover = None
        for _ in range(repeats):
            t0 = time.perf_counter()
            cover = build_tree_cover(pts, eps, mode=mode, strategy=strategy)
            times.append((time.perf_counter() - t0) * 1000.0)
        times.sort()
        build_ms = times[len(times) // 2]
        pairs = sample_pairs(n, sample, seed=seed)
        rep = stretch_oracle(pts, cover, pairs=pairs)
        deg = 0
        for (i, j, k, _) in list(rep.per_pair_best_tree.values())[:20]:
            deg = max(deg, max(point_degrees(cover.tree(i, j, k)).values() or [0]))
        rows.append(BenchRow(n=n, build_ms=build_ms, trees=cover.tree_count(),
                             max_point_degree=deg, max_stretch=rep.max_stretch))
    return rows
