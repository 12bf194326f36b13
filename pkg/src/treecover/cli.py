"""Batch CLI: build, verify, stats, route, bench.

Points file format: first non-comment line `d n`, then n whitespace-separated
coordinate lines; `#` starts a comment.  Exit codes: 0 success, 1 failed
verification, 2 validation error.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .assembly import build_tree_cover
from .params import MODES, STRATEGIES
from .tree_model import FormatError, TreeCover, deserialize, serialize
from .verify import BENCH_HEADER, bench, sample_pairs, stretch_oracle


def worker_count() -> int:
    env = os.environ.get("TREECOVER_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def read_points(path: str) -> np.ndarray:
    rows: list[list[float]] = []
    header: tuple[int, int] | None = None
    with open(path) as fh:
        for no, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if header is None:
                if len(parts) != 2:
                    raise FormatError(no, "expected header 'd n'")
                header = (int(parts[0]), int(parts[1]))
                continue
            if len(parts) != header[0]:
                raise FormatError(no, f"expected {header[0]} coordinates")
            rows.append([float(v) for v in parts])
    if header is None:
        raise FormatError(1, "empty points file")
    d, n = header
    if len(rows) != n:
        raise FormatError(0, f"expected {n} points, found {len(rows)}")
    return np.array(rows, dtype=np.float64).reshape(n, d)


def write_points(path: str, points: np.ndarray) -> None:
    pts = np.atleast_2d(points)
    with open(path, "w") as fh:
        fh.write(f"{pts.shape[1]} {pts.shape[0]}\n")
        for row in pts:
            fh.write(" ".join(format(v, ".17g") for v in row) + "\n")


def _parse_pairs(spec: str, n: int, seed: int):
    if spec == "all":
        return None
    if spec.startswith("sample:"):
        return sample_pairs(n, int(spec.split(":", 1)[1]), seed=seed)
    raise ValueError("--pairs must be 'all' or 'sample:<m>'")


def support_cover(cover, pairs=None) -> TreeCover:
    """Materialize the trees witnessing the given pairs (default: all pairs).

    The returned explicit cover is the certificate written to .tc files; the
    formula count rides along in `total_trees`.
    """
    n = cover.n
    if pairs is None:
        pairs = [(x, y) for x in range(n) for y in range(x + 1, n)]
    indices: list[tuple[int, int, int]] = []
    seen = set()
    for x, y in pairs:
        got = cover.best_candidate(x, y)
        if got is None:
            continue
        key = got[:3]
        if key not in seen:
            seen.add(key)
            indices.append(key)
    trees = [cover.tree(i, j, k) for (i, j, k) in sorted(indices)]
    return TreeCover(d=cover.params.d, eps=cover.params.eps, mode=cover.mode,
                     trees=trees, total_trees=cover.tree_count())


def cmd_build(args) -> int:
    points = read_points(args.input)
    cover = build_tree_cover(points, eps=args.eps, mode=args.mode,
                             strategy=args.strategy,
                             degree_reduction=args.degree_reduction)
    pairs = _parse_pairs(args.pairs, cover.n, args.seed)
    explicit = support_cover(cover, pairs)
    with open(args.out, "w") as fh:
        fh.write(serialize(explicit))
    max_deg = 0
    from .degree_reduction import point_degrees
    for t in explicit.trees[:50]:
        degs = point_degrees(t)
        if degs:
            max_deg = max(max_deg, max(degs.values()))
    print(f"built cover: {cover.tree_count()} trees "
          f"({len(explicit.trees)} materialized in {args.out}), "
          f"max point degree {max_deg}")
    return 0


def cmd_verify(args) -> int:
    points = read_points(args.input)
    with open(args.cover) as fh:
        cover = deserialize(fh.read(), points=points)
    pairs = _parse_pairs(args.pairs, points.shape[0], args.seed)
    report = stretch_oracle(points, cover, pairs=pairs)
    bound = 1.0 + cover.eps + 1e-9
    if report.uncovered:
        x, y = report.uncovered[0]
        print(f"FAIL: pair ({x}, {y}) is not covered by any tree")
        return 1
    if report.max_stretch > bound:
        x, y = report.witness_pair
        print(f"FAIL: pair ({x}, {y}) has stretch {report.max_stretch:.9f} "
              f"> {bound:.9f}")
        return 1
    print(f"OK: max stretch {report.max_stretch:.9f} over "
          f"{report.pairs_checked} pairs (bound {bound:.9f})")
    return 0


def cmd_stats(args) -> int:
    points = read_points(args.input) if args.input else None
    with open(args.cover) as fh:
        cover = deserialize(fh.read(), points=points)
    total = cover.total_trees if cover.total_trees is not None else len(cover.trees)
    print(f"trees={total} materialized={len(cover.trees)} d={cover.d} "
          f"eps={cover.eps} mode={cover.mode}")
    print("tree  nodes  edges  max_node_deg  max_point_deg  diameter")
    for t, tree in enumerate(cover.trees[:200]):
        rep = tree.audit()
        idx = tree.index or (0, 0, t)
        print(f"{idx}  {len(tree.nodes)}  {len(tree.edges)}  "
              f"{rep.max_node_degree}  {rep.max_point_degree}  {rep.diameter:.6g}")
    return 0


def cmd_route(args) -> int:
    from .routing import build_routing

    points = read_points(args.input)
    cover = build_tree_cover(points, eps=args.eps, mode="nonsteiner",
                             strategy=args.strategy, degree_reduction="global")
    bundle = build_routing(cover, seed=args.seed)
    n = points.shape[0]
    pairs = _parse_pairs(args.pairs, n, args.seed)
    if pairs is None:
        ordered = [(s, t) for s in range(n) for t in range(n) if s != t]
    else:
        ordered = [(s, t) for (s, t) in pairs] + [(t, s) for (s, t) in pairs]
    worst = 0.0
    for s, t in ordered:
        _, _, ratio = bundle.simulate_route(s, t)
        worst = max(worst, ratio)
    man = bundle.size_manifest()
    print(f"routed {len(ordered)} pairs: max ratio {worst:.9f} "
          f"(bound {1.0 + args.eps:.6f})")
    print(f"label bits: max {man['max_label_bits']}  "
          f"tree-id bits {man['tree_id_bits']}  "
          f"apices/point <= {man['max_apices_per_point']}")
    if args.labels_out:
        with open(args.labels_out, "w") as fh:
            fh.write(bundle.serialize_labels())
    return 0


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = bench(sizes, eps=args.eps, d=args.d, mode=args.mode,
                 strategy=args.strategy, seed=args.seed)
    print(BENCH_HEADER)
    for row in rows:
        print(row.csv())
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="treecover",
                                 description="(1+eps)-stretch Euclidean tree covers")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_eps=True):
        p.add_argument("--input", required=True, help="points file")
        if needs_eps:
            p.add_argument("--eps", type=float, required=True)
        p.add_argument("--strategy", choices=STRATEGIES, default="dyadic-binary")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--pairs", default="all", help="'all' or 'sample:<m>'")

    b = sub.add_parser("build", help="build a cover and write a .tc file")
    common(b)
    b.add_argument("--mode", choices=MODES, default="nonsteiner")
    b.add_argument("--degree-reduction", choices=("none", "global"), default="none")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="check a .tc cover against the oracle")
    common(v, needs_eps=False)
    v.add_argument("--cover", required=True)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("stats", help="table of per-tree statistics")
    s.add_argument("--input", default=None)
    s.add_argument("--cover", required=True)
    s.set_defaults(func=cmd_stats)

    r = sub.add_parser("route", help="simulate routing on a fresh cover")
    common(r)
    r.add_argument("--labels-out", default=None)
    r.set_defaults(func=cmd_route)

    be = sub.add_parser("bench", help="CSV benchmark of build times")
    be.add_argument("--sizes", default="1024,4096")
    be.add_argument("--eps", type=float, required=True)
    be.add_argument("--d", type=int, default=2)
    be.add_argument("--mode", choices=MODES, default="nonsteiner")
    be.add_argument("--strategy", choices=STRATEGIES, default="dyadic-binary")
    be.add_argument("--seed", type=int, default=0)
    be.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
