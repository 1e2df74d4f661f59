"""Compare the compiled orbit kernel against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--depth 12] [--steps 200000] [--repeat 3]

Both backends run the same forward orbit, backward orbit and level scan from
a handful of fixed start points; the script checks that their outputs agree
before reporting timings.
"""
from __future__ import annotations

import argparse
import json
import sys
import timeit

from chacon_lab import kernels
from chacon_lab.tower import TowerGeometry


def workloads(grid, depth, steps):
    starts = [0, 1, 3**depth // 7, 5 * 3**depth // 2]
    return {
        "forward": lambda: [grid.orbit(p, steps) for p in starts],
        "backward": lambda: [grid.orbit(p + 1, -steps) for p in starts],
        "levels": lambda: [grid.orbit_levels(depth // 2, p, steps) for p in starts],
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depth", type=int, default=12)
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if not kernels.compiled_available():
        print("compiled kernel not built; only the Python backend is available", file=sys.stderr)
        return 1

    geo = TowerGeometry(args.depth)
    grids = {b: kernels.make_grid(geo.heights, args.depth, b) for b in ("python", "cython")}
    results = {}
    for name in ("forward", "backward", "levels"):
        outs = {b: [list(x) for x in workloads(g, args.depth, args.steps)[name]()] for b, g in grids.items()}
        if outs["python"] != outs["cython"]:
            print(f"backends disagree on {name}", file=sys.stderr)
            return 1
        row = {}
        for b, g in grids.items():
            fn = workloads(g, args.depth, args.steps)[name]
            row[b] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
        row["speedup"] = row["python"] / row["cython"]
        results[name] = row
        print(f"{name:9s} python {row['python']:8.3f}s  cython {row['cython']:8.3f}s  x{row['speedup']:.1f}")
    print(json.dumps({"depth": args.depth, "steps": args.steps, "results": results}, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
