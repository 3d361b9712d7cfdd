"""Compare the compiled and numpy tracking kernels on the bundled models.

Usage: python3 benchmarks/bench_tracker.py [--repeat N] [--json]

Each case lifts every wall loop of a model from every critical point; the
two backends must produce the same permutations.
"""

from __future__ import annotations

import argparse
import json
import time

from polarhecke.monodromy import kernel
from polarhecke.monodromy.model import normal_crossings, quadric, symmetric_matrices
from polarhecke.monodromy.tracker import braid_generator_loop, critical_points, track_loop

CASES = [
    ("quadric(3)", lambda: quadric(3)),
    ("normal_crossings(4)", lambda: normal_crossings(4)),
    ("symmetric_matrices(3)", lambda: symmetric_matrices(3)),
    ("symmetric_matrices(4)", lambda: symmetric_matrices(4)),
]


def run_case(model, backend: str, repeat: int, h_max: float):
    crit = critical_points(model)
    loops = [braid_generator_loop(model, wall=k) for k in range(len(model.walls))]
    best = float("inf")
    perms = steps = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = [track_loop(model, lp, crit, backend=backend, h_max=h_max) for lp in loops]
        best = min(best, time.perf_counter() - t0)
        perms = [r.permutation for r in res]
        steps = sum(sum(r.steps) for r in res)
    return best, perms, steps


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=1)
    ap.add_argument("--h-max", type=float, default=0.002, help="small steps make the kernel dominate")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    backends = kernel.available_backends()
    rows = []
    for name, build in CASES:
        model = build()
        row = {"case": name, "W": model.group.order}
        perms = {}
        for b in backends:
            t, p, steps = run_case(model, b, args.repeat, args.h_max)
            row[b] = t
            row["steps"] = steps
            perms[b] = p
        row["same_permutations"] = len({json.dumps(p) for p in perms.values()}) == 1
        if "cython" in row:
            row["speedup"] = row["python"] / row["cython"]
        rows.append(row)
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print(f"{'case':24} {'|W|':>4} {'steps':>7} " + " ".join(f"{b + ' [s]':>12}" for b in backends) + "  speedup  same")
        for r in rows:
            cols = " ".join(f"{r[b]:12.4f}" for b in backends)
            sp = f"{r['speedup']:7.1f}x" if "speedup" in r else "      -"
            print(f"{r['case']:24} {r['W']:>4} {r['steps']:>7} {cols}  {sp}  {r['same_permutations']}")
    return 0 if all(r["same_permutations"] for r in rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())
