"""Compare the compiled and pure-Python best-subset kernels.

    python3 benchmarks/bench_kernels.py --sizes 18 22 26 --reps 3

Both backends must return the same mask on every instance; the script
exits nonzero if they ever disagree.
"""

import argparse
import json
import random
import sys
import time

from ufpmaze import search


def make_case(n, m, rng):
    weights = [rng.randint(1, 20) for _ in range(n)]
    demands = [rng.randint(1, 10) for _ in range(n)]
    rows, caps = [], []
    for _ in range(m):
        a = rng.randrange(n)
        b = rng.randrange(a, n)
        rows.append(sum(1 << j for j in range(a, b + 1)))
        caps.append(rng.randint(5, 25))
    crow = [sum(1 << j for j in range(n) if rng.random() < 0.5)]
    return weights, demands, rows, caps, crow, max(2, n // 3)


def timed(backend, case, reps):
    w, d, rows, caps, crow, cap = case
    best = float("inf")
    mask = None
    for _ in range(reps):
        t0 = time.perf_counter()
        mask = search.best_subset(w, d, rows, caps, crow, cap, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return mask, best


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[18, 22, 26])
    p.add_argument("--edges", type=int, default=3)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    args = p.parse_args(argv)

    if search.BACKEND != "compiled":
        print("compiled kernel not available; only the Python backend can run", file=sys.stderr)
    rng = random.Random(args.seed)
    rows = []
    for n in args.sizes:
        case = make_case(n, args.edges, rng)
        py_mask, py_t = timed("python", case, args.reps)
        row = {"n": n, "python_s": py_t, "compiled_s": None, "speedup": None}
        if search.BACKEND == "compiled":
            c_mask, c_t = timed("compiled", case, args.reps)
            if c_mask != py_mask:
                print(f"backends disagree at n={n}: {c_mask} vs {py_mask}", file=sys.stderr)
                return 1
            row.update(compiled_s=c_t, speedup=py_t / c_t if c_t else None)
        rows.append(row)

    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print(f"{'n':>4}  {'python s':>10}  {'compiled s':>10}  {'speedup':>8}")
        for r in rows:
            c = "-" if r["compiled_s"] is None else f"{r['compiled_s']:.5f}"
            sp = "-" if r["speedup"] is None else f"{r['speedup']:.1f}x"
            print(f"{r['n']:>4}  {r['python_s']:>10.5f}  {c:>10}  {sp:>8}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
