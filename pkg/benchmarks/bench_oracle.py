"""Compare the numba and numpy kernels on exhaustive enumeration and sampling.

    python3 benchmarks/bench_oracle.py [--enum-n 7] [--mc-n 30] [--reps 200000]

Each timing is the best of ``--repeat`` runs after one warm-up call (the
warm-up absorbs numba's JIT compile).  Both backends must produce identical
tallies; the script exits non-zero if they do not.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from chordstats import oracle
from chordstats._accel import NUMBA_AVAILABLE


def best_of(fn, repeat: int) -> tuple[float, object]:
    fn()
    times = []
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--enum-n", type=int, default=7)
    ap.add_argument("--mc-n", type=int, default=30)
    ap.add_argument("--reps", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if not NUMBA_AVAILABLE:
        print("numba is not installed; only the numpy backend can run", file=sys.stderr)
        return 1

    rows = []
    enum = {}
    mc = {}
    for backend in ("numba", "numpy"):
        t, res = best_of(lambda: oracle.enumerate_counts(args.enum_n, backend=backend), args.repeat)
        enum[backend] = res
        rows.append((f"enumerate n={args.enum_n}", backend, t, res.visited / t))
        t, res = best_of(
            lambda: oracle.monte_carlo(args.mc_n, args.reps, seed=1, backend=backend, exact_max_n=0),
            args.repeat,
        )
        mc[backend] = res
        rows.append((f"monte_carlo n={args.mc_n}", backend, t, args.reps / t))

    print(f"{'task':<22} {'backend':<8} {'seconds':>9} {'items/s':>12}")
    for task, backend, t, rate in rows:
        print(f"{task:<22} {backend:<8} {t:9.3f} {rate:12.3g}")
    for task in sorted({r[0] for r in rows}):
        fast, slow = (r[2] for r in rows if r[0] == task)
        print(f"speedup {task}: {slow / fast:.1f}x")

    same = enum["numba"].tables == enum["numpy"].tables and np.array_equal(
        mc["numba"].counts, mc["numpy"].counts
    )
    print("backends agree" if same else "BACKENDS DISAGREE")
    return 0 if same else 2


if __name__ == "__main__":
    sys.exit(main())
