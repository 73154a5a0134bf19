"""Time compose on F2-ball graph metrics, sequential vs threaded.

    python3 scripts/bench_compose.py [--radius 6] [--repeat 3]
"""

import argparse
import time

import numpy as np

from coarse_double import zoo
from coarse_double.kernels import worker_count
from coarse_double.semigroup import compose, graph_metric


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radius", type=int, default=6)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--C", type=float, default=3.0)
    args = ap.parse_args()
    X, P = zoo.f2_ball(args.radius)
    d = graph_metric(X, P.image, args.C, exhaustive=False)
    compose(d, d)  # warm the jit cache
    print(f"n = {len(X)}, workers available = {worker_count()}")
    ref = None
    for threads in (1, None):
        best = np.inf
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            out = compose(d, d, threads=threads)
            best = min(best, time.perf_counter() - t0)
        ref = out.cross if ref is None else ref
        same = np.array_equal(ref, out.cross)
        print(f"threads={threads or 'auto':>4}: best {best:.3f} s, identical={same}")


if __name__ == "__main__":
    main()
