"""Time the compiled kernels against the numpy fallback on the same inputs.

    python3 benchmarks/bench_kernels.py --repeat 5
"""

import argparse
import time

import numpy as np

from horolab import _pykernels, kernels
from horolab.arith import spf_table
from horolab.expsums import _tables
from horolab.lattice import gauss_reduce, lambda_lattice


def cases(rng):
    n = 200_000
    x, y = rng.uniform(-3, 3, n), 10 ** rng.uniform(-4, 0, n)
    xr = rng.uniform(-0.5, 0.5, n)
    yr = np.maximum(np.sqrt(1 - xr**2), rng.uniform(0.8, 4, n))
    q = 100_003
    v1 = rng.normal(size=q) + 1j * rng.normal(size=q)
    v2 = rng.normal(size=q) + 1j * rng.normal(size=q)
    ql = 10_007
    nmax = 10 * ql
    w1 = rng.normal(size=nmax + 1) + 0j
    w2 = rng.normal(size=nmax + 1) + 0j
    rb = gauss_reduce(lambda_lattice(ql, 5003, -1))
    (x1, x2), (y1, y2) = rb.x, rb.y
    U = nmax * (abs(y1) + abs(y2)) // ql + 2
    qk = 10_007
    inv, ct, st = _tables(qk)
    ka, kb = rng.integers(1, qk, 200), rng.integers(1, qk, 200)
    spf = spf_table(10**6)
    return {
        "fd_reduce_batch": lambda m: m.fd_reduce_batch(x.copy(), y.copy()),
        "incomplete_eisenstein_reduced": lambda m: m.incomplete_eisenstein_reduced(xr, yr, 0.75, 3.0),
        "pair_gather_sum": lambda m: m.pair_gather_sum(v1, v2, 4711, q, 0, q),
        "lattice_model_sum": lambda m: m.lattice_model_sum(x1, x2, y1, y2, w1, w2, nmax, -U, U + 1),
        "kloosterman_batch": lambda m: m.kloosterman_batch(ka, kb, qk, inv, ct, st),
        "classify_range": lambda m: m.classify_range(1, 10**6 + 1, 1000.0, 1, spf),
    }


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    compiled = kernels.compiled_backend
    if compiled is None:
        print("compiled extension not built; only the fallback is available")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':32s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for name, fn in cases(rng).items():
        tp = best_of(lambda: fn(_pykernels), args.repeat)
        if compiled is None:
            print(f"{name:32s} {tp:11.4f} {'-':>11s} {'-':>8s}")
            continue
        tc = best_of(lambda: fn(compiled), args.repeat)
        print(f"{name:32s} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f}")


if __name__ == "__main__":
    main()
