"""Write a Hecke-consistent synthetic coefficient file in the Maass file format.

The values are lam(p) = 2 cos(theta_p) with theta_p drawn from the
Sato-Tate law, extended by the Hecke relations. They are NOT the
coefficients of an actual Maass form; the file exercises the loader and
the evaluation path only.
"""

import argparse

import numpy as np

from horolab.arith import prime_sieve
from horolab.heckeforms import hecke_extend


def sato_tate_angles(rng, n):
    # rejection sampling from (2/pi) sin^2 on [0, pi]
    out = []
    while len(out) < n:
        t = rng.uniform(0, np.pi, 2 * n)
        u = rng.uniform(0, 1, 2 * n)
        out.extend(t[u < np.sin(t) ** 2])
    return np.array(out[:n])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", type=int, default=5000)
    ap.add_argument("--t", type=float, default=9.5)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--out", default="src/horolab/data/synthetic_maass.txt")
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    primes = prime_sieve(args.N)
    theta = sato_tate_angles(rng, len(primes))
    table = hecke_extend({int(p): 2 * np.cos(th) for p, th in zip(primes, theta)}, args.N)
    with open(args.out, "w") as fh:
        fh.write(f"# synthetic Hecke-consistent coefficients (seed {args.seed}); not a real Maass form\n")
        fh.write(f"t {args.t} eps 1\n")
        for n in range(1, args.N + 1):
            fh.write(f"{n} {table.lam[n]:.17g}\n")


if __name__ == "__main__":
    main()
