"""Time the hot kernels on the numba and pure-numpy backends.

Each backend runs in its own interpreter because the choice is fixed at import
time by HECKE_MURMUR_NO_NUMBA. Numba timings exclude the first (compiling) call.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from hecke_murmur import kernels
from hecke_murmur.arith_core import primes_between
from hecke_murmur.quadfield import DiscriminantWindow, enumerate_family, family_table

quick, repeat = json.loads(sys.argv[1])
scale = 4 if quick else 1
X = 2**14 // scale
Ds = enumerate_family(DiscriminantWindow(X, X))
spf = kernels.spf_sieve(int(Ds.max()))
fam = family_table(DiscriminantWindow(X, X))
primes = primes_between(3, int(2.25 * X))
ells = primes_between(3, 10**5 // scale)
factors = 1.0 - 2.0 / ells.astype(float) ** 2
x = np.linspace(0.0, 60.0, 10**6 // scale)
msum_a = np.array([0.05, 0.5, 2.0])
msum_n = np.array([10**5 // scale] * 3, dtype=np.int64)
cases = {
    "jacobi_many": lambda: kernels.jacobi_many(np.arange(-10**6 // scale, 10**6 // scale), 999983),
    "spf_sieve": lambda: kernels.spf_sieve(10**7 // scale),
    "mobius_segment": lambda: kernels.mobius_segment(10**9, 10**9 + 10**6 // scale, primes_between(2, 40000)),
    "class_numbers_forms": lambda: kernels.class_numbers_forms(Ds),
    "class_numbers_dirichlet": lambda: kernels.class_numbers_dirichlet(Ds, spf),
    "empirical_counts": lambda: kernels.empirical_counts(primes, X, X, fam.D, fam.h_by_offset(), 8),
    "c_products": lambda: kernels.c_products(primes, ells, factors),
    "j0_many": lambda: kernels.j0_many(x),
    "j0_msums": lambda: kernels.j0_msums(msum_a, msum_n),
}
out = {}
for name, fn in cases.items():
    fn()
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    out[name] = best
print(json.dumps({"backend": kernels.BACKEND, "times": out}))
"""


def run_backend(no_numba: bool, quick: bool, repeat: int) -> dict:
    env = dict(os.environ, HECKE_MURMUR_NO_NUMBA="1" if no_numba else "")
    r = subprocess.run(
        [sys.executable, "-c", WORKER, json.dumps([quick, repeat])], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(r.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="quarter-size inputs")
    args = ap.parse_args()
    nb = run_backend(False, args.quick, args.repeat)
    npy = run_backend(True, args.quick, args.repeat)
    print(f"{'kernel':<26}{nb['backend']:>12}{npy['backend']:>12}{'speedup':>10}")
    for name, t_nb in nb["times"].items():
        t_np = npy["times"][name]
        print(f"{name:<26}{t_nb * 1e3:>10.1f}ms{t_np * 1e3:>10.1f}ms{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
