"""Time the Jacobi eigensolver kernels against LAPACK on random Hermitian matrices.

    python3 benchmarks/bench_jacobi.py --sizes 8 16 32 64 --repeat 3
"""

import argparse
import time

import numpy as np

from extrinsic_dirac import linalg
from extrinsic_dirac._jacobi_py import jacobi_sweeps as python_kernel

try:
    from extrinsic_dirac._jacobi import jacobi_sweeps as cython_kernel
except ImportError:
    cython_kernel = None


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (a + a.conj().T)


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[8, 16, 32, 64, 128])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--skip-python", action="store_true", help="skip the slow pure-Python kernel")
    args = p.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    kernels = []
    if cython_kernel is not None:
        kernels.append(("cython", cython_kernel))
    if not args.skip_python:
        kernels.append(("python", python_kernel))
    print(f"{'n':>5} {'kernel':>8} {'seconds':>12} {'max |dw|':>12}")
    for n in args.sizes:
        a = random_hermitian(rng, n)
        ref = np.linalg.eigvalsh(a)
        t = best_time(lambda: np.linalg.eigvalsh(a), args.repeat)
        print(f"{n:>5} {'lapack':>8} {t:>12.3e} {0.0:>12.1e}")
        for name, kern in kernels:
            t = best_time(lambda: linalg.jacobi_eigh(a, kernel=kern), args.repeat)
            w = linalg.jacobi_eigh(a, kernel=kern)[0]
            print(f"{n:>5} {name:>8} {t:>12.3e} {np.max(np.abs(w - ref)):>12.1e}")


if __name__ == "__main__":
    main()
