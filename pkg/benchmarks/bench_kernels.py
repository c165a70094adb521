"""Head-to-head timing of the numba kernels against the numpy fallbacks.

Usage::

    python benchmarks/bench_kernels.py [--repeats N]

Each kernel is timed best-of-N after a warmup call (the warmup also pays
numba's compile cost so it does not pollute the numbers).  Results of the
two variants are checked for exact agreement before timing.  If numba is
unavailable, or OBSENT_DISABLE_NUMBA is set, only the numpy column runs.
"""

import argparse
import time

import numpy as np

from obsent import _kernels as K


def best_of(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_pair(name, numpy_fn, numba_fn, args, repeats, check=np.array_equal):
    if numba_fn is not None and not check(numpy_fn(*args), numba_fn(*args)):
        raise AssertionError(f"{name}: variants disagree, refusing to time")
    t_np = best_of(numpy_fn, args, repeats)
    if numba_fn is None:
        print(f"{name:<28} {t_np * 1e3:9.2f} ms        -         -")
        return
    numba_fn(*args)  # warmup / compile
    t_nb = best_of(numba_fn, args, repeats)
    print(f"{name:<28} {t_np * 1e3:9.2f} ms {t_nb * 1e3:9.2f} ms {t_np / t_nb:8.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats per kernel (best is reported)")
    args = parser.parse_args()

    print(f"backend: {K.ACTIVE_BACKEND} (HAVE_NUMBA={K.HAVE_NUMBA})")
    print(f"{'kernel':<28} {'numpy':>12} {'numba':>12} {'speedup':>9}")

    rng = np.random.default_rng(7)
    codes = rng.integers(0, 2**62, size=1 << 20, dtype=np.int64)
    bench_pair("popcount[1M]", K.popcount_numpy, K.popcount_numba,
               (codes,), args.repeats)

    bench_pair("enumerate_states[20,10]", K.enumerate_states_numpy,
               K.enumerate_states_numba, (20, 10), args.repeats)

    states = K.enumerate_states_numpy(16, 8)
    edges = np.array([0, 4, 8, 12, 16], dtype=np.int64)
    bench_pair("signature_codes[12870x4]", K.signature_codes_numpy,
               K.signature_codes_numba, (states, edges), args.repeats)

    chain = K.enumerate_states_numpy(14, 7)
    bench_pair("fill_hamiltonian[3432]", K.fill_hamiltonian_numpy,
               K.fill_hamiltonian_numba,
               (chain, 1, 14, 1.0, 0.37, 0.21, 0.11), args.repeats,
               check=np.allclose)


if __name__ == "__main__":
    main()
