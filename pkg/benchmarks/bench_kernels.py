"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Workloads: exhaustive 8x8 D&C/optimized-D&C verification (131072 structural
evaluations), a raw 1M-sample ripple add, and the 64-candidate Hamming sweep.
"""
import argparse
import statistics
import time

import numpy as np

from lutcim import kernels
from lutcim.erroranalysis import hamming_sweep
from lutcim.lutmul import MultiplierConfig, MultiplierKind, program


def exhaustive_8b():
    ys = np.arange(256, dtype=np.uint64)
    for kind in (MultiplierKind.DC, MultiplierKind.OPTIMIZED_DC):
        cfg = MultiplierConfig(kind, 8, 8)
        for w in range(256):
            got = program(cfg, w).evaluate_many(ys).values
            assert (got == ys * np.uint64(w)).all()


_rng = np.random.default_rng(0)
_A = _rng.integers(0, 1 << 20, size=1_000_000, dtype=np.uint64)
_B = _rng.integers(0, 1 << 20, size=1_000_000, dtype=np.uint64)


def ripple_1m():
    kernels.ripple_add(_A, _B, 0, 4, 26)


WORKLOADS = {"exhaustive_8x8": exhaustive_8b, "ripple_add_1M": ripple_1m, "hamming_sweep": hamming_sweep}


def timeit(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return statistics.median(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available()
    print(f"{'workload':<18}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in WORKLOADS.items():
        row = {}
        for b in backends:
            with kernels.backend(b):
                row[b] = timeit(fn, args.repeat)
        line = f"{name:<18}" + "".join(f"{row[b] * 1e3:>10.2f}ms" for b in backends)
        if len(backends) == 2:
            line += f"{row['python'] / row['compiled']:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
