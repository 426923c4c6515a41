#!/usr/bin/env python3
"""Throughput of the hypothesis-scan kernels: compiled vs numpy fallback.

The scan is the hot loop of every Monte Carlo sweep (one call scores all
N_Q x 3 x N_nu hypotheses of a window), so this is the number that
decides sweep wall time.  Run after installing the package:

    python benchmarks/bench_scan.py [--windows 200] [--nq 60]
"""

import argparse
import importlib
import time

import numpy as np

from cellsearch.detector import _pss_conj_stack
from cellsearch.rankbasis import ammse_basis, pcrr_partition

SHIFTS = np.arange(-3, 4, dtype=np.int64)


def load_backends():
    backends = {}
    for name, module in (("numpy", "cellsearch._core._scan_np"),
                         ("cython", "cellsearch._core._scan_cy")):
        try:
            backends[name] = importlib.import_module(module)
        except ImportError:
            print(f"  ({name} backend unavailable, skipping)")
    return backends


def time_call(fn, *args, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--windows", type=int, default=200)
    parser.add_argument("--nq", type=int, default=60)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    raw = rng.standard_normal((args.windows, args.nq, 73, 2))
    windows = raw[..., 0] + 1j * raw[..., 1]
    pss = _pss_conj_stack()
    backends = load_backends()

    cases = []
    for p in (1, 5, 30):
        cases.append((f"projected P={p:<2}", "scan_projected",
                      (ammse_basis(p).combiner,)))
    bounds5 = np.concatenate([[0], np.cumsum(pcrr_partition(5))]).astype(np.int64)
    cases.append(("pcrr P=5      ", "scan_pcrr", (bounds5,)))
    cases.append(("cfdc          ", "scan_pcrr", (np.array([0, 63], dtype=np.int64),)))
    cases.append(("dd            ", "scan_dd", ()))

    header = f"{'kernel':<16}" + "".join(f"{name:>16}" for name in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(f"scoring {args.windows} windows of {args.nq} symbols "
          f"({args.windows * args.nq * 21} hypotheses per kernel)")
    print(header)
    for label, fn_name, extra in cases:
        times = {}
        for name, module in backends.items():
            fn = getattr(module, fn_name)
            times[name] = time_call(lambda: [fn(w, pss, SHIFTS, *extra) for w in windows])
        row = f"{label:<16}"
        for name in backends:
            rate = args.windows / times[name]
            row += f"{rate:>11.0f} w/s "
        if len(times) == 2:
            row += f"{times['numpy'] / times['cython']:>9.2f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
