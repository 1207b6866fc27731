"""Compare the numba kernels with the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Two workloads: the full KAM pipeline on a 32-unit, 20-input, 25-output
synthetic dataset (64 simplex solves), and one oracle grid scan over a
6-unit simplex. Each is timed after a warm-up call, so JIT compilation is
not counted. Results from both backends are checked for agreement.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time

import numpy as np

from kamdea import _kernels
from kamdea.kam_core import EpsilonPolicy, KamConfig, WeightMode, WeightPolicy, evaluate_all
from kamdea.oracle import oracle_evaluate, random_instance


def _time(fn, repeat):
    fn()
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples), out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--grid-step", type=float, default=1 / 60, help="oracle resolution for the scan workload")
    args = ap.parse_args(argv)

    if not _kernels.NUMBA_AVAILABLE:
        print("numba is not installed; only the numpy backend can be timed", file=sys.stderr)
    backends = ["numpy"] + (["numba"] if _kernels.NUMBA_AVAILABLE else [])

    big = random_instance(2014, 32, 20, 25)
    cfg = KamConfig(EpsilonPolicy.proportional(0.001), WeightPolicy(WeightMode.INVERSE_DATA))
    small = random_instance(6, 6, 2, 2)
    l = 0
    scan_args = (small, l, 0.1 * small.inputs[l], 0.1 * small.outputs[l], 1 / small.inputs[l], 1 / small.outputs[l])

    rows, results = [], {}
    for b in backends:
        t_pipe, evs = _time(lambda: evaluate_all(big, cfg, backend=b), args.repeat)
        t_scan, ref = _time(lambda: oracle_evaluate(*scan_args, args.grid_step, backend=b), args.repeat)
        results[b] = (np.array([e.ka_eps for e in evs]), ref.best_objective)
        rows.append((b, t_pipe, t_scan, ref.grid_points))

    print(f"{'backend':<8} {'pipeline 32x45 (s)':>20} {'grid scan (s)':>15} {'grid points':>12}")
    for b, tp, ts, pts in rows:
        print(f"{b:<8} {tp:>20.4f} {ts:>15.4f} {pts:>12,d}")
    if len(rows) == 2:
        (_, np_pipe, np_scan, _), (_, nb_pipe, nb_scan, _) = rows
        print(f"speed-up (numpy / numba): pipeline {np_pipe / nb_pipe:.1f}x, grid scan {np_scan / nb_scan:.1f}x")
        ka_gap = float(np.abs(results["numpy"][0] - results["numba"][0]).max())
        scan_gap = abs(results["numpy"][1] - results["numba"][1])
        print(f"max |ka_eps| difference {ka_gap:.2e}, scan objective difference {scan_gap:.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
