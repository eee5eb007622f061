"""Compiled vs numpy gate kernels on a QFT-sized workload.

Run: python3 benchmarks/bench_kernels.py [--qubits 12 16 20] [--repeat 3] [--csv out.csv]
"""

from __future__ import annotations

import argparse
import csv
import sys
import time

import numpy as np

from qftc import kernels
from qftc.circuits import qft_ops
from qftc.statevector import GateOp


def _gate_list(n: int) -> list[GateOp]:
    return qft_ops(range(n))


def _time(n: int, ops, backend: str, repeat: int) -> float:
    rng = np.random.default_rng(0)
    psi0 = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    psi0 /= np.linalg.norm(psi0)
    best = float("inf")
    for _ in range(repeat):
        psi = psi0.copy()
        t0 = time.perf_counter()
        for op in ops:
            kernels.apply_matrix(psi, n, op.matrix, op.targets, op.controls, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best


def _agree(n: int, ops) -> float:
    rng = np.random.default_rng(1)
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    a, b = psi.copy(), psi.copy()
    for op in ops:
        kernels.apply_matrix(a, n, op.matrix, op.targets, op.controls)
        kernels.apply_matrix(b, n, op.matrix, op.targets, op.controls, backend="numpy")
    return float(np.max(np.abs(a - b)))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--qubits", type=int, nargs="+", default=[10, 14, 18, 20])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args(argv)
    print(f"active backend: {kernels.BACKEND}")
    if kernels.BACKEND != "compiled":
        print("compiled extension unavailable; only the numpy path can be timed")
    rows = []
    for n in args.qubits:
        ops = _gate_list(n)
        t_np = _time(n, ops, "numpy", args.repeat)
        t_c = _time(n, ops, None, args.repeat) if kernels.BACKEND == "compiled" else float("nan")
        diff = _agree(n, ops)
        rows.append((n, len(ops), t_c, t_np, t_np / t_c, diff))
        print(f"n={n:2d} gates={len(ops):4d} compiled={t_c:.4f}s numpy={t_np:.4f}s "
              f"speedup={t_np / t_c:.2f}x max|diff|={diff:.1e}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["qubits", "gates", "compiled_s", "numpy_s", "speedup", "max_abs_diff"])
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
