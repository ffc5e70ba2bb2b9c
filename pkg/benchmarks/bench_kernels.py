"""Compare the compiled and pure-Python residue kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Each workload runs on both backends; results are checked to be identical
before timings are reported.
"""

from __future__ import annotations

import argparse
import time

from padicforms import kernels
from padicforms.zerosearch import terjanian_block


def _diag_quartic():
    exps = [tuple(4 if j == i else 0 for j in range(5)) for i in range(5)]
    return exps, [1, 2, 4, 8, 1]


def workloads():
    exps, coeffs = _diag_quartic()
    block = terjanian_block()
    b_exps, b_coeffs, _ = block.integer_coefficients(4)
    return {
        "scan_zeros diag quartic n=5 mod 2^3": (
            "scan_zeros", ([(exps, coeffs)], 5, 2, 3, 0, 8**5, 1 << 20)),
        "scan_zeros pythagoras n=3 mod 3^4": (
            "scan_zeros", ([([(2, 0, 0), (0, 2, 0), (0, 0, 2)], [1, 1, -1])], 3, 3, 4, 0, 81**3, 1 << 20)),
        "residue_tables terjanian block mod 2^5": (
            "residue_tables", (b_exps, b_coeffs, 3, 2, 5)),
        "poly_roots_mod degree 6 mod 2^16": (
            "poly_roots_mod", ([3, 0, 5, 1, 0, 7, 1], 2, 16)),
    }


def run(repeat: int) -> list[tuple[str, float, float | None]]:
    rows = []
    for name, (fn, args) in workloads().items():
        times = {}
        results = {}
        backends = ["python"] + (["compiled"] if kernels.compiled_available() else [])
        for backend in backends:
            previous = kernels.use_backend(backend)
            try:
                best = float("inf")
                for _ in range(repeat):
                    t0 = time.perf_counter()
                    results[backend] = getattr(kernels, fn)(*args)
                    best = min(best, time.perf_counter() - t0)
                times[backend] = best
            finally:
                kernels.use_backend(previous)
        if len(results) == 2 and results["python"] != results["compiled"]:
            raise AssertionError(f"backends disagree on {name}")
        rows.append((name, times["python"], times.get("compiled")))
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'workload':42s} {'python [s]':>11s} {'compiled [s]':>13s} {'speedup':>8s}")
    for name, py, c in run(args.repeat):
        if c is None:
            print(f"{name:42s} {py:11.4f} {'n/a':>13s} {'':>8s}")
        else:
            print(f"{name:42s} {py:11.4f} {c:13.5f} {py / c:7.1f}x")


if __name__ == "__main__":
    main()
