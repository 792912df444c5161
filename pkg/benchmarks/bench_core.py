"""Time the periodic stencil convolution: compiled core, numpy fallback, FFT.

    python3 benchmarks/bench_core.py [--sizes 32 64 128] [--repeat 3]

Prints one CSV row per (size, method) with the best wall time in seconds and
the max deviation from the FFT result.
"""
import argparse
import timeit

import numpy as np

from glpdrop import _backend
from glpdrop.kernel import KernelSpec, convolve_values, make_kernel


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[32, 64, 128])
    ap.add_argument("--per-unit", type=float, default=8.0, help="cells per kernel range")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    k = make_kernel(KernelSpec("indicator", 2), args.per_unit)
    rng = np.random.default_rng(0)
    methods = [("fft", "fft", None), ("python", "direct", "python")]
    if _backend.BACKEND == "compiled":
        methods.append(("compiled", "direct", "compiled"))
    print(f"# stencil points: {len(k.offsets()[1])}; backend at import: {_backend.BACKEND}")
    print("N,method,seconds,max_abs_diff")
    for N in args.sizes:
        L = N / args.per_unit
        v = rng.uniform(-0.9, 0.9, (N, N))
        ref = convolve_values(k, v, L)
        for name, method, backend in methods:
            def run():
                return convolve_values(k, v, L, method=method, backend=backend)
            diff = float(np.max(np.abs(run() - ref)))
            best = min(timeit.repeat(run, number=1, repeat=args.repeat))
            print(f"{N},{name},{best:.6f},{diff:.2e}", flush=True)


if __name__ == "__main__":
    main()
