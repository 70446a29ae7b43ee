"""Timing comparison of the jitted kernels against the pure-Python path.

The pure path is the same source imported with CHARFRONT_NO_NUMBA=1, which
this script arranges by re-running itself in a subprocess, so nested kernel
calls stay un-jitted too.

Usage: python benchmarks/benchmark_kernels.py [--repeat N]
"""

import argparse
import os
import subprocess
import sys
import time

REF = (2.0, 0.0, 1.0, 5.5, 1.4)  # u, v, p, b, gamma


def cases():
    from charfront import _kernels as K
    u, v, p, b, g = REF
    target = K.compose_waves(u, v, p, b, b * 1.002, g, 0.02, -0.01, 0.015,
                             1e-12, 50, 32, 1e-3, 1e-6)
    ua, va, pa = target[0], target[1], target[2]
    return [
        ("eigenvector", K.rvec, (u, v, p, b, g, 3)),
        ("rarefaction RK4 (32)", K.integrate_curve,
         (u, v, p, b, g, 3, 0.05, 1.0, 32, 1e-6)),
        ("shock Newton", K.hugoniot_point,
         (u, v, p, b, g, 3, -0.05, 1e-12, 50, 1e-3)),
        ("Riemann solve", K.riemann_solve,
         (u, v, p, b, ua, va, pa, b * 1.002, g, 5e-14, 50, 32, 1e-3, 1e-6)),
        ("jump decomposition", K.hugoniot_decompose_solve,
         (u, v, p, b, ua, va, pa, b * 1.002, g, 5e-14, 50, 1e-3)),
    ]


def measure(repeat):
    out = {}
    for name, fn, args in cases():
        fn(*args)  # warm dispatch and the JIT cache
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn(*args)
            best = min(best, time.perf_counter() - t0)
        out[name] = best
    return out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--raw", action="store_true",
                        help="print name<TAB>seconds for the current mode")
    args = parser.parse_args()

    if args.raw:
        for name, best in measure(args.repeat).items():
            print(f"{name}\t{best:.9e}")
        return

    from charfront import _kernels as K
    if not K.NUMBA_ENABLED:
        print("numba disabled in this process; run without CHARFRONT_NO_NUMBA"
              " for the comparison")
        for name, best in measure(args.repeat).items():
            print(f"{name:24s} python {best * 1e6:10.2f} us")
        return

    jit_times = measure(args.repeat)
    env = dict(os.environ, CHARFRONT_NO_NUMBA="1")
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--raw",
         "--repeat", str(args.repeat)],
        env=env, capture_output=True, text=True, check=True)
    pure_times = {}
    for line in proc.stdout.splitlines():
        name, sec = line.split("\t")
        pure_times[name] = float(sec)

    print(f"{'kernel':24s} {'jit':>12s} {'pure python':>14s} {'speedup':>9s}")
    for name, jt in jit_times.items():
        pt = pure_times[name]
        print(f"{name:24s} {jt * 1e6:10.2f} us {pt * 1e6:12.2f} us "
              f"{pt / jt:8.1f}x")


if __name__ == "__main__":
    main()
