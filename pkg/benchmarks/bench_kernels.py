"""Compare the compiled and numpy propagation kernels.

    python benchmarks/bench_kernels.py [--repeat 3]

Reports the time per propagation, time per step, speed-up and the largest
difference between the final states of the two backends.
"""
import argparse
import time

import numpy as np

from multilzs import SystemSpec, TrianglePulse
from multilzs.kernels import available_backends
from multilzs.schrodinger import propagate

CASES = [
    ("N=1, T=20 ns", SystemSpec.from_mhz([200], [25]), TrianglePulse(3.0, 20.0)),
    ("N=2, T=100 ns", SystemSpec.from_mhz([200, 400], [17, 17]), TrianglePulse(5.0, 100.0)),
    ("N=8, T=50 ns", SystemSpec.from_mhz(np.linspace(100, 800, 8), np.full(8, 15.0)), TrianglePulse(6.0, 50.0)),
]


def best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = sorted(available_backends())
    print(f"backends: {', '.join(backends)}")
    print(f"{'case':<16}{'steps':>8}" + "".join(f"{b + ' [ms]':>16}" for b in backends) + f"{'speed-up':>10}{'max |dpsi|':>12}")
    for name, sys, pulse in CASES:
        times, states = {}, {}
        steps = 0
        for b in backends:
            t, st = best_time(lambda: propagate(sys, pulse, backend=b), args.repeat)
            times[b], states[b] = t, st.amplitudes
            steps = st.n_steps
        row = f"{name:<16}{steps:>8}" + "".join(f"{1e3 * times[b]:>16.2f}" for b in backends)
        if len(backends) == 2:
            row += f"{times['python'] / times['cython']:>10.1f}"
            row += f"{np.abs(states['python'] - states['cython']).max():>12.1e}"
        print(row)


if __name__ == "__main__":
    main()
