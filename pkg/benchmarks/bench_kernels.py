"""Time the compiled and numpy Dyson-sum kernels on identical inputs.

    python3 benchmarks/bench_kernels.py [--sizes 256 512 1024] [--repeat 3]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from qutrit_otto import kernels
from qutrit_otto.detector import GapConfig, QutritState, SwitchingProfile, interaction_jx


def inputs(n: int):
    chi = SwitchingProfile("smooth_bump", 3.0, 0.0)
    g = GapConfig(0.9, 1.4)
    lo, hi = chi.support()
    taus = np.linspace(lo, hi, n)
    h = taus[1] - taus[0]
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    cw = w * chi(taus)
    jx = np.ascontiguousarray(interaction_jx(taus, g))
    rho0 = np.ascontiguousarray(QutritState(0.3, 0.2).matrix())
    return taus, cw, jx, rho0, 2, 0.8, 0.09


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[256, 512, 1024])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = ["numpy"] + (["cython"] if kernels.HAVE_COMPILED else [])
    print(f"{'n':>6} " + " ".join(f"{b + ' [s]':>12}" for b in backends)
          + ("  speedup   max|diff|" if len(backends) == 2 else ""))
    for n in args.sizes:
        data = inputs(n)
        times, outs = [], []
        for b in backends:
            outs.append(kernels.dyson_sums(*data, backend=b))
            times.append(min(timeit.repeat(lambda: kernels.dyson_sums(*data, backend=b),
                                           number=1, repeat=args.repeat)))
        line = f"{n:>6} " + " ".join(f"{t:12.4e}" for t in times)
        if len(backends) == 2:
            diff = max(np.max(np.abs(a - b)) for a, b in zip(outs[0], outs[1]))
            line += f"  {times[0] / times[1]:7.2f}   {diff:.2e}"
        print(line)


if __name__ == "__main__":
    main()
