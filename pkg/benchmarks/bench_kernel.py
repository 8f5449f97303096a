"""Slot-loop throughput: compiled kernel vs pure-Python fallback.

    python3 benchmarks/bench_kernel.py --slots 200000 --repeat 3

Both kernels run the same pre-drawn uniforms; the script checks the counters
agree exactly before reporting timings.
"""

import argparse
import time

import numpy as np

from cogrelay.presets import get_preset
from cogrelay.rates import PolicyParams
from cogrelay.sim.backend import KERNELS
from cogrelay.sim.protocol import MODES, NC, NU, pack_params


def time_kernel(fn, u, mode, prm, repeat):
    best = np.inf
    for _ in range(repeat):
        st = np.zeros(3, dtype=np.int64)
        tot = np.zeros(NC, dtype=np.int64)
        acc = np.zeros(NC, dtype=np.int64)
        t0 = time.perf_counter()
        fn(u, mode, prm, st, tot, acc, 0)
        best = min(best, time.perf_counter() - t0)
    return best, tot


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--slots", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    table = get_preset("fig5").table()
    pol = PolicyParams(f=0.5, omega=0.6, alpha=0.5, beta=0.7, gamma=0.8)
    u = np.random.default_rng(args.seed).random((args.slots, NU))
    print(f"{args.slots} slots, best of {args.repeat}; kernels: {', '.join(KERNELS)}")
    print(f"{'mode':<10}{'kernel':<8}{'seconds':>10}{'Mslots/s':>10}{'speedup':>9}")
    for name, mode in MODES.items():
        prm = pack_params(table, pol, 0.2, 0.8, mode)
        base, ref = time_kernel(KERNELS["python"], u, mode, prm, args.repeat)
        print(f"{name:<10}{'python':<8}{base:>10.3f}{args.slots / base / 1e6:>10.3f}{1.0:>9.1f}")
        if "cython" in KERNELS:
            t, tot = time_kernel(KERNELS["cython"], u, mode, prm, args.repeat)
            if not np.array_equal(tot, ref):
                raise SystemExit(f"kernels disagree in mode {name}")
            print(f"{'':<10}{'cython':<8}{t:>10.3f}{args.slots / t / 1e6:>10.3f}{base / t:>9.1f}")


if __name__ == "__main__":
    main()
