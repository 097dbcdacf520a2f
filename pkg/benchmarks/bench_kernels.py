"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--trials 2000]

Micro timings call both kernel modules directly. The end-to-end timing runs
``run_experiment`` in a subprocess per backend, since the backend is chosen
once at import.
"""
import argparse
import importlib
import os
import subprocess
import sys
import timeit

import numpy as np

from wptrelay import _kernels_py

P, K, S = 2e-4, 3.5e-2, 1.99
BISECT = (1e-12, 1e-10, 200)


def micro_cases(mod, rng):
    bids = list(P + K * np.exp(-S * rng.standard_normal(8)))
    grid = P + K * np.exp(-S * np.linspace(-4, 4, 10_000))
    return {
        "virtual_valuation": (lambda: mod.virtual_valuation(P, K, S, 0.05), 1),
        "inverse_virtual_valuation": (lambda: mod.inverse_virtual_valuation(P, K, S, 0.05, *BISECT), 1),
        "myerson_select (n=8)": (lambda: mod.myerson_select(bids, [P] * 8, [K] * 8, [S] * 8, 0.1, *BISECT), 1),
        "virtual_valuation_many (1e4)": (lambda: mod.virtual_valuation_many(P, K, S, grid), len(grid)),
    }


def bench_micro(repeat):
    rng = np.random.default_rng(0)
    mods = {"python": _kernels_py}
    try:
        mods["cython"] = importlib.import_module("wptrelay._kernels")
    except ImportError:
        print("compiled kernels not built; only the fallback is timed")
    table = {}
    for name, mod in mods.items():
        for case, (fn, per) in micro_cases(mod, rng).items():
            number = max(1, 2000 // per)
            best = min(timeit.repeat(fn, number=number, repeat=repeat)) / number
            table.setdefault(case, {})[name] = best
    print(f"{'kernel':32s} {'python':>12s} {'cython':>12s} {'speedup':>8s}")
    for case, row in table.items():
        py, cy = row["python"], row.get("cython")
        cy_txt = f"{cy * 1e6:10.2f}us" if cy else f"{'-':>12s}"
        ratio = f"{py / cy:7.1f}x" if cy else f"{'-':>8s}"
        print(f"{case:32s} {py * 1e6:10.2f}us {cy_txt} {ratio}")


END_TO_END = """
import time
from wptrelay._backend import BACKEND
from wptrelay.sim import SimConfig, run_experiment
cfg = SimConfig(n_candidates=10, n_trials={trials}, seed=1)
t0 = time.perf_counter(); run_experiment(cfg); dt = time.perf_counter() - t0
print(BACKEND, dt)
"""


def bench_end_to_end(trials):
    print(f"\nrun_experiment, n=10, {trials} trials")
    for force in ("0", "1"):
        env = dict(os.environ, WPTRELAY_PURE_PYTHON=force)
        out = subprocess.run([sys.executable, "-c", END_TO_END.format(trials=trials)],
                             env=env, capture_output=True, text=True, check=True).stdout.split()
        backend, dt = out[0], float(out[1])
        print(f"  {backend:7s} {dt:7.2f}s  ({dt / trials * 1e3:.3f} ms/trial)")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--trials", type=int, default=2000)
    args = ap.parse_args(argv)
    bench_micro(args.repeat)
    bench_end_to_end(args.trials)


if __name__ == "__main__":
    main()
