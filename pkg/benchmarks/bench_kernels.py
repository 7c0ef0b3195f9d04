"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints the best-of-N wall time per kernel and backend, the speed-up, and an
end-to-end timing of one analytic coverage and one Monte Carlo run with
each backend selected at import.
"""

import argparse
import math
import os
import subprocess
import sys
import timeit

import numpy as np

from laseruav._backend import compiled_kernels, python_kernels

CHANNEL = (100.0, 2.4, 0.1, 3.4e-5, 1e-6)


def cases():
    rng = np.random.default_rng(0)
    r = rng.uniform(0.0, 5000.0, 1_000_000)
    h = rng.lognormal(-0.1, 0.4, r.size)
    counts = rng.poisson(200, 5000) + 1
    xy = rng.uniform(-2e4, 2e4, (int(counts.sum()), 2))
    offsets = np.concatenate([[0], np.cumsum(counts)])
    xs = np.geomspace(1e-6, 1e8, 2000) - math.exp(-1.0) * 0.999
    mc_args = (100.0, 2.4, 0.1, 3.4e-5, 1e-6, 1 - 1e-5, 110.0, 2.3e7, 1e5)
    return {
        "received_power 1e6": lambda k: k.received_power(r, *CHANNEL),
        "exceedance 1e6": lambda k: k.exceedance(r, *CHANNEL, 110.0, 5e-6, False),
        "mc_counts 1e6": lambda k: k.mc_counts(r, h, *mc_args),
        "nearest_norms 1e6 pts": lambda k: k.nearest_norms(xy[:, 0], xy[:, 1], offsets),
        "lambert_w0 x2000": lambda k: [k.lambert_w0(x) for x in xs],
    }


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


END_TO_END = """
import time, laseruav as L
s = L.Scenario()
cfg = L.SimulationConfig(1_000_000, seed=1)

def best(fn, n=5):
    fn()
    out = []
    for _ in range(n):
        t = time.perf_counter(); fn(); out.append(time.perf_counter() - t)
    return min(out)

a = best(lambda: [L.energy_coverage(s.with_density(d)) for d in (1e-7, 5e-7, 1e-6, 5e-6)]) / 4
m = best(lambda: L.estimate_all(s, cfg))
print(L.BACKEND, a, m)
"""


def end_to_end(pure):
    env = dict(os.environ)
    env.pop("LASERUAV_PURE_PYTHON", None)
    if pure:
        env["LASERUAV_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True,
                         text=True, check=True).stdout.split()
    return out[0], float(out[1]), float(out[2])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if compiled_kernels is None:
        print("compiled extension not built; only the fallback is available")
    print(f"{'kernel':<24}{'numpy (ms)':>12}{'cython (ms)':>13}{'speed-up':>10}")
    for name, fn in cases().items():
        t_py = best(lambda: fn(python_kernels), args.repeat) * 1e3
        if compiled_kernels is None:
            print(f"{name:<24}{t_py:>12.2f}{'-':>13}{'-':>10}")
            continue
        t_cy = best(lambda: fn(compiled_kernels), args.repeat) * 1e3
        print(f"{name:<24}{t_py:>12.2f}{t_cy:>13.2f}{t_py / t_cy:>9.1f}x")
    print()
    print(f"{'end to end':<24}{'analytic (ms)':>14}{'MC 1e6 (ms)':>13}")
    for pure in (True, False):
        backend, a, m = end_to_end(pure)
        print(f"{backend:<24}{a * 1e3:>14.2f}{m * 1e3:>13.1f}")


if __name__ == "__main__":
    main()
