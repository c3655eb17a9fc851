"""Time the numba and numpy Gaussian-kernel backends.

Each backend runs in its own interpreter because the choice is fixed at
import time.  Reports the kernel matrix alone and a short end-to-end
Ada-BKB run on Hartmann-6.

    python benchmarks/bench_kernels.py [--repeats 5] [--budget 150]
"""
import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
import numpy as np
from adaptive_bkb import _backend, registry_lookup, AdaBKB, KernelSpec

repeats, budget = int(sys.argv[1]), int(sys.argv[2])
rng = np.random.default_rng(0)
w = np.full(6, 1 / 0.35)
out = {"backend": _backend.BACKEND, "kernel": {}}
_backend.gauss_matrix(rng.random((4, 6)), rng.random((4, 6)), w)  # compile
for n, m in [(243, 100), (2000, 300), (20000, 100)]:
    X, Z = rng.random((n, 6)), rng.random((m, 6))
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        _backend.gauss_matrix(X, Z, w)
        best = min(best, time.perf_counter() - t0)
    out["kernel"][f"{n}x{m}"] = best

obj = registry_lookup("hartmann6")
times = []
for seed in range(max(1, repeats // 2)):
    opt = AdaBKB(obj.domain, KernelSpec.isotropic(0.35), budget, N=5, h_max=5, seed=seed)
    t0 = time.perf_counter()
    opt.run(lambda x: -obj(x))
    times.append(time.perf_counter() - t0)
out["end_to_end"] = min(times)
print(json.dumps(out))
"""


def run_backend(name, repeats, budget):
    env = dict(os.environ, ADAPTIVE_BKB_BACKEND=name)
    res = subprocess.run([sys.executable, "-c", CHILD, str(repeats), str(budget)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--budget", type=int, default=150)
    args = ap.parse_args()

    results = {name: run_backend(name, args.repeats, args.budget) for name in ("numpy", "numba")}
    print(f"{'case':<14}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>9}")
    for case in results["numpy"]["kernel"]:
        a, b = results["numpy"]["kernel"][case], results["numba"]["kernel"][case]
        print(f"{case:<14}{a * 1e3:>12.2f}{b * 1e3:>12.2f}{a / b:>9.2f}")
    a, b = results["numpy"]["end_to_end"], results["numba"]["end_to_end"]
    print(f"{'hartmann6 run':<14}{a * 1e3:>12.1f}{b * 1e3:>12.1f}{a / b:>9.2f}")


if __name__ == "__main__":
    main()
