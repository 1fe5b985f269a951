"""Compiled vs pure-Python kernel timings.

    python benchmarks/bench_kernels.py [--repeat N]

Part one times the three summation kernels from both backends on the same
inputs and checks they agree. Part two times a full engine workload in two
fresh interpreters, one with QSZILARD_PURE_PYTHON=1, because the backend is
fixed at import.
"""
import argparse
import json
import os
import subprocess
import sys
import timeit

from qszilard import _pykernels

try:
    from qszilard import _ckernels
except ImportError:
    _ckernels = None

CASES = [
    # name, function, args
    ("power_sums  tau=1e4, 4 powers", "scaled_power_sums", (1.0, 2.0, 1e-4, 600, 4)),
    ("power_sums  tau=1e6, 2 powers", "scaled_power_sums", (1.0, 2.0, 1e-6, 6000, 2)),
    ("complete    tau=1e2, N=4", "scaled_complete_symmetric", (4.0, 2.0, 1e-2, 80, 4)),
    ("elementary  tau=1e2, N=4", "scaled_elementary_symmetric", (4.0, 2.0, 1e-2, 80, 4)),
]

WORKLOAD = """
import json, time
import numpy as np
from qszilard import BACKEND, EngineConfig, total_work
from qszilard.ensemble import side_log_partitions
start = time.perf_counter()
for stat in ("Boson", "Fermion", "Distinguishable"):
    for tau in np.logspace(-1, 5, 25):
        total_work(EngineConfig(statistics=stat, n_particles=3, insertion_position=0.4, tau=float(tau)))
        side_log_partitions.cache_clear()
print(json.dumps({"backend": BACKEND, "seconds": time.perf_counter() - start}))
"""


def time_call(fn, args, repeat):
    number = 1
    while timeit.timeit(lambda: fn(*args), number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def kernel_table(repeat):
    print(f"{'kernel':34s} {'python':>12s} {'cython':>12s} {'speed-up':>9s}")
    for name, func, args in CASES:
        py_fn = getattr(_pykernels, func)
        t_py = time_call(py_fn, args, repeat)
        if _ckernels is None:
            print(f"{name:34s} {t_py * 1e6:10.1f}us {'n/a':>12s}")
            continue
        c_fn = getattr(_ckernels, func)
        a, b = list(py_fn(*args)), list(c_fn(*args))
        worst = max(abs(x - y) / abs(x) for x, y in zip(a, b) if x)
        t_c = time_call(c_fn, args, repeat)
        print(f"{name:34s} {t_py * 1e6:10.1f}us {t_c * 1e6:10.1f}us {t_py / t_c:8.1f}x  (max rel diff {worst:.1e})")


def workload(pure):
    env = dict(os.environ)
    env.pop("QSZILARD_PURE_PYTHON", None)
    if pure:
        env["QSZILARD_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, check=True, capture_output=True, text=True)
    return json.loads(out.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    kernel_table(args.repeat)
    print()
    print("engine workload: 75 three-particle cycles, caches cleared")
    runs = [workload(pure=True), workload(pure=False)]
    for run in runs:
        print(f"  {run['backend']:8s} {run['seconds']:.3f} s")
    if runs[1]["backend"] == "cython":
        print(f"  speed-up {runs[0]['seconds'] / runs[1]['seconds']:.1f}x")


if __name__ == "__main__":
    main()
