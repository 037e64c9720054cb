"""Compare the numba kernels with the pure-numpy fallback.

Each backend runs in its own interpreter (the backend is fixed at import time
by ``PFAFFIAN_KERNELS``).  The first call of every workload is timed separately
so JIT compilation does not pollute the steady-state numbers.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
import numpy as np
from pfaffian import _kernels as K
from pfaffian.schlesinger import SchlesingerState, integrate
from pfaffian.transport import PathSpec, fuchsian_model, transport

repeat = int(sys.argv[1])
rng = np.random.default_rng(0)
n = 4
lam = np.array([0.0, 1.0, 2.0 + 0.5j, -1.0 + 1.5j])
res = 0.2 * (rng.normal(size=(4, n, n)) + 1j * rng.normal(size=(4, n, n)))
res[-1] = -res[:-1].sum(0)
model = fuchsian_model(lam, res)
loop = PathSpec.circle([0.5 + 0.2j], 0, 1.3)
state = SchlesingerState(lam, res)
path = PathSpec.polyline([lam, lam + np.array([0.1, 0.1j, -0.2, 0.15])])

def fuchsian():
    transport(model, loop, tol=1e-11)

def schlesinger():
    integrate(state, path, tol=1e-11)

out = {"backend": K.BACKEND}
for name, fn in (("fuchsian_loop", fuchsian), ("schlesinger_path", schlesinger)):
    t0 = time.perf_counter(); fn(); first = time.perf_counter() - t0
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter(); fn(); times.append(time.perf_counter() - t0)
    out[name] = {"first": first, "best": min(times), "median": float(np.median(times))}
print(json.dumps(out))
"""


def run_backend(backend: str, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("PFAFFIAN_KERNELS", None)
    if backend == "numpy":
        env["PFAFFIAN_KERNELS"] = "numpy"
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                          capture_output=True, text=True, check=True)
    data = json.loads(proc.stdout)
    data["wall"] = time.perf_counter() - t0
    return data


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true", help="print raw JSON instead of a table")
    args = ap.parse_args(argv)
    results = {b: run_backend(b, args.repeat) for b in ("numba", "numpy")}
    if args.json:
        print(json.dumps(results, indent=2))
        return 0
    print(f"{'workload':<18}{'backend':<8}{'first (s)':>11}{'best (s)':>11}{'median (s)':>12}")
    for name in ("fuchsian_loop", "schlesinger_path"):
        for b in ("numba", "numpy"):
            r = results[b][name]
            print(f"{name:<18}{b:<8}{r['first']:>11.4f}{r['best']:>11.4f}{r['median']:>12.4f}")
        speed = results["numpy"][name]["best"] / results["numba"][name]["best"]
        print(f"{'':<18}speed-up of numba over numpy (best): {speed:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
