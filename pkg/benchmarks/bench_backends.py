"""Compare the compiled (numba) and pure-numpy kernel backends.

Runs each backend in a fresh subprocess with KMU_BACKEND set, so module-level
backend selection is exercised exactly as a user would hit it. Reports fit
wall time on the two workloads that dominate the experiment harness.

Usage: python benchmarks/bench_backends.py [--n 100000] [--repeats 3]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import textwrap

WORKER = textwrap.dedent("""
    import json, sys, time
    from kmeans_uniq import backend
    from kmeans_uniq.kmeans import fit
    from kmeans_uniq.models import ModelSpec, sample
    from kmeans_uniq.rng import RngStream

    n, repeats = int(sys.argv[1]), int(sys.argv[2])
    results = {"backend": backend.BACKEND, "timings": {}}
    cases = {
        "UrC3k2(r=0.4) d=1 k=2": ModelSpec("UrC3k2", r=0.4),
        "C2k2-2 d=2 k=2": ModelSpec("C2k2-2"),
        "TC3k2 d=2 k=2": ModelSpec("TC3k2"),
    }
    for label, spec in cases.items():
        data = sample(spec, n, RngStream(1))
        fit(data, spec.k, 2, RngStream(2))  # warm the kernels / JIT
        best = float("inf")
        for rep in range(repeats):
            t0 = time.perf_counter()
            fit(data, spec.k, 10, RngStream(3 + rep))
            best = min(best, time.perf_counter() - t0)
        results["timings"][label] = best
    print(json.dumps(results))
""")


def run_backend(name: str, n: int, repeats: int) -> dict:
    env = dict(os.environ, KMU_BACKEND=name)
    out = subprocess.run([sys.executable, "-c", WORKER, str(n), str(repeats)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    results = {name: run_backend(name, args.n, args.repeats)
               for name in ("numba", "numpy")}
    for name, res in results.items():
        assert res["backend"] == name, f"requested {name}, got {res['backend']}"

    print(f"fit wall time, best of {args.repeats} (n={args.n}, 10 restarts)")
    print(f"{'case':28s} {'numba':>10s} {'numpy':>10s} {'speedup':>9s}")
    for label in results["numba"]["timings"]:
        tb = results["numba"]["timings"][label]
        tp = results["numpy"]["timings"][label]
        print(f"{label:28s} {tb:9.3f}s {tp:9.3f}s {tp / tb:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
