"""Time the compiled and pure-Python integration kernels on the same runs.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import math
import time

import numpy as np

from coneflow import kernels
from coneflow.flows import Flow, FlowKind
from coneflow.integrator import IntegratorConfig, integrate

CASES = [
    ("dirac K=+1, t<=1.5, h=1e-3", FlowKind(Flow.DIRAC, 1), (0.0, 1.0), IntegratorConfig(t_end=1.5, step=1e-3)),
    ("ricci from sqrt(8)", FlowKind(Flow.RICCI_ROUND), (math.sqrt(8.0),), IntegratorConfig(t_end=5.0, step=1e-3)),
    ("ricci2 (4, 9)", FlowKind(Flow.RICCI_BERGER), (4.0, 9.0), IntegratorConfig(t_end=5.0, step=1e-3)),
    ("nricci2 (2, 1), t<=10", FlowKind(Flow.NORMALIZED_BERGER), (2.0, 1.0), IntegratorConfig(t_end=10.0, step=1e-3)),
    ("asd (0, 1), h=1e-4", FlowKind(Flow.ASD), (0.0, 1.0), IntegratorConfig(t_end=2.0, step=1e-4)),
    ("asd fixed step, h=1e-4", FlowKind(Flow.ASD), (0.0, 1.0), IntegratorConfig(t_end=2.0, step=1e-4, adaptive=False)),
]


def best_time(kind, init, cfg, backend, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        traj = integrate(kind, init, cfg, backend=backend)
        times.append(time.perf_counter() - start)
    return min(times), traj


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = sorted(kernels.AVAILABLE)
    if "compiled" not in backends:
        print("compiled kernel not built; only the Python backend is available")
    header = f"{'case':32s} {'samples':>8s}" + "".join(f" {b + ' [ms]':>15s}" for b in backends)
    if len(backends) == 2:
        header += f" {'speedup':>8s} {'max |diff|':>11s}"
    print(header)
    for name, kind, init, cfg in CASES:
        results = {b: best_time(kind, init, cfg, b, args.repeat) for b in backends}
        n = len(results[backends[0]][1])
        row = f"{name:32s} {n:8d}" + "".join(f" {1e3 * results[b][0]:15.2f}" for b in backends)
        if len(backends) == 2:
            speedup = results["python"][0] / results["compiled"][0]
            diff = np.max(np.abs(results["python"][1].y - results["compiled"][1].y))
            row += f" {speedup:7.0f}x {diff:11.1e}"
        print(row)


if __name__ == "__main__":
    main()
