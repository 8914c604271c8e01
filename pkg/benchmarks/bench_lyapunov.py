"""Time the Lyapunov backends on drift matrices of the cluster model.

Compares the compiled triangular kernel, its numpy fallback and the dense
Kronecker solve for complete graphs of N modes (matrices of size 4N).

    python benchmarks/bench_lyapunov.py --modes 1 2 5 10 20 --repeat 5
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time

import numpy as np

from optocluster import numerics
from optocluster.graphs import make_graph
from optocluster.model import SystemParams, cluster_bogoliubov, noise_blocks
from optocluster.steady_state import drift_matrix, noise_matrix


def instance(n: int):
    omega = 2 * np.pi * 10e6
    kappa = 0.02 * omega
    p = SystemParams(
        n=n,
        omega_m=omega * np.arange(1, n + 1),
        kappa=kappa,
        gamma=5e-6 * kappa,
        temperature=0.01,
        g_tilde=0.16 * kappa,
        r=2.0,
    )
    pair = cluster_bogoliubov(make_graph("complete", n), p.r)
    return drift_matrix(p, pair), noise_matrix(p, noise_blocks(pair, p.gamma, p.nbar))


def best_time(fn, repeat: int) -> tuple[float, float]:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times)


def run(modes, repeat=3, kron_max=40, out=sys.stdout):
    variants = [(f"schur/{b}", dict(method="schur", backend=b)) for b in numerics.available_backends()]
    variants.append(("kron", dict(method="kron")))
    print(f"{'N':>4} {'size':>5} {'variant':>14} {'best [ms]':>11} {'median [ms]':>12} {'residual':>10}", file=out)
    results = []
    for n in modes:
        m, q = instance(n)
        for label, kw in variants:
            if label == "kron" and 4 * n > kron_max:
                continue
            c = numerics.solve_lyapunov(m, q, **kw)
            rel = numerics.lyapunov_residual(m, c, q) / (np.linalg.norm(m) * np.linalg.norm(c))
            best, med = best_time(lambda: numerics.solve_lyapunov(m, q, **kw), repeat)
            results.append((n, label, best, med, rel))
            print(f"{n:>4} {4 * n:>5} {label:>14} {1e3 * best:>11.3f} {1e3 * med:>12.3f} {rel:>10.2e}", file=out)
    return results


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--modes", type=int, nargs="+", default=[1, 2, 4, 10, 20])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--kron-max", type=int, default=40, help="largest matrix size for the Kronecker path")
    args = parser.parse_args(argv)
    print(f"selected backend: {numerics.BACKEND}")
    run(args.modes, args.repeat, args.kron_max)
    return 0


if __name__ == "__main__":
    sys.exit(main())
