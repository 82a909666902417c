"""Time the numba and numpy reservoir kernels on the same drive.

    python benchmarks/bench_kernels.py [--samples 2000] [--repeats 3]

Reports the best-of-``repeats`` wall time per node kind and N, and checks
that both backends return identical states.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from dfrc import kernels
from dfrc.masking import apply_mask, generate_mls_mask
from dfrc.nodes import MackeyGlassParams, MZIParams, SiliconMRParams
from dfrc.reservoir import ReservoirConfig, run_flat

NODES = {
    "silicon_mr": SiliconMRParams(),
    "mackey_glass": MackeyGlassParams(),
    "mzi": MZIParams(),
}


def best_time(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--n-virtual", type=int, nargs="+", default=[30, 400, 900])
    args = ap.parse_args(argv)

    backends = [b for b in kernels.BACKENDS if b != "numba" or kernels.HAVE_NUMBA]
    inputs = np.random.default_rng(0).uniform(0.0, 0.5, args.samples)
    print(f"{'node':<13} {'N':>5} {'steps':>9} " + " ".join(f"{b + ' s':>10}" for b in backends)
          + f" {'speedup':>8} {'equal':>6}")
    for kind, node in NODES.items():
        for n in args.n_virtual:
            u = apply_mask(inputs, generate_mls_mask(None, n)).values
            cfg = ReservoirConfig(n, 50e-12, node)
            out, secs = {}, {}
            for b in backends:
                out[b] = run_flat(u, cfg, b)  # first call compiles or loads the numba cache
                secs[b] = best_time(lambda: run_flat(u, cfg, b), args.repeats)
            same = all(np.array_equal(out[backends[0]], v) for v in out.values())
            speedup = secs["numpy"] / secs["numba"] if "numba" in secs else float("nan")
            print(f"{kind:<13} {n:>5} {u.size:>9} " + " ".join(f"{secs[b]:>10.4f}" for b in backends)
                  + f" {speedup:>8.1f} {str(same):>6}")


if __name__ == "__main__":
    main()
