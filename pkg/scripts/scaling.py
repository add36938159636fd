"""Time and peak memory of a 1-D fit plus n mean predictions over a size ladder.

    python scripts/scaling.py --sizes 1e4,1e5,1e6 --p 1 --omega 0.1
"""

import argparse
import time
import tracemalloc

import numpy as np

from kpgp import fit_1d, make_kernel, predict_mean


def run(n: int, p: int, omega: float) -> tuple[float, float, float]:
    x = np.linspace(0.0, 1.0, n)
    Y = np.sin(2 * np.pi * x)
    xs = np.random.default_rng(0).uniform(0.0, 1.0, n)
    tracemalloc.start()
    t0 = time.perf_counter()
    m = fit_1d(make_kernel(p, omega), x, Y)
    t1 = time.perf_counter()
    predict_mean(m, xs)
    t2 = time.perf_counter()
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    return t1 - t0, t2 - t1, peak / 1e6


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="1e4,1e5,1e6")
    ap.add_argument("--p", type=int, default=1)
    ap.add_argument("--omega", type=float, default=0.1)
    args = ap.parse_args()
    sizes = [int(float(s)) for s in args.sizes.split(",")]
    print(f"{'n':>9} {'fit s':>8} {'predict s':>10} {'peak MB':>8}")
    for n in sizes:
        fit, pred, mb = run(n, args.p, args.omega)
        print(f"{n:>9} {fit:8.2f} {pred:10.2f} {mb:8.0f}")


if __name__ == "__main__":
    main()
