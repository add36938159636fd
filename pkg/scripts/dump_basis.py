"""Write the kernel-packet basis of a knot set, evaluated on a mesh, as CSV.

Columns: x, then one column per basis function.  Useful for plotting the
compact supports and the one-sided boundary packets.

    python scripts/dump_basis.py --n 8 --p 1 --omega 0.5 > basis.csv
"""

import argparse
import sys

import numpy as np

from kpgp import build_basis, evaluate_basis_rows, make_kernel


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--p", type=int, default=1)
    ap.add_argument("--omega", type=float, default=0.5)
    ap.add_argument("--mesh", type=int, default=401)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    knots = np.sort(np.random.default_rng(args.seed).uniform(0.0, 1.0, args.n))
    basis = build_basis(make_kernel(args.p, args.omega), knots)
    xs = np.linspace(-0.25, 1.25, args.mesh)
    starts, vals = evaluate_basis_rows(basis, xs)
    dense = np.zeros((xs.size, basis.n))
    cols = starts[:, None] + np.arange(vals.shape[1])
    ok = (cols >= 0) & (cols < basis.n)
    rows = np.broadcast_to(np.arange(xs.size)[:, None], cols.shape)
    dense[rows[ok], cols[ok]] = vals[ok]
    out = sys.stdout
    out.write("# knots " + " ".join(f"{v:.6f}" for v in knots) + "\n")
    out.write(",".join(["x"] + [f"phi{j}" for j in range(basis.n)]) + "\n")
    for x, row in zip(xs, dense):
        out.write(",".join(f"{v:.10g}" for v in (x, *row)) + "\n")


if __name__ == "__main__":
    main()
