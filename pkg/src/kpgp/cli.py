"""Command-line front end: ``python -m kpgp <command> [flags]``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical breakdown.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
import tracemalloc
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .dense import DENSE_MAX_N, DenseGpProblem, dense_predict
from .errors import ConfigError, DataError, KPError, NumericalBreakdown
from .gp1d import constant_mean, fit_1d, predict, zero_mean
from .grid import (
    FullGridDesign,
    fit_full_grid,
    fit_sparse_grid,
    make_sparse_grid,
    predict_full_grid,
    predict_sparse_grid,
    read_manifest,
    write_manifest,
)
from .matern import HalfIntegerMatern, ProductKernel
from .mle import MleSearch, profile_loglik, profile_mle_1d
from .packets import basis_dump_lines, build_basis, evaluate_basis_rows

COMMANDS = ("fit-predict", "loglik", "mle", "kp-dump", "bench")


@dataclass
class RunConfig:
    command: str
    p: int
    omega: Union[float, str]
    nugget: Union[float, str] = 0.0
    mean: Union[str, float] = "profile"
    design: str = "raw"
    family: Optional[str] = None
    level: Optional[int] = None
    train: Optional[str] = None
    test: Optional[str] = None
    out: Optional[str] = None
    fmt: str = "table"
    seed: int = 0
    sigma2: Union[str, float] = "profile"
    manifest: Optional[str] = None
    write_manifest: Optional[str] = None
    sizes: list = field(default_factory=list)
    sweep: int = 0

    def echo(self) -> dict:
        # the output path is left out so reruns into different files compare equal
        return {k: v for k, v in sorted(asdict(self).items()) if k != "out"}


# ------------------------------------------------------------------ parsing


def _real(text: str, what: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"{what}: expected a number, got {text!r}") from None
    if not np.isfinite(v):
        raise ConfigError(f"{what}: must be finite")
    return v


def parse_kernel(spec: str) -> tuple[int, Union[float, str]]:
    parts = dict(item.split("=", 1) for item in spec.split(",") if "=" in item)
    if set(parts) != {"p", "omega"} or spec.count("=") != 2:
        raise ConfigError(f"--kernel expects p=<int>,omega=<real|mle>, got {spec!r}")
    try:
        p = int(parts["p"])
    except ValueError:
        raise ConfigError(f"--kernel: p must be an integer, got {parts['p']!r}") from None
    if p < 0:
        raise ConfigError("--kernel: p must be >= 0")
    omega: Union[float, str] = parts["omega"]
    if omega != "mle":
        omega = _real(omega, "--kernel omega")
        if omega <= 0:
            raise ConfigError("--kernel: omega must be positive")
    return p, omega


def parse_design(spec: str) -> tuple[str, Optional[str], Optional[int]]:
    if spec in ("raw", "grid"):
        return spec, None, None
    if spec.startswith("sparse:"):
        body = spec[len("sparse:"):]
        try:
            family, level = body.split(",")
            lev = int(level)
        except ValueError:
            raise ConfigError(f"--design sparse expects sparse:<family>,<level>, got {spec!r}") from None
        if lev < 1:
            raise ConfigError("--design sparse level must be >= 1")
        return "sparse", family, lev
    raise ConfigError(f"--design must be raw, grid or sparse:<family>,<level>; got {spec!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kpgp", description="Exact linear-cost GP regression with kernel packets.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--kernel", default="p=1,omega=1", help="p=<int>,omega=<real|mle>")
    ap.add_argument("--nugget", default="0", help="nugget-to-signal ratio: <real|mle|0>")
    ap.add_argument("--mean", default="profile", help="profile | <value> | none")
    ap.add_argument("--design", default="raw", help="raw | grid | sparse:<family>,<level>")
    ap.add_argument("--train", help="training CSV (columns x1..xd,y)")
    ap.add_argument("--test", help="prediction CSV (columns x1..xd) or kp-dump mesh")
    ap.add_argument("--out", help="output path (default stdout)")
    ap.add_argument("--format", dest="fmt", default="table", choices=("table", "records"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sigma2", default="profile", help="signal variance: profile | <real>")
    ap.add_argument("--manifest", help="read the sparse design from this manifest")
    ap.add_argument("--write-manifest", help="write the sparse design manifest here")
    ap.add_argument("--sizes", default="1024,4096,16384,65536", help="bench ladder")
    ap.add_argument("--sweep", type=int, default=0, help="mle: also report an omega sweep of this many points")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    p, omega = parse_kernel(ns.kernel)
    nugget: Union[float, str] = ns.nugget
    if nugget != "mle":
        nugget = _real(nugget, "--nugget")
        if nugget < 0:
            raise ConfigError("--nugget must be >= 0")
    mean: Union[str, float] = ns.mean
    if mean not in ("profile", "none"):
        mean = _real(mean, "--mean")
    sigma2: Union[str, float] = ns.sigma2
    if sigma2 != "profile":
        sigma2 = _real(sigma2, "--sigma2")
        if sigma2 <= 0:
            raise ConfigError("--sigma2 must be positive")
    design, family, level = parse_design(ns.design)
    try:
        sizes = [int(s) for s in ns.sizes.split(",") if s]
    except ValueError:
        raise ConfigError(f"--sizes must be comma-separated integers, got {ns.sizes!r}") from None
    cfg = RunConfig(ns.command, p, omega, nugget, mean, design, family, level, ns.train, ns.test,
                    ns.out, ns.fmt, ns.seed, sigma2, ns.manifest, ns.write_manifest, sizes, ns.sweep)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    needs_train = cfg.command in ("fit-predict", "loglik", "mle", "kp-dump")
    if needs_train and not cfg.train:
        raise ConfigError(f"{cfg.command} needs --train")
    if cfg.command == "fit-predict" and not cfg.test:
        raise ConfigError("fit-predict needs --test")
    if cfg.design != "raw":
        if cfg.nugget != 0.0:
            raise ConfigError("grid designs support noiseless data only (--nugget 0)")
        if cfg.omega == "mle" or cfg.command == "mle":
            raise ConfigError("maximum likelihood is available for --design raw only")
        if cfg.command in ("kp-dump", "bench"):
            raise ConfigError(f"{cfg.command} works on 1-D raw designs only")
    if cfg.command == "loglik" and (cfg.omega == "mle" or cfg.nugget == "mle"):
        raise ConfigError("loglik needs fixed parameters; use the mle command to estimate them")
    if cfg.command == "mle" and cfg.omega != "mle":
        raise ConfigError("mle estimates omega: pass --kernel p=<int>,omega=mle")
    if cfg.command == "kp-dump" and cfg.omega == "mle":
        raise ConfigError("kp-dump needs a numeric omega")


def read_table(path: str, want_y: bool) -> tuple[np.ndarray, Optional[np.ndarray], list]:
    """Read a comma-separated file with a header; ``#`` lines are comments."""
    try:
        with open(path, newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    header = None
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        cells = [c.strip() for c in row]
        if header is None:
            header = cells
            continue
        if len(cells) != len(header):
            raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(cells)}")
        try:
            vals = [float(c) for c in cells]
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-numeric field in {cells}") from None
        if not all(np.isfinite(vals)):
            raise DataError(f"{path}:{lineno}: non-finite value")
        rows.append(vals)
    if header is None or not rows:
        raise DataError(f"{path}: no header or no data rows")
    arr = np.array(rows, dtype=float)
    if want_y:
        if "y" not in header:
            raise DataError(f"{path}: training data needs a 'y' column")
        yi = header.index("y")
        xcols = [i for i in range(len(header)) if i != yi]
        if not xcols:
            raise DataError(f"{path}: no input columns")
        return arr[:, xcols], arr[:, yi], [header[i] for i in xcols]
    return arr, None, header


# ------------------------------------------------------------------ output


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


class Writer:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.buf = io.StringIO()
        if cfg.fmt == "table":
            for k, v in cfg.echo().items():
                self.buf.write(f"# {k}={json.dumps(v)}\n")
        else:
            self.buf.write(json.dumps({"config": cfg.echo()}, sort_keys=True) + "\n")

    def table(self, name: str, header: Sequence[str], rows) -> None:
        if self.cfg.fmt == "table":
            self.buf.write(f"# table {name}\n")
            self.buf.write(",".join(header) + "\n")
            for r in rows:
                self.buf.write(",".join(_fmt(v) for v in r) + "\n")
        else:
            for r in rows:
                rec = {"table": name, **{h: (float(v) if isinstance(v, (float, np.floating)) else v)
                                         for h, v in zip(header, r)}}
                self.buf.write(json.dumps(rec, sort_keys=True) + "\n")

    def report(self, name: str, items: dict) -> None:
        self.table(name, ["key", "value"], [(k, _fmt_value(v)) for k, v in items.items()])

    def flush(self) -> None:
        text = self.buf.getvalue()
        if self.cfg.out:
            try:
                with open(self.cfg.out, "w", newline="") as fh:
                    fh.write(text)
            except OSError as exc:
                raise DataError(f"cannot write {self.cfg.out}: {exc.strerror}") from None
        else:
            sys.stdout.write(text)


def _fmt_value(v):
    if isinstance(v, np.ndarray):
        return " ".join(_fmt(x) for x in v.ravel())
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    return v


# ------------------------------------------------------------------ helpers


def _regressors_and_beta(cfg: RunConfig):
    if cfg.mean == "none":
        return zero_mean, np.zeros(0), None
    if cfg.mean == "profile":
        return constant_mean, "profile", constant_mean
    return constant_mean, np.array([float(cfg.mean)]), constant_mean


def _sorted_1d(X: np.ndarray, Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if X.shape[1] != 1:
        raise ConfigError(f"--design raw is one-dimensional; training data has {X.shape[1]} inputs")
    x = X[:, 0]
    order = np.argsort(x, kind="stable")
    x, Y = x[order], Y[order]
    if np.any(np.diff(x) <= 0):
        raise DataError("duplicate training inputs: knots must be distinct")
    return x, Y


def _resolve_1d(cfg: RunConfig, x: np.ndarray, Y: np.ndarray):
    """Fixed or estimated ``(omega, eta)`` plus the MLE result if one was run."""
    regressors, _, _ = _regressors_and_beta(cfg)
    res = None
    omega, eta = cfg.omega, cfg.nugget
    if omega == "mle":
        if cfg.mean not in ("profile", "none"):
            raise ConfigError("omega=mle profiles the mean; use --mean profile or none")
        res = profile_mle_1d(cfg.p, x, Y, regressors, MleSearch(nugget=eta, seed=cfg.seed))
        omega = res.omega_hat
        if eta == "mle":
            eta = res.nugget_ratio_hat
    elif eta == "mle":
        raise ConfigError("--nugget mle requires omega=mle")
    return float(omega), float(eta), res


def _grid_design(X: np.ndarray, Y: np.ndarray) -> tuple[FullGridDesign, np.ndarray]:
    axes = [np.unique(X[:, j]) for j in range(X.shape[1])]
    design = FullGridDesign(tuple(axes))
    if design.n != X.shape[0]:
        raise DataError(f"{X.shape[0]} rows do not form a full grid of shape {design.shape}")
    idx = np.ravel_multi_index(tuple(np.searchsorted(a, X[:, j]) for j, a in enumerate(axes)),
                               design.shape)
    if np.unique(idx).size != idx.size:
        raise DataError("duplicate grid points in training data")
    Yg = np.empty(design.n)
    Yg[idx] = Y
    return design, Yg


def _sparse_design(cfg: RunConfig, X: np.ndarray, Y: np.ndarray):
    if cfg.manifest:
        try:
            with open(cfg.manifest) as fh:
                design = read_manifest(fh.read())
        except OSError as exc:
            raise DataError(f"cannot read {cfg.manifest}: {exc.strerror}") from None
    else:
        design = make_sparse_grid(X.shape[1], cfg.level, cfg.family)
    if design.d != X.shape[1]:
        raise DataError(f"design is {design.d}-dimensional but data has {X.shape[1]} inputs")
    lookup = {tuple(r): i for i, r in enumerate(design.points)}
    Ys = np.full(design.n, np.nan)
    for r, y in zip(map(tuple, X), Y):
        if r not in lookup:
            raise DataError(f"training point {r} is not on the sparse grid")
        Ys[lookup[r]] = y
    missing = int(np.isnan(Ys).sum())
    if missing:
        raise DataError(f"{missing} sparse-grid points have no observation")
    if cfg.write_manifest:
        try:
            with open(cfg.write_manifest, "w") as fh:
                fh.write(write_manifest(design))
        except OSError as exc:
            raise DataError(f"cannot write {cfg.write_manifest}: {exc.strerror}") from None
    return design, Ys


def _fit_any(cfg: RunConfig):
    X, Y, names = read_table(cfg.train, want_y=True)
    regressors, beta, grid_reg = _regressors_and_beta(cfg)
    if cfg.design == "raw":
        x, Y = _sorted_1d(X, Y)
        omega, eta, res = _resolve_1d(cfg, x, Y)
        model = fit_1d(HalfIntegerMatern(cfg.p, omega), x, Y, regressors, beta, eta, cfg.sigma2)
        return "raw", model, names, res
    pk = ProductKernel.isotropic(cfg.p, float(cfg.omega), X.shape[1])
    if cfg.design == "grid":
        design, Yg = _grid_design(X, Y)
        return "grid", fit_full_grid(pk, design, Yg, grid_reg, beta, cfg.sigma2), names, None
    design, Ys = _sparse_design(cfg, X, Y)
    return "sparse", fit_sparse_grid(pk, design, Ys, grid_reg, beta, cfg.sigma2), names, None


# ------------------------------------------------------------------ commands


def cmd_fit_predict(cfg: RunConfig, w: Writer) -> None:
    kind, model, names, res = _fit_any(cfg)
    Xs, _, _ = read_table(cfg.test, want_y=False)
    if Xs.shape[1] != len(names):
        raise DataError(f"test data has {Xs.shape[1]} columns, training inputs have {len(names)}")
    if kind == "raw":
        mean, var = predict(model, Xs[:, 0])
    elif kind == "grid":
        mean, var = predict_full_grid(model, Xs)
    else:
        mean, var = predict_sparse_grid(model, Xs)
    w.report("fit", _fit_summary(kind, model, res, strict=False))
    rows = [tuple(x) + (m, s) for x, m, s in zip(Xs, mean, np.sqrt(var))]
    w.table("predictions", list(names) + ["mean", "sd"], rows)


def _fit_summary(kind: str, model, res, strict: bool = True) -> dict:
    try:
        ll = model.log_likelihood()
    except NumericalBreakdown:
        # predictions survive a lost determinant sign; only the likelihood is gone
        if strict:
            raise
        ll = float("nan")
    out = {"design": kind, "n": int(model.Y.size), "beta": np.asarray(model.beta),
           "sigma2": model.sigma2, "loglik": ll}
    if kind == "raw":
        out["omega"] = model.kernel.omega
        out["nugget_ratio"] = model.nugget_ratio
        out["route"] = model.route
        if model.route == "kp":
            out["logdet_phi_part"] = model.system.logdet_M
            out["logdet_A"] = model.system.logdet_A
    elif kind == "grid":
        ld_phi, ld_a = model.logdet_split()
        out["logdet_phi_part"] = ld_phi
        out["logdet_A"] = ld_a
    if res is not None:
        out["mle_converged"] = res.converged
        out["mle_boundary"] = res.boundary
    return out


def cmd_loglik(cfg: RunConfig, w: Writer) -> None:
    kind, model, _, res = _fit_any(cfg)
    w.report("loglik", _fit_summary(kind, model, res))


def cmd_mle(cfg: RunConfig, w: Writer) -> None:
    X, Y, _ = read_table(cfg.train, want_y=True)
    x, Y = _sorted_1d(X, Y)
    regressors, _, _ = _regressors_and_beta(cfg)
    if cfg.mean not in ("profile", "none"):
        raise ConfigError("mle profiles the mean; use --mean profile or none")
    res = profile_mle_1d(cfg.p, x, Y, regressors,
                         MleSearch(nugget=cfg.nugget, seed=cfg.seed))
    w.report("mle", {
        "omega_hat": res.omega_hat,
        "nugget_ratio_hat": res.nugget_ratio_hat if res.nugget_ratio_hat is not None else cfg.nugget,
        "sigma2_hat": res.sigma2_hat,
        "beta_hat": np.asarray(res.beta_hat),
        "loglik": res.loglik_value,
        "iterations": res.iterations,
        "evaluations": res.evaluations,
        "converged": res.converged,
        "boundary": res.boundary,
    })
    if cfg.sweep > 0:
        span = x[-1] - x[0]
        eta = res.nugget_ratio_hat if res.nugget_ratio_hat is not None else float(cfg.nugget)
        grid = np.geomspace(0.01 * span, 10 * span, cfg.sweep)
        rows = []
        for om in grid:
            try:
                rows.append((om, profile_loglik(cfg.p, om, x, Y, regressors, eta)))
            except KPError:
                rows.append((om, float("nan")))
        w.table("sweep", ["omega", "loglik"], rows)


def cmd_kp_dump(cfg: RunConfig, w: Writer) -> None:
    X, _, _ = read_table(cfg.train, want_y=False)
    x = np.sort(X[:, 0])
    basis = build_basis(HalfIntegerMatern(cfg.p, float(cfg.omega)), x)
    rows = []
    for line in basis_dump_lines(basis):
        j, kind, start, length, *coeffs = line.split()
        rows.append((int(j), kind, int(start), int(length), " ".join(coeffs)))
    w.table("coefficients", ["j", "kind", "window_start", "window_len", "coeffs"], rows)
    if cfg.test:
        M, _, _ = read_table(cfg.test, want_y=False)
        mesh = M[:, 0]
    else:
        mesh = x
    starts, vals = evaluate_basis_rows(basis, mesh)
    dense = np.zeros((mesh.size, basis.n))
    for r in range(vals.shape[1]):
        cols = starts + r
        ok = (cols >= 0) & (cols < basis.n)
        dense[np.nonzero(ok)[0], cols[ok]] = vals[ok, r]
    w.table("values", ["x"] + [f"phi{j}" for j in range(basis.n)],
            [(m,) + tuple(row) for m, row in zip(mesh, dense)])


def _bench_target(x: np.ndarray) -> np.ndarray:
    return np.sin(2 * np.pi * x) + 0.5 * np.cos(6 * np.pi * x)


def cmd_bench(cfg: RunConfig, w: Writer) -> None:
    if not cfg.sizes:
        raise ConfigError("--sizes must list at least one size")
    kern = HalfIntegerMatern(cfg.p, 0.1 if cfg.omega == "mle" else float(cfg.omega))
    eta = 0.0 if cfg.nugget == "mle" else float(cfg.nugget)
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for n in cfg.sizes:
        x = np.linspace(0.0, 1.0, n)
        Y = _bench_target(x) + (np.sqrt(eta) * 0.1 * rng.standard_normal(n) if eta else 0.0)
        xs = np.sort(rng.uniform(0.0, 1.0, n))
        tracemalloc.start()
        t0 = time.perf_counter()
        model = fit_1d(kern, x, Y, nugget_ratio=eta)
        t1 = time.perf_counter()
        mean = model.predict_mean(xs, sorted_hint=True)
        t2 = time.perf_counter()
        peak = tracemalloc.get_traced_memory()[1]
        tracemalloc.stop()
        mse = float(np.mean((mean - _bench_target(xs)) ** 2))
        dev = float("nan")
        if n <= min(2000, DENSE_MAX_N):
            xo = xs[: min(200, n)]
            prob = DenseGpProblem(kern, x, Y, constant_mean, model.beta, model.sigma2, eta)
            try:
                dm, _ = dense_predict(prob, xo)
                dev = float(np.max(np.abs(model.predict_mean(xo) - dm)))
            except KPError:
                pass
        rows.append((n, t1 - t0, t2 - t1, peak, dev, mse))
    w.table("bench", ["n", "fit_s", "predict_s", "peak_bytes", "max_dev_vs_dense", "mse"], rows)


HANDLERS = {
    "fit-predict": cmd_fit_predict,
    "loglik": cmd_loglik,
    "mle": cmd_mle,
    "kp-dump": cmd_kp_dump,
    "bench": cmd_bench,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        w = Writer(cfg)
        HANDLERS[cfg.command](cfg, w)
        w.flush()
    except KPError as exc:
        print(f"kpgp: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"kpgp: numerical breakdown: {exc}", file=sys.stderr)
        return NumericalBreakdown.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
