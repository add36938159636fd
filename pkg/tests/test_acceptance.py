"""Acceptance criteria 1-9.

Each ``criterion_N`` returns an :class:`Outcome`; the matching test asserts
the criterion literally and records a one-line verdict that the terminal
summary prints.  Where a literal failure is caused by double precision
itself (a dense reference that cannot resolve the tolerance, or packet
coefficients whose rounding floor exceeds it), the outcome says so and a
separate guard test checks that no failure falls outside that class.

Run ``python tests/test_acceptance.py`` to print the verdicts without pytest.
"""

from __future__ import annotations

import itertools
import os
import sys
import tempfile
import time
import tracemalloc
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np
import pytest
from scipy.sparse.linalg import LinearOperator, onenormest

from kpgp.banded import band_logdet, band_lu, band_solve
from kpgp.cli import main as cli_main
from kpgp.dense import DenseGpProblem, dense_loglik, dense_predict
from kpgp.errors import KPError
from kpgp.gp1d import constant_mean, fit_1d, predict
from kpgp.grid import (
    FullGridDesign,
    fit_full_grid,
    fit_sparse_grid,
    make_sparse_grid,
    predict_full_grid,
    predict_sparse_grid,
)
from kpgp.matern import ProductKernel, make_kernel
from kpgp.mle import profile_loglik, profile_mle_1d
from kpgp.packets import (
    build_basis,
    central_kp_coefficients,
    left_kp_coefficients,
    right_kp_coefficients,
)

EPS = np.finfo(float).eps
MEAN_TOL = 1e-8
VAR_TOL = 1e-8
LL_TOL = 1e-6
# the float64 reference is trusted to MEAN_TOL only while eps * cond stays below it
ORACLE_COND_LIMIT = MEAN_TOL / EPS

VERDICTS: dict[int, str] = {}


@dataclass
class Outcome:
    number: int
    passed: bool
    summary: str
    explained: bool = True  # every failure is attributable to double precision
    details: list = field(default_factory=list)

    def line(self) -> str:
        return f"criterion {self.number}: {'PASS' if self.passed else 'FAIL'}  {self.summary}"


def record(out: Outcome) -> Outcome:
    VERDICTS[out.number] = out.line()
    return out


_CACHE: dict[int, Outcome] = {}


def outcome(n: int) -> Outcome:
    if n not in _CACHE:
        _CACHE[n] = record(CRITERIA[n]())
    return _CACHE[n]


# ------------------------------------------------------------------ helpers


def iid_knots(rng, n):
    while True:
        x = np.sort(rng.uniform(0.0, 1.0, n))
        if np.all(np.diff(x) > 0):
            return x


def compare(mean, var, ll, dmean, dvar, dll, sigma2):
    em = float(np.max(np.abs(mean - dmean)) / max(np.max(np.abs(dmean)), 1e-300))
    ev = float(np.max(np.abs(var - dvar)) / sigma2)
    el = abs(ll - dll) if ll is not None else 0.0
    return em, ev, el


def within(em, ev, el):
    return em <= MEAN_TOL and ev <= VAR_TOL and el <= LL_TOL


def smooth_2d(pts):
    return np.sin(3 * pts[:, 0]) + np.cos(2 * pts.sum(axis=1)) + 0.5 * pts[:, -1] ** 2


# ------------------------------------------------------------------ 1


def one_d_cases(rng):
    grid = list(itertools.product((10, 50, 200, 500), (0, 1, 2), (0.05, 0.3, 1.0, 5.0), (0.0, 1e-4, 0.1)))
    extra = [grid[i] for i in rng.integers(0, len(grid), 200 - len(grid))]
    return grid + extra


def criterion_1() -> Outcome:
    rng = np.random.default_rng(1001)
    t0 = time.perf_counter()
    ok = limited = 0
    bad = []
    for n, p, omega, eta in one_d_cases(rng):
        kern = make_kernel(p, omega)
        x = iid_knots(rng, n)
        Y = np.sin(2 * np.pi * x) + 0.3 * np.cos(5 * x) + np.sqrt(eta) * rng.standard_normal(n)
        xs = rng.uniform(-0.1, 1.1, 50)
        Keta = kern(x[:, None], x[None, :]) + eta * np.eye(n)
        cond = float(np.linalg.cond(Keta))
        try:
            m = fit_1d(kern, x, Y, nugget_ratio=eta)
            mean, var = predict(m, xs)
            ll = m.log_likelihood()
        except KPError as exc:
            res = ("kp-error", type(exc).__name__)
        else:
            prob = DenseGpProblem(kern, x, Y, constant_mean, m.beta, m.sigma2, eta)
            try:
                dmean, dvar = dense_predict(prob, xs)
                dll = dense_loglik(prob)
            except KPError:
                res = ("oracle-not-pd", "")
            else:
                em, ev, el = compare(mean, var, ll, dmean, dvar, dll, m.sigma2)
                res = ("ok",) if within(em, ev, el) else ("tol", f"{em:.1e}/{ev:.1e}/{el:.1e}")
        if res[0] == "ok":
            ok += 1
            continue
        oracle_limited = cond >= ORACLE_COND_LIMIT
        limited += oracle_limited
        bad.append((n, p, omega, eta, res, cond, oracle_limited))
    elapsed = time.perf_counter() - t0
    unexplained = [b for b in bad if not b[-1]]
    summary = (f"{ok}/200 cases within tolerance of the dense oracle in {elapsed:.1f}s; "
               f"{limited} of {len(bad)} misses have eps*cond(K+eta I) >= {MEAN_TOL:g} "
               f"where the float64 oracle cannot resolve the tolerance")
    return Outcome(1, ok == 200 and elapsed < 60, summary, not unexplained and elapsed < 60, bad)


# ------------------------------------------------------------------ 2


def criterion_2() -> Outcome:
    rng = np.random.default_rng(1002)
    cases = ok = 0
    bad = []
    for d, p, omega in itertools.product((2, 3), (0, 1, 2), (0.3, 1.0)):
        sizes = tuple(int(s) for s in rng.integers(3, 9, d))
        design = FullGridDesign(tuple(iid_knots(rng, s) for s in sizes))
        pk = ProductKernel.isotropic(p, omega, d)
        pts = design.points()
        Y = smooth_2d(pts)
        xs = rng.uniform(0, 1, (60, d))
        m = fit_full_grid(pk, design, Y)
        mean, var = predict_full_grid(m, xs)
        prob = DenseGpProblem(pk, pts, Y, constant_mean, m.beta, m.sigma2)
        cond = float(np.linalg.cond(prob.corr(pts, pts)))
        try:
            dmean, dvar = dense_predict(prob, xs)
            dll = dense_loglik(prob)
            errs = compare(mean, var, m.log_likelihood(), dmean, dvar, dll, m.sigma2)
        except KPError:
            errs = (np.inf,) * 3
        cases += 1
        if within(*errs):
            ok += 1
        else:
            bad.append(("full", d, sizes, p, omega, errs, cond, cond >= ORACLE_COND_LIMIT))
    for d, level, p, omega in itertools.product((2, 3), (1, 2, 3, 4, 5), (0, 1, 2), (0.3, 1.0)):
        sg = make_sparse_grid(d, level)
        pk = ProductKernel.isotropic(p, omega, d)
        Y = smooth_2d(sg.points)
        xs = rng.uniform(0, 1, (60, d))
        m = fit_sparse_grid(pk, sg, Y)
        mean, var = predict_sparse_grid(m, xs=xs)
        prob = DenseGpProblem(pk, sg.points, Y, constant_mean, m.beta, m.sigma2)
        cond = float(np.linalg.cond(prob.corr(sg.points, sg.points)))
        try:
            dmean, dvar = dense_predict(prob, xs)
            dll = dense_loglik(prob)
            errs = compare(mean, var, m.log_likelihood(), dmean, dvar, dll, m.sigma2)
        except KPError:
            errs = (np.inf,) * 3
        cases += 1
        if within(*errs):
            ok += 1
        else:
            bad.append(("sparse", d, level, p, omega, errs, cond, cond >= ORACLE_COND_LIMIT))
    unexplained = [b for b in bad if not b[-1]]
    summary = (f"{ok}/{cases} full- and sparse-grid cases within tolerance of the dense oracle; "
               f"{len(bad) - len(unexplained)} of {len(bad)} misses are oracle-limited")
    return Outcome(2, ok == cases, summary, not unexplained, bad)


# ------------------------------------------------------------------ 3 (and its window family)


def packet_windows(rng, count=500):
    """``(p, omega, knots)``: ``k`` iid uniform knots on [0, 1], parameters cycled."""
    out = []
    for i in range(count):
        p = i % 3
        omega = (0.05, 0.3, 1.0, 5.0)[(i // 3) % 4]
        out.append((p, omega, iid_knots(rng, 2 * p + 3)))
    return out


def support_ratio(kern, pk, rng, kind):
    a = pk.knots
    w = a[-1] - a[0]
    inside = np.linspace(a[0], a[-1], 400)
    reach = 3 * w + 5 / kern.c
    left = a[0] - rng.uniform(0, reach, 100)
    right = a[-1] + rng.uniform(0, reach, 100)
    outside = {"central": np.r_[left, right], "right": left, "left": right}[kind]
    # double-precision rounding floor of the plain sum at the outside points
    terms = np.abs(pk.coeffs) * kern(outside[:, None], a[None, :])
    peak = np.max(np.abs(pk(kern, inside)))
    ratio = np.max(np.abs(pk(kern, outside))) / peak
    floor = EPS * np.max(terms.sum(axis=1)) / peak
    return ratio, floor


def criterion_3() -> Outcome:
    rng = np.random.default_rng(1003)
    bad = []
    total = 0
    for p, omega, a in packet_windows(rng):
        kern = make_kernel(p, omega)
        k = kern.k
        packets = [("central", central_kp_coefficients(kern, a))]
        s = int(rng.integers((k + 1) // 2, k))
        packets.append(("right", right_kp_coefficients(kern, a[:s])))
        packets.append(("left", left_kp_coefficients(kern, a[-s:])))
        for kind, pk in packets:
            total += 1
            ratio, floor = support_ratio(kern, pk, rng, kind)
            if not ratio < 1e-10:
                # explained when the rounding floor itself is within 100x of the tolerance
                bad.append((kind, p, omega, ratio, floor, floor >= 1e-12))
    unexplained = [b for b in bad if not b[-1]]
    summary = (f"{total - len(bad)}/{total} packets (500 central + one-sided) below 1e-10 outside; "
               f"{len(bad) - len(unexplained)} of {len(bad)} misses have a rounding floor "
               f"eps*sum|A K|/peak >= 1e-12 (coefficients cannot represent the packet)")
    return Outcome(3, not bad, summary, not unexplained, bad)


# ------------------------------------------------------------------ 4


def criterion_4() -> Outcome:
    rng = np.random.default_rng(1004)
    bad = []
    cases = 0
    for p, omega in itertools.product((0, 1, 2), (0.05, 0.3, 1.0, 5.0)):
        kern = make_kernel(p, omega)
        h = (kern.k - 1) // 2
        for n in sorted({kern.k, 10, 25, 50}):
            cases += 1
            x = iid_knots(rng, n)
            b = build_basis(kern, x)
            A, Phi = b.A.to_dense(), b.Phi.to_dense()
            i, j = np.indices(A.shape)
            band_ok = (b.A.kl, b.A.ku, b.Phi.kl, b.Phi.ku) == (h, h, h - 1, h - 1)
            zeros_ok = np.all(A[np.abs(i - j) > h] == 0) and np.all(Phi[np.abs(i - j) > h - 1] == 0)
            # exact bandwidth: the outermost diagonal of A is populated
            outer_ok = np.any(A[np.abs(i - j) == h] != 0)
            resid = float(np.max(np.abs(kern(x[:, None], x[None, :]) @ A - Phi)))
            if not (band_ok and zeros_ok and outer_ok and resid < 1e-9):
                bad.append((p, omega, n, band_ok, zeros_ok, outer_ok, resid))
    summary = (f"{cases - len(bad)}/{cases} bases with A bandwidth (k-1)/2, Phi bandwidth (k-3)/2 "
               f"and max|K A - Phi| < 1e-9 for n <= 50")
    return Outcome(4, not bad, summary, not bad, bad)


# ------------------------------------------------------------------ 5


def collinearity(u, v):
    return abs(u @ v) / (np.linalg.norm(u) * np.linalg.norm(v))


def working_dps(kern, a):
    """Digits that resolve exp(+-c a) across the window and its closest knots."""
    span = kern.c * (a[-1] - a[0])
    tiny = max(0.0, -np.log10(kern.c * np.min(np.diff(a)))) if a.size > 1 else 0.0
    return int(30 + span / 2.3 + 2 * a.size * tiny)


def mp_system(kern, a):
    """Central-packet rows sum_t A_t a_t^l exp(+-c a_t), row-scaled, in mpmath."""
    h = (kern.k - 1) // 2
    c = mp.sqrt(2 * kern.p + 1) / mp.mpf(kern.omega)
    knots = [mp.mpf(float(v)) for v in a]
    mid = (knots[0] + knots[-1]) / 2
    rows = []
    for sign in (-1, 1):
        for l in range(h):
            r = [(v - mid) ** l * mp.exp(sign * c * (v - mid)) for v in knots]
            big = max(abs(e) for e in r)
            rows.append([e / big for e in r])
    return mp.matrix(rows)


def null_space_gap(kern, a):
    """log10 of sigma_(k-1) over the null singular value, at working precision."""
    with mp.workdps(working_dps(kern, a)):
        M = mp_system(kern, a)
        sv = mp.svd_r(M, compute_uv=False)
        Q, _ = mp.qr(M.T, mode="full")
        null = mp.norm(M * Q[:, a.size - 1])
        floor = mp.mpf(10) ** (-mp.mp.dps) * max(sv)
        return float(mp.log10(min(sv) / max(null, floor)))


def minimal_degree_margin(kern, a):
    """log10 of sigma_min over the precision floor for an m < k knot system."""
    with mp.workdps(working_dps(kern, a)):
        sv = mp.svd_r(mp_system(kern, a), compute_uv=False)
        return float(mp.log10(min(sv) / (mp.mpf(10) ** (-mp.mp.dps) * max(sv))))


def a_condition(basis):
    f = band_lu(basis.A)
    n = basis.n
    op = LinearOperator((n, n), matvec=lambda v: band_solve(f, v),
                        rmatvec=lambda v: band_solve(f, v, trans=True), dtype=float)
    return f, onenormest(op) * np.max(np.abs(basis.A.bands).sum(axis=0))


def criterion_5() -> Outcome:
    rng = np.random.default_rng(1005)
    windows = packet_windows(rng)
    shift_bad, gap_bad, minimal_bad, a_bad = [], [], [], []
    gaps, margins, conds = [], [], []
    for p, omega, a in windows:
        kern = make_kernel(p, omega)
        k = kern.k
        s = k - 1
        for shift in (-5.0, 5.0, 100.0):
            pairs = [
                (central_kp_coefficients(kern, a), central_kp_coefficients(kern, a + shift)),
                (right_kp_coefficients(kern, a[:s]), right_kp_coefficients(kern, a[:s] + shift)),
                (left_kp_coefficients(kern, a[-s:]), left_kp_coefficients(kern, a[-s:] + shift)),
            ]
            worst = min(collinearity(u.coeffs, v.coeffs) for u, v in pairs)
            if worst < 1 - 1e-9:
                shift_bad.append((p, omega, shift, worst))
        gaps.append(null_space_gap(kern, a))
        if gaps[-1] < 6:
            gap_bad.append((p, omega, gaps[-1]))
        for m in range(2, k):
            margins.append(minimal_degree_margin(kern, a[:m]))
            if margins[-1] < 6:
                minimal_bad.append((p, omega, m, margins[-1]))
    for p, omega in itertools.product((0, 1, 2), (0.01, 0.1, 1.0)):
        x = iid_knots(rng, 10_000)
        b = build_basis(make_kernel(p, omega), x)
        try:
            f, cond = a_condition(b)
            ld, _ = band_logdet(f)
            conds.append(cond)
            if not (np.all(f.u_diagonal != 0) and np.isfinite(ld)):
                a_bad.append((p, omega, "zero pivot"))
        except KPError as exc:
            a_bad.append((p, omega, type(exc).__name__))
    parts = [
        f"shift collinearity {len(windows) * 3 - len(shift_bad)}/{len(windows) * 3}",
        f"null-space gap min 1e{min(gaps):.0f} (>= 1e6) {len(windows) - len(gap_bad)}/{len(windows)}",
        f"m < k systems full rank, min margin 1e{min(margins):.0f}, {len(margins) - len(minimal_bad)}/{len(margins)}",
        f"A at n=1e4 LU without zero pivots {9 - len(a_bad)}/9 "
        f"(cond1 {min(conds):.0e}..{max(conds):.0e})" if conds else "A at n=1e4: none factored",
    ]
    passed = not (shift_bad or gap_bad or minimal_bad or a_bad)
    return Outcome(5, passed, "; ".join(parts), passed, [shift_bad, gap_bad, minimal_bad, a_bad])


# ------------------------------------------------------------------ 6


def fit_and_predict(n):
    kern = make_kernel(1, 0.1)
    x = np.linspace(0.0, 1.0, n)
    Y = np.sin(2 * np.pi * x) + 0.5 * np.cos(6 * np.pi * x)
    xs = np.sort(np.random.default_rng(n).uniform(0.0, 1.0, n))
    tracemalloc.start()
    t0 = time.perf_counter()
    m = fit_1d(kern, x, Y)
    mean = m.predict_mean(xs, sorted_hint=True)
    elapsed = time.perf_counter() - t0
    peak = tracemalloc.get_traced_memory()[1]
    tracemalloc.stop()
    return elapsed, peak, mean


def criterion_6() -> Outcome:
    t_start = time.perf_counter()
    t5, m5, _ = fit_and_predict(10**5)
    t6, m6, _ = fit_and_predict(10**6)
    total = time.perf_counter() - t_start
    tr, mr = t6 / t5, m6 / m5
    passed = tr <= 15 and mr <= 12 and total < 300
    summary = (f"time {t5:.2f}s -> {t6:.2f}s (ratio {tr:.1f} <= 15), peak memory "
               f"{m5 / 1e6:.0f}MB -> {m6 / 1e6:.0f}MB (ratio {mr:.1f} <= 12), total {total:.0f}s")
    return Outcome(6, passed, summary, passed)


# ------------------------------------------------------------------ 7


def criterion_7() -> Outcome:
    rng = np.random.default_rng(1007)
    bad = []
    cases = 0

    def check(tag, mean, var, Y, sigma2):
        nonlocal cases
        cases += 1
        em = np.max(np.abs(mean - Y)) / np.max(np.abs(Y))
        ev = np.max(var) / sigma2
        if not (em <= MEAN_TOL and ev <= VAR_TOL):
            bad.append((tag, em, ev))

    for p, omega, n in itertools.product((0, 1, 2), (0.05, 0.3, 1.0), (10, 50, 200)):
        x = iid_knots(rng, n)
        Y = np.sin(2 * np.pi * x) + 0.3 * np.cos(5 * x)
        m = fit_1d(make_kernel(p, omega), x, Y)
        check(("1d", p, omega, n), *predict(m, x), Y, m.sigma2)
    for d, p in itertools.product((2, 3), (0, 1, 2)):
        design = FullGridDesign(tuple(iid_knots(rng, int(s)) for s in rng.integers(3, 9, d)))
        Y = smooth_2d(design.points())
        m = fit_full_grid(ProductKernel.isotropic(p, 0.5, d), design, Y)
        check(("grid", d, p), *predict_full_grid(m, design.points()), Y, m.sigma2)
        sg = make_sparse_grid(d, 4)
        Y = smooth_2d(sg.points)
        m = fit_sparse_grid(ProductKernel.isotropic(p, 0.5, d), sg, Y)
        check(("sparse", d, p), *predict_sparse_grid(m, xs=sg.points), Y, m.sigma2)
    summary = f"{cases - len(bad)}/{cases} noiseless fits (1-D, full grid, sparse grid) interpolate"
    return Outcome(7, not bad, summary, not bad, bad)


# ------------------------------------------------------------------ 8


def criterion_8() -> Outcome:
    rng = np.random.default_rng(1008)
    x = iid_knots(rng, 500)
    kern = make_kernel(1, 0.2)
    K = kern(x[:, None], x[None, :])
    Y = 1.0 + np.linalg.cholesky(K + 1e-10 * np.eye(500)) @ rng.standard_normal(500)
    res = profile_mle_1d(1, x, Y)
    span = x[-1] - x[0]
    sweep = [profile_loglik(1, w, x, Y) for w in np.geomspace(0.01 * span, 10 * span, 20)]
    best_sweep = max(sweep)
    passed = 0.13 <= res.omega_hat <= 0.30 and res.loglik_value >= best_sweep
    summary = (f"omega_hat={res.omega_hat:.4f} in [0.13, 0.30]; loglik {res.loglik_value:.4f} "
               f">= best of 20-point sweep {best_sweep:.4f}")
    return Outcome(8, passed, summary, passed)


# ------------------------------------------------------------------ 9


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(repr(float(v)) for v in r) + "\n")


def _run(args, path):
    code = cli_main(args + ["--out", path])
    with open(path, "rb") as fh:
        return code, fh.read()


def _means(blob: bytes) -> np.ndarray:
    lines = blob.decode().splitlines()
    start = lines.index("# table predictions") + 1
    col = lines[start].split(",").index("mean")
    return np.array([float(ln.split(",")[col]) for ln in lines[start + 1:] if not ln.startswith("#")])


def criterion_9() -> Outcome:
    rng = np.random.default_rng(1009)
    bad = []
    with tempfile.TemporaryDirectory() as tmp:
        x = iid_knots(rng, 80)
        train = os.path.join(tmp, "train.csv")
        test = os.path.join(tmp, "test.csv")
        _write_csv(train, ["x", "y"], zip(x, np.sin(6 * x) + 0.1 * rng.standard_normal(80)))
        _write_csv(test, ["x"], zip(rng.uniform(0, 1, 25)))
        runs = [
            ["fit-predict", "--kernel", "p=1,omega=0.3", "--nugget", "0.01"],
            ["fit-predict", "--kernel", "p=2,omega=mle", "--nugget", "mle"],
            ["loglik", "--kernel", "p=0,omega=0.5"],
            ["mle", "--kernel", "p=1,omega=mle", "--sweep", "10"],
            ["kp-dump", "--kernel", "p=2,omega=0.4"],
        ]
        for fmt in ("table", "records"):
            for args in runs:
                full = args + ["--train", train, "--test", test, "--seed", "7", "--format", fmt]
                a = _run(full, os.path.join(tmp, "a"))
                b = _run(full, os.path.join(tmp, "b"))
                if a[0] != 0 or a != b:
                    bad.append((" ".join(args), fmt))
        sg = make_sparse_grid(3, 3)
        _write_csv(os.path.join(tmp, "sg.csv"), ["x1", "x2", "x3", "y"],
                   [(*pt, y) for pt, y in zip(sg.points, smooth_2d(sg.points))])
        _write_csv(os.path.join(tmp, "sgq.csv"), ["x1", "x2", "x3"], rng.uniform(0, 1, (40, 3)))
        man = os.path.join(tmp, "design.manifest")
        base = ["fit-predict", "--kernel", "p=1,omega=0.5", "--design", "sparse:dyadic,3",
                "--train", os.path.join(tmp, "sg.csv"), "--test", os.path.join(tmp, "sgq.csv")]
        c1, first = _run(base + ["--write-manifest", man], os.path.join(tmp, "m1"))
        c2, second = _run(base + ["--manifest", man], os.path.join(tmp, "m2"))
        drift = float(np.max(np.abs(_means(first) - _means(second)))) if c1 == c2 == 0 else np.inf
    passed = not bad and drift <= 1e-12
    summary = (f"{2 * len(runs) - len(bad)}/{2 * len(runs)} reruns byte-identical; "
               f"manifest round-trip max prediction change {drift:.1e} <= 1e-12")
    return Outcome(9, passed, summary, passed, bad)


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9,
}


# ------------------------------------------------------------------ tests


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    out = outcome(number)
    assert out.passed, out.line() + "\n" + "\n".join(map(str, out.details[:20]))


@pytest.mark.parametrize("number", [1, 2, 3])
def test_misses_are_precision_limited(number):
    """Guard: any literal miss must sit where double precision cannot meet the tolerance."""
    out = outcome(number)
    assert out.explained, "\n".join(map(str, out.details))


if __name__ == "__main__":
    chosen = [int(a) for a in sys.argv[1:]] or sorted(CRITERIA)
    for num in chosen:
        print(outcome(num).line(), flush=True)
