"""Statistical and numerical validation criteria.

Each check returns one or more :class:`CriterionResult` rows.  The full
acceptance suite (:func:`acceptance_suite`) runs them at their nominal scale;
:func:`config_suite` picks the checks that apply to one ensemble for the
``validate`` subcommand.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass

import numpy as np

from . import core_rotation as cr
from . import stats
from .experiments import (
    Ensemble, condition_det, loglog_slope, pick_one, sample_eigs, time_dense, time_factored, warmup,
)
from .factored_form import (
    SampleSpec, determinant, refactor_to_rotations, sample_descending, sample_householder_form, to_dense,
)
from .haar_dense import sample_haar_dense
from .rand_dist import RngStream
from .unitary_qr import eigenvalues


@dataclass
class CriterionResult:
    name: str
    statistic: float
    threshold: float
    passed: bool
    seconds: float = 0.0
    detail: str = ""

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        s = f"{self.name}\t{self.statistic:.6g}\t{self.threshold:.6g}\t{flag}\t{self.seconds:.2f}s"
        return s + (f"\t{self.detail}" if self.detail else "")


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def _le(name, stat, thr, seconds, detail=""):
    return CriterionResult(name, float(stat), float(thr), bool(stat <= thr), seconds, detail)


def _lt(name, stat, thr, seconds, detail=""):
    return CriterionResult(name, float(stat), float(thr), bool(stat < thr), seconds, detail)


# ---------------------------------------------------------------------------
# 1. spectral correctness
# ---------------------------------------------------------------------------

def spectral_errors(f) -> tuple[float, float, float]:
    """(max_k<=5 |sum lam^k - tr H^k|, |prod lam - det|, max ||lam| - 1|)."""
    lam = eigenvalues(f).values
    H = to_dense(f)
    P = np.eye(f.n, dtype=complex)
    err = 0.0
    for k in range(5):
        P = P @ H
        err = max(err, abs(np.sum(lam ** (k + 1)) - np.trace(P)))
    return err, abs(np.prod(lam) - determinant(f)), float(np.max(np.abs(np.abs(lam) - 1.0)))


def check_spectral(ns=range(2, 51), seeds=100, fields=("real", "complex"), det=None):
    with _Timer() as t:
        ps = dt = mod = 0.0
        for fld in fields:
            for n in ns:
                for seed in range(seeds):
                    f = sample_descending(SampleSpec(n, fld, det, seed))
                    a, b, c = spectral_errors(f)
                    ps, dt, mod = max(ps, a / n), max(dt, b / n), max(mod, c)
    return [
        _le("1a spectral power sums (err/n)", ps, 1e-8, t.seconds),
        _le("1b determinant (err/n)", dt, 1e-10, 0.0),
        _le("1c unit modulus", mod, 1e-12, 0.0),
    ]


# ---------------------------------------------------------------------------
# 2. pipeline equivalence
# ---------------------------------------------------------------------------

def check_pipeline(nmax=64, seeds=100, fields=("complex", "real")):
    with _Timer() as t:
        worst = 0.0
        for fld in fields:
            for n in range(1, nmax + 1):
                for seed in range(seeds):
                    spec = SampleSpec(n, fld, seed=seed)
                    a = to_dense(sample_descending(spec))
                    b = to_dense(refactor_to_rotations(sample_householder_form(spec)))
                    worst = max(worst, np.abs(a - b).max() / n)
    return [_le("2 pipeline equivalence (err/n)", worst, 1e-12, t.seconds)]


# ---------------------------------------------------------------------------
# 3-5. unitary ensembles
# ---------------------------------------------------------------------------

def check_uniformity(n=10, trials=100_000, seed=3, workers=1, chi_draw=True):
    with _Timer() as t:
        eigs = sample_eigs(Ensemble(n), trials, seed, workers=workers, chi_draw=chi_draw)
        ks = stats.ks_uniform_phase(stats.phases(pick_one(eigs, seed)))
    return [_lt("3 U(n) phase uniformity (KS)", ks, stats.ks_critical(trials), t.seconds)]


def spacing_tv(eigs: np.ndarray, bins: int = 30) -> tuple[float, float]:
    """TV of the pooled spacing histogram on [0, 3] against the surmise.

    The second value (against the unitary-class surmise) is a diagnostic.
    """
    sp = np.concatenate([stats.spacings(row) for row in eigs])
    h = stats.histogram(sp, np.linspace(0.0, 3.0, bins + 1))
    return (stats.tv_distance(h, cdf=stats.wigner_cdf),
            stats.tv_distance(h, stats.unitary_surmise_density))


def check_spacing(n=10, trials=10_000, seed=4, workers=1, chi_draw=True):
    with _Timer() as t:
        eigs = sample_eigs(Ensemble(n), trials, seed, workers=workers, chi_draw=chi_draw)
        tv, tv2 = spacing_tv(eigs)
    return [_lt("4 U(n) spacing vs surmise (TV)", tv, 0.03, t.seconds,
                f"TV vs unitary-class surmise = {tv2:.4f}")]


def check_su(n=10, trials=100_000, seed=5, bins=100, workers=1):
    with _Timer() as t:
        eigs = sample_eigs(Ensemble(n, "complex", 1.0 + 0j), trials, seed, workers=workers)
        h = stats.histogram(stats.phases(eigs.reshape(-1)), np.linspace(0.0, stats.TWO_PI, bins + 1))
        defect = stats.periodicity_defect(h, n)
        tv, tv2 = spacing_tv(eigs)
    return [
        _lt("5a SU(n) 2pi/n periodicity defect", defect, 0.02, t.seconds),
        _lt("5b SU(n) spacing vs surmise (TV)", tv, 0.03, 0.0, f"TV vs unitary-class surmise = {tv2:.4f}"),
    ]


# ---------------------------------------------------------------------------
# 6-7. constrained determinants
# ---------------------------------------------------------------------------

def _count_missing(eigs, points, tol=1e-8) -> int:
    return sum(not all(stats.has_atom(row, p, tol) for p in points) for row in eigs)


def check_atoms(trials=10_000, seed=6, workers=1):
    out = []
    cases = [
        ("6a O-(10) has +1 and -1", Ensemble(10, "real", -1.0 + 0j), (1.0, -1.0)),
        ("6b SO(9) has +1", Ensemble(9, "real", 1.0 + 0j), (1.0,)),
        ("6c O-(9) has -1", Ensemble(9, "real", -1.0 + 0j), (-1.0,)),
    ]
    for i, (name, ens, pts) in enumerate(cases):
        with _Timer() as t:
            eigs = sample_eigs(ens, trials, seed + i, workers=workers)
            bad = _count_missing(eigs, pts)
        out.append(_le(name + " (violations)", bad, 0, t.seconds))
    return out


def check_det_slice(n=8, trials=1000, seed=7, angle=math.pi / 3):
    with _Timer() as t:
        xi = cmath.exp(1j * angle)
        eigs = sample_eigs(Ensemble(n, "complex", xi), trials, seed)
        # circular difference so that +-pi wrap is not counted as an error
        err = float(np.max(np.abs(np.angle(np.prod(eigs, axis=1) * np.conj(xi)))))
    return [_le("7 determinant slice |Arg det - Arg xi|", err, 1e-9, t.seconds)]


# ---------------------------------------------------------------------------
# 8. complexity
# ---------------------------------------------------------------------------

FACTORED_SIZES = (256, 512, 1024, 2048, 4096)
DENSE_SIZES = (256, 512, 1024, 2048)


def run_bench(factored_sizes=FACTORED_SIZES, dense_sizes=DENSE_SIZES, seed=8):
    """Rows (n, method, seconds, chases)."""
    warmup()
    rows = []
    for n in factored_sizes:
        secs, chases = time_factored(n, seed, repeats=3 if n <= 1024 else 1)
        rows.append((n, "factored", secs, chases))
    for n in dense_sizes:
        rows.append((n, "dense", time_dense(n, seed, repeats=3 if n <= 512 else 1), 0))
    return rows


def check_complexity(rows=None):
    with _Timer() as t:
        rows = run_bench() if rows is None else rows
    fac = [(n, s) for n, m, s, _ in rows if m == "factored"]
    den = [(n, s) for n, m, s, _ in rows if m == "dense"]
    sf = loglog_slope(*zip(*fac))
    sd = loglog_slope(*zip(*den))
    tf = dict(fac).get(2048, math.nan)
    td = dict(den).get(2048, math.nan)
    return [
        CriterionResult("8a factored log-log slope", sf, 2.5, 1.7 <= sf <= 2.5, t.seconds, "band [1.7, 2.5]"),
        CriterionResult("8b dense log-log slope", sd, 2.6, sd >= 2.6, 0.0, "lower bound"),
        CriterionResult("8c factored/dense time at n=2048", tf / td, 1.0, tf < td, 0.0,
                        f"factored {tf:.3g}s, dense {td:.3g}s"),
    ]


# ---------------------------------------------------------------------------
# 9. rotation algebra
# ---------------------------------------------------------------------------

def _rand_rot(rng: np.random.Generator) -> cr.CoreRotation:
    return cr.CoreRotation(complex(rng.normal(), rng.normal()), rng.normal())


def _rand_pair(rng: np.random.Generator) -> cr.DiagonalPair:
    a, b = rng.uniform(-math.pi, math.pi, 2)
    return cr.DiagonalPair(cmath.exp(1j * a), cmath.exp(1j * b))


def random_unitary2(rng: np.random.Generator) -> np.ndarray:
    A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    Q, R = np.linalg.qr(A)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def check_rotation_algebra(count=10_000, seed=9):
    rng = np.random.default_rng(seed)
    err = dict(fuse=0.0, pass_left=0.0, pass_right=0.0, turnover=0.0, from_unitary=0.0, norm=0.0)
    with _Timer() as t:
        for _ in range(count):
            a, b = _rand_rot(rng), _rand_rot(rng)
            g, p = cr.fuse(a, b)
            err["fuse"] = max(err["fuse"], np.abs(g.dense() @ p.dense() - a.dense() @ b.dense()).max())
            d = _rand_pair(rng)
            g2, d2 = cr.passthrough_left(d, a)
            err["pass_left"] = max(err["pass_left"], np.abs(d.dense() @ a.dense() - g2.dense() @ d2.dense()).max())
            d3, g3 = cr.passthrough_right(a, d)
            err["pass_right"] = max(err["pass_right"], np.abs(a.dense() @ d.dense() - d3.dense() @ g3.dense()).max())
            tri = (cr.IndexedRotation(a, 1), cr.IndexedRotation(b, 2), cr.IndexedRotation(_rand_rot(rng), 1))
            out = cr.turnover(*tri)
            err["turnover"] = max(err["turnover"], np.abs(cr.dense3(*tri) - cr.dense3(*out)).max())
            U = random_unitary2(rng)
            g4, d4 = cr.rotation_from_unitary2(U)
            err["from_unitary"] = max(err["from_unitary"], np.abs(g4.dense() @ d4.dense() - U).max())
            for r in (g, g2, g3, g4, *(o.rot for o in out)):
                err["norm"] = max(err["norm"], abs(abs(r.c) ** 2 + r.s ** 2 - 1.0))
    thr = dict(fuse=1e-14, pass_left=1e-15, pass_right=1e-15, turnover=1e-14, from_unitary=1e-14, norm=1e-14)
    res = [_le(f"9 rotation algebra: {k}", err[k], thr[k], 0.0) for k in err]
    res[0].seconds = t.seconds
    return res


# ---------------------------------------------------------------------------
# 10. dense baseline
# ---------------------------------------------------------------------------

def moment_tolerance(n: int, trials: int, field: str = "complex", sigmas: float = 5.0) -> float:
    """Relative tolerance for mean |q_ij|^2 (never tighter than 2%).

    |q_ij|^2 is Beta(1, n-1) for U(n) and Beta(1/2, (n-1)/2) for O(n).
    """
    rel_sd = math.sqrt((n - 1) / (n + 1)) if field == "complex" else math.sqrt(2 * (n - 1) / (n + 2))
    return max(0.02, sigmas * rel_sd / math.sqrt(trials))


def check_dense_haar(n=8, trials=100_000, seed=10, field="complex", tol=0.02):
    rng = RngStream(seed)
    acc = np.zeros((n, n))
    gram = 0.0
    with _Timer() as t:
        for _ in range(trials):
            Q = sample_haar_dense(n, field, rng)
            acc += np.abs(Q) ** 2
            gram = max(gram, np.abs(Q.conj().T @ Q - np.eye(n)).max())
        rel = float(np.max(np.abs(acc / trials - 1.0 / n)) * n)
    return [
        _le("10a dense entry moment rel. error", rel, tol, t.seconds),
        _le("10b dense Gram defect", gram, 1e-12, 0.0),
    ]


def check_dense_det_phase(n=6, trials=10_000, seed=11):
    rng = RngStream(seed)
    ph = np.array([np.angle(np.linalg.det(sample_haar_dense(n, "complex", rng))) for _ in range(trials)])
    ks = stats.ks_uniform_phase(np.mod(ph, stats.TWO_PI))
    return [_lt("dense det phase uniformity (KS)", ks, stats.ks_critical(trials), 0.0)]


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

# (label, check, runtime budget in seconds)
ACCEPTANCE = (
    ("1", check_spectral, 30.0),
    ("2", check_pipeline, 10.0),
    ("3", check_uniformity, 60.0),
    ("4", check_spacing, 30.0),
    ("5", check_su, 90.0),
    ("6", check_atoms, 60.0),
    ("7", check_det_slice, 5.0),
    ("8", check_complexity, 300.0),
    ("9", check_rotation_algebra, 10.0),
    ("10", check_dense_haar, 60.0),
)


def run_criterion(label: str, check, budget: float, **kw) -> list[CriterionResult]:
    """Run one acceptance check and append its wall-time line."""
    with _Timer() as t:
        rows = check(**kw)
    return rows + [_lt(f"{label} runtime (s)", t.seconds, budget, t.seconds)]


def acceptance_suite(workers: int = 1) -> list[CriterionResult]:
    warmup()
    out = []
    for label, check, budget in ACCEPTANCE:
        kw = {"workers": workers} if "workers" in check.__code__.co_varnames else {}
        out += run_criterion(label, check, budget, **kw)
    return out


def config_suite(ens: Ensemble, trials: int, seed: int = 0, method: str = "factored",
                 workers: int = 1, bins: int | None = None, chi_draw: bool = True) -> list[CriterionResult]:
    """Checks that apply to one ensemble at the requested scale."""
    out: list[CriterionResult] = []
    n = ens.n
    if method == "dense":
        out += check_dense_haar(n, trials, seed, ens.field, moment_tolerance(n, trials, ens.field))
        if ens.field == "complex":
            out += check_dense_det_phase(n, trials, seed + 1)
        return out

    with _Timer() as t:
        worst = dt = 0.0
        for s in range(min(trials, 100)):
            f = sample_descending(SampleSpec(n, ens.field, ens.det, seed + s), chi_draw=chi_draw)
            a, b, _ = spectral_errors(f)
            worst, dt = max(worst, a / n), max(dt, b / n)
    out.append(_le("spectral power sums (err/n)", worst, 1e-8, t.seconds))
    out.append(_le("determinant (err/n)", dt, 1e-10, 0.0))

    with _Timer() as t:
        eigs = sample_eigs(ens, trials, seed, workers=workers, chi_draw=chi_draw)
    if ens.det is not None:
        err = float(np.max(np.abs(np.angle(np.prod(eigs, axis=1) * np.conj(ens.det)))))
        out.append(_le("determinant phase", err, 1e-9, t.seconds))
    if ens.field == "complex" and ens.det is None:
        ks = stats.ks_uniform_phase(stats.phases(pick_one(eigs, seed)))
        out.append(_lt("phase uniformity (KS)", ks, stats.ks_critical(trials), t.seconds))
    if ens.field == "complex" and ens.det is not None and abs(ens.det - 1) < 1e-12 and n >= 2:
        b = bins if bins and bins % n == 0 else n * max(1, math.ceil(100 / n))
        h = stats.histogram(stats.phases(eigs.reshape(-1)), np.linspace(0.0, stats.TWO_PI, b + 1))
        tol = max(0.02, 3.0 * math.sqrt(b / (trials * n)))
        out.append(_lt("2pi/n periodicity defect", stats.periodicity_defect(h, n), tol, 0.0))
    if ens.field == "complex" and n >= 10:
        tv, tv2 = spacing_tv(eigs)
        out.append(_lt("spacing vs surmise (TV)", tv, 0.03, 0.0, f"TV vs unitary-class surmise = {tv2:.4f}"))
    if ens.field == "real":
        pts = _required_atoms(n, ens.det)
        if pts:
            out.append(_le("required eigenvalues +-1 (violations)", _count_missing(eigs, pts), 0, 0.0))
    return out


def _required_atoms(n: int, det: complex | None) -> tuple[float, ...]:
    """Eigenvalues forced by parity and determinant for real orthogonal matrices."""
    if det is None:
        return ()
    plus = det.real > 0
    if n % 2:
        return (1.0,) if plus else (-1.0,)
    return () if plus else (1.0, -1.0)
