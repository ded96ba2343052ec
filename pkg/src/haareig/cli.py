"""Command-line front end: ``haareig {sample,hist,validate,bench}``."""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import stats
from ._errors import ConvergenceError, DomainError
from .experiments import BLOCK, Ensemble, _run_block, loglog_slope, parse_det
from .rand_dist import check_seed
from .unitary_qr import SolverOptions
from .validation import DENSE_SIZES, FACTORED_SIZES, config_suite, run_bench

log = logging.getLogger("haareig")

SEED_ENV = "HAAREIG_SEED"
COMMANDS = ("sample", "hist", "validate", "bench")


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int = 10
    field: str = "complex"
    det: str = "none"
    trials: int = 10_000
    bins: int | None = None
    seed: int = 0
    method: str = "factored"
    out: str | None = None
    workers: int = 1
    sizes: tuple[int, ...] | None = None
    mutant: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if self.field not in ("real", "complex"):
            raise DomainError("field must be real or complex")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if self.command == "hist" and self.bins is not None and self.bins < 2:
            raise DomainError("bins must be >= 2")
        if self.det.startswith("phase:") and self.field != "complex":
            raise DomainError("det=phase:<r> needs field=complex")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")
        check_seed(self.seed)
        self.ensemble  # validates det

    @property
    def ensemble(self) -> Ensemble:
        return Ensemble(self.n, self.field, parse_det(self.det))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _open_out(path: str | None):
    return sys.stdout if path in (None, "-") else open(path, "w", encoding="ascii")


def cmd_sample(cfg: RunConfig) -> int:
    """CSV rows ``trial_index,Re,Im``; a failed solve ends the file with a comment."""
    ens = cfg.ensemble
    opts = SolverOptions()
    fh = _open_out(cfg.out)
    status = 0
    try:
        fh.write("trial_index,re,im\n")
        for b in range(math.ceil(cfg.trials / BLOCK)):
            count = min(BLOCK, cfg.trials - b * BLOCK)
            try:
                vals, _ = _run_block((ens, cfg.seed, b, count, cfg.method, opts, True))
            except ConvergenceError as e:
                fh.write(f"# incomplete: solver failed in block {b}: {e}\n")
                status = 2
                break
            for t, row in enumerate(vals):
                idx = b * BLOCK + t
                fh.writelines(f"{idx},{float(z.real)!r},{float(z.imag)!r}\n" for z in row)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return status


def cmd_hist(cfg: RunConfig) -> int:
    """Phase and spacing histograms as ``eig-dist-<label>.dat`` / ``eig-spacing-<label>.dat``."""
    from .experiments import sample_eigs

    ens = cfg.ensemble
    outdir = Path(cfg.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    eigs = sample_eigs(ens, cfg.trials, cfg.seed, method=cfg.method, workers=cfg.workers)
    pbins = cfg.bins or 50
    h = stats.histogram(stats.phases(eigs.reshape(-1)), np.linspace(0.0, stats.TWO_PI, pbins + 1))
    (outdir / f"eig-dist-{ens.label}.dat").write_text(h.to_text())
    written = [f"eig-dist-{ens.label}.dat"]
    if ens.n >= 2:
        sp = np.concatenate([stats.spacings(row) for row in eigs])
        hs = stats.histogram(sp, np.linspace(0.0, 3.0, 31))
        (outdir / f"eig-spacing-{ens.label}.dat").write_text(hs.to_text())
        written.append(f"eig-spacing-{ens.label}.dat")
        log.info("spacing TV vs surmise: %.4f (%d clamped)",
                 stats.tv_distance(hs, cdf=stats.wigner_cdf), hs.clamped)
    for name in written:
        print(outdir / name)
    return 0


def cmd_validate(cfg: RunConfig) -> int:
    results = config_suite(cfg.ensemble, cfg.trials, cfg.seed, cfg.method, cfg.workers,
                           cfg.bins, chi_draw=cfg.mutant != "skip-chi")
    fh = _open_out(cfg.out)
    try:
        fh.write("# criterion\tstatistic\tthreshold\tresult\ttime\n")
        for r in results:
            fh.write(r.line() + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0 if all(r.passed for r in results) else 1


def cmd_bench(cfg: RunConfig) -> int:
    if cfg.sizes:
        fsizes = dsizes = cfg.sizes
    else:
        fsizes, dsizes = FACTORED_SIZES, DENSE_SIZES
    if cfg.method == "dense":
        fsizes = ()
    rows = run_bench(fsizes, dsizes, cfg.seed)
    fh = _open_out(cfg.out)
    try:
        fh.write("n\tmethod\tseconds\tchases\n")
        for n, m, s, ch in rows:
            fh.write(f"{n}\t{m}\t{s:.6g}\t{ch}\n")
        for m in ("factored", "dense"):
            pts = [(n, s) for n, mm, s, _ in rows if mm == m]
            if len(pts) >= 2:
                fh.write(f"# slope {m} {loglog_slope(*zip(*pts)):.3f}\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


HANDLERS = {"sample": cmd_sample, "hist": cmd_hist, "validate": cmd_validate, "bench": cmd_bench}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="haareig", description="Haar unitary/orthogonal eigenvalues in O(n^2).")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("sample", "write eigenvalues as CSV"),
        ("hist", "write phase and spacing histograms"),
        ("validate", "run the statistical checks for one ensemble"),
        ("bench", "time factored and dense samplers"),
    ]:
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--n", type=int, default=10)
        s.add_argument("--field", choices=("real", "complex"), default="complex")
        s.add_argument("--det", default="none", help="none, +1, -1 or phase:<radians>")
        s.add_argument("--trials", type=int, default=10_000)
        s.add_argument("--bins", type=int, default=None)
        s.add_argument("--seed", type=int, default=None, help=f"default 0, or ${SEED_ENV}")
        s.add_argument("--method", choices=("factored", "dense"), default="factored")
        s.add_argument("--out", default=None, help="output file (directory for hist)")
        s.add_argument("--workers", type=int, default=1)
        if name == "bench":
            s.add_argument("--sizes", type=lambda t: tuple(int(x) for x in t.split(",")), default=None,
                           help="comma-separated orders")
        if name == "validate":
            s.add_argument("--mutant", choices=("skip-chi",), default=None, help=argparse.SUPPRESS)
    return p


def config_from_args(ns: argparse.Namespace, env=os.environ) -> RunConfig:
    seed = ns.seed
    if seed is None:
        seed = int(env.get(SEED_ENV, "0"))
    return RunConfig(
        command=ns.command, n=ns.n, field=ns.field, det=ns.det, trials=ns.trials, bins=ns.bins,
        seed=seed, method=ns.method, out=ns.out, workers=ns.workers,
        sizes=getattr(ns, "sizes", None), mutant=getattr(ns, "mutant", None),
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(ns)
    except (DomainError, ValueError) as e:
        parser.error(str(e))
    try:
        return HANDLERS[cfg.command](cfg)
    except OSError as e:
        print(f"haareig: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
