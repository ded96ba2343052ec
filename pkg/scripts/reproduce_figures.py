"""Write the phase and spacing histogram data for the standard ensembles.

Produces ``eig-dist-<label>.dat`` / ``eig-spacing-<label>.dat`` for each
ensemble plus ``surmise.dat`` (columns: z, surmise, unitary-class surmise)
for overlays.  Plotting is left to the reader's tool of choice.

    python scripts/reproduce_figures.py --trials 100000 --out figures/
"""

from __future__ import annotations

import argparse
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from haareig import stats
from haareig.experiments import Ensemble, sample_eigs

log = logging.getLogger("reproduce_figures")


@dataclass
class FigureConfig:
    trials: int = 10_000
    seed: int = 0
    workers: int = 1
    phase_bins: int = 50
    spacing_bins: int = 30
    out: Path = Path("figures")
    ensembles: list[Ensemble] = field(default_factory=lambda: [
        Ensemble(10),
        Ensemble(10, "complex", 1.0 + 0j),
        Ensemble(10, "real"),
        Ensemble(10, "real", 1.0 + 0j),
        Ensemble(10, "real", -1.0 + 0j),
        Ensemble(9, "real", 1.0 + 0j),
        Ensemble(9, "real", -1.0 + 0j),
    ])


def write_ensemble(cfg: FigureConfig, ens: Ensemble) -> dict:
    eigs = sample_eigs(ens, cfg.trials, cfg.seed, workers=cfg.workers)
    ph = stats.histogram(stats.phases(eigs.reshape(-1)), np.linspace(0, stats.TWO_PI, cfg.phase_bins + 1))
    sp = stats.histogram(np.concatenate([stats.spacings(r) for r in eigs]),
                         np.linspace(0, 3, cfg.spacing_bins + 1))
    (cfg.out / f"eig-dist-{ens.label}.dat").write_text(ph.to_text())
    (cfg.out / f"eig-spacing-{ens.label}.dat").write_text(sp.to_text())
    return {
        "label": ens.label,
        "tv_surmise": stats.tv_distance(sp, cdf=stats.wigner_cdf),
        "tv_unitary": stats.tv_distance(sp, stats.unitary_surmise_density),
        "clamped": sp.clamped,
    }


def write_overlay(cfg: FigureConfig, points: int = 301) -> None:
    z = np.linspace(0, 3, points)
    rows = np.column_stack([z, stats.wigner_density(z), stats.unitary_surmise_density(z)])
    np.savetxt(cfg.out / "surmise.dat", rows, fmt="%.10g")


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=FigureConfig.trials)
    p.add_argument("--seed", type=int, default=FigureConfig.seed)
    p.add_argument("--workers", type=int, default=FigureConfig.workers)
    p.add_argument("--out", type=Path, default=FigureConfig.out)
    a = p.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    cfg = FigureConfig(trials=a.trials, seed=a.seed, workers=a.workers, out=a.out)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_overlay(cfg)
    print("label\ttv_surmise\ttv_unitary_class\tclamped")
    for ens in cfg.ensembles:
        r = write_ensemble(cfg, ens)
        print(f"{r['label']}\t{r['tv_surmise']:.4f}\t{r['tv_unitary']:.4f}\t{r['clamped']}", flush=True)


if __name__ == "__main__":
    main()
