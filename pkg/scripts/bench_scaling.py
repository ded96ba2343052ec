"""Time the factored and dense samplers and fit log-log slopes.

    python scripts/bench_scaling.py --out bench.tsv
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from haareig.experiments import loglog_slope
from haareig.validation import DENSE_SIZES, FACTORED_SIZES, run_bench


@dataclass
class BenchConfig:
    factored_sizes: tuple[int, ...] = FACTORED_SIZES
    dense_sizes: tuple[int, ...] = DENSE_SIZES
    seed: int = 0
    out: Path | None = None


def run(cfg: BenchConfig) -> str:
    rows = run_bench(cfg.factored_sizes, cfg.dense_sizes, cfg.seed)
    lines = ["n\tmethod\tseconds\tchases"]
    lines += [f"{n}\t{m}\t{s:.6g}\t{c}" for n, m, s, c in rows]
    for method in ("factored", "dense"):
        pts = [(n, s) for n, m, s, _ in rows if m == method]
        if len(pts) >= 2:
            lines.append(f"# slope {method} {loglog_slope(*zip(*pts)):.3f}")
    fac = {n: s for n, m, s, _ in rows if m == "factored"}
    den = {n: s for n, m, s, _ in rows if m == "dense"}
    for n in sorted(set(fac) & set(den)):
        lines.append(f"# speedup n={n} {den[n] / fac[n]:.1f}x")
    return "\n".join(lines) + "\n"


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--quick", action="store_true", help="sizes 64..512 only")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=None)
    a = p.parse_args(argv)
    cfg = BenchConfig(seed=a.seed, out=a.out)
    if a.quick:
        cfg.factored_sizes = cfg.dense_sizes = (64, 128, 256, 512)
    text = run(cfg)
    print(text, end="")
    if cfg.out:
        cfg.out.write_text(text)


if __name__ == "__main__":
    main()
