"""Monte Carlo drivers shared by the CLI, the validation suite and scripts/.

Stream layout for a run seeded with ``seed``::

    RngStream(seed).split(0).split(b)   trials b*BLOCK .. (b+1)*BLOCK - 1, in order
    RngStream(seed).split(1)            auxiliary draws (e.g. picking one eigenvalue)

Blocks are independent, so results do not depend on the number of workers.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._errors import DomainError
from .factored_form import SampleSpec, sample_descending
from .haar_dense import sample_haar_dense
from .rand_dist import RngStream
from .unitary_qr import SolverOptions, eigenvalues

BLOCK = 256


@dataclass(frozen=True)
class Ensemble:
    """What to sample: order, field, determinant constraint."""

    n: int
    field: str = "complex"
    det: complex | None = None

    def spec(self, seed: int = 0) -> SampleSpec:
        return SampleSpec(self.n, self.field, self.det, seed)

    @property
    def label(self) -> str:
        group = "unitary" if self.field == "complex" else "orthog"
        if self.det is None:
            tag = "0"
        elif abs(self.det - 1) < 1e-12:
            tag = "1"
        elif abs(self.det + 1) < 1e-12:
            tag = "m1"
        else:
            tag = f"phase{math.atan2(self.det.imag, self.det.real):.6g}"
        return f"{group}-{self.n:02d}-{tag}"


def parse_det(text: str | None) -> complex | None:
    """``none``, ``+1``, ``-1`` or ``phase:<radians>``."""
    if text is None or text == "none":
        return None
    if text in ("+1", "1"):
        return 1.0 + 0j
    if text == "-1":
        return -1.0 + 0j
    if text.startswith("phase:"):
        return complex(np.exp(1j * float(text[6:])))
    raise DomainError(f"bad determinant spec {text!r}")


def condition_det(Q: np.ndarray, det: complex | None) -> np.ndarray:
    """Rescale the last column so that det Q = det (Haar measure conditioned on det)."""
    if det is None:
        return Q
    cur = np.linalg.det(Q)
    Q[:, -1] *= det / (cur / abs(cur))
    return Q


def _run_block(args):
    ens, seed, block, count, method, opts, chi_draw = args
    rng = RngStream(seed).split(0).split(block)
    spec = ens.spec(seed)
    out = np.empty((count, ens.n), dtype=complex)
    chases = 0
    for t in range(count):
        if method == "factored":
            res = eigenvalues(sample_descending(spec, rng, chi_draw=chi_draw), opts)
            out[t] = res.values
            chases += res.chases
        else:
            Q = condition_det(sample_haar_dense(ens.n, ens.field, rng), ens.det)
            out[t] = np.linalg.eigvals(Q)
    return out, chases


def sample_eigs(ens: Ensemble, trials: int, seed: int = 0, *, method: str = "factored",
                workers: int = 1, opts: SolverOptions = SolverOptions(),
                chi_draw: bool = True) -> np.ndarray:
    """Eigenvalues of ``trials`` sampled matrices, shape ``(trials, n)``."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    if method not in ("factored", "dense"):
        raise DomainError(f"unknown method {method!r}")
    jobs = []
    for b in range(math.ceil(trials / BLOCK)):
        count = min(BLOCK, trials - b * BLOCK)
        jobs.append((ens, seed, b, count, method, opts, chi_draw))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_run_block, jobs))
    else:
        parts = [_run_block(j) for j in jobs]
    return np.concatenate([p[0] for p in parts])


def pick_one(eigs: np.ndarray, seed: int) -> np.ndarray:
    """One uniformly chosen eigenvalue per row, using the auxiliary stream."""
    rng = RngStream(seed).split(1)
    u = rng.uniforms(eigs.shape[0])
    idx = np.minimum((u * eigs.shape[1]).astype(int), eigs.shape[1] - 1)
    return eigs[np.arange(eigs.shape[0]), idx]


# ---------------------------------------------------------------------------
# timing
# ---------------------------------------------------------------------------

def time_factored(n: int, seed: int = 0, repeats: int = 1) -> tuple[float, int]:
    """Best-of-``repeats`` wall time of sampling + solving, and the sweep count."""
    best, chases = math.inf, 0
    for r in range(repeats):
        rng = RngStream(seed).split(r)
        t0 = time.perf_counter()
        res = eigenvalues(sample_descending(SampleSpec(n), rng))
        best = min(best, time.perf_counter() - t0)
        chases = res.chases
    return best, chases


def time_dense(n: int, seed: int = 0, repeats: int = 1) -> float:
    best = math.inf
    for r in range(repeats):
        rng = RngStream(seed).split(r)
        t0 = time.perf_counter()
        sample_haar_dense(n, "complex", rng)
        best = min(best, time.perf_counter() - t0)
    return best


def loglog_slope(ns, times) -> float:
    return float(np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(times, float)), 1)[0])


def warmup() -> None:
    """Trigger numba compilation outside of any timed region."""
    eigenvalues(sample_descending(SampleSpec(8)))
