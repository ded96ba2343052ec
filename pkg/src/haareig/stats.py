"""Phase and spacing statistics of eigenvalue samples on the unit circle."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ._errors import DomainError

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class EigenSample:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).reshape(-1)
        if len(v) and np.max(np.abs(np.abs(v) - 1.0)) > 1e-12:
            raise DomainError("eigenvalues must have unit modulus")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class Histogram:
    """Density histogram; ``counts`` are kept so histograms can be merged."""

    edges: np.ndarray
    counts: np.ndarray
    clamped: int = 0

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def masses(self) -> np.ndarray:
        return self.counts / self.total

    @property
    def densities(self) -> np.ndarray:
        return self.masses / self.widths

    def merge(self, other: Histogram) -> Histogram:
        if not np.array_equal(self.edges, other.edges):
            raise DomainError("cannot merge histograms with different edges")
        return Histogram(self.edges, self.counts + other.counts, self.clamped + other.clamped)

    def to_text(self) -> str:
        """Two columns ``bin_left density`` plus a closing row at the last edge."""
        rows = [f"{float(e)!r} {float(p)!r}" for e, p in zip(self.edges[:-1], self.densities)]
        rows.append(f"{float(self.edges[-1])!r} 0.0")
        return "\n".join(rows) + "\n"

    @classmethod
    def from_text(cls, text: str) -> tuple[np.ndarray, np.ndarray]:
        """Parse ``to_text`` output into (edges, densities)."""
        data = np.loadtxt(text.splitlines(), ndmin=2)
        return data[:, 0], data[:-1, 1]


def phases(s: EigenSample | np.ndarray) -> np.ndarray:
    """Sorted phases in [0, 2 pi)."""
    v = s.values if isinstance(s, EigenSample) else np.asarray(s, dtype=complex)
    th = np.mod(np.angle(v), TWO_PI)
    th[th >= TWO_PI] = 0.0
    return np.sort(th)


def spacings(s: EigenSample | np.ndarray) -> np.ndarray:
    """Normalized gaps ``(n / 2 pi)(theta_{i+1} - theta_i)`` with wraparound."""
    th = phases(s)
    n = len(th)
    if n < 2:
        raise DomainError("spacings need at least two eigenvalues")
    gaps = np.diff(np.append(th, th[0] + TWO_PI))
    return gaps * (n / TWO_PI)


def wigner_density(z):
    """Surmise ``(pi z / 2) exp(-pi z^2 / 4)``."""
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise DomainError("spacing must be nonnegative")
    out = 0.5 * math.pi * z * np.exp(-0.25 * math.pi * z * z)
    return out if out.ndim else float(out)


def wigner_cdf(z):
    z = np.asarray(z, dtype=float)
    return 1.0 - np.exp(-0.25 * math.pi * np.maximum(z, 0.0) ** 2)


def unitary_surmise_density(z):
    """Two-level surmise for the unitary class, ``(32/pi^2) z^2 exp(-4 z^2 / pi)``.

    Used only as a diagnostic next to :func:`wigner_density`.
    """
    z = np.asarray(z, dtype=float)
    return 32.0 / math.pi**2 * z * z * np.exp(-4.0 * z * z / math.pi)


def histogram(values, edges) -> Histogram:
    """Bin ``values`` on ``edges`` (bins are [e_i, e_{i+1})).

    Out-of-range values go to the nearest boundary bin and are counted in
    ``Histogram.clamped``.
    """
    edges = np.asarray(edges, dtype=float)
    values = np.asarray(values, dtype=float).reshape(-1)
    if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
        raise DomainError("edges must be strictly increasing with at least two entries")
    if len(values) == 0:
        raise DomainError("cannot build a histogram from no values")
    idx = np.searchsorted(edges, values, side="right") - 1
    nb = len(edges) - 1
    out = (idx < 0) | (idx >= nb)
    clamped = int(out.sum())
    if clamped:
        log.debug("histogram: %d values outside [%g, %g) clamped", clamped, edges[0], edges[-1])
    idx = np.clip(idx, 0, nb - 1)
    counts = np.bincount(idx, minlength=nb).astype(np.int64)
    return Histogram(edges, counts, clamped)


def ks_uniform_phase(samples) -> float:
    """Kolmogorov-Smirnov statistic of ``samples`` in [0, 2 pi) against the uniform law."""
    x = np.sort(np.asarray(samples, dtype=float).reshape(-1)) / TWO_PI
    n = len(x)
    if n == 0:
        raise DomainError("empty sample")
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - x), np.max(x - (i - 1) / n)))


def ks_critical(n: int, alpha: float = 0.01) -> float:
    """Asymptotic one-sample KS critical value (1.63/sqrt(n) at alpha = 0.01)."""
    c = {0.01: 1.63, 0.05: 1.36, 0.1: 1.22}[alpha]
    return c / math.sqrt(n)


def bin_masses(edges, density=None, cdf=None) -> np.ndarray:
    """Probability mass of a density on each bin (exact with ``cdf``, else quadrature)."""
    edges = np.asarray(edges, dtype=float)
    if cdf is not None:
        return np.diff(cdf(edges))
    return np.array([integrate.quad(density, a, b)[0] for a, b in zip(edges[:-1], edges[1:])])


def tv_distance(h: Histogram, density=None, cdf=None) -> float:
    """Total variation between a histogram and a probability density.

    The density's mass outside the histogram support counts fully toward the
    distance (the density is assumed to have total mass one).
    """
    p = bin_masses(h.edges, density, cdf)
    outside = max(0.0, 1.0 - float(p.sum()))
    return 0.5 * (float(np.abs(p - h.masses).sum()) + outside)


def periodicity_defect(h: Histogram, n: int) -> float:
    """TV distance between a phase histogram and its rotation by 2 pi / n."""
    b = len(h.counts)
    if n < 1 or b % n:
        raise DomainError(f"bin count {b} is not divisible by n = {n}")
    m = h.masses
    return 0.5 * float(np.abs(m - np.roll(m, b // n)).sum())


def circular_distance(theta, theta0) -> np.ndarray:
    d = np.mod(np.asarray(theta, dtype=float) - theta0, TWO_PI)
    return np.minimum(d, TWO_PI - d)


def atom_mass(samples, theta0: float, tol: float) -> float:
    """Fraction of phases within ``tol`` of ``theta0`` on the circle."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    x = np.asarray(samples, dtype=float).reshape(-1)
    if len(x) == 0:
        return 0.0
    return float(np.mean(circular_distance(x, theta0) <= tol))


def has_atom(values, point: complex, tol: float) -> bool:
    """Whether some eigenvalue lies within ``tol`` of ``point``."""
    return bool(np.min(np.abs(np.asarray(values) - point)) <= tol)
