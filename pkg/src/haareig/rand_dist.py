"""Seedable random variates for the samplers.

Every stream is a numpy ``PCG64`` generator keyed by a ``SeedSequence``.  A
stream created from ``seed`` with child path ``(i, j, ...)`` uses
``SeedSequence(seed, spawn_key=(i, j, ...))``, so ``RngStream(s).split(i)`` is
reproducible without touching the parent's state.

All variates are built from one primitive, a uniform double in [0, 1) drawn
from a buffered block of ``PCG64`` outputs (one 64-bit word per double, so the
transcript does not depend on buffer size).  Normals use the Marsaglia polar
method and chi variates use Marsaglia--Tsang gamma rejection.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from ._errors import DomainError

GENERATOR_NAME = "PCG64"
GENERATOR_VERSION = 1
SEED_MAX = 2**64 - 1

_BLOCK = 4096


# Kernels below consume uniforms from ``buf`` starting at ``pos`` and return the
# new position, or -1 if the buffer ran out (the caller refills and retries from
# the same position, so the transcript is unchanged).

@njit(cache=True)
def _polar(buf, pos):
    n = buf.shape[0]
    while pos + 2 <= n:
        u = 2.0 * buf[pos] - 1.0
        v = 2.0 * buf[pos + 1] - 1.0
        pos += 2
        r2 = u * u + v * v
        if 0.0 < r2 < 1.0:
            f = math.sqrt(-2.0 * math.log(r2) / r2)
            return u * f, v * f, pos
    return 0.0, 0.0, -1


@njit(cache=True)
def _gamma_ge1(buf, pos, shape):
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x, _, pos = _polar(buf, pos)
        if pos < 0:
            return 0.0, -1
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        if pos >= buf.shape[0]:
            return 0.0, -1
        u = buf[pos]
        pos += 1
        x2 = x * x
        if u < 1.0 - 0.0331 * x2 * x2:
            return d * v, pos
        if u > 0.0 and math.log(u) < 0.5 * x2 + d * (1.0 - v + math.log(v)):
            return d * v, pos


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


class RngStream:
    """Single-owner deterministic random stream.

    Parameters
    ----------
    seed : int
        64-bit unsigned seed.
    path : tuple of int
        Child indices; use :meth:`split` rather than passing this directly.
    """

    def __init__(self, seed: int = 0, path: tuple[int, ...] = ()):
        self.seed = check_seed(seed)
        self.path = tuple(int(p) for p in path)
        ss = np.random.SeedSequence(self.seed, spawn_key=self.path)
        self._gen = np.random.Generator(np.random.PCG64(ss))
        self._buf = np.empty(0)
        self._pos = 0

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, path={self.path})"

    def split(self, index: int) -> RngStream:
        """Independent child stream number ``index``."""
        if index < 0:
            raise DomainError("child index must be nonnegative")
        return RngStream(self.seed, self.path + (index,))

    # -- raw uniforms ------------------------------------------------------

    def uniform(self) -> float:
        if self._pos >= len(self._buf):
            self._refill()
        u = self._buf[self._pos]
        self._pos += 1
        return float(u)

    def _refill(self) -> None:
        """Keep unread uniforms and append a fresh block."""
        self._buf = np.concatenate([self._buf[self._pos:], self._gen.random(_BLOCK)])
        self._pos = 0

    def uniforms(self, size: int) -> np.ndarray:
        """``size`` consecutive uniforms from the same transcript as :meth:`uniform`."""
        out = np.empty(size)
        filled = 0
        while filled < size:
            if self._pos >= len(self._buf):
                self._buf = self._gen.random(max(_BLOCK, size - filled))
                self._pos = 0
            take = min(size - filled, len(self._buf) - self._pos)
            out[filled:filled + take] = self._buf[self._pos:self._pos + take]
            self._pos += take
            filled += take
        return out

    # -- normals -----------------------------------------------------------

    def normal_pair(self) -> tuple[float, float]:
        """Two independent N(0, 1) values from one accepted polar proposal."""
        while True:
            x, y, pos = _polar(self._buf, self._pos)
            if pos >= 0:
                self._pos = pos
                return x, y
            self._refill()

    def std_normal_real(self) -> float:
        return self.normal_pair()[0]

    def std_normal_complex(self) -> complex:
        x, y = self.normal_pair()
        return complex(x, y) * math.sqrt(0.5)

    def normal_array(self, size: int) -> np.ndarray:
        """Vectorized polar method; ``size`` iid N(0, 1) values."""
        out = np.empty(size)
        filled = 0
        while filled < size:
            need = (size - filled + 1) // 2
            m = int(need * 1.3) + 8
            uv = 2.0 * self.uniforms(2 * m) - 1.0
            u, v = uv[0::2], uv[1::2]
            r2 = u * u + v * v
            ok = (r2 > 0.0) & (r2 < 1.0)
            u, v, r2 = u[ok], v[ok], r2[ok]
            f = np.sqrt(-2.0 * np.log(r2) / r2)
            vals = np.empty(2 * len(u))
            vals[0::2] = u * f
            vals[1::2] = v * f
            take = min(size - filled, len(vals))
            out[filled:filled + take] = vals[:take]
            filled += take
        return out

    def normal_vector(self, size: int, field: str) -> np.ndarray:
        """Draw from N_R(0,1)^size or N_C(0,1)^size as a complex array."""
        if field == "real":
            return self.normal_array(size).astype(complex)
        z = self.normal_array(2 * size)
        return (z[0::2] + 1j * z[1::2]) * math.sqrt(0.5)

    # -- gamma / chi -------------------------------------------------------

    def gamma(self, shape: float) -> float:
        """Gamma(shape, scale=1) by Marsaglia--Tsang rejection."""
        if shape <= 0:
            raise DomainError("gamma shape must be positive")
        if shape < 1.0:
            g = self.gamma(shape + 1.0)
            return g * self.uniform() ** (1.0 / shape)
        while True:
            g, pos = _gamma_ge1(self._buf, self._pos, float(shape))
            if pos >= 0:
                self._pos = pos
                return g
            self._refill()

    def chi_sq_real(self, k: int) -> float:
        _check_dof(k)
        return 2.0 * self.gamma(0.5 * k)

    def chi_real(self, k: int) -> float:
        """sqrt of a chi^2_R(k) draw."""
        return math.sqrt(self.chi_sq_real(k))

    def chi_complex_sq(self, k: int) -> float:
        """chi^2_C(k) draw, i.e. chi^2_R(2k) / 2."""
        _check_dof(k)
        return 0.5 * self.chi_sq_real(2 * k)

    def chi_real_by_sum(self, k: int) -> float:
        """Reference sampler: sqrt of an explicit sum of k squared normals."""
        _check_dof(k)
        if k > 64:
            raise DomainError("sum-of-squares reference sampler is limited to k <= 64")
        return math.sqrt(sum(self.std_normal_real() ** 2 for _ in range(k)))

    def uniform_phase(self) -> float:
        """Uniform on (-pi, pi]."""
        return math.pi - 2.0 * math.pi * self.uniform()


def _check_dof(k: int) -> None:
    if int(k) != k or k < 1:
        raise DomainError(f"degrees of freedom must be a positive integer, got {k}")


# Functional aliases matching the operation names used across the package.

def std_normal_real(rng: RngStream) -> float:
    return rng.std_normal_real()


def std_normal_complex(rng: RngStream) -> complex:
    return rng.std_normal_complex()


def chi_real(k: int, rng: RngStream) -> float:
    return rng.chi_real(k)


def chi_complex_sq(k: int, rng: RngStream) -> float:
    return rng.chi_complex_sq(k)


def uniform_phase(rng: RngStream) -> float:
    return rng.uniform_phase()
