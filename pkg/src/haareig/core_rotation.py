"""Core transformations: plane rotations with complex cosine and real sine.

A rotation ``G(c, s)`` is the 2x2 block ``[[c, s], [-s, conj(c)]]`` embedded
on two adjacent indices; it has determinant one.  This module provides the
four primitives the core-chasing eigensolver is built from (refactoring a 2x2
unitary, fusion, diagonal passthrough and turnover) twice over:

* scalar kernels compiled with numba (leading underscore), called in the
  solver's inner loop, and
* a small value-type API (:class:`CoreRotation`, :class:`DiagonalPair`,
  :class:`IndexedRotation`) on top of the same kernels, plus dense
  materializations used as test oracles.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from ._errors import DomainError

log = logging.getLogger(__name__)

TINY = 1e-300


# ---------------------------------------------------------------------------
# compiled scalar kernels
# ---------------------------------------------------------------------------

@njit(cache=True)
def _phase(z):
    """e^{i Arg z}; Arg of a (numerically) zero value is taken as 0."""
    a = abs(z)
    if a < TINY:
        return 1.0 + 0.0j
    return z / a


@njit(cache=True)
def _unimodular(z):
    a = abs(z)
    if a < TINY:
        return 1.0 + 0.0j
    return z / a


@njit(cache=True)
def _renorm(c, s):
    nrm = math.sqrt(c.real * c.real + c.imag * c.imag + s * s)
    if nrm < TINY:
        return 1.0 + 0.0j, 0.0
    return c / nrm, s / nrm


@njit(cache=True)
def _rot_from_u(u11, u12, u21, u22):
    """Split a 2x2 unitary as G(c, s) diag(d1, d2) with s real (s <= 0)."""
    e = np.conj(_phase(u21))  # e^{i theta}, theta = Arg(conj(u21))
    c = u11 * e
    s = -(u21 * e).real
    d1 = np.conj(e) * (abs(u11) ** 2) + e * u21 * u21
    d2 = e * (u11 * u22 - u21 * u12)
    c, s = _renorm(c, s)
    return c, s, _unimodular(d1), _unimodular(d2)


@njit(cache=True)
def _mul2(c1, s1, c2, s2):
    """Entries of G(c1, s1) G(c2, s2)."""
    u11 = c1 * c2 - s1 * s2
    u12 = c1 * s2 + s1 * np.conj(c2)
    u21 = -s1 * c2 - np.conj(c1) * s2
    u22 = -s1 * s2 + np.conj(c1) * np.conj(c2)
    return u11, u12, u21, u22


@njit(cache=True)
def _fuse(c1, s1, c2, s2):
    u11, u12, u21, u22 = _mul2(c1, s1, c2, s2)
    return _rot_from_u(u11, u12, u21, u22)


@njit(cache=True)
def _fuse_left(c1, s1, c2, s2):
    """G(c1, s1) G(c2, s2) = diag(p, conj(p)) G(c, s); returns (p, c, s)."""
    u11, u12, u21, u22 = _mul2(c1, s1, c2, s2)
    p = _phase(u12)
    c, s = _renorm(np.conj(p) * u11, abs(u12))
    return p, c, s


@njit(cache=True)
def _pass_left(d1, d2, c, s):
    """diag(d1, d2) G(c, s) = G(c', s) diag(d2, d1); returns c'."""
    return c * d1 * np.conj(d2)


@njit(cache=True)
def _pass_right(c, s, d1, d2):
    """G(c, s) diag(d1, d2) = diag(d2, d1) G(c', s); returns c'."""
    return c * d1 * np.conj(d2)


@njit(cache=True)
def _zeroing(x1, x2):
    """Rotation whose first column is parallel to (x1, x2)."""
    r = math.hypot(abs(x1), abs(x2))
    if r < TINY:
        return 1.0 + 0.0j, 0.0
    e = np.conj(_phase(x2))
    return _renorm(x1 * e / r, -abs(x2) / r)


@njit(cache=True)
def _turnover(ca, sa, cb, sb, cc, sc):
    """A_i B_{i+1} C_i = X_{i+1} Y_i Z_{i+1}; returns (cx, sx, cy, sy, cz, sz)."""
    # first column of the product; its last entry is real
    m0 = ca * cc - sa * cb * sc
    m1 = -sa * cc - np.conj(ca) * cb * sc
    m2 = sb * sc
    r1 = math.hypot(abs(m1), m2)
    nrm = math.hypot(abs(m0), r1)
    cy = m0 / nrm
    sy = -r1 / nrm
    if r1 < TINY:
        # product is diag(m0, W); X is free up to a phase, chosen so that
        # Z's off-diagonal (cy conj(cx) times the (2,3) entry) comes out real
        cx = _phase(cy * np.conj(ca) * sb)
        sx = 0.0
    else:
        cx = m1 / r1
        sx = -m2 / r1
    # row 1 of Y^* X^* against columns 1 and 2 of the product
    w0 = sy
    w1 = cy * np.conj(cx)
    w2 = -cy * sx
    col1_0 = ca * sc + sa * cb * np.conj(cc)
    col1_1 = -sa * sc + np.conj(ca) * cb * np.conj(cc)
    col1_2 = -sb * np.conj(cc)
    col2_0 = sa * sb
    col2_1 = np.conj(ca) * sb
    col2_2 = np.conj(cb)
    cz = w0 * col1_0 + w1 * col1_1 + w2 * col1_2
    sz = (w0 * col2_0 + w1 * col2_1 + w2 * col2_2).real
    cx, sx = _renorm(cx, sx)
    cy, sy = _renorm(cy, sy)
    cz, sz = _renorm(cz, sz)
    return cx, sx, cy, sy, cz, sz


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoreRotation:
    """``[[c, s], [-s, conj(c)]]``; normalized on construction."""

    c: complex
    s: float

    def __post_init__(self):
        c, s = complex(self.c), float(np.real(self.s))
        nrm = math.sqrt(abs(c) ** 2 + s * s)
        if nrm < TINY or not math.isfinite(nrm):
            raise DomainError("rotation parameters must be finite and not both zero")
        object.__setattr__(self, "c", c / nrm)
        object.__setattr__(self, "s", s / nrm)

    @classmethod
    def identity(cls) -> CoreRotation:
        return cls(1.0, 0.0)

    @classmethod
    def _exact(cls, c: complex, s: float) -> CoreRotation:
        """Skip renormalization (for updates that keep |c| and s unchanged)."""
        g = object.__new__(cls)
        object.__setattr__(g, "c", complex(c))
        object.__setattr__(g, "s", float(s))
        return g

    def conj_transpose(self) -> CoreRotation:
        return CoreRotation(self.c.conjugate(), -self.s)

    def dense(self) -> np.ndarray:
        return dense2(self)


@dataclass(frozen=True)
class DiagonalPair:
    d1: complex
    d2: complex

    def __post_init__(self):
        for name in ("d1", "d2"):
            z = complex(getattr(self, name))
            if abs(abs(z) - 1.0) > 1e-12:
                raise DomainError(f"{name} must be unimodular, got |{name}| = {abs(z)}")
            object.__setattr__(self, name, z / abs(z))

    @classmethod
    def identity(cls) -> DiagonalPair:
        return cls(1.0, 1.0)

    def dense(self) -> np.ndarray:
        return np.diag([self.d1, self.d2])


@dataclass(frozen=True)
class IndexedRotation:
    """A rotation acting on the 1-based plane (j, j+1)."""

    rot: CoreRotation
    j: int

    def __post_init__(self):
        if self.j < 1:
            raise DomainError("rotation index is 1-based and must be >= 1")


def _rot(c, s) -> CoreRotation:
    return CoreRotation(complex(c), float(s))


def _pair(d1, d2) -> DiagonalPair:
    return DiagonalPair(complex(d1), complex(d2))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def rotation_from_unitary2(U) -> tuple[CoreRotation, DiagonalPair]:
    """Factor a 2x2 unitary ``U`` as ``G(c, s) diag(d1, d2)`` with real ``s``.

    Uses theta = Arg(conj(u21)), c = u11 e^{i theta}, s = -u21 e^{i theta}.
    """
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2):
        raise DomainError("expected a 2x2 matrix")
    defect = np.abs(U.conj().T @ U - np.eye(2)).max()
    if not defect <= 1e-10:
        raise DomainError(f"input is not unitary (defect {defect:.3g})")
    c, s, d1, d2 = _rot_from_u(U[0, 0], U[0, 1], U[1, 0], U[1, 1])
    return _rot(c, s), _pair(d1, d2)


def fuse(a: CoreRotation, b: CoreRotation) -> tuple[CoreRotation, DiagonalPair]:
    """Refactor the product ``a b`` of two rotations on the same plane."""
    c, s, d1, d2 = _fuse(a.c, a.s, b.c, b.s)
    return _rot(c, s), _pair(d1, d2)


def passthrough_left(d: DiagonalPair, g: CoreRotation) -> tuple[CoreRotation, DiagonalPair]:
    """``diag(d1, d2) G = G' diag(d2, d1)``."""
    c = _pass_left(d.d1, d.d2, g.c, g.s)
    return CoreRotation._exact(c, g.s), DiagonalPair(d.d2, d.d1)


def passthrough_right(g: CoreRotation, d: DiagonalPair) -> tuple[DiagonalPair, CoreRotation]:
    """``G diag(d1, d2) = diag(d2, d1) G'``."""
    c = _pass_right(g.c, g.s, d.d1, d.d2)
    return DiagonalPair(d.d2, d.d1), CoreRotation._exact(c, g.s)


def turnover(a: IndexedRotation, b: IndexedRotation, c: IndexedRotation):
    """Refactor a rotation triple at planes (i, i+1, i) into planes (i+1, i, i+1).

    The dense product is preserved.  When the product is diagonal the two
    outer outputs are identities and the phases sit in the middle rotation.
    """
    i = a.j
    if b.j != i + 1 or c.j != i:
        raise DomainError(f"turnover expects index pattern (i, i+1, i), got ({a.j}, {b.j}, {c.j})")
    cx, sx, cy, sy, cz, sz = _turnover(a.rot.c, a.rot.s, b.rot.c, b.rot.s, c.rot.c, c.rot.s)
    if sx == 0.0 and sz == 0.0:
        log.debug("turnover at plane %d: diagonal product", i)
    return (
        IndexedRotation(_rot(cx, sx), i + 1),
        IndexedRotation(_rot(cy, sy), i),
        IndexedRotation(_rot(cz, sz), i + 1),
    )


def dense2(g: CoreRotation) -> np.ndarray:
    return np.array([[g.c, g.s], [-g.s, g.c.conjugate()]], dtype=complex)


def embed(g: CoreRotation, j: int, n: int) -> np.ndarray:
    """n x n matrix of ``g`` acting on the 1-based plane (j, j+1)."""
    M = np.eye(n, dtype=complex)
    M[j - 1:j + 1, j - 1:j + 1] = dense2(g)
    return M


def dense3(a: IndexedRotation, b: IndexedRotation, c: IndexedRotation) -> np.ndarray:
    """3x3 product of three rotations living on the planes of a 3-index window."""
    base = min(r.j for r in (a, b, c))
    if max(r.j for r in (a, b, c)) - base > 1:
        raise DomainError("rotations do not fit in a 3x3 window")
    out = np.eye(3, dtype=complex)
    for r in (a, b, c):
        out = out @ embed(r.rot, r.j - base + 1, 3)
    return out
