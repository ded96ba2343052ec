"""Single-shift core-chasing QR for unitary Hessenberg matrices.

The input is ``H = G_1 ... G_{n-1} D`` (:class:`DescendingFactorization`).
Every sweep

1. builds the rotation ``B`` whose first column is parallel to the first
   column of ``H - rho I`` on the active window,
2. fuses ``B^*`` into the top rotation and moves the leftover diagonal to
   ``D`` by a diagonal similarity,
3. passes ``B`` through ``D`` and drives it down the descending sequence with
   turnovers, passing it through ``D`` after each similarity,
4. fuses it into the bottom rotation of the window.

Because the triangular factor of a unitary Hessenberg matrix is diagonal,
each passthrough costs O(1), so a sweep costs O(window) and the whole solve
O(n^2) with O(n) memory.  Rotations with ``|s| <= tol`` are deflated by a
diagonal similarity that moves their phases into ``D``.

Indices in the compiled kernels are 0-based: rotation ``k`` acts on rows
``k, k+1``.  :class:`ChaseState` reports 1-based window bounds.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ._errors import ConvergenceError, DomainError
from .core_rotation import (
    TINY, _fuse, _fuse_left, _pass_left, _pass_right, _turnover, _unimodular, _zeroing,
)
from .factored_form import DescendingFactorization

log = logging.getLogger(__name__)

# golden-angle sequence for exceptional shifts
_EXC_PERIOD = 10
_GOLDEN = 0.6180339887498949


@dataclass(frozen=True)
class SolverOptions:
    deflation_tol: float = 1e-14
    max_iter_per_eig: int = 30

    def __post_init__(self):
        if not 0.0 <= self.deflation_tol < 1e-6:
            raise DomainError("deflation_tol must lie in [0, 1e-6)")
        if self.max_iter_per_eig < 1:
            raise DomainError("max_iter_per_eig must be >= 1")


@dataclass
class EigenResult:
    """Eigenvalues plus solver counters."""

    values: np.ndarray
    chases: int
    turnovers: int
    max_drift: float

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


@dataclass
class ChaseState:
    """Mutable solver state over a private copy of the factorization."""

    c: np.ndarray
    s: np.ndarray
    d: np.ndarray
    active_lo: int
    active_hi: int
    iteration_count: int = 0
    turnovers: int = 0
    eigenvalues_out: list = field(default_factory=list)
    done: np.ndarray | None = None

    @classmethod
    def from_factorization(cls, f: DescendingFactorization) -> ChaseState:
        n = f.n
        return cls(np.array(f.c, dtype=complex), np.array(f.s, dtype=float),
                   np.array(f.d, dtype=complex), 1, n, done=np.zeros(n, dtype=np.bool_))

    @property
    def n(self) -> int:
        return len(self.d)

    def factorization(self, field: str = "complex") -> DescendingFactorization:
        return DescendingFactorization(self.n, self.c.copy(), self.s.copy(), self.d.copy(), field=field)


# ---------------------------------------------------------------------------
# compiled kernels
# ---------------------------------------------------------------------------

@njit(cache=True)
def _entry(c, s, d, i, j):
    """0-based h_ij of G_1 ... G_{n-1} D."""
    n = d.shape[0]
    if i > j + 1:
        return 0.0 + 0.0j
    if i == j + 1:
        return -s[j] * d[j]
    left = np.conj(c[i - 1]) if i >= 1 else 1.0 + 0.0j
    right = c[j] if j <= n - 2 else 1.0 + 0.0j
    prod = 1.0
    for k in range(i, j):
        prod *= s[k]
    return left * prod * right * d[j]


@njit(cache=True)
def _wilkinson(c, s, d, hi):
    """Eigenvalue of rows/cols hi-1, hi nearest h[hi, hi], projected to S^1."""
    a = _entry(c, s, d, hi - 1, hi - 1)
    b = _entry(c, s, d, hi - 1, hi)
    g = _entry(c, s, d, hi, hi - 1)
    e = _entry(c, s, d, hi, hi)
    half = 0.5 * (a + e)
    disc = np.sqrt(0.25 * (a - e) * (a - e) + b * g)
    l1 = half + disc
    l2 = half - disc
    r1 = abs(l1 - e)
    r2 = abs(l2 - e)
    if r1 < r2:
        mu = l1
    elif r2 < r1:
        mu = l2
    elif l1.imag >= l2.imag:
        mu = l1
    else:
        mu = l2
    if abs(mu) < TINY:
        return 1.0 + 0.0j
    return mu / abs(mu)


@njit(cache=True)
def _chase(c, s, d, lo, hi, rho):
    """One shifted similarity sweep on rows lo..hi (hi - lo >= 1); returns #turnovers."""
    x1 = c[lo] * d[lo] - rho
    x2 = -s[lo] * d[lo]
    cb, sb = _zeroing(x1, x2)
    # B^* G_lo = diag(p, conj p) G'; the diagonal is moved to the right end
    p, c0, s0 = _fuse_left(np.conj(cb), -sb, c[lo], s[lo])
    c[lo] = c0
    s[lo] = s0
    # ... D B E with E = diag(p, conj p): B E = diag(conj p, p) G(cb p^2, sb)
    cm = _pass_right(cb, sb, p, np.conj(p))
    d[lo] = _unimodular(d[lo] * np.conj(p))
    d[lo + 1] = _unimodular(d[lo + 1] * p)
    # D G_m = G_m' D' (swap)
    cm = _pass_left(d[lo], d[lo + 1], cm, sb)
    tmp = d[lo]
    d[lo] = d[lo + 1]
    d[lo + 1] = tmp
    sm = sb
    k = lo
    nturn = 0
    while k < hi - 1:
        cx, sx, cy, sy, cz, sz = _turnover(c[k], s[k], c[k + 1], s[k + 1], cm, sm)
        c[k] = cy
        s[k] = sy
        c[k + 1] = cz
        s[k + 1] = sz
        nturn += 1
        k += 1
        # similarity moves X from the far left to the far right, through D
        cm = _pass_left(d[k], d[k + 1], cx, sx)
        sm = sx
        tmp = d[k]
        d[k] = d[k + 1]
        d[k + 1] = tmp
    cf, sf, g1, g2 = _fuse(c[k], s[k], cm, sm)
    c[k] = cf
    s[k] = sf
    d[k] = _unimodular(g1 * d[k])
    d[k + 1] = _unimodular(g2 * d[k + 1])
    return nturn


@njit(cache=True)
def _deflate(c, s, d, lo, hi, tol):
    """Absorb every rotation with |s| <= tol on rows lo..hi into D; returns count."""
    count = 0
    for k in range(lo, hi):
        if abs(s[k]) <= tol and not (s[k] == 0.0 and c[k] == 1.0):
            ck = _unimodular(c[k])
            d[k] = _unimodular(ck * d[k])
            d[k + 1] = _unimodular(np.conj(ck) * d[k + 1])
            c[k] = 1.0 + 0.0j
            s[k] = 0.0
            count += 1
    return count


@njit(cache=True)
def _solve2(c, s, d1, d2):
    tau = c * d1 + np.conj(c) * d2
    delta = d1 * d2
    disc = np.sqrt(0.25 * tau * tau - delta)
    return 0.5 * tau + disc, 0.5 * tau - disc


@njit(cache=True)
def _emit_small(c, s, d, lo, hi, done, out, nout, drift):
    """Emit every 1x1 / 2x2 block inside rows lo..hi; returns (nout, drift)."""
    a = lo
    while a <= hi:
        b = a
        while b < hi and s[b] != 0.0:
            b += 1
        if not done[a]:
            if b == a:
                lam = d[a]
                drift = max(drift, abs(abs(lam) - 1.0))
                out[nout] = _unimodular(lam)
                nout += 1
                done[a] = True
            elif b == a + 1:
                l1, l2 = _solve2(c[a], s[a], d[a], d[a + 1])
                drift = max(drift, abs(abs(l1) - 1.0), abs(abs(l2) - 1.0))
                out[nout] = _unimodular(l1)
                out[nout + 1] = _unimodular(l2)
                nout += 2
                done[a] = True
                done[a + 1] = True
        a = b + 1
    return nout, drift


@njit(cache=True)
def _solve(c, s, d, tol, budget, out, done):
    """Full QR driver.  Returns (nout, chases, turnovers, drift, ok)."""
    n = d.shape[0]
    nout = 0
    drift = 0.0
    chases = 0
    nturn = 0
    _deflate(c, s, d, 0, n - 1, tol)
    nout, drift = _emit_small(c, s, d, 0, n - 1, done, out, nout, drift)
    hi = n - 1
    stall = 0
    while True:
        while hi >= 0 and done[hi]:
            hi -= 1
        if hi < 0:
            break
        lo = hi
        while lo > 0 and s[lo - 1] != 0.0:
            lo -= 1
        if chases >= budget:
            return nout, chases, nturn, drift, False
        stall += 1
        if stall % _EXC_PERIOD == 0:
            t = 2.0 * math.pi * ((chases * _GOLDEN) % 1.0)
            rho = complex(math.cos(t), math.sin(t))
        else:
            rho = _wilkinson(c, s, d, hi)
        nturn += _chase(c, s, d, lo, hi, rho)
        chases += 1
        if _deflate(c, s, d, lo, hi, tol) > 0:
            stall = 0
        nout, drift = _emit_small(c, s, d, lo, hi, done, out, nout, drift)
    return nout, chases, nturn, drift, True


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

def solve_block2(c: complex, s: float, d1: complex, d2: complex) -> tuple[complex, complex]:
    """Both eigenvalues of ``[[c d1, s d2], [-s d1, conj(c) d2]]`` on S^1."""
    l1, l2 = _solve2(complex(c), float(s), complex(d1), complex(d2))
    return complex(_unimodular(l1)), complex(_unimodular(l2))


def wilkinson_shift(state: ChaseState) -> complex:
    if state.active_hi - state.active_lo < 1:
        raise DomainError("shift needs an active block of size >= 2")
    return complex(_wilkinson(state.c, state.s, state.d, state.active_hi - 1))


def chase_step(state: ChaseState, shift: complex) -> ChaseState:
    """One similarity sweep over the active window (in place)."""
    lo, hi = state.active_lo - 1, state.active_hi - 1
    if hi - lo < 1:
        raise DomainError("chase needs an active block of size >= 2")
    if state.s[lo] == 0.0:
        # already split at the top; nothing to chase
        state.active_lo += 1
        return state
    state.turnovers += _chase(state.c, state.s, state.d, lo, hi, complex(shift))
    state.iteration_count += 1
    return state


def deflate_scan(state: ChaseState, opts: SolverOptions = SolverOptions()) -> ChaseState:
    """Deflate negligible rotations in the window, emit 1x1/2x2 blocks, shrink the window."""
    lo, hi = state.active_lo - 1, state.active_hi - 1
    _deflate(state.c, state.s, state.d, lo, hi, opts.deflation_tol)
    out = np.empty(hi - lo + 1, dtype=complex)
    nout, _ = _emit_small(state.c, state.s, state.d, lo, hi, state.done, out, 0, 0.0)
    state.eigenvalues_out.extend(complex(z) for z in out[:nout])
    # new window: bottom-most unreduced block not yet emitted
    while hi >= lo and state.done[hi]:
        hi -= 1
    if hi < lo:
        state.active_lo = state.active_hi = lo + 1
        return state
    new_lo = hi
    while new_lo > lo and state.s[new_lo - 1] != 0.0:
        new_lo -= 1
    state.active_lo, state.active_hi = new_lo + 1, hi + 1
    return state


def eigenvalues(f: DescendingFactorization, opts: SolverOptions = SolverOptions()) -> EigenResult:
    """All ``n`` eigenvalues of ``f`` (unit modulus, in order of deflation)."""
    n = f.n
    c = np.array(f.c, dtype=complex)
    s = np.array(f.s, dtype=float)
    d = np.array(f.d, dtype=complex)
    out = np.empty(n, dtype=complex)
    done = np.zeros(n, dtype=np.bool_)
    budget = opts.max_iter_per_eig * n
    nout, chases, nturn, drift, ok = _solve(c, s, d, opts.deflation_tol, budget, out, done)
    if not ok:
        raise ConvergenceError(
            f"QR iteration did not converge within {budget} sweeps ({nout}/{n} eigenvalues)",
            partial=out[:nout].copy(), iterations=chases)
    if drift > 1e-10:
        log.warning("eigenvalue modulus drift %.3g before projection (n=%d)", drift, n)
    vals = out[:nout]
    if f.field == "real":
        vals = conjugate_pair_cleanup(vals)
    return EigenResult(vals, chases, nturn, drift)


def conjugate_pair_cleanup(values: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Restore exact conjugate symmetry for spectra of real orthogonal matrices.

    Values within ``tol`` of the real axis are snapped to +-1; the others are
    matched upper/lower half-plane by phase and replaced by ``e^{+-i phi}`` with
    ``phi`` the averaged phase magnitude.  Unmatched sets are left unchanged.
    """
    vals = np.array(values, dtype=complex)
    ph = np.angle(vals)
    real = np.abs(vals.imag) < tol
    vals[real] = np.where(vals[real].real >= 0, 1.0, -1.0)
    up = np.flatnonzero(~real & (ph > 0))
    dn = np.flatnonzero(~real & (ph < 0))
    if len(up) != len(dn):
        log.debug("conjugate cleanup: %d upper vs %d lower values", len(up), len(dn))
        return vals
    up = up[np.argsort(ph[up])]
    dn = dn[np.argsort(-ph[dn])]
    if len(up) and np.max(np.abs(ph[up] + ph[dn])) >= tol:
        log.debug("conjugate cleanup: unmatched phases")
        return vals
    avg = 0.5 * (ph[up] - ph[dn])
    vals[up] = np.exp(1j * avg)
    vals[dn] = np.exp(-1j * avg)
    return vals
