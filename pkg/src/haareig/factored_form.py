"""O(n)-parameter forms of random unitary Hessenberg matrices.

Two representations of the Hessenberg form of a Haar matrix are provided:

``HouseholderFactorization``
    ``H = P_1 ... P_{n-1} D`` with 2x2 Householder reflectors built from the
    vectors ``w_j = (alpha_j, beta_j)``.
``DescendingFactorization``
    ``H = G_1 ... G_{n-1} D`` with real-sine plane rotations; this is what the
    eigensolver consumes.

``sample_householder_form`` followed by ``refactor_to_rotations`` and the
fused ``sample_descending`` consume random draws in the same order (alpha_j
then beta_j for j = 1..n-1, then at most one terminal draw), so for a common
seed they represent the same matrix up to rounding.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import core_rotation as cr
from ._errors import DomainError
from .rand_dist import RngStream, check_seed

FIELDS = ("real", "complex")
DENSE_CAP = 2048


def _arg(z: complex) -> float:
    return 0.0 if abs(z) < cr.TINY else cmath.phase(z)


def _unit(z: complex) -> complex:
    a = abs(z)
    return 1.0 + 0.0j if a < cr.TINY else z / a


@dataclass(frozen=True)
class SampleSpec:
    """Order, scalar field, optional determinant constraint and seed."""

    n: int
    field: str = "complex"
    det_constraint: complex | None = None
    seed: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        if self.field not in FIELDS:
            raise DomainError(f"field must be one of {FIELDS}, got {self.field!r}")
        check_seed(self.seed)
        xi = self.det_constraint
        if xi is not None:
            xi = complex(xi)
            if abs(abs(xi) - 1.0) > 1e-12:
                raise DomainError(f"determinant constraint must be unimodular, got |xi| = {abs(xi)}")
            if self.field == "real" and (abs(xi.imag) > 1e-12 or abs(abs(xi.real) - 1) > 1e-12):
                raise DomainError("real matrices have determinant +1 or -1")
            object.__setattr__(self, "det_constraint", xi / abs(xi))

    def rng(self) -> RngStream:
        return RngStream(self.seed)


@dataclass(frozen=True)
class HouseholderFactorization:
    """``H = P_1 ... P_{n-1} D`` with ``D = -diag(e^{i theta_j})``.

    ``P_j`` reflects along ``v_j = (alpha_j + e^{i theta_j} |w_j|, beta_j)``
    placed on rows j, j+1.
    """

    n: int
    field: str
    alpha: np.ndarray   # (n-1,) complex
    beta: np.ndarray    # (n-1,) nonnegative
    theta: np.ndarray   # (n,) phases in (-pi, pi]

    def _entries(self, j: int) -> tuple[complex, complex, complex, complex]:
        a, b = complex(self.alpha[j - 1]), float(self.beta[j - 1])
        w = math.hypot(abs(a), b)
        v1 = a + cmath.exp(1j * self.theta[j - 1]) * w
        vv = abs(v1) ** 2 + b * b
        if vv == 0.0:
            return 1.0 + 0j, 0j, 0j, 1.0 + 0j
        f = 2.0 / vv
        return 1.0 - f * abs(v1) ** 2, -f * v1 * b, -f * b * v1.conjugate(), 1.0 - f * b * b + 0j

    def reflector_block(self, j: int) -> np.ndarray:
        """2x2 block of ``P_j`` (1-based)."""
        p11, p12, p21, p22 = self._entries(j)
        return np.array([[p11, p12], [p21, p22]], dtype=complex)

    def reflector(self, j: int) -> np.ndarray:
        P = np.eye(self.n, dtype=complex)
        P[j - 1:j + 1, j - 1:j + 1] = self.reflector_block(j)
        return P

    def diagonal(self) -> np.ndarray:
        return -np.exp(1j * np.asarray(self.theta))

    def to_dense(self) -> np.ndarray:
        if self.n > DENSE_CAP:
            raise DomainError(f"dense materialization capped at n = {DENSE_CAP}")
        H = np.diag(self.diagonal())
        for j in range(self.n - 1, 0, -1):
            H[j - 1:j + 1, :] = self.reflector_block(j) @ H[j - 1:j + 1, :]
        return H


@dataclass(frozen=True)
class DescendingFactorization:
    """``H = G_1 ... G_{n-1} D``: cosines ``c``, sines ``s``, diagonal ``d``."""

    n: int
    c: np.ndarray
    s: np.ndarray
    d: np.ndarray
    field: str = "complex"

    def __post_init__(self):
        c = np.array(self.c, dtype=complex).reshape(-1)
        s = np.array(self.s, dtype=float).reshape(-1)
        d = np.array(self.d, dtype=complex).reshape(-1)
        if len(d) != self.n or len(c) != self.n - 1 or len(s) != self.n - 1:
            raise DomainError("inconsistent factorization lengths")
        if self.field not in FIELDS:
            raise DomainError(f"unknown field {self.field!r}")
        if self.n and np.max(np.abs(np.abs(d) - 1.0)) > 1e-12:
            raise DomainError("diagonal entries must be unimodular")
        if self.n > 1 and np.max(np.abs(np.abs(c) ** 2 + s * s - 1.0)) > 1e-12:
            raise DomainError("rotations must satisfy |c|^2 + s^2 = 1")
        for arr in (c, s, d):
            arr.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "d", d)

    def rotations(self) -> list[cr.CoreRotation]:
        return [cr.CoreRotation(complex(ci), float(si)) for ci, si in zip(self.c, self.s)]


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def _draw_pair(spec: SampleSpec, j: int, rng: RngStream, chi: bool = True):
    """(alpha_j, beta_j) for 1-based step j."""
    k = spec.n - j
    if spec.field == "complex":
        alpha = rng.std_normal_complex()
        beta = math.sqrt(rng.chi_complex_sq(k)) if chi else 0.0
    else:
        alpha = complex(rng.std_normal_real())
        beta = rng.chi_real(k) if chi else 0.0
    return alpha, beta


def _terminal_phase(spec: SampleSpec, rng: RngStream) -> float:
    """theta_n for an unconstrained sample."""
    if spec.field == "complex":
        return rng.uniform_phase()
    return 0.0 if rng.std_normal_real() >= 0.0 else math.pi


def sample_householder_form(spec: SampleSpec, rng: RngStream | None = None) -> HouseholderFactorization:
    rng = spec.rng() if rng is None else rng
    n = spec.n
    alpha = np.zeros(n - 1, dtype=complex)
    beta = np.zeros(n - 1)
    theta = np.zeros(n)
    n_reflect = 0
    for j in range(1, n):
        a, b = _draw_pair(spec, j, rng)
        alpha[j - 1], beta[j - 1] = a, b
        theta[j - 1] = _arg(a)
        if abs(a) > 0 or b > 0:
            n_reflect += 1
    if spec.det_constraint is None:
        theta[n - 1] = _terminal_phase(spec, rng)
    else:
        # det H = (-1)^{#reflectors} prod(-e^{i theta_j}); solve for theta_n
        sign = (-1) ** (n_reflect + n)
        rest = sign * cmath.exp(1j * theta[:n - 1].sum())
        theta[n - 1] = _arg(spec.det_constraint / rest)
        if theta[n - 1] == -math.pi:
            theta[n - 1] = math.pi
    return HouseholderFactorization(n, spec.field, alpha, beta, theta)


def refactor_to_rotations(h: HouseholderFactorization) -> DescendingFactorization:
    """Rewrite ``P_1 ... P_{n-1} D`` as ``G_1 ... G_{n-1} D~`` in O(n).

    Each step splits ``diag(carry, 1) P_j`` into a rotation and a diagonal
    pair; the first diagonal entry joins ``D`` and the second is carried into
    the next reflector.
    """
    n = h.n
    D = h.diagonal()
    c = np.empty(n - 1, dtype=complex)
    s = np.empty(n - 1)
    d = np.empty(n, dtype=complex)
    carry = 1.0 + 0.0j
    for j in range(1, n):
        p11, p12, p21, p22 = h._entries(j)
        cj, sj, d1, d2 = cr._rot_from_u(carry * p11, carry * p12, p21, p22)
        c[j - 1], s[j - 1] = cj, sj
        d[j - 1] = D[j - 1] * d1
        carry = d2
    d[n - 1] = D[n - 1] * carry
    return DescendingFactorization(n, c, s, d, field=h.field)


def sample_descending(spec: SampleSpec, rng: RngStream | None = None, *,
                      chi_draw: bool = True) -> DescendingFactorization:
    """Sample the rotation form directly in one O(n) pass.

    ``chi_draw=False`` replaces every beta_j by 0; it exists only to build a
    deliberately wrong sampler for mutation tests of the validation suite.
    """
    rng = spec.rng() if rng is None else rng
    n = spec.n
    c = np.empty(n - 1, dtype=complex)
    s = np.empty(n - 1)
    d = np.empty(n, dtype=complex)
    delta = 1.0 + 0.0j
    for k in range(1, n):
        v1, v2 = _draw_pair(spec, k, rng, chi=chi_draw)
        c[k - 1], s[k - 1], d[k - 1], delta = _step(v1, v2, delta)
    if spec.det_constraint is None:
        d[n - 1] = -cmath.exp(1j * _terminal_phase(spec, rng)) * delta
    else:
        d[n - 1] = spec.det_constraint * _unit(np.prod(d[:n - 1])).conjugate()
    return DescendingFactorization(n, c, s, d, field=spec.field)


@njit(cache=True)
def _step(v1, v2, delta):
    """Reflector for w = (v1, v2), carry ``delta`` in, then split off a rotation."""
    a1 = abs(v1)
    dk = -v1 / a1 if a1 >= cr.TINY else -1.0 + 0.0j
    v1 = v1 - dk * math.hypot(a1, v2)
    vv = abs(v1) ** 2 + v2 * v2
    if vv == 0.0:
        u11, u12, u21, u22 = delta, 0.0j, 0.0j, 1.0 + 0.0j
    else:
        f = 2.0 / vv
        u11 = delta * (1.0 - f * abs(v1) ** 2)
        u12 = -delta * f * v1 * v2
        u21 = -f * v2 * np.conj(v1)
        u22 = 1.0 - f * v2 * v2 + 0.0j
    phi = np.conj(cr._phase(u21))
    ck = phi * u11
    sk = -(phi * u21).real
    nrm = math.sqrt(abs(ck) ** 2 + sk * sk)
    dd = dk * cr._phase(np.conj(phi) * abs(u11) ** 2 + phi * u21 * u21)
    return ck / nrm, sk / nrm, dd, cr._phase(phi * (u11 * u22 - u21 * u12))


# ---------------------------------------------------------------------------
# inspection
# ---------------------------------------------------------------------------

def to_dense(f: DescendingFactorization, cap: int = DENSE_CAP) -> np.ndarray:
    """Explicit ``G_1 ... G_{n-1} D`` (upper Hessenberg, O(n^2) work)."""
    n = f.n
    if n > cap:
        raise DomainError(f"dense materialization capped at n = {cap}, got {n}")
    return _dense(np.asarray(f.c, dtype=np.complex128), np.asarray(f.s, dtype=np.float64),
                  np.asarray(f.d, dtype=np.complex128))


@njit(cache=True)
def _dense(c, s, d):
    n = d.shape[0]
    H = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        H[i, i] = d[i]
    for j in range(n - 2, -1, -1):
        cj, sj, cjb = c[j], s[j], np.conj(c[j])
        for k in range(j, n):
            top, bot = H[j, k], H[j + 1, k]
            H[j, k] = cj * top + sj * bot
            H[j + 1, k] = -sj * top + cjb * bot
    return H


def entry(f: DescendingFactorization, i: int, j: int) -> complex:
    """Entry ``h_ij`` (1-based) from the closed form; 0 below the subdiagonal."""
    n = f.n
    if not (1 <= i <= n and 1 <= j <= n):
        raise DomainError(f"index ({i}, {j}) outside a {n} x {n} matrix")
    if i > j + 1:
        return 0j
    if i == j + 1:
        return complex(-f.s[j - 1] * f.d[j - 1])
    left = np.conj(f.c[i - 2]) if i >= 2 else 1.0
    right = f.c[j - 1] if j <= n - 1 else 1.0
    prod = float(np.prod(f.s[i - 1:j - 1]))
    return complex(left * prod * right * f.d[j - 1])


def determinant(f: DescendingFactorization) -> complex:
    return complex(np.prod(f.d))


def unitarity_defect(M: np.ndarray) -> float:
    return float(np.abs(M.conj().T @ M - np.eye(M.shape[0])).max())


# ---------------------------------------------------------------------------
# text serialization
# ---------------------------------------------------------------------------

def dumps(f: DescendingFactorization) -> str:
    lines = [f"{f.n} {f.field}"]
    lines += [f"{float(ci.real)!r} {float(ci.imag)!r} {float(si)!r}" for ci, si in zip(f.c, f.s)]
    lines += [f"{float(di.real)!r} {float(di.imag)!r}" for di in f.d]
    return "\n".join(lines) + "\n"


def loads(text: str) -> DescendingFactorization:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise DomainError("missing 'n field' header")
    n, fld = int(rows[0][0]), rows[0][1]
    body = rows[1:]
    if len(body) != 2 * n - 1:
        raise DomainError(f"expected {2 * n - 1} data lines for n = {n}, got {len(body)}")
    rot = np.array(body[:n - 1], dtype=float).reshape(-1, 3)
    dia = np.array(body[n - 1:], dtype=float).reshape(-1, 2)
    return DescendingFactorization(n, rot[:, 0] + 1j * rot[:, 1], rot[:, 2], dia[:, 0] + 1j * dia[:, 1], field=fld)
