"""Dense O(n^3) Haar sampling with implicit Householder QR (Stewart's method).

This is the baseline the factored sampler is compared against, both
statistically and in timing.
"""

from __future__ import annotations

import cmath

import numpy as np

from ._errors import DomainError
from .factored_form import FIELDS
from .rand_dist import RngStream


def _phase(z: complex) -> complex:
    a = abs(z)
    return 1.0 + 0.0j if a == 0.0 else z / a


def umult(X: np.ndarray, field: str, rng: RngStream, *, _identity: bool = False) -> np.ndarray:
    """Overwrite ``X`` (n x m, complex) with ``Q X`` for a Haar ``Q`` in O(n) or U(n).

    A non-complex ``X`` is copied to a complex array first; the result is
    returned either way.  Costs about ``2 n^2 m`` flops.
    """
    if field not in FIELDS:
        raise DomainError(f"field must be one of {FIELDS}")
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise DomainError("X must be a nonempty 2-D array")
    if X.dtype != np.complex128:
        X = X.astype(np.complex128)
    n = X.shape[0]
    d = np.empty(n, dtype=complex)
    for k in range(2, n + 1):
        v = rng.normal_vector(k, field)
        dk = -_phase(v[0])
        d[n - k] = dk
        u = v.copy()
        u[0] -= dk * np.linalg.norm(v)
        u /= np.linalg.norm(u)
        # with X = I only the trailing k x k block of the trailing rows is nonzero
        X2 = X[n - k:, n - k:] if _identity else X[n - k:, :]
        X2 -= np.outer(2.0 * u, u.conj() @ X2)
    z = rng.normal_vector(1, field)[0]
    d[n - 1] = -_phase(z)
    X *= d[:, None]
    return X


def sample_haar_dense(n: int, field: str, rng: RngStream) -> np.ndarray:
    """Haar-distributed n x n orthogonal (real field) or unitary matrix."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return umult(np.eye(n, dtype=complex), field, rng, _identity=True)


def trace_power_sums(M: np.ndarray, kmax: int) -> np.ndarray:
    """``trace(M^k)`` for k = 1..kmax by repeated multiplication."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError("square matrix required")
    if kmax < 1:
        raise DomainError("kmax must be >= 1")
    if M.shape[0] > 2048:
        raise DomainError("trace oracle capped at n = 2048")
    out = np.empty(kmax, dtype=complex)
    P = M.copy()
    for k in range(kmax):
        out[k] = np.trace(P)
        if k + 1 < kmax:
            P = P @ M
    return out


def det_phase(M: np.ndarray) -> float:
    return cmath.phase(np.linalg.det(M))
