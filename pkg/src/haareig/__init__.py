"""Haar-distributed unitary and orthogonal eigenvalues in O(n^2).

The sampler draws a random unitary Hessenberg matrix directly in factored
form (n - 1 core rotations and a unimodular diagonal) and feeds it to a
single-shift core-chasing QR solver.
"""

from ._errors import ConvergenceError, DomainError
from .core_rotation import CoreRotation, DiagonalPair, IndexedRotation
from .factored_form import (
    DescendingFactorization,
    HouseholderFactorization,
    SampleSpec,
    refactor_to_rotations,
    sample_descending,
    sample_householder_form,
    to_dense,
)
from .haar_dense import sample_haar_dense, umult
from .rand_dist import RngStream
from .unitary_qr import EigenResult, SolverOptions, eigenvalues

__version__ = "0.1.0"


def sample_eigenvalues(n: int, field: str = "complex", det=None, seed: int = 0):
    """Eigenvalues of one Haar sample of U(n) (``field="complex"``) or O(n)."""
    return eigenvalues(sample_descending(SampleSpec(n, field, det, seed))).values


__all__ = [
    "ConvergenceError", "DomainError", "CoreRotation", "DiagonalPair", "IndexedRotation",
    "DescendingFactorization", "HouseholderFactorization", "SampleSpec", "refactor_to_rotations",
    "sample_descending", "sample_householder_form", "to_dense", "sample_haar_dense", "umult",
    "RngStream", "EigenResult", "SolverOptions", "eigenvalues", "sample_eigenvalues",
]
