"""Shared numeric kernels: dense Hermitian (generalized) eigensolves and
bracketed root finding.

Solves are deterministic: the same problem yields bitwise-identical
eigenvalues. Parallelism belongs at the k-point level, never inside a solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

HERMITICITY_RTOL = 1e-10


class NumericsError(ValueError):
    """Invalid eigenproblem or root bracket."""


class NonHermitianError(NumericsError):
    pass


class IndefiniteMassError(NumericsError):
    pass


def hermiticity_residual(matrix: np.ndarray) -> float:
    """max |M - M^dagger| / max |M| (0 for the zero matrix)."""
    scale = float(np.abs(matrix).max())
    if scale == 0.0:
        return 0.0
    return float(np.abs(matrix - matrix.conj().T).max()) / scale


@dataclass(frozen=True)
class HermitianProblem:
    """A v = lambda B v with Hermitian A and Hermitian positive-definite B
    (identity when B is None); the lowest ``n_wanted`` pairs are requested."""

    matrix_a: np.ndarray
    matrix_b: np.ndarray | None
    n_wanted: int

    def __post_init__(self):
        a = self.matrix_a
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NumericsError("matrix_a must be square")
        if not 1 <= self.n_wanted <= a.shape[0]:
            raise NumericsError(
                f"n_wanted={self.n_wanted} outside [1, {a.shape[0]}]"
            )
        if self.matrix_b is not None and self.matrix_b.shape != a.shape:
            raise NumericsError("matrix_b shape must match matrix_a")

    @property
    def size(self) -> int:
        return self.matrix_a.shape[0]


def hermitian_eigensolve(problem: HermitianProblem) -> tuple[np.ndarray, np.ndarray]:
    """Lowest eigenpairs of the (generalized) Hermitian problem.

    Returns (eigenvalues ascending, eigenvectors as columns). Eigenvectors
    are B-orthonormal. Raises on non-Hermitian input or indefinite B.
    """
    a = problem.matrix_a
    if hermiticity_residual(a) > HERMITICITY_RTOL:
        raise NonHermitianError(
            f"matrix_a Hermiticity residual {hermiticity_residual(a):.2e} "
            f"exceeds {HERMITICITY_RTOL:.0e}"
        )
    b = problem.matrix_b
    if b is not None:
        if hermiticity_residual(b) > HERMITICITY_RTOL:
            raise NonHermitianError("matrix_b is not Hermitian")
        try:
            scipy.linalg.cholesky(b)
        except scipy.linalg.LinAlgError as exc:
            raise IndefiniteMassError(
                "matrix_b is not positive definite"
            ) from exc
    subset = [0, problem.n_wanted - 1]
    values, vectors = scipy.linalg.eigh(a, b, subset_by_index=subset)
    return values, vectors


def hermitian_eigensolve_window(
    matrix_a: np.ndarray,
    matrix_b: np.ndarray | None,
    lo: float,
    hi: float,
) -> tuple[np.ndarray, np.ndarray]:
    """All eigenpairs with eigenvalue in (lo, hi], B-orthonormal vectors.

    Cheaper than a full solve when only an interior window is needed
    (defect modes inside a gap); may return empty arrays.
    """
    if hi <= lo:
        raise NumericsError(f"empty eigenvalue window ({lo}, {hi}]")
    if hermiticity_residual(matrix_a) > HERMITICITY_RTOL:
        raise NonHermitianError("matrix_a is not Hermitian")
    try:
        values, vectors = scipy.linalg.eigh(
            matrix_a, matrix_b, subset_by_value=(lo, hi)
        )
    except scipy.linalg.LinAlgError as exc:
        raise IndefiniteMassError("generalized solve failed; B indefinite?") from exc
    return values, vectors


def bracketed_root(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Root of f on [lo, hi] given a sign change; Brent's method."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise NumericsError(
            f"no sign change on bracket [{lo}, {hi}]: f(lo)={flo:.3e}, "
            f"f(hi)={fhi:.3e}"
        )
    return float(brentq(f, lo, hi, xtol=tol, rtol=8.881784197001252e-16))
