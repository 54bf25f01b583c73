"""Dense symmetric matrices: eigendecomposition, norms, l1 projections.

All matrices are real symmetric, stored dense in float64; vectors are plain
1-d float64 arrays.  ``GramMatrix`` enforces symmetry at construction; every
operation here is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AsymmetricMatrixError, EigenConvergenceError

SYMMETRY_RTOL = 1e-8  # admissible asymmetry relative to the Frobenius norm


class GramMatrix:
    """Dense real symmetric n x n matrix.

    Construction symmetrizes the input via (A + A^T)/2 when the maximum
    asymmetry is at most ``SYMMETRY_RTOL`` times the Frobenius norm and
    rejects it otherwise; this catches data errors early.  The stored array
    is read-only.
    """

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] < 1:
            raise ValueError("matrix dimension must be at least 1")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        asym = np.abs(a - a.T).max()
        if asym > 0.0:
            tol = SYMMETRY_RTOL * np.linalg.norm(a)
            if asym > tol:
                raise AsymmetricMatrixError(asym, tol)
            a = (a + a.T) / 2.0
        a.setflags(write=False)
        self._a = a

    @classmethod
    def _wrap(cls, a: np.ndarray) -> "GramMatrix":
        """Trusted constructor for arrays already exactly symmetric."""
        obj = cls.__new__(cls)
        a = np.asarray(a, dtype=np.float64)
        a.setflags(write=False)
        obj._a = a
        return obj

    @classmethod
    def identity(cls, n: int) -> "GramMatrix":
        return cls._wrap(np.eye(n))

    @property
    def n(self) -> int:
        return self._a.shape[0]

    @property
    def entries(self) -> np.ndarray:
        """Read-only (n, n) array view."""
        return self._a

    def __repr__(self):
        return f"GramMatrix(n={self.n})"


def as_matrix_array(A) -> np.ndarray:
    """Accept a GramMatrix or a raw symmetric array, return the ndarray."""
    if isinstance(A, GramMatrix):
        return A.entries
    return GramMatrix(A).entries


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (descending) and orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def entrywise_one_norm(A) -> float:
    """Sum of absolute values of all entries."""
    return float(np.abs(as_matrix_array(A)).sum())


def trace(A) -> float:
    return float(np.trace(as_matrix_array(A)))


def symmetric_eigen(A, tol_eig: float = 1e-10, verify: bool = False) -> EigenSystem:
    """Full symmetric eigendecomposition, eigenvalues sorted descending.

    With ``verify=True`` the residual ||A v - lambda v|| is checked against
    ``tol_eig * ||A||_F`` and a failure raises ``EigenConvergenceError``
    carrying the residual.
    """
    a = as_matrix_array(A)
    try:
        lam, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(f"eigendecomposition failed: {exc}") from exc
    lam = lam[::-1].copy()
    v = v[:, ::-1].copy()
    if verify:
        scale = np.linalg.norm(a)
        resid = float(np.abs(a @ v - v * lam).max())
        if resid > tol_eig * max(scale, 1e-300):
            raise EigenConvergenceError(
                f"eigendecomposition residual {resid:.3e} exceeds "
                f"{tol_eig:.1e} * ||A||_F",
                residual=resid,
            )
    return EigenSystem(eigenvalues=lam, eigenvectors=v)


def _eigvals(A) -> np.ndarray:
    a = as_matrix_array(A)
    try:
        return np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(f"eigenvalue computation failed: {exc}") from exc


def min_eigenvalue(A) -> float:
    return float(_eigvals(A)[0])


def max_eigenvalue(A) -> float:
    return float(_eigvals(A)[-1])


def operator_norm(A) -> float:
    """Spectral norm: max |lambda| over the eigenvalues."""
    lam = _eigvals(A)
    return float(max(abs(lam[0]), abs(lam[-1])))


def project_l1_sphere(x) -> np.ndarray:
    """Project onto the unit l1 sphere {y : ||y||_1 = 1}.

    Points outside the unit l1 ball get the Euclidean ball projection
    (sort-and-threshold on |x| with signs restored), which lands on the
    sphere; points strictly inside are rescaled to unit l1 norm.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("expected a vector")
    norm1 = np.abs(x).sum()
    if norm1 == 0.0 or not np.isfinite(norm1):
        raise ValueError("cannot project the zero (or non-finite) vector")
    if norm1 <= 1.0:
        return x / norm1
    u = np.sort(np.abs(x))[::-1]
    cumsum = np.cumsum(u)
    ks = np.arange(1, x.size + 1)
    rho = np.nonzero(u * ks > cumsum - 1.0)[0][-1]
    theta = (cumsum[rho] - 1.0) / (rho + 1.0)
    y = np.sign(x) * np.maximum(np.abs(x) - theta, 0.0)
    s = np.abs(y).sum()
    if s != 1.0:  # kill the last ulp of threshold roundoff
        y /= s
    return y
