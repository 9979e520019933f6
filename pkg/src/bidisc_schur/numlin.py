"""Dense complex-matrix utilities consumed by every other module.

Matrices are plain numpy complex128 arrays.  Every tolerance is relative:
a tolerance ``tol`` applied to a matrix A means ``tol * (1 + ||A||_F)``.
The default tolerance is 1e-9; matrices here are small and well scaled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DeltaNotInvertibleError,
    NonHermitianError,
    NonSquareError,
    NotPsdError,
    PNotInvertibleError,
)

DEFAULT_TOL = 1e-9

# condition-number guard for explicit inversions: reject beyond 1/(100*tol)
_COND_GUARD = 100.0


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-d complex128 array (scalars become 1x1)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {m.ndim}")
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def frob(a) -> float:
    return float(np.linalg.norm(a, "fro"))


def _require_square(a: np.ndarray, op: str) -> None:
    if a.shape[0] != a.shape[1]:
        raise NonSquareError(f"{op} requires a square matrix, got {a.shape}")


@dataclass(frozen=True)
class PsdReport:
    is_psd: bool
    min_eigenvalue: float

    def __bool__(self) -> bool:
        return self.is_psd


@dataclass(frozen=True)
class PsdFactorization:
    """Low-rank factorization A ~ factor @ factor*  of a PSD matrix."""

    rank: int
    factor: np.ndarray
    residual: float


@dataclass(frozen=True)
class OperatorClass:
    is_isometry: bool
    is_coisometry: bool
    is_unitary: bool
    is_contraction: bool


def is_psd(a, tol: float = DEFAULT_TOL) -> PsdReport:
    """Hermitian PSD test via eigendecomposition of the Hermitian part.

    Raises NonHermitianError when ||A - A*||_F exceeds tol*(1 + ||A||_F);
    the eigenvalue report is kept so callers can surface lambda_min in
    diagnostics.
    """
    a = as_matrix(a)
    _require_square(a, "is_psd")
    if a.size == 0:
        return PsdReport(True, 0.0)
    scale = 1.0 + frob(a)
    if frob(a - a.conj().T) > tol * scale:
        raise NonHermitianError(
            f"matrix is not Hermitian within tolerance ({frob(a - a.conj().T):.3e})"
        )
    herm = (a + a.conj().T) / 2.0
    lam_min = float(np.linalg.eigvalsh(herm)[0])
    return PsdReport(lam_min >= -tol * scale, lam_min)


def psd_factor(a, tol: float = DEFAULT_TOL) -> PsdFactorization:
    """Eigen-truncated factorization A ~ F F* with F of shape (n, rank).

    Eigen-truncation (rather than Cholesky) handles the rank-deficient Gram
    matrices of sampled kernels gracefully: rank is the number of
    eigenvalues above tol*(1 + ||A||_F).
    """
    a = as_matrix(a)
    report = is_psd(a, tol)
    if not report:
        raise NotPsdError(f"matrix is not PSD (lambda_min = {report.min_eigenvalue:.3e})")
    if a.size == 0:
        return PsdFactorization(0, np.zeros((0, 0), dtype=np.complex128), 0.0)
    herm = (a + a.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(herm)
    cut = tol * (1.0 + frob(a))
    keep = vals > cut
    factor = vecs[:, keep] * np.sqrt(vals[keep])
    residual = frob(a - factor @ factor.conj().T)
    return PsdFactorization(int(keep.sum()), factor, residual)


def classify(v, tol: float = DEFAULT_TOL) -> OperatorClass:
    """Isometry / co-isometry / unitary / contraction classification."""
    v = as_matrix(v)
    rows, cols = v.shape
    iso = bool(frob(v.conj().T @ v - np.eye(cols)) <= tol * np.sqrt(max(cols, 1)))
    coiso = bool(frob(v @ v.conj().T - np.eye(rows)) <= tol * np.sqrt(max(rows, 1)))
    if v.size:
        smax = float(np.linalg.svd(v, compute_uv=False)[0])
    else:
        smax = 0.0
    return OperatorClass(iso, coiso, iso and coiso, smax <= 1.0 + tol)


def spectral_radius(d) -> float:
    d = as_matrix(d)
    _require_square(d, "spectral_radius")
    if d.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(d))))


def _guarded_inverse(m: np.ndarray, tol: float, err, what: str) -> np.ndarray:
    if m.size == 0:
        return m.copy()
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > 1.0 / (_COND_GUARD * tol):
        raise err(f"{what} is numerically singular (cond = {cond:.3e})")
    return np.linalg.inv(m)


def block_inverse_2x2(p, q, r, s, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Inverse of [[P, Q], [R, S]] by the Schur-complement formula.

    Requires P invertible; raises DeltaNotInvertibleError when the
    complement S - R P^{-1} Q is singular, which certifies that the block
    matrix itself is singular.
    """
    p, q, r, s = as_matrix(p), as_matrix(q), as_matrix(r), as_matrix(s)
    _require_square(p, "block_inverse_2x2 (P block)")
    _require_square(s, "block_inverse_2x2 (S block)")
    m, n = p.shape[0], s.shape[0]
    if q.shape != (m, n) or r.shape != (n, m):
        raise ValueError(
            f"blocks not conformable: P {p.shape}, Q {q.shape}, R {r.shape}, S {s.shape}"
        )
    p_inv = _guarded_inverse(p, tol, PNotInvertibleError, "P block")
    delta = s - r @ p_inv @ q
    delta_inv = _guarded_inverse(delta, tol, DeltaNotInvertibleError, "S - R P^{-1} Q")
    out = np.empty((m + n, m + n), dtype=np.complex128)
    out[:m, :m] = p_inv + p_inv @ q @ delta_inv @ r @ p_inv
    out[:m, m:] = -p_inv @ q @ delta_inv
    out[m:, :m] = -delta_inv @ r @ p_inv
    out[m:, m:] = delta_inv
    return out
