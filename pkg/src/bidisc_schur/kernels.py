"""Sampled-kernel engine: Agler kernel extraction from co-isometric
colligations, Agler decomposition verification, de Branges-Rovnyak
classification tests on the disc / polydisc / ball, and lurking-isometry
reconstruction of a Schur-class symbol on the disc.

Kernels live extensionally on finite grids; every positivity statement is a
Gram-matrix PSD test, which is exactly the checkable content of positivity
(it quantifies over finite point sets).  Analyticity in the first variable
is never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import numlin
from .colligation import Colligation, transfer_grid
from .errors import (
    GridMismatchError,
    IdentityViolatedError,
    NotCoisometricError,
    NotDbrError,
    RankOverflowError,
)
from .functions import PointGrid, as_evaluable
from .numlin import DEFAULT_TOL, PsdFactorization, frob

MAX_VALUE_DIM = 8


class SampledKernel:
    """Kernel evaluated on a finite point set.

    values has shape (n, n) for scalar kernels and (n, n, e, e) for
    operator-valued ones; entry (i, j) is K(z_i, z_j).  Hermitian pair
    symmetry is enforced on construction; pass verify_psd=True to also
    check the full Gram matrix.
    """

    def __init__(self, grid: PointGrid, values, dim: int = 1,
                 verify_psd: bool = False, tol: float = DEFAULT_TOL):
        if dim < 1 or dim > MAX_VALUE_DIM:
            raise ValueError(f"value dimension must be in 1..{MAX_VALUE_DIM}")
        n = len(grid)
        vals = np.asarray(values, dtype=np.complex128)
        expect = (n, n) if dim == 1 else (n, n, dim, dim)
        if vals.shape != expect:
            raise ValueError(f"values shape {vals.shape}, expected {expect}")
        self.grid = grid
        self.values = vals
        self.dim = dim
        g = self.gram()
        scale = 1.0 + frob(g)
        if frob(g - g.conj().T) > 1e-8 * scale:
            raise ValueError("kernel values are not Hermitian-symmetric in the point pair")
        if verify_psd and not numlin.is_psd(g, tol):
            raise ValueError("kernel Gram matrix is not PSD")

    @classmethod
    def from_function(cls, grid: PointGrid, fn, dim: int = 1, **kwargs) -> "SampledKernel":
        n = len(grid)
        pts = grid.points
        if dim == 1:
            vals = np.empty((n, n), dtype=np.complex128)
            for i in range(n):
                for j in range(n):
                    vals[i, j] = fn(pts[i], pts[j])
        else:
            vals = np.empty((n, n, dim, dim), dtype=np.complex128)
            for i in range(n):
                for j in range(n):
                    vals[i, j] = fn(pts[i], pts[j])
        return cls(grid, vals, dim, **kwargs)

    def gram(self) -> np.ndarray:
        """Full (n e) x (n e) Gram matrix over the grid."""
        if self.dim == 1:
            return self.values
        n = len(self.grid)
        return self.values.transpose(0, 2, 1, 3).reshape(n * self.dim, n * self.dim)

    def at(self, i: int, j: int):
        return self.values[i, j]

    def is_psd(self, tol: float = DEFAULT_TOL) -> numlin.PsdReport:
        return numlin.is_psd(self.gram(), tol)

    def __repr__(self) -> str:
        return f"SampledKernel(npoints={len(self.grid)}, dim={self.dim})"


def _pair_products(grid: PointGrid) -> np.ndarray:
    """Matrix of inner products <z_i, w_j> = sum_k z_ik conj(z_jk)."""
    pts = grid.points
    return pts @ pts.conj().T


def _coordinate_products(grid: PointGrid, k: int) -> np.ndarray:
    zk = grid.points[:, k]
    return zk[:, None] * np.conj(zk)[None, :]


def szego_gram(grid: PointGrid) -> np.ndarray:
    """Product Szego kernel values Prod_k 1/(1 - z_k conj(w_k)) on the grid."""
    out = np.ones((len(grid), len(grid)), dtype=np.complex128)
    for k in range(grid.nvars):
        out /= 1.0 - _coordinate_products(grid, k)
    return out


def drury_arveson_gram(grid: PointGrid) -> np.ndarray:
    """Kernel values 1/(1 - <z, w>) on a ball grid."""
    return 1.0 / (1.0 - _pair_products(grid))


# ---------------------------------------------------------------------------
# Agler kernels of a co-isometric two-variable colligation


def _state_rows(v: Colligation, grid: PointGrid) -> np.ndarray:
    """Rows H(z) = B (I - E(z) D)^{-1} stacked over the grid (n x h)."""
    pts = grid.points
    reps = np.repeat(pts, v.partition, axis=1)
    mats = np.eye(v.h) - (reps[:, :, None] * np.eye(v.h)) @ v.D
    # H(z)^T = solve((I - E D)^T, B^T)
    rhs = np.broadcast_to(v.B.T, (len(grid), v.h, 1))
    sol = np.linalg.solve(np.transpose(mats, (0, 2, 1)), rhs)
    return sol[:, :, 0]


@dataclass(frozen=True)
class AglerKernels:
    k1: SampledKernel
    k2: SampledKernel
    max_residual: float


def agler_kernels_of(v: Colligation, grid: PointGrid,
                     tol: float = DEFAULT_TOL) -> AglerKernels:
    """Kernels K1, K2 with

        1 - f(z) conj(f(w)) = (1 - z1 conj(w1)) K1(z,w) + (1 - z2 conj(w2)) K2(z,w)

    for the transfer function f of a co-isometric colligation, via
    K_i(z,w) = H_i(z) H_i(w)* with H(z) = B (I - E(z) D)^{-1} split along
    the state partition.  The identity is re-checked on the grid and a
    violation raises (it can only come from a bug or ill-conditioning)."""
    if v.nvars != 2:
        raise ValueError("agler_kernels_of needs a two-variable colligation")
    if grid.ambient != "bidisc":
        raise ValueError("agler_kernels_of needs a bidisc grid")
    if not v.classify(tol).is_coisometry:
        raise NotCoisometricError("colligation is not co-isometric at the given tolerance")
    h = _state_rows(v, grid)
    h1 = h[:, : v.partition[0]]
    h2 = h[:, v.partition[0]:]
    k1 = SampledKernel(grid, h1 @ h1.conj().T)
    k2 = SampledKernel(grid, h2 @ h2.conj().T)
    vals = transfer_grid(v, grid.points)
    lhs = 1.0 - vals[:, None] * np.conj(vals)[None, :]
    rhs = ((1.0 - _coordinate_products(grid, 0)) * k1.values
           + (1.0 - _coordinate_products(grid, 1)) * k2.values)
    residual = float(np.max(np.abs(lhs - rhs), initial=0.0))
    if residual > max(tol, 1e-12 * (1.0 + frob(lhs))):
        raise IdentityViolatedError(
            f"decomposition identity violated (max residual {residual:.3e})")
    return AglerKernels(k1, k2, residual)


@dataclass(frozen=True)
class DecompositionReport:
    passed: bool
    max_residual: float


def verify_agler_decomposition(f, k1: SampledKernel, k2: SampledKernel,
                               tol: float = DEFAULT_TOL) -> DecompositionReport:
    """Check the decomposition identity pointwise on the shared grid."""
    if not k1.grid.same_points(k2.grid):
        raise GridMismatchError("the two kernels are sampled on different grids")
    if k1.dim != 1 or k2.dim != 1:
        raise ValueError("decomposition verification is for scalar kernels")
    grid = k1.grid
    fn = as_evaluable(f)
    vals = np.asarray(fn(grid.points[:, 0], grid.points[:, 1]), dtype=np.complex128)
    lhs = 1.0 - vals[:, None] * np.conj(vals)[None, :]
    rhs = ((1.0 - _coordinate_products(grid, 0)) * k1.values
           + (1.0 - _coordinate_products(grid, 1)) * k2.values)
    residual = float(np.max(np.abs(lhs - rhs), initial=0.0))
    return DecompositionReport(residual <= tol, residual)


# ---------------------------------------------------------------------------
# de Branges-Rovnyak tests


def _eye_like(k: SampledKernel) -> np.ndarray:
    if k.dim == 1:
        return np.ones((len(k.grid), len(k.grid)), dtype=np.complex128)
    n = len(k.grid)
    return np.broadcast_to(np.eye(k.dim), (n, n, k.dim, k.dim)).copy()


def _hadamard(scalars: np.ndarray, k: SampledKernel) -> np.ndarray:
    """Pointwise-in-(z, w) scalar times (possibly matrix) kernel value."""
    if k.dim == 1:
        return scalars * k.values
    return scalars[:, :, None, None] * k.values


def _gram_of(grid: PointGrid, table: np.ndarray, dim: int) -> np.ndarray:
    if dim == 1:
        return table
    n = len(grid)
    return table.transpose(0, 2, 1, 3).reshape(n * dim, n * dim)


@dataclass(frozen=True)
class DbrReport:
    is_dbr: bool
    min_eigenvalue: float
    factorization: Optional[PsdFactorization]


def dbr_test_disc(k: SampledKernel, tol: float = DEFAULT_TOL) -> DbrReport:
    """Does K agree on the grid with (I - T(z)T(w)*)/(1 - z conj(w)) for
    some Schur-class T?  Holds iff the Gram of I - (1 - z conj(w)) K is PSD."""
    if k.grid.nvars != 1:
        raise ValueError("dbr_test_disc needs a disc grid")
    table = _eye_like(k) - _hadamard(1.0 - _coordinate_products(k.grid, 0), k)
    gram = _gram_of(k.grid, table, k.dim)
    report = numlin.is_psd(gram, tol)
    fact = numlin.psd_factor(gram, tol) if report else None
    return DbrReport(report.is_psd, report.min_eigenvalue, fact)


@dataclass(frozen=True)
class NormalizedFormReport:
    dominated_by_szego: bool
    hadamard_psd: bool
    min_eigenvalues: tuple


def dbr_test_nf(k: SampledKernel, tol: float = DEFAULT_TOL) -> NormalizedFormReport:
    """Boolean pair: (Szego - K PSD?, (1 - z conj(w)) K PSD?).  Both hold
    iff K(z,w) = T(z)T(w)*/(1 - z conj(w)) on the grid for a Schur-class T."""
    if k.grid.nvars != 1:
        raise ValueError("dbr_test_nf needs a disc grid")
    s = 1.0 / (1.0 - _coordinate_products(k.grid, 0))
    if k.dim == 1:
        dominated = s - k.values
    else:
        dominated = s[:, :, None, None] * np.broadcast_to(
            np.eye(k.dim), k.values.shape) - k.values
    g1 = _gram_of(k.grid, dominated, k.dim)
    g2 = _gram_of(k.grid, _hadamard(1.0 / s, k), k.dim)
    r1 = numlin.is_psd(g1, tol)
    r2 = numlin.is_psd(g2, tol)
    return NormalizedFormReport(r1.is_psd, r2.is_psd,
                                (r1.min_eigenvalue, r2.min_eigenvalue))


@dataclass(frozen=True)
class PolydiscReport:
    passed: bool
    kernels_psd: tuple
    sum_residual: float
    hadamard_min_eigenvalue: float


def dbr_test_polydisc(k: SampledKernel, components, tol: float = DEFAULT_TOL) -> PolydiscReport:
    """Certificate verifier on the polydisc: each component kernel PSD, the
    weighted sum identity

        K(z,w) = sum_i K_i(z,w) / prod_{j != i} (1 - z_j conj(w_j))

    pointwise, and PSD-ness of the Gram of I - (prod_j (1 - z_j conj(w_j))) K.
    No reconstruction is attempted."""
    grid = k.grid
    n = grid.nvars
    if n < 2:
        raise ValueError("dbr_test_polydisc needs at least two variables")
    if len(components) != n:
        raise ValueError(f"expected {n} component kernels, got {len(components)}")
    for ki in components:
        if not ki.grid.same_points(grid):
            raise GridMismatchError("component kernel sampled on a different grid")
        if ki.dim != k.dim:
            raise GridMismatchError("component kernel has a different value dimension")
    coord = [1.0 - _coordinate_products(grid, i) for i in range(n)]
    full = np.prod(coord, axis=0)
    psd_flags = tuple(bool(ki.is_psd(tol)) for ki in components)
    total = np.zeros_like(k.values)
    for i, ki in enumerate(components):
        weight = full / coord[i]   # prod_{j != i} (1 - z_j conj(w_j))
        total = total + _hadamard(1.0 / weight, ki)
    sum_residual = float(np.max(np.abs(k.values - total), initial=0.0))
    table = _eye_like(k) - _hadamard(full, k)
    report = numlin.is_psd(_gram_of(grid, table, k.dim), tol)
    passed = all(psd_flags) and sum_residual <= tol and report.is_psd
    return PolydiscReport(passed, psd_flags, sum_residual, report.min_eigenvalue)


@dataclass(frozen=True)
class BallReport:
    passed: bool
    min_eigenvalue: float


def dbr_test_ball(k: SampledKernel, tol: float = DEFAULT_TOL) -> BallReport:
    """PSD test of the Gram of I - (1 - <z, w>) K on a ball grid."""
    if not k.grid.ambient.startswith("ball"):
        raise ValueError("dbr_test_ball needs a ball grid")
    table = _eye_like(k) - _hadamard(1.0 - _pair_products(k.grid), k)
    report = numlin.is_psd(_gram_of(k.grid, table, k.dim), tol)
    return BallReport(report.is_psd, report.min_eigenvalue)


# ---------------------------------------------------------------------------
# lurking-isometry reconstruction on the disc


class ThetaRealization:
    """Schur-class symbol T(z) = A* + z C* (I - z D*)^{-1} B* built from an
    isometry [[A, B], [C, D]] mapping (values) + (state) into (defect) + (state).

    T is e_star x e valued with state dimension h; the adjoint block matrix
    [[A*, C*], [B*, D*]] is a co-isometric colligation, so T is genuinely in
    the Schur class everywhere, not only on the sample grid.
    """

    def __init__(self, A, B, C, D, e_star: int):
        self.A = numlin.as_matrix(A)
        self.B = numlin.as_matrix(B)
        self.C = numlin.as_matrix(C)
        self.D = numlin.as_matrix(D)
        self.e_star = int(e_star)
        self.e = self.A.shape[0]
        self.h = self.D.shape[0]
        if self.A.shape != (self.e, self.e_star) or self.B.shape != (self.e, self.h) \
                or self.C.shape != (self.h, self.e_star) or self.D.shape != (self.h, self.h):
            raise ValueError("inconsistent block dimensions")

    def coisometry_defect(self) -> float:
        v = np.block([[self.A, self.B], [self.C, self.D]])
        vadj = v.conj().T
        return frob(vadj @ vadj.conj().T - np.eye(vadj.shape[0]))

    def theta(self, z: complex) -> np.ndarray:
        """Value of the symbol at z (an e_star x e matrix)."""
        resolvent = np.linalg.solve(np.eye(self.h) - z * self.D.conj().T, self.B.conj().T)
        return self.A.conj().T + z * self.C.conj().T @ resolvent

    def kernel_values(self, grid: PointGrid) -> np.ndarray:
        """(I - T(z) T(w)*)/(1 - z conj(w)) tabulated on a disc grid."""
        thetas = np.stack([self.theta(complex(z)) for z in grid.points[:, 0]])
        n = len(grid)
        denom = 1.0 - _coordinate_products(grid, 0)
        if self.e_star == 1:
            flat = thetas.reshape(n, self.e)
            return (1.0 - flat @ flat.conj().T) / denom
        out = np.empty((n, n, self.e_star, self.e_star), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                out[i, j] = (np.eye(self.e_star) - thetas[i] @ thetas[j].conj().T) / denom[i, j]
        return out

    def __repr__(self) -> str:
        return f"ThetaRealization(e_star={self.e_star}, e={self.e}, h={self.h})"


def _block_rows(factor: np.ndarray, dim: int, i: int) -> np.ndarray:
    return factor[i * dim:(i + 1) * dim, :]


def dbr_reconstruct_disc(k: SampledKernel, tol: float = DEFAULT_TOL,
                         pad_cap: int = 64) -> ThetaRealization:
    """Reconstruct a Schur-class T with K = (I - T(z)T(w)*)/(1 - z conj(w))
    on the sample grid.

    Steps: factor the Gram of I - (1 - z conj(w)) K into defect rows F(w),
    factor the Gram of K into state rows G(w), assemble the isometry

        (eta, conj(w) G(w)* eta)  ->  (F(w)* eta, G(w)* eta)

    on the span of the data, and extend it by sending an orthonormal basis
    of the domain complement to fresh defect directions.  The returned
    realization reproduces K on the grid (interpolation; no claim is made
    off the grid beyond Schur-class membership)."""
    if k.grid.nvars != 1:
        raise ValueError("dbr_reconstruct_disc needs a disc grid")
    disc_report = dbr_test_disc(k, tol)
    if not disc_report.is_dbr:
        raise NotDbrError(
            f"defect Gram not PSD (lambda_min = {disc_report.min_eigenvalue:.3e})")
    kernel_psd = k.is_psd(tol)
    if not kernel_psd:
        raise NotDbrError(
            f"kernel Gram not PSD (lambda_min = {kernel_psd.min_eigenvalue:.3e})")

    e = k.dim
    n = len(k.grid)
    w = k.grid.points[:, 0]

    f_fact = disc_report.factorization
    g_fact = numlin.psd_factor(k.gram(), tol)
    rf, rg = f_fact.rank, g_fact.rank

    # data columns of the partial isometry, one per (grid point, value direction)
    dom = np.zeros((e + rg, n * e), dtype=np.complex128)
    cod = np.zeros((rf + rg, n * e), dtype=np.complex128)
    for i in range(n):
        f_i = _block_rows(f_fact.factor, e, i)      # F(w_i): e x rf
        g_i = _block_rows(g_fact.factor, e, i)      # G(w_i): e x rg
        dom[:e, i * e:(i + 1) * e] = np.eye(e)
        dom[e:, i * e:(i + 1) * e] = np.conj(w[i]) * g_i.conj().T
        cod[:rf, i * e:(i + 1) * e] = f_i.conj().T
        cod[rf:, i * e:(i + 1) * e] = g_i.conj().T

    u, sing, vh = np.linalg.svd(dom, full_matrices=True)
    scale = sing[0] if sing.size else 0.0
    rank = int(np.sum(sing > tol * (1.0 + scale)))
    basis = u[:, :rank]
    complement = u[:, rank:]
    # image of the domain basis under the data map: cod @ pinv(dom) @ basis,
    # with the pseudoinverse cut at the same rank as the basis
    image = cod @ (vh.conj().T[:, :rank] / sing[:rank])
    ortho_defect = frob(image.conj().T @ image - np.eye(rank))
    if ortho_defect > 1e-6 * (1.0 + rank):
        raise IdentityViolatedError(
            f"data map is not isometric on its span (defect {ortho_defect:.3e})")

    pad = complement.shape[1]
    if pad > pad_cap:
        raise RankOverflowError(f"isometric extension needs {pad} padded directions, cap {pad_cap}")

    # codomain layout: [original defect rows; padded defect rows; state rows]
    f_dim = rf + pad
    vmat = np.zeros((f_dim + rg, e + rg), dtype=np.complex128)
    lifted = np.zeros((f_dim + rg, rank), dtype=np.complex128)
    lifted[:rf, :] = image[:rf, :]
    lifted[f_dim:, :] = image[rf:, :]
    vmat += lifted @ basis.conj().T
    vmat[rf:f_dim, :] += complement.conj().T
    a = vmat[:f_dim, :e]
    b = vmat[:f_dim, e:]
    c = vmat[f_dim:, :e]
    d = vmat[f_dim:, e:]
    theta = ThetaRealization(a, b, c, d, e)

    residual = float(np.max(np.abs(theta.kernel_values(k.grid) - k.values), initial=0.0))
    if residual > 10.0 * tol:
        raise IdentityViolatedError(
            f"reconstruction misses the sampled kernel (residual {residual:.3e})")
    return theta
