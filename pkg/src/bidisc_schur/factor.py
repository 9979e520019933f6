"""One-variable factorization of two-variable Schur functions: separability
testing, the co-isometric splitting V -> (V1, V2), cascade composition, the
block-inverse converse pipeline for unitary colligations, and the Agler-
kernel factorization conditions on companioned grids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numlin
from .colligation import (
    Colligation,
    cascade_blocks,
    structure_report,
    transfer_grid,
)
from .errors import (
    ClassMismatchError,
    ConditionFailedError,
    GridMismatchError,
    GridNotCompanionedError,
    IdentityViolatedError,
    OriginZeroError,
)
from .functions import PointGrid, as_evaluable, make_grid
from .kernels import SampledKernel
from .numlin import DEFAULT_TOL, frob

_CERT_GRID_SIZE = 30
_CERT_GRID_SEED = 20260810


@dataclass(frozen=True)
class SeparabilityReport:
    separable: bool
    max_residual: float
    factor1_samples: np.ndarray   # over the grid's first coordinates
    factor2_samples: np.ndarray
    gauge: complex


def separability_test(f, grid: PointGrid, tol: float = DEFAULT_TOL) -> SeparabilityReport:
    """Does f(z1, z2) split as f1(z1) f2(z2)?

    For f(0,0) != 0 this is equivalent to the cross-section identity
    f(z1, z2) f(0, 0) = f(z1, 0) f(0, z2) on the grid, which is what gets
    tested.  When it holds, factor samples are returned with the gauge
    fixed so that f1 is positive real at its largest-modulus sample."""
    if grid.ambient != "bidisc":
        raise ValueError("separability_test needs a bidisc grid")
    fn = as_evaluable(f)
    origin = complex(np.asarray(fn(0.0, 0.0)).reshape(()))
    if abs(origin) <= tol:
        raise OriginZeroError(
            "value at the origin vanishes; strip monomial factors first")
    z1 = grid.points[:, 0]
    z2 = grid.points[:, 1]
    vals = np.asarray(fn(z1, z2), dtype=np.complex128)
    sec1 = np.asarray(fn(z1, np.zeros_like(z2)), dtype=np.complex128)
    sec2 = np.asarray(fn(np.zeros_like(z1), z2), dtype=np.complex128)
    residual = float(np.max(np.abs(vals * origin - sec1 * sec2), initial=0.0))
    k = int(np.argmax(np.abs(sec1)))
    gauge = sec1[k] / abs(sec1[k]) if abs(sec1[k]) > 0 else 1.0 + 0.0j
    return SeparabilityReport(
        residual <= tol, residual, sec1 / gauge, sec2 * gauge / origin, gauge)


def check_condition_4(v: Colligation, tol: float = DEFAULT_TOL) -> bool:
    """Splittability condition: co-isometric, vanishing lower-left coupling
    block, and a * D2 = C1 B2."""
    report = structure_report(v, tol)
    return bool(report.is_coisometry and report.lower_left_zero
                and report.factorization_condition)


@dataclass(frozen=True)
class FactorizationResult:
    """Split of a two-variable colligation into one-variable co-isometric
    factors, with x y = a and the certificate residual of
    tau_V - tau_{V1} tau_{V2} over the test grid."""

    v1: Colligation
    v2: Colligation
    y: complex
    x: complex
    certificate: float


def product_residual(v: Colligation, v1: Colligation, v2: Colligation,
                     grid: PointGrid) -> float:
    vals = transfer_grid(v, grid.points)
    vals1 = transfer_grid(v1, grid.points[:, :1])
    vals2 = transfer_grid(v2, grid.points[:, 1:])
    return float(np.max(np.abs(vals - vals1 * vals2), initial=0.0))


def split_colligation(v: Colligation, tol: float = DEFAULT_TOL) -> FactorizationResult:
    """Split a colligation satisfying check_condition_4 into

        V1 = [[y, B1], [C1/x, D1]]   and   V2 = [[x, B2/y], [C2, D4]]

    with y = +sqrt(1 - B1 B1*) (positive real branch; any unimodular
    rotation is gauge) and x = a/y.  Both factors are co-isometric and the
    transfer functions multiply back to the original on a fixed test grid."""
    if abs(v.a) <= tol:
        raise OriginZeroError("cannot split: the constant term vanishes")
    if not check_condition_4(v, tol):
        raise ConditionFailedError(
            "colligation fails the splittability condition "
            "(co-isometry, zero lower-left block, a D2 = C1 B2)")
    b1_norm_sq = float(np.linalg.norm(v.B1) ** 2)
    y = complex(np.sqrt(max(1.0 - b1_norm_sq, 0.0)))
    if abs(y) <= tol:
        raise ConditionFailedError("degenerate split: 1 - B1 B1* is not positive")
    x = v.a / y
    h1, h2 = v.partition
    v1 = Colligation(y, v.B1, v.C1 / x, v.D1, [h1])
    v2 = Colligation(x, v.B2 / y, v.C2, v.D4, [h2])
    grid = make_grid("bidisc", _CERT_GRID_SIZE, _CERT_GRID_SEED)
    certificate = product_residual(v, v1, v2, grid)
    if certificate > max(tol, 1e-10):
        raise IdentityViolatedError(
            f"split factors do not reproduce the transfer function "
            f"(residual {certificate:.3e})")
    return FactorizationResult(v1, v2, y, x, certificate)


def compose_colligations(v1: Colligation, v2: Colligation,
                         tol: float = DEFAULT_TOL) -> Colligation:
    """Two-variable colligation realizing tau_{V1}(z1) * tau_{V2}(z2).

    Both factors must be isometric, or both co-isometric; the composition
    preserves the shared class (and hence unitarity)."""
    c1 = v1.classify(tol)
    c2 = v2.classify(tol)
    if not ((c1.is_isometry and c2.is_isometry)
            or (c1.is_coisometry and c2.is_coisometry)):
        raise ClassMismatchError(
            "factors must share a class: both isometric or both co-isometric")
    a, b, c, d, h1, h2 = cascade_blocks(v1, v2)
    out = Colligation(a, b, c, d, [h1, h2])
    grid = make_grid("bidisc", _CERT_GRID_SIZE, _CERT_GRID_SEED)
    residual = product_residual(out, v1, v2, grid)
    if residual > max(tol, 1e-10):
        raise IdentityViolatedError(
            f"composition does not realize the product (residual {residual:.3e})")
    return out


@dataclass(frozen=True)
class ConverseReport:
    """Outcome of the unitary-colligation converse pipeline: the block
    inverse identity, the vanishing coupling condition, and the resulting
    split."""

    adjoint_identity_residual: float
    coupling_residual: float
    factorization: FactorizationResult


def weak_converse_check(v: Colligation, tol: float = DEFAULT_TOL) -> ConverseReport:
    """Execute the converse pipeline for a finite-dimensional unitary
    colligation with nonzero constant term, zero lower-left block and both
    diagonal D-blocks of spectral radius < 1:

    compute (a D - C B)^{-1} blockwise, verify the adjoint identity
    D* = a (a D - C B)^{-1} (the Schur complement of the scalar corner of V
    is a^{-1}(a D - C B)), confirm a D2 - C1 B2 = 0, then split."""
    if v.nvars != 2:
        raise ValueError("weak_converse_check needs a two-variable colligation")
    report = structure_report(v, tol)
    if not report.is_unitary:
        raise ConditionFailedError("precondition failed: colligation is not unitary")
    if abs(v.a) <= tol:
        raise OriginZeroError("precondition failed: constant term vanishes")
    if not report.lower_left_zero:
        raise ConditionFailedError("precondition failed: lower-left D block is nonzero")
    if not (report.radius_block1 < 1.0 and report.radius_block2 < 1.0):
        raise ConditionFailedError(
            "precondition failed: a diagonal D block has spectral radius >= 1")
    a = v.a
    p = a * v.D1 - v.C1 @ v.B1
    q = a * v.D2 - v.C1 @ v.B2
    r = -v.C2 @ v.B1                      # lower-left of a D - C B given D21 = 0
    s = a * v.D4 - v.C2 @ v.B2
    inv = numlin.block_inverse_2x2(p, q, r, s, tol)
    identity_residual = frob(v.D.conj().T - a * inv)
    if identity_residual > tol * (1.0 + frob(v.D)):
        raise ConditionFailedError(
            f"adjoint identity D* = a (aD - CB)^{{-1}} fails "
            f"(residual {identity_residual:.3e})")
    coupling = frob(q)
    if coupling > tol * (1.0 + frob(v.D)):
        raise ConditionFailedError(
            f"coupling condition a D2 = C1 B2 fails (norm {coupling:.3e})")
    return ConverseReport(identity_residual, coupling, split_colligation(v, tol))


# ---------------------------------------------------------------------------
# Agler-kernel factorization conditions on companioned grids


@dataclass(frozen=True)
class CompanionedGrid:
    """Product grid axis1 x axis2 (both axes containing 0) so that section
    and invariance checks are exact comparisons of sampled values."""

    axis1: np.ndarray
    axis2: np.ndarray
    grid: PointGrid

    @property
    def origin1(self) -> int:
        return int(np.argmin(np.abs(self.axis1)))

    @property
    def origin2(self) -> int:
        return int(np.argmin(np.abs(self.axis2)))

    def index(self, i: int, j: int) -> int:
        return i * len(self.axis2) + j


def companioned_grid(axis1, axis2) -> CompanionedGrid:
    a1 = np.asarray(axis1, dtype=np.complex128).ravel()
    a2 = np.asarray(axis2, dtype=np.complex128).ravel()
    if not (np.abs(a1).min(initial=np.inf) < 1e-14 and np.abs(a2).min(initial=np.inf) < 1e-14):
        raise GridNotCompanionedError("both axes must contain the origin")
    z1, z2 = np.meshgrid(a1, a2, indexing="ij")
    grid = PointGrid("bidisc", np.column_stack([z1.ravel(), z2.ravel()]))
    return CompanionedGrid(a1, a2, grid)


def product_grid(n1: int, n2: int, seed: int = 0, radius: float = 0.6) -> CompanionedGrid:
    """Companioned grid with n1 x n2 random interior axis values plus 0."""
    rng = np.random.default_rng(seed)

    def axis(n):
        vals = radius * np.sqrt(rng.uniform(size=n - 1)) \
            * np.exp(2j * np.pi * rng.uniform(size=n - 1))
        return np.concatenate([[0.0 + 0.0j], vals])

    return companioned_grid(axis(n1), axis(n2))


@dataclass(frozen=True)
class FactorizationConditions:
    cond2: bool
    invariance_residual: float
    section_residual: float


def agler_factorization_conditions(f, k1: SampledKernel, k2: SampledKernel,
                                   cgrid: CompanionedGrid,
                                   tol: float = DEFAULT_TOL) -> FactorizationConditions:
    """Kernel-level factorization conditions for a function with f(0,0) != 0:

    (a) K1 is invariant under changes of the second coordinates of both
        arguments (checked across companion points of the product grid);
    (b) conj(f(0,0)) K2(., (w1, 0)) = conj(f(w1, 0)) K2(., (0,0)) for every
        first-axis value w1, as functions of the first argument over the grid.
    """
    if not (k1.grid.same_points(cgrid.grid) and k2.grid.same_points(cgrid.grid)):
        raise GridMismatchError("kernels must be sampled on the companioned grid")
    if k1.dim != 1 or k2.dim != 1:
        raise ValueError("factorization conditions are for scalar kernels")
    fn = as_evaluable(f)
    origin = complex(np.asarray(fn(0.0, 0.0)).reshape(()))
    if abs(origin) <= tol:
        raise OriginZeroError("value at the origin vanishes; strip monomials first")

    n1, n2 = len(cgrid.axis1), len(cgrid.axis2)
    vals1 = k1.values.reshape(n1, n2, n1, n2)
    ref = vals1[:, :1, :, :1]                       # second coordinates pinned
    invariance = float(np.max(np.abs(vals1 - ref), initial=0.0))

    j0 = cgrid.origin2
    i0 = cgrid.origin1
    section = 0.0
    col0 = k2.values[:, cgrid.index(i0, j0)]
    for i, w1 in enumerate(cgrid.axis1):
        coli = k2.values[:, cgrid.index(i, j0)]
        fw = complex(np.asarray(fn(w1, 0.0)).reshape(()))
        section = max(section, float(np.max(np.abs(
            np.conj(origin) * coli - np.conj(fw) * col0), initial=0.0)))
    return FactorizationConditions(
        invariance <= tol and section <= tol, invariance, section)


# ---------------------------------------------------------------------------
# difference-quotient fixture: explicit colligation action on kernel columns


def difference_quotient_colligation(f, kernel1, kernel2,
                                    cgrid: CompanionedGrid,
                                    tol: float = DEFAULT_TOL) -> Colligation:
    """Assemble the colligation whose blocks act on the reproducing-kernel
    spaces of the two Agler kernels by difference quotients:

        (D1 g)(w) = (g(w) - g(0,0)) / w1          on the first space,
        (D2 g)(w) = (g(w1, 0) - g(0,0)) / w1      second space -> first,
        (D4 g)(w) = (g(w) - g(w1, 0)) / w2        on the second space,
        (C1 1)(w) = (f(w1, 0) - f(0,0)) / w1,
        (C2 1)(w) = (f(w) - f(w1, 0)) / w2,
        (B g)    = g(0,0),

    with matrices taken in the coordinates of low-rank factorizations of
    the sampled kernel Gram matrices.  kernel1/kernel2 are callables
    k(z, w) of two bidisc points.  Intended for cross-checking splits on
    kernels with finite-dimensional spaces (the sampled span is then the
    whole space and the matrices are exact up to round-off)."""
    grid = cgrid.grid
    pts = grid.points
    n = len(grid)
    fn = as_evaluable(f)

    def gram_of(kernel):
        g = np.empty((n, n), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                g[i, j] = kernel(pts[i], pts[j])
        return g

    fact1 = numlin.psd_factor(gram_of(kernel1), tol)
    fact2 = numlin.psd_factor(gram_of(kernel2), tol)
    f1, f2 = fact1.factor, fact2.factor            # sample-value bases

    idx0 = cgrid.index(cgrid.origin1, cgrid.origin2)
    proj1 = np.array([cgrid.index(i, cgrid.origin2)
                      for i in range(len(cgrid.axis1))
                      for _ in range(len(cgrid.axis2))])  # w -> (w1, 0)
    w1 = pts[:, 0]
    w2 = pts[:, 1]
    rows1 = np.abs(w1) > 1e-13
    rows2 = np.abs(w2) > 1e-13

    def coords(basis, numer, denom, rows):
        samples = np.atleast_2d(numer[rows]) / denom[rows, None]
        sol, _, _, _ = np.linalg.lstsq(basis[rows], samples, rcond=None)
        recon = basis[rows] @ sol
        if np.max(np.abs(recon - samples), initial=0.0) > 1e-7 * (1.0 + np.max(np.abs(samples))):
            raise IdentityViolatedError(
                "difference-quotient action leaves the sampled span")
        return sol

    d1 = coords(f1, f1 - f1[idx0], w1, rows1)
    d2 = coords(f1, f2[proj1] - f2[idx0], w1, rows1)
    d4 = coords(f2, f2 - f2[proj1], w2, rows2)
    fvals = np.asarray(fn(w1, w2), dtype=np.complex128)
    fsec = fvals[proj1]
    c1 = coords(f1, (fsec - fvals[idx0])[:, None], w1, rows1)
    c2 = coords(f2, (fvals - fsec)[:, None], w2, rows2)
    b1 = f1[idx0][None, :]
    b2 = f2[idx0][None, :]

    h1, h2 = fact1.rank, fact2.rank
    d = np.zeros((h1 + h2, h1 + h2), dtype=np.complex128)
    d[:h1, :h1] = d1
    d[:h1, h1:] = d2
    d[h1:, h1:] = d4
    b = np.concatenate([b1, b2], axis=1)
    c = np.concatenate([c1, c2], axis=0)
    return Colligation(fvals[idx0], b, c, d, [h1, h2])
