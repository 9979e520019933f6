"""Colligation operators V = [[a, B], [C, D]] on C + H with a partitioned
state space, their transfer functions on the disc and bidisc, structural
predicates, model-space realizations of finite Blaschke products, and
monomial stripping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numlin
from .errors import (
    NotDivisibleError,
    NotStructuredError,
    ResolventIllConditionedError,
    ZeroOnBoundaryError,
)
from .functions import PowerSeries2, RationalFunction2, series_of
from .numlin import DEFAULT_TOL, as_matrix, frob


class Colligation:
    """Block operator matrix [[a, B], [C, D]] with a state partition.

    a is a scalar, B is 1 x h, C is h x 1, D is h x h, and partition lists
    the state-block dimensions (one entry per variable; only one or two
    variables are supported).  For two variables the D sub-blocks follow
    the usual labels: D1 (upper-left), D2 (upper-right), D4 (lower-right,
    also exposed as D3, the label used in the triangular form where the
    lower-left block vanishes), and lower_left for the coupling block.
    """

    def __init__(self, a, B, C, D, partition):
        self.a = complex(np.asarray(a).reshape(()))
        self.B = as_matrix(B)
        self.C = as_matrix(C)
        self.D = as_matrix(D)
        self.partition = tuple(int(h) for h in partition)
        if len(self.partition) not in (1, 2):
            raise ValueError("partition must have one or two blocks")
        if any(h < 0 for h in self.partition):
            raise ValueError("partition entries must be nonnegative")
        h = sum(self.partition)
        if self.C.size == 0:
            self.C = self.C.reshape(h, 1) if h else np.zeros((0, 1), dtype=np.complex128)
        if self.B.size == 0:
            self.B = self.B.reshape(1, h) if h else np.zeros((1, 0), dtype=np.complex128)
        if self.B.shape != (1, h) or self.C.shape != (h, 1) or self.D.shape != (h, h):
            raise ValueError(
                f"inconsistent dimensions: partition sums to {h}, "
                f"B {self.B.shape}, C {self.C.shape}, D {self.D.shape}"
            )

    @property
    def h(self) -> int:
        return sum(self.partition)

    @property
    def nvars(self) -> int:
        return len(self.partition)

    @property
    def V(self) -> np.ndarray:
        h = self.h
        v = np.empty((1 + h, 1 + h), dtype=np.complex128)
        v[0, 0] = self.a
        v[0, 1:] = self.B[0]
        v[1:, 0] = self.C[:, 0]
        v[1:, 1:] = self.D
        return v

    # block views (two-variable colligations)

    def _h1(self) -> int:
        if self.nvars != 2:
            raise ValueError("block views need a two-variable colligation")
        return self.partition[0]

    @property
    def B1(self) -> np.ndarray:
        return self.B[:, : self._h1()]

    @property
    def B2(self) -> np.ndarray:
        return self.B[:, self._h1():]

    @property
    def C1(self) -> np.ndarray:
        return self.C[: self._h1(), :]

    @property
    def C2(self) -> np.ndarray:
        return self.C[self._h1():, :]

    @property
    def D1(self) -> np.ndarray:
        k = self._h1()
        return self.D[:k, :k]

    @property
    def D2(self) -> np.ndarray:
        k = self._h1()
        return self.D[:k, k:]

    @property
    def lower_left(self) -> np.ndarray:
        k = self._h1()
        return self.D[k:, :k]

    @property
    def D4(self) -> np.ndarray:
        k = self._h1()
        return self.D[k:, k:]

    # triangular-form alias for the lower-right block
    D3 = D4

    def classify(self, tol: float = DEFAULT_TOL) -> numlin.OperatorClass:
        return numlin.classify(self.V, tol)

    def diag_scaling(self, z) -> np.ndarray:
        """E(z) = z1 I  (+) z2 I on the partitioned state space."""
        reps = np.repeat(np.asarray(z, dtype=np.complex128), self.partition)
        return np.diag(reps)

    def __repr__(self) -> str:
        return f"Colligation(partition={list(self.partition)})"


def _solve_resolvent(m: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        x = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        raise ResolventIllConditionedError(str(exc)) from exc
    resid = np.linalg.norm(m @ x - rhs)
    if not np.all(np.isfinite(x)) or resid > 1e-6 * (1.0 + np.linalg.norm(x)):
        raise ResolventIllConditionedError(
            f"resolvent solve residual {resid:.3e}; point too close to a pole"
        )
    return x


def _is_constant(v: Colligation) -> bool:
    # with B = 0 or C = 0 the transfer is the constant a, whatever D does
    return v.h == 0 or not v.B.any() or not v.C.any()


def transfer_1d(v: Colligation, z: complex) -> complex:
    """a + z B (I - z D)^{-1} C for a one-variable colligation."""
    if v.nvars != 1:
        raise ValueError("transfer_1d needs a one-variable colligation")
    if _is_constant(v):
        return v.a
    x = _solve_resolvent(np.eye(v.h) - z * v.D, v.C)
    return v.a + z * complex((v.B @ x)[0, 0])


def transfer_2d(v: Colligation, z) -> complex:
    """a + B (I - E(z) D)^{-1} E(z) C for a two-variable colligation."""
    if v.nvars != 2:
        raise ValueError("transfer_2d needs a two-variable colligation")
    if _is_constant(v):
        return v.a
    e = v.diag_scaling(z)
    x = _solve_resolvent(np.eye(v.h) - e @ v.D, e @ v.C)
    return v.a + complex((v.B @ x)[0, 0])


def transfer_grid(v: Colligation, points) -> np.ndarray:
    """Transfer values at many points, one direct linear solve per point."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.complex128))
    if _is_constant(v):
        return np.full(pts.shape[0], v.a, dtype=np.complex128)
    if v.nvars == 1:
        z = pts.reshape(-1)
        e = z[:, None, None] * np.eye(v.h)
        rhs = np.broadcast_to(v.C, (len(z), v.h, 1))
    else:
        reps = np.repeat(pts, v.partition, axis=1)
        e = reps[:, :, None] * np.eye(v.h)
        rhs = e @ v.C
    mats = np.eye(v.h) - e @ v.D
    try:
        x = np.linalg.solve(mats, rhs)
    except np.linalg.LinAlgError as exc:
        raise ResolventIllConditionedError(str(exc)) from exc
    resid = np.linalg.norm(mats @ x - rhs, axis=(1, 2))
    if not np.all(np.isfinite(x)) or np.any(resid > 1e-6 * (1.0 + np.linalg.norm(x, axis=(1, 2)))):
        raise ResolventIllConditionedError("resolvent ill conditioned at a grid point")
    bx = (v.B @ x)[:, 0, 0]
    if v.nvars == 1:
        return v.a + pts.reshape(-1) * bx
    return v.a + bx


def as_transfer_callable(v: Colligation):
    """The transfer function as a vectorized callable f(z1, z2) or f(z)."""
    if v.nvars == 2:
        def fn(z1, z2):
            z1 = np.asarray(z1, dtype=np.complex128)
            z2 = np.asarray(z2, dtype=np.complex128)
            shape = np.broadcast_shapes(z1.shape, z2.shape)
            pts = np.column_stack([np.broadcast_to(z1, shape).ravel(),
                                   np.broadcast_to(z2, shape).ravel()])
            out = transfer_grid(v, pts).reshape(shape)
            return out[()] if out.ndim == 0 else out
        return fn

    def fn1(z):
        z = np.asarray(z, dtype=np.complex128)
        out = transfer_grid(v, z.ravel()[:, None]).reshape(z.shape)
        return out[()] if out.ndim == 0 else out
    return fn1


def _require_structured(v: Colligation, tol: float) -> None:
    if v.nvars != 2:
        raise NotStructuredError("structured form needs a two-variable colligation")
    if frob(v.lower_left) > tol * (1.0 + frob(v.D)):
        raise NotStructuredError(
            f"lower-left D block is nonzero (norm {frob(v.lower_left):.3e})"
        )


def series_coefficient_table(v: Colligation, n1: int, n2: int,
                             tol: float = DEFAULT_TOL) -> np.ndarray:
    """Raw coefficient table of the transfer expansion of a triangular
    colligation:

        phi_{i0} = B1 D1^{i-1} C1,   phi_{0j} = B2 D3^{j-1} C2,
        phi_{ij} = B1 D1^{i-1} D2 D3^{j-1} C2.
    """
    _require_structured(v, tol)
    b1, b2, c1, c2 = v.B1, v.B2, v.C1, v.C2
    d1, d2, d3 = v.D1, v.D2, v.D4
    out = np.zeros((n1 + 1, n2 + 1), dtype=np.complex128)
    out[0, 0] = v.a
    # rows of B1 D1^{i-1} and columns of D3^{j-1} C2, built by iteration
    left = b1.copy()
    lefts = []
    for _ in range(n1):
        lefts.append(left)
        left = left @ d1
    right = c2.copy()
    rights = []
    for _ in range(n2):
        rights.append(right)
        right = d3 @ right
    for i, li in enumerate(lefts, start=1):
        out[i, 0] = (li @ c1)[0, 0]
    for j, rj in enumerate(rights, start=1):
        out[0, j] = (b2 @ rj)[0, 0]
    for i, li in enumerate(lefts, start=1):
        mid = li @ d2
        for j, rj in enumerate(rights, start=1):
            out[i, j] = (mid @ rj)[0, 0]
    return out


def series_2d(v: Colligation, n1: int, n2: int, tol: float = DEFAULT_TOL) -> PowerSeries2:
    """Transfer power series of a triangular colligation, truncated at (n1, n2)."""
    return PowerSeries2(series_coefficient_table(v, n1, n2, tol))


@dataclass(frozen=True)
class StructureReport:
    is_isometry: bool
    is_coisometry: bool
    is_unitary: bool
    is_contraction: bool
    lower_left_zero: bool
    radius_block1: float
    radius_block2: float
    c0dot_block1: bool
    c0dot_block2: bool
    factorization_condition: bool


def structure_report(v: Colligation, tol: float = DEFAULT_TOL) -> StructureReport:
    """Structural predicates of a two-variable colligation.

    Membership of a finite matrix in the class of contractions with powers
    tending to zero is decided by spectral radius < 1 - tol.
    """
    if v.nvars != 2:
        raise ValueError("structure_report needs a two-variable colligation")
    cls = v.classify(tol)
    scale = 1.0 + frob(v.D)
    lower_zero = frob(v.lower_left) <= tol * scale
    r1 = numlin.spectral_radius(v.D1)
    r2 = numlin.spectral_radius(v.D4)
    cond = frob(v.a * v.D2 - v.C1 @ v.B2) <= tol * scale
    return StructureReport(
        cls.is_isometry, cls.is_coisometry, cls.is_unitary, cls.is_contraction,
        lower_zero, r1, r2, r1 < 1.0 - tol, r2 < 1.0 - tol, cond,
    )


# ---------------------------------------------------------------------------
# cascades and the model-space realization


def cascade_blocks(v1: Colligation, v2: Colligation):
    """Blocks of the product colligation

        [[a1 a2, B1, a1 B2], [a2 C1, D1, C1 B2], [C2, 0, D2]]

    whose transfer function is the product of the factors' transfer
    functions (in separate variables, or in the shared variable when both
    factors depend on the same one)."""
    if v1.nvars != 1 or v2.nvars != 1:
        raise ValueError("cascade needs one-variable factors")
    h1, h2 = v1.h, v2.h
    a = v1.a * v2.a
    b = np.concatenate([v1.B, v1.a * v2.B], axis=1)
    c = np.concatenate([v2.a * v1.C, v2.C], axis=0)
    d = np.zeros((h1 + h2, h1 + h2), dtype=np.complex128)
    d[:h1, :h1] = v1.D
    d[:h1, h1:] = v1.C @ v2.B
    d[h1:, h1:] = v2.D
    return a, b, c, d, h1, h2


def _cascade_1d(v1: Colligation, v2: Colligation) -> Colligation:
    a, b, c, d, h1, h2 = cascade_blocks(v1, v2)
    return Colligation(a, b, c, d, [h1 + h2])


def blaschke_section(alpha: complex) -> Colligation:
    """Unitary realization of the single factor (z - alpha)/(1 - conj(alpha) z)."""
    alpha = complex(alpha)
    if abs(alpha) >= 1.0:
        raise ZeroOnBoundaryError(f"zero not strictly inside the disc: |{alpha}| >= 1")
    gamma = np.sqrt(1.0 - abs(alpha) ** 2)
    return Colligation(-alpha, [[gamma]], [[gamma]], [[np.conj(alpha)]], [1])


def model_colligation(constant: complex, zeros) -> Colligation:
    """Unitary colligation of a finite Blaschke product on its model space.

    The state space is H^2 minus the shift-invariant subspace generated by
    the product, and the matrices of the projection onto constants, the
    backward shift composed with multiplication, and the compressed
    backward shift are taken in the Takenaka-Malmquist orthonormal basis
    (zeros processed in input order).  This fixes the matrices
    reproducibly; the same operators in that basis arise from cascading
    one-zero unitary sections and folding the unimodular constant last.
    """
    constant = complex(constant)
    if abs(abs(constant) - 1.0) > 1e-12:
        raise ValueError(f"leading constant must be unimodular, got |c| = {abs(constant)}")
    v = Colligation(1.0, np.zeros((1, 0)), np.zeros((0, 1)), np.zeros((0, 0)), [0])
    for alpha in zeros:
        v = _cascade_1d(v, blaschke_section(alpha))
    tail = Colligation(constant, np.zeros((1, 0)), np.zeros((0, 1)), np.zeros((0, 0)), [0])
    return _cascade_1d(v, tail)


# ---------------------------------------------------------------------------
# monomial stripping


def _strip_series_table(coeffs: np.ndarray, tol_abs: float):
    nz = np.abs(coeffs) > tol_abs
    if not nz.any():
        raise NotDivisibleError("series vanishes identically to truncation")
    p = int(np.argwhere(nz)[:, 0].min())
    return p


def strip_monomial(f, truncation: int = 16, tol: float = DEFAULT_TOL):
    """Factor out the largest pure power of the first variable.

    Returns (p, stripped) where stripped has a nonzero value at the origin.
    Raises NotDivisibleError when no first-variable power divides, or when
    the quotient still vanishes at the origin (the diagnostic then suggests
    stripping the second variable instead).  Stripping in the second
    variable is the separate call strip_monomial_var2.
    """
    if isinstance(f, RationalFunction2):
        table = series_of(f, truncation, truncation).coeffs
    elif isinstance(f, PowerSeries2):
        table = f.coeffs
    else:
        raise TypeError("strip_monomial needs a rational function or a power series")
    tol_abs = tol * (1.0 + float(np.abs(table).max(initial=0.0)))
    if abs(table[0, 0]) > tol_abs:
        return 0, f
    p = _strip_series_table(table, tol_abs)
    if p == 0:
        raise NotDivisibleError(
            "value at the origin vanishes but no power of the first variable "
            "divides; try stripping the second variable"
        )
    if isinstance(f, RationalFunction2):
        m1, m2 = f.monomial
        if m1 < p:
            raise NotDivisibleError(
                f"monomial exponent {m1} smaller than series valuation {p}"
            )
        stripped = RationalFunction2((m1 - p, m2), f.denominator, f.unimodular,
                                     check_zero_free=False)
        origin = complex(stripped.eval(0.0, 0.0))
    else:
        stripped = PowerSeries2(f.coeffs[p:, :])
        origin = complex(stripped.coeffs[0, 0])
    if abs(origin) <= tol_abs:
        raise NotDivisibleError(
            f"after removing {p} first-variable power(s) the value at the origin "
            "still vanishes; a second-variable factor remains (try strip_monomial_var2)"
        )
    return p, stripped


def strip_monomial_var2(f, truncation: int = 16, tol: float = DEFAULT_TOL):
    """Symmetric twin of strip_monomial acting on the second variable."""
    p, stripped = strip_monomial(f.swap_variables(), truncation, tol)
    return p, stripped.swap_variables()
