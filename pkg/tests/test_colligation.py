import numpy as np
import pytest

import bidisc_schur as bs
from bidisc_schur.colligation import (
    as_transfer_callable,
    blaschke_section,
    transfer_grid,
)
from bidisc_schur.errors import (
    NotDivisibleError,
    NotStructuredError,
    ResolventIllConditionedError,
    ZeroOnBoundaryError,
)
from bidisc_schur.functions import taylor_from_samples
from helpers import (
    blaschke_callable,
    model_matrices_boundary_oracle,
    permutation_colligation,
    random_blaschke,
    random_two_var_unitary,
    vt_colligation,
)


def test_transfer_1d_shift():
    v = bs.Colligation(0.0, [[1.0]], [[1.0]], [[0.0]], [1])
    for z in (0.3, -0.5j, 0.1 + 0.2j):
        assert bs.transfer_1d(v, z) == pytest.approx(z)


def test_transfer_1d_identity_colligation():
    v = bs.Colligation(1.0, [[0.0, 0.0]], [[0.0], [0.0]], np.eye(2), [2])
    assert bs.transfer_1d(v, 0.4) == pytest.approx(1.0)


def test_transfer_1d_mobius():
    r = np.sqrt(3) / 2
    v = bs.Colligation(0.5, [[r]], [[r]], [[-0.5]], [1])
    assert bs.transfer_1d(v, 0.3) == pytest.approx(0.8 / 1.15)
    z = 0.2 - 0.6j
    assert bs.transfer_1d(v, z) == pytest.approx((z + 0.5) / (1 + 0.5 * z))


def test_transfer_1d_pole_guard():
    v = bs.Colligation(1.0, [[1.0]], [[1.0]], [[1.0]], [1])
    with pytest.raises(ResolventIllConditionedError):
        bs.transfer_1d(v, 1.0)


def test_transfer_constant_when_ports_vanish():
    # B = 0 or C = 0 forces a constant transfer; no resolvent is needed even
    # where I - z D is singular
    v = bs.Colligation(0.3j, [[0.0]], [[1.0]], [[1.0]], [1])
    assert bs.transfer_1d(v, 1.0) == pytest.approx(0.3j)
    v2 = bs.Colligation(1.0, np.zeros((1, 2)), np.zeros((2, 1)), np.eye(2), [1, 1])
    assert bs.transfer_2d(v2, (1.0, 1.0)) == pytest.approx(1.0)


def test_transfer_2d_permutation():
    v = permutation_colligation()
    for z in ((0.3, 0.5), (0.2j, -0.4), (0.1 + 0.1j, 0.6)):
        assert bs.transfer_2d(v, z) == pytest.approx(z[0] * z[1])


def test_transfer_2d_product_mobius_realization():
    phi = bs.mobius_of_product(0.5)
    v = vt_colligation(0.5)
    rng = np.random.default_rng(6)
    pts = 0.9 * np.sqrt(rng.uniform(size=(20, 2))) * np.exp(
        2j * np.pi * rng.uniform(size=(20, 2)))
    for z1, z2 in pts:
        assert bs.transfer_2d(v, (z1, z2)) == pytest.approx(phi.eval(z1, z2), abs=1e-12)


def test_transfer_2d_state_free():
    v = bs.Colligation(0.7j, np.zeros((1, 0)), np.zeros((0, 1)), np.zeros((0, 0)), [0, 0])
    assert bs.transfer_2d(v, (0.5, 0.5)) == pytest.approx(0.7j)


def test_transfer_grid_matches_pointwise():
    v = random_two_var_unitary(np.random.default_rng(7))
    grid = bs.make_grid("bidisc", 15, seed=3)
    batched = transfer_grid(v, grid.points)
    single = [bs.transfer_2d(v, tuple(p)) for p in grid.points]
    assert np.allclose(batched, single, atol=1e-12)


def test_series_2d_permutation():
    s = bs.series_2d(permutation_colligation(), 4, 4)
    expected = np.zeros((5, 5))
    expected[1, 1] = 1.0
    assert np.allclose(s.coeffs, expected)


def test_series_2d_composed_product_series():
    # coefficients of a product factor as the outer product of the factors'
    # one-variable expansions: (z-a)/(1-conj(a)z) has c_0 = -a and
    # c_k = (1-|a|^2) conj(a)^{k-1} for k >= 1
    def mobius_series(a, n):
        c = np.empty(n + 1, dtype=complex)
        c[0] = -a
        c[1:] = (1 - abs(a) ** 2) * np.conj(a) ** np.arange(n)
        return c

    a1, a2 = 0.5, -1 / 3
    v = bs.compose_colligations(bs.model_colligation(1.0, [a1]),
                                bs.model_colligation(1.0, [a2]))
    s = bs.series_2d(v, 8, 8)
    expected = np.outer(mobius_series(a1, 8), mobius_series(a2, 8))
    assert np.max(np.abs(s.coeffs - expected)) < 1e-12


def test_series_2d_state_free():
    v = bs.Colligation(0.4, np.zeros((1, 0)), np.zeros((0, 1)), np.zeros((0, 0)), [0, 0])
    s = bs.series_2d(v, 3, 3)
    assert s.coeffs[0, 0] == pytest.approx(0.4)
    assert np.max(np.abs(s.coeffs.ravel()[1:])) == 0.0


def test_series_2d_needs_structure():
    with pytest.raises(NotStructuredError):
        bs.series_2d(vt_colligation(0.5), 4, 4)


def test_series_2d_matches_fft_taylor():
    rng = np.random.default_rng(8)
    for _ in range(5):
        c1, z1 = random_blaschke(rng, 3, 0.7)
        c2, z2 = random_blaschke(rng, 3, 0.7)
        v = bs.compose_colligations(bs.model_colligation(c1, z1),
                                    bs.model_colligation(c2, z2))
        direct = bs.series_2d(v, 8, 8)
        sampled = taylor_from_samples(as_transfer_callable(v), 8, 8)
        assert np.max(np.abs(direct.coeffs - sampled.coeffs)) < 1e-7


def test_structure_report_permutation():
    rep = bs.structure_report(permutation_colligation())
    assert rep.is_unitary and rep.lower_left_zero
    assert rep.radius_block1 == pytest.approx(0.0)
    assert rep.radius_block2 == pytest.approx(0.0)
    assert rep.c0dot_block1 and rep.c0dot_block2


def test_structure_report_vt():
    rep = bs.structure_report(vt_colligation(0.5))
    assert rep.is_unitary
    assert not rep.lower_left_zero
    assert not rep.factorization_condition


def test_structure_report_identity():
    v = bs.Colligation(1.0, np.zeros((1, 2)), np.zeros((2, 1)), np.eye(2), [1, 1])
    rep = bs.structure_report(v)
    assert rep.is_unitary and rep.lower_left_zero
    assert rep.radius_block1 == pytest.approx(1.0)
    assert not rep.c0dot_block1 and not rep.c0dot_block2


def test_contraction_maps_bidisc_into_disc():
    rng = np.random.default_rng(9)
    grid = bs.make_grid("bidisc", 30, seed=5)
    for _ in range(10):
        v = random_two_var_unitary(rng)
        vals = transfer_grid(v, grid.points)
        assert np.max(np.abs(vals)) <= 1.0 + 1e-9
        # strict contractions too, not only unitaries
        shrunk = bs.Colligation(0.9 * v.a, 0.9 * v.B, 0.9 * v.C, 0.9 * v.D,
                                list(v.partition))
        assert shrunk.classify().is_contraction
        assert np.max(np.abs(transfer_grid(shrunk, grid.points))) <= 1.0 + 1e-9


def test_model_colligation_shift():
    v = bs.model_colligation(1.0, [0.0])
    assert np.allclose(v.V, np.array([[0, 1], [1, 0]], dtype=complex))


def test_model_colligation_shift_squared():
    v = bs.model_colligation(1.0, [0.0, 0.0])
    assert v.a == pytest.approx(0.0)
    assert np.allclose(v.B, [[1.0, 0.0]])
    assert np.allclose(v.C, [[0.0], [1.0]])
    assert np.allclose(v.D, [[0.0, 1.0], [0.0, 0.0]])
    for w in (0.3, -0.2 + 0.5j):
        assert bs.transfer_1d(v, w) == pytest.approx(w ** 2)


def test_model_colligation_constant():
    c = np.exp(0.3j)
    v = bs.model_colligation(c, [])
    assert v.h == 0
    assert v.a == pytest.approx(c)


def test_model_colligation_zero_on_boundary():
    with pytest.raises(ZeroOnBoundaryError):
        bs.model_colligation(1.0, [1.0])
    with pytest.raises(ZeroOnBoundaryError):
        blaschke_section(np.exp(1j))


def test_model_colligation_matches_boundary_integral_oracle():
    rng = np.random.default_rng(10)
    for _ in range(6):
        constant, zeros = random_blaschke(rng, 4, 0.85)
        v = bs.model_colligation(constant, zeros)
        a, b, c, d = model_matrices_boundary_oracle(constant, zeros)
        assert abs(v.a - a) < 1e-10
        assert np.max(np.abs(v.B - b)) < 1e-10
        assert np.max(np.abs(v.C - c)) < 1e-10
        assert np.max(np.abs(v.D - d)) < 1e-10


def test_model_colligation_random_products():
    rng = np.random.default_rng(11)
    disc = bs.make_grid("disc", 50, seed=12).points[:, 0]
    for _ in range(100):
        constant, zeros = random_blaschke(rng, 6, 0.9, min_degree=0)
        v = bs.model_colligation(constant, zeros)
        assert v.classify(1e-9).is_unitary
        target = blaschke_callable(constant, zeros)(disc)
        values = transfer_grid(v, disc[:, None])
        assert np.max(np.abs(values - target)) < 1e-9


def test_block_triangular_c0dot_iff_blocks():
    rng = np.random.default_rng(13)
    for _ in range(20):
        h1, h2 = rng.integers(1, 4, size=2)
        d1 = 0.6 * np.linalg.qr(rng.normal(size=(h1, h1)))[0] * rng.uniform(0.2, 1.5)
        d3 = 0.6 * np.linalg.qr(rng.normal(size=(h2, h2)))[0] * rng.uniform(0.2, 1.5)
        d = np.block([[d1, rng.normal(size=(h1, h2))], [np.zeros((h2, h1)), d3]])
        whole = bs.spectral_radius(d) < 1
        blocks = bs.spectral_radius(d1) < 1 and bs.spectral_radius(d3) < 1
        assert whole == blocks


def test_strip_monomial_z1z2_not_divisible():
    f = bs.RationalFunction2((1, 1), bs.Poly2([[1.0]]))
    with pytest.raises(NotDivisibleError, match="second"):
        bs.strip_monomial(f)


def test_strip_monomial_z1_times_inner():
    f = bs.RationalFunction2((1, 0), bs.mobius_of_product(0.5).denominator)
    p, stripped = bs.strip_monomial(f)
    assert p == 1
    assert stripped.eval(0.0, 0.0) == pytest.approx(-0.5)
    grid = bs.make_grid("bidisc", 10, seed=1)
    z1, z2 = grid.points[:, 0], grid.points[:, 1]
    assert np.allclose(z1 * stripped.eval(z1, z2), f.eval(z1, z2))


def test_strip_monomial_noop():
    f = bs.mobius_of_product(0.5)
    p, stripped = bs.strip_monomial(f)
    assert p == 0 and stripped is f


def test_strip_monomial_series_input():
    table = np.zeros((4, 4), dtype=complex)
    table[2, 0] = 1.0
    table[3, 1] = 0.5
    p, stripped = bs.strip_monomial(bs.PowerSeries2(table))
    assert p == 2
    assert stripped.coeffs[0, 0] == pytest.approx(1.0)


def test_strip_monomial_var2():
    f = bs.RationalFunction2((0, 2), bs.mobius_of_product(0.5).denominator)
    p, stripped = bs.strip_monomial_var2(f)
    assert p == 2
    assert stripped.eval(0.0, 0.0) == pytest.approx(-0.5)


def test_strip_monomial_no_z1_factor():
    table = np.zeros((3, 3), dtype=complex)
    table[0, 1] = 1.0   # pure z2: nothing to strip in the first variable
    with pytest.raises(NotDivisibleError):
        bs.strip_monomial(bs.PowerSeries2(table))
