"""Shared fixture builders and independent oracles for the test suite."""

import numpy as np

import bidisc_schur as bs
from bidisc_schur.kernels import ThetaRealization


def random_unitary(rng, n):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_blaschke(rng, max_degree=4, radius=0.8, min_degree=1):
    deg = int(rng.integers(min_degree, max_degree + 1))
    zeros = radius * np.sqrt(rng.uniform(size=deg)) * np.exp(
        2j * np.pi * rng.uniform(size=deg))
    constant = np.exp(2j * np.pi * rng.uniform())
    return complex(constant), list(zeros)


def blaschke_callable(constant, zeros):
    def fn(z):
        out = np.full_like(np.asarray(z, dtype=complex), complex(constant))
        for a in zeros:
            out = out * (z - a) / (1 - np.conj(a) * z)
        return out
    return fn


def mobius(a):
    return lambda z: (z - a) / (1 - np.conj(a) * z)


def permutation_colligation():
    # realizes z1 * z2
    return bs.Colligation(0.0, [[1, 0]], [[0], [1]], [[0, 1], [0, 0]], [1, 1])


def vt_colligation(t):
    # unitary realization of (z1 z2 - t)/(1 - t z1 z2); lower-left entry is t
    g = np.sqrt(1 - t * t)
    return bs.Colligation(-t, [[g, 0]], [[0], [g]], [[0, 1], [t, 0]], [1, 1])


def random_two_var_unitary(rng, hmax=6):
    h = int(rng.integers(1, hmax + 1))
    h1 = int(rng.integers(0, h + 1))
    u = random_unitary(rng, 1 + h)
    return bs.Colligation(u[0, 0], u[:1, 1:], u[1:, :1], u[1:, 1:], [h1, h - h1])


def random_theta(rng, hmax=5):
    h = int(rng.integers(1, hmax + 1))
    u = random_unitary(rng, 1 + h)
    return ThetaRealization(u[:1, :1], u[:1, 1:], u[1:, :1], u[1:, 1:], 1)


def composed_blaschke(rng, max_degree=4, radius=0.8):
    c1, z1 = random_blaschke(rng, max_degree, radius)
    c2, z2 = random_blaschke(rng, max_degree, radius)
    v = bs.compose_colligations(bs.model_colligation(c1, z1),
                                bs.model_colligation(c2, z2))
    f1 = blaschke_callable(c1, z1)
    f2 = blaschke_callable(c2, z2)
    return v, f1, f2


def model_matrices_boundary_oracle(constant, zeros, npts=4096):
    """Model-space colligation entries by H^2 boundary integrals against the
    Takenaka-Malmquist basis, independent of the library's construction."""
    z = np.exp(2j * np.pi * np.arange(npts) / npts)
    basis = []
    prod = np.ones_like(z)
    for a in zeros:
        gamma = np.sqrt(1 - abs(a) ** 2)
        basis.append(gamma * prod / (1 - np.conj(a) * z))
        prod = prod * (z - a) / (1 - np.conj(a) * z)
    b_vals = constant * prod

    def ip(f, g):
        return complex(np.mean(f * np.conj(g)))

    d = len(zeros)
    a_entry = ip(b_vals, np.ones_like(z))
    b_row = np.array([[ip(e, np.ones_like(z)) for e in basis]])
    back_b = (b_vals - a_entry) / z
    c_col = np.array([[ip(back_b, e)] for e in basis])
    d_mat = np.empty((d, d), dtype=complex)
    for k, ek in enumerate(basis):
        back = (ek - ip(ek, np.ones_like(z))) / z
        for j, ej in enumerate(basis):
            d_mat[j, k] = ip(back, ej)
    return a_entry, b_row.reshape(1, d), c_col.reshape(d, 1), d_mat
