"""Seeded random fixtures for sweeps, selftests, and property checks.

All randomness flows through numpy's Philox counter-based generator so a
single 64-bit seed reproduces every sweep bit-for-bit across platforms.
"""

from __future__ import annotations

import numpy as np

from .channels import ClassicalChannel, Povm, QuantumChannel
from .gaussian import GaussianWigner, LinearQuadrature
from .operator_core import hermitian_part


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _ginibre(gen, rows, cols):
    return gen.standard_normal((rows, cols)) + 1j * gen.standard_normal((rows, cols))


def random_hermitian(gen, dim: int, scale: float = 1.0) -> np.ndarray:
    return hermitian_part(_ginibre(gen, dim, dim)) * scale


def random_unitary(gen, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(_ginibre(gen, dim, dim))
    # fix the phase ambiguity of QR so the distribution is Haar
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_psd(gen, dim: int, rank: int | None = None) -> np.ndarray:
    g = _ginibre(gen, dim, rank if rank is not None else dim)
    return g @ g.conj().T


def random_density(gen, dim: int, rank: int | None = None) -> np.ndarray:
    m = random_psd(gen, dim, rank)
    return m / np.trace(m).real


def random_probability_vector(gen, n: int) -> np.ndarray:
    p = gen.random(n) + 1e-3
    return p / p.sum()


def random_channel(gen, dim_in: int, dim_out: int | None = None,
                   n_kraus: int | None = None) -> QuantumChannel:
    """Random CPTP map from a Haar random isometry (Stinespring picture)."""
    if dim_out is None:
        dim_out = dim_in
    if n_kraus is None:
        n_kraus = max(2, dim_in)
    g = _ginibre(gen, dim_out * n_kraus, dim_in)
    q, r = np.linalg.qr(g)
    iso = q * (np.diag(r) / np.abs(np.diag(r)))  # isometry: iso† iso = I
    kraus = [iso[e * dim_out:(e + 1) * dim_out, :] for e in range(n_kraus)]
    return QuantumChannel(kraus)


def random_povm(gen, dim: int, n_outcomes: int) -> Povm:
    """Random POVM: positive pieces normalized by their sum's inverse square root."""
    pieces = [random_psd(gen, dim) + 1e-3 * np.eye(dim) for _ in range(n_outcomes)]
    total = sum(pieces)
    w, v = np.linalg.eigh(total)
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    effects = [hermitian_part(inv_sqrt @ p @ inv_sqrt) for p in pieces]
    return Povm(effects)


def random_classical_channel(gen, n_in: int, n_out: int) -> ClassicalChannel:
    t = gen.random((n_out, n_in)) + 1e-3
    return ClassicalChannel(t / t.sum(axis=0, keepdims=True))


def random_gaussian_wigner(gen, n_modes: int, weight: float = 1.0) -> GaussianWigner:
    dim = 2 * n_modes
    g = gen.standard_normal((dim, dim))
    cov = g @ g.T / dim + 0.3 * np.eye(dim)
    mean = gen.uniform(-2.0, 2.0, size=dim)
    return GaussianWigner(mean=mean, covariance=cov, weight=weight)


def random_linear_quadrature(gen, n_modes: int) -> LinearQuadrature:
    return LinearQuadrature(
        coeffs=gen.uniform(-1.5, 1.5, size=2 * n_modes),
        offset=float(gen.uniform(-1.0, 1.0)),
    )
