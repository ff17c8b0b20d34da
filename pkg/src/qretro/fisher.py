"""Symmetric logarithmic derivatives and quantum Fisher information.

The SLD is a Jordan-product solve ∂ρ/∂θ = ρ∘S, the Fisher information is
J = tr ρS², and its monotonicity under parameter-independent channels is
exposed as an executable check whose slack equals the minimum retrodiction
risk of S itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import operator_core as core
from .channels import QuantumChannel, apply_channel
from .estimators import personick_estimator
from .operator_core import ValidationError, jordan_product

FD_STEP = 1e-5  # central differences; ~1e-10 error suffices vs 1e-8 checks


class RankChangeError(ValueError):
    """The family's rank changes at the queried point; the SLD is singular there."""


@dataclass
class StateFamily:
    """One-parameter family θ ↦ ρ(θ) with optional analytic derivative."""

    state_at: Callable[[float], np.ndarray]
    derivative_at: Optional[Callable[[float], np.ndarray]] = None
    fd_step: float = FD_STEP

    def density(self, theta: float) -> np.ndarray:
        return core.as_density(self.state_at(theta), name=f"rho({theta})")

    def derivative(self, theta: float) -> np.ndarray:
        if self.derivative_at is not None:
            d = core.as_hermitian(self.derivative_at(theta), name="drho")
        else:
            h = self.fd_step
            d = core.as_hermitian(
                (np.asarray(self.state_at(theta + h), dtype=complex)
                 - np.asarray(self.state_at(theta - h), dtype=complex)) / (2 * h),
                name="drho",
            )
        tr = abs(np.trace(d))
        if tr > 1e-10 * max(1.0, float(np.abs(d).max())):
            raise ValidationError("trace", f"∂ρ/∂θ has trace {tr:.3e}, expected 0")
        return d


def sld(family: StateFamily, theta: float) -> np.ndarray:
    """Hermitian S with ρ∘S = ∂ρ/∂θ, defined on the support of ρ.

    Families whose rank changes at θ (derivative leaking off the support)
    are rejected: the SLD does not exist there.
    """
    rho = family.density(theta)
    drho = family.derivative(theta)
    proj = core.support_projector(rho)
    comp = np.eye(rho.shape[0]) - proj
    leak = float(np.linalg.norm(comp @ drho @ comp))
    scale = max(1.0, float(np.linalg.norm(drho)))
    if leak > 1e-8 * scale:
        raise RankChangeError(
            f"derivative has norm {leak:.3e} off the support of rho({theta}); "
            "the family changes rank at this point"
        )
    s, _residual = core.solve_jordan(rho, drho)
    return s


def qfi(rho, s) -> float:
    """Fisher information J = tr ρS² for a given SLD."""
    rho = core.as_density(rho)
    s = core.as_hermitian(s, name="s")
    if rho.shape != s.shape:
        raise ValidationError("shape", "rho and s dimensions differ")
    value = np.trace(rho @ s @ s)
    if abs(value.imag) > 1e-12 * max(1.0, abs(value)):
        raise ValidationError("real", f"J has imaginary part {value.imag:.3e}")
    return float(value.real)


def qfi_at(family: StateFamily, theta: float) -> float:
    return qfi(family.density(theta), sld(family, theta))


def push_family(family: StateFamily, k: QuantumChannel) -> StateFamily:
    """The image family θ ↦ κ(ρ(θ)); the derivative pushes through κ linearly."""
    return StateFamily(
        state_at=lambda t: apply_channel(k, family.density(t)),
        derivative_at=lambda t: apply_channel(k, family.derivative(t)),
        fd_step=family.fd_step,
    )


@dataclass(frozen=True)
class PushforwardReport:
    """Both sides of κ(ρ)∘S_κ(ρ) = κ(ρ∘S_ρ) and their gap."""

    lhs: np.ndarray
    rhs: np.ndarray
    gap: float
    estimator_gap: float  # ‖S_κ(ρ) − Personick estimate of S_ρ‖_F


@dataclass(frozen=True)
class MonotonicityReport:
    j_in: float
    j_out: float
    slack: float  # J_in − J_out, nonnegative up to rounding
    personick_risk: float  # minimum risk of estimating S_ρ through κ
    support_rank: int


def sld_pushforward_check(family: StateFamily, k: QuantumChannel,
                          theta: float) -> PushforwardReport:
    """Verify that the output SLD is the conditional expectation of the input SLD."""
    s_in = sld(family, theta)
    pushed = push_family(family, k)
    s_out = sld(pushed, theta)
    krho = core.as_hermitian(apply_channel(k, family.density(theta)))
    lhs = jordan_product(krho, s_out)
    rhs = core.as_hermitian(apply_channel(k, jordan_product(family.density(theta), s_in)))
    est = personick_estimator(family.density(theta), s_in, k).estimator
    return PushforwardReport(
        lhs=lhs,
        rhs=rhs,
        gap=float(np.linalg.norm(lhs - rhs)),
        estimator_gap=float(np.linalg.norm(s_out - est)),
    )


def monotonicity_check(family: StateFamily, k: QuantumChannel,
                       theta: float) -> MonotonicityReport:
    """J(ρ) − J(κ(ρ)) ≥ 0, with the slack equal to a Personick minimum risk."""
    rho = family.density(theta)
    s_in = sld(family, theta)
    j_in = qfi(rho, s_in)
    pushed = push_family(family, k)
    j_out = qfi(pushed.density(theta), sld(pushed, theta))
    result = personick_estimator(rho, s_in, k)
    return MonotonicityReport(
        j_in=j_in,
        j_out=j_out,
        slack=j_in - j_out,
        personick_risk=result.min_risk,
        support_rank=result.support_rank,
    )


# --- named family constructors (reproducible fixtures) ---------------------

def diagonal_line_family(p0, slope) -> StateFamily:
    """Diagonal family p(θ) = p0 + θ·slope; slope must sum to zero."""
    p0 = np.asarray(p0, dtype=float)
    slope = np.asarray(slope, dtype=float)
    if abs(slope.sum()) > 1e-12:
        raise ValidationError("trace", "slope must sum to zero")
    return StateFamily(
        state_at=lambda t: np.diag((p0 + t * slope).astype(complex)),
        derivative_at=lambda t: np.diag(slope.astype(complex)),
    )


def diagonal_exponential_family(p0, weights) -> StateFamily:
    """Diagonal exponential family p(θ) ∝ p0 · exp(θ·weights)."""
    p0 = np.asarray(p0, dtype=float)
    weights = np.asarray(weights, dtype=float)

    def probs(t):
        p = p0 * np.exp(t * weights)
        return p / p.sum()

    def deriv(t):
        p = probs(t)
        return np.diag((p * (weights - p @ weights)).astype(complex))

    return StateFamily(
        state_at=lambda t: np.diag(probs(t).astype(complex)),
        derivative_at=deriv,
    )


def unitary_rotation_family(rho0, h) -> StateFamily:
    """ρ(θ) = e^{−iθH} ρ₀ e^{iθH} with analytic derivative −i[H, ρ(θ)]."""
    rho0 = core.as_density(rho0, name="rho0")
    h = core.as_hermitian(h, name="h")
    spec = core.eig_hermitian(h)

    def state(t):
        u = (spec.eigenvectors * np.exp(-1j * t * spec.eigenvalues)) @ \
            spec.eigenvectors.conj().T
        return u @ rho0 @ u.conj().T

    def deriv(t):
        r = state(t)
        return -1j * (h @ r - r @ h)

    return StateFamily(state_at=state, derivative_at=deriv)


def depolarizing_mixture_family(family: StateFamily, p: float) -> StateFamily:
    """(1−p)ρ(θ) + p·I/d; contracts the Fisher information."""
    if not 0.0 <= p < 1.0:
        raise ValidationError("mixing", f"p must be in [0, 1), got {p}")

    def state(t):
        r = family.density(t)
        return (1 - p) * r + p * np.eye(r.shape[0]) / r.shape[0]

    def deriv(t):
        return (1 - p) * family.derivative(t)

    return StateFamily(state_at=state, derivative_at=deriv, fd_step=family.fd_step)
