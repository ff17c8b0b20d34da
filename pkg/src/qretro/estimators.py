"""Minimum mean-square retrodiction estimators.

The Hermitian optimum solves the Jordan-product normal equation
κ(ρ)∘X̌ = κ(ρ∘X); its specializations (classical conditional expectation,
weak values per measurement outcome, the unconstrained complex estimator)
are provided alongside the Schrödinger- and Heisenberg-picture risk
functionals used to cross-check them.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import operator_core as core
from .channels import ClassicalChannel, Povm, QuantumChannel, apply_channel
from .operator_core import ValidationError, jordan_product

RISK_TOL = 1e-9  # two nested eigendecompositions accumulate error
WEAKVALUE_FLOOR = 1e-12
RESIDUAL_WARN = 1e-8


class ZeroProbabilityOutcome(ValueError):
    """Conditional estimate requested at a (near-)zero-probability outcome."""


@dataclass(frozen=True)
class EstimationResult:
    estimator: np.ndarray  # Hermitian optimum
    min_risk: float
    residual: float  # ‖κ(ρ)∘X̌ − κ(ρ∘X)‖_F
    support_rank: int
    warning: str | None = None

    def __post_init__(self):
        if self.min_risk < -RISK_TOL:
            raise ValidationError("risk", f"negative risk {self.min_risk:.3e}")


@dataclass(frozen=True)
class ComplexEstimationResult:
    estimator: np.ndarray  # generally non-Hermitian
    min_risk: float
    residual: float

    def __post_init__(self):
        if self.min_risk < -RISK_TOL:
            raise ValidationError("risk", f"negative risk {self.min_risk:.3e}")


def _real(value: complex, what: str, tol: float = 1e-12) -> float:
    scale = max(1.0, abs(value))
    if abs(value.imag) > tol * scale:
        raise ValidationError("real", f"{what} has imaginary part {value.imag:.3e}")
    return float(value.real)


def schrodinger_risk(rho, x, k: QuantumChannel, xcheck) -> float:
    """tr ρX² − 2 tr X̌ κ(ρ∘X) + tr κ(ρ) X̌²."""
    rho = core.as_density(rho)
    x = core.as_hermitian(x, name="x")
    xcheck = core.as_hermitian(xcheck, name="xcheck")
    if rho.shape[0] != k.dim_in or xcheck.shape[0] != k.dim_out:
        raise ValidationError("shape", "operator dimensions inconsistent with channel")
    value = (
        np.trace(rho @ x @ x)
        - 2 * np.trace(xcheck @ apply_channel(k, jordan_product(rho, x)))
        + np.trace(apply_channel(k, rho) @ xcheck @ xcheck)
    )
    return _real(value, "risk")


def heisenberg_risk(rho0, x, xcheck, u, dims, x_factor: int = 0,
                    xcheck_factor: int | None = None) -> float:
    """tr ρ₀ [X − U†X̌U]² on the dilated space.

    `x` lives on tensor factor `x_factor` and `xcheck` on `xcheck_factor`;
    the embedding is explicit, never inferred.
    """
    dims = [int(d) for d in dims]
    rho0 = core.as_density(rho0, name="rho0")
    if xcheck_factor is None:
        xcheck_factor = len(dims) - 1
    d_total = int(np.prod(dims))
    u = core.as_square(u, "u")
    if u.shape[0] != d_total or rho0.shape[0] != d_total:
        raise ValidationError("dims", "rho0/U inconsistent with dims")
    if float(np.abs(u.conj().T @ u - np.eye(d_total)).max()) > 1e-10:
        raise ValidationError("unitary", "U is not unitary within 1e-10")
    x_emb = core.embed(core.as_hermitian(x, name="x"), dims, x_factor)
    xc_emb = core.embed(core.as_hermitian(xcheck, name="xcheck"), dims, xcheck_factor)
    diff = x_emb - u.conj().T @ xc_emb @ u
    return _real(np.trace(rho0 @ diff @ diff), "risk")


def personick_estimator(rho, x, k: QuantumChannel) -> EstimationResult:
    """Optimal Hermitian estimator of x through κ and its minimum risk.

    Solves κ(ρ)∘X̌ = κ(ρ∘X) on the support of κ(ρ) (zero on the kernel)
    and evaluates the minimum risk tr ρX² − tr κ(ρ)X̌².
    """
    rho = core.as_density(rho)
    x = core.as_hermitian(x, name="x")
    if rho.shape[0] != k.dim_in:
        raise ValidationError("shape", "rho dimension != channel dim_in")
    krho = core.as_hermitian(apply_channel(k, rho))
    rhs = core.as_hermitian(apply_channel(k, jordan_product(rho, x)))
    xopt, residual = core.solve_jordan(krho, rhs)
    min_risk = _real(
        np.trace(rho @ x @ x) - np.trace(krho @ xopt @ xopt), "min risk", tol=1e-9
    )
    warning = None
    if residual > RESIDUAL_WARN:
        warning = f"normal-equation residual {residual:.3e} exceeds {RESIDUAL_WARN:g}"
        warnings.warn(warning, stacklevel=2)
    return EstimationResult(
        estimator=xopt,
        min_risk=min_risk,
        residual=residual,
        support_rank=core.support_rank(krho),
        warning=warning,
    )


def weak_value(rho, x, p: Povm, y) -> float:
    """Real weak value tr E(y)(ρ∘X) / tr E(y)ρ at outcome y."""
    rho = core.as_density(rho)
    x = core.as_hermitian(x, name="x")
    e = p.effect(y)
    prob = float(np.trace(e @ rho).real)
    if prob <= WEAKVALUE_FLOOR:
        raise ZeroProbabilityOutcome(
            f"outcome {y!r} has probability {prob:.3e}; conditional undefined"
        )
    return _real(np.trace(e @ jordan_product(rho, x)), "weak value") / prob


def classical_conditional_expectation(px, c: ClassicalChannel, xvals):
    """Bayesian conditional expectations E[X|Y=y] for a classical channel.

    Returns (estimates, defined): entries at outcomes with P_Y(y) below the
    probability floor are NaN and flagged False in `defined`.
    """
    px = np.asarray(px, dtype=float)
    xvals = np.asarray(xvals, dtype=float)
    if px.shape != (c.n_in,) or xvals.shape != (c.n_in,):
        raise ValidationError("shape", "px/xvals length must equal channel n_in")
    if px.min() < 0 or abs(px.sum() - 1.0) > 1e-12:
        raise ValidationError("probability", "px must be a probability vector")
    py = c.transition @ px
    numer = c.transition @ (px * xvals)
    defined = py > WEAKVALUE_FLOOR
    estimates = np.full(c.n_out, np.nan)
    estimates[defined] = numer[defined] / py[defined]
    return estimates, defined


def complex_estimator(rho, x, k: QuantumChannel) -> ComplexEstimationResult:
    """Unconstrained (possibly non-Hermitian) optimum X̌ κ(ρ) = κ(Xρ)."""
    rho = core.as_density(rho)
    x = core.as_square(x, "x")
    if rho.shape[0] != k.dim_in or x.shape[0] != k.dim_in:
        raise ValidationError("shape", "operator dimensions inconsistent with channel")
    krho = core.as_hermitian(apply_channel(k, rho))
    rhs = apply_channel(k, x @ rho)
    xopt = rhs @ core.pseudo_inverse_psd(krho)
    residual = float(np.linalg.norm(xopt @ krho - rhs))
    min_risk = _real(
        np.trace(rho @ x.conj().T @ x) - np.trace(krho @ xopt.conj().T @ xopt),
        "min risk",
        tol=1e-9,
    )
    return ComplexEstimationResult(estimator=xopt, min_risk=min_risk, residual=residual)


def complex_weak_value(rho, x, p: Povm, y) -> complex:
    """Complex weak value tr E(y)Xρ / tr E(y)ρ at outcome y."""
    rho = core.as_density(rho)
    x = core.as_square(x, "x")
    e = p.effect(y)
    prob = float(np.trace(e @ rho).real)
    if prob <= WEAKVALUE_FLOOR:
        raise ZeroProbabilityOutcome(
            f"outcome {y!r} has probability {prob:.3e}; conditional undefined"
        )
    return complex(np.trace(e @ x @ rho)) / prob
