"""Gaussian Wigner-function specialization of the retrodiction estimator.

For Gaussian W_ρ and W_E and a linear quadrature X, the optimal estimate is
the ratio of two Gaussian integrals, which collapses to X evaluated at the
mean of the pointwise product Gaussian.  A tensor-grid quadrature oracle
cross-validates the closed form.

Conventions: quadrature ordering (q₁..q_n, p₁..p_n), dimensionless units
with ħ = 1 (vacuum covariance I/2).  Integrals follow ∫W = trace, so each
GaussianWigner is `weight` times a normalized Gaussian density; effects
carry arbitrary positive weight and the weights cancel in the estimator.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .operator_core import ValidationError

OVERLAP_FLOOR = 1e-12


class NegligibleOverlap(ValueError):
    """The retrodictive effect barely overlaps the state; the conditional is undefined."""


@dataclass(frozen=True)
class GaussianWigner:
    """weight × Gaussian density over 2n-dimensional quadrature phase space."""

    mean: np.ndarray
    covariance: np.ndarray
    weight: float = 1.0

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.covariance, dtype=float)
        if mean.ndim != 1 or mean.size % 2 != 0 or mean.size == 0:
            raise ValidationError("shape", "mean must have even positive length 2n")
        if cov.shape != (mean.size, mean.size):
            raise ValidationError("shape", "covariance shape inconsistent with mean")
        if float(np.abs(cov - cov.T).max()) > 1e-12 * max(1.0, float(np.abs(cov).max())):
            raise ValidationError("symmetry", "covariance must be symmetric")
        cov = (cov + cov.T) / 2
        if float(np.linalg.eigvalsh(cov).min()) <= 0:
            raise ValidationError("psd", "covariance must be positive definite")
        if not self.weight > 0:
            raise ValidationError("weight", f"weight must be positive, got {self.weight}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "weight", float(self.weight))

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at points of shape (..., 2n)."""
        dim = self.mean.size
        delta = np.asarray(points, dtype=float) - self.mean
        prec = np.linalg.inv(self.covariance)
        expo = -0.5 * np.einsum("...i,ij,...j->...", delta, prec, delta)
        norm = (2 * np.pi) ** (dim / 2) * np.sqrt(np.linalg.det(self.covariance))
        return self.weight * np.exp(expo) / norm


@dataclass(frozen=True)
class LinearQuadrature:
    """Affine observable coeffs · (q, p) + offset."""

    coeffs: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim != 1 or not np.all(np.isfinite(coeffs)):
            raise ValidationError("shape", "coeffs must be a finite 1-D vector")
        if not np.isfinite(self.offset):
            raise ValidationError("finite", "offset must be finite")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "offset", float(self.offset))

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.coeffs + self.offset


def gaussian_product(wr: GaussianWigner, we: GaussianWigner) -> GaussianWigner:
    """Pointwise product of two Gaussians, again Gaussian.

    The returned weight is the full integral of the product, i.e. the
    denominator ∫ W_E W_ρ of the estimator.
    """
    if wr.n_modes != we.n_modes:
        raise ValidationError("shape", "mode counts differ")
    dim = wr.mean.size
    try:
        prec_r = np.linalg.inv(wr.covariance)
        prec_e = np.linalg.inv(we.covariance)
        cov = np.linalg.inv(prec_r + prec_e)
    except np.linalg.LinAlgError as exc:
        raise ValidationError("psd", f"near-singular covariance: {exc}") from exc
    mean = cov @ (prec_r @ wr.mean + prec_e @ we.mean)
    sigma_sum = wr.covariance + we.covariance
    delta = wr.mean - we.mean
    overlap = np.exp(-0.5 * delta @ np.linalg.solve(sigma_sum, delta)) / (
        (2 * np.pi) ** (dim / 2) * np.sqrt(np.linalg.det(sigma_sum))
    )
    weight = wr.weight * we.weight * float(overlap)
    if weight <= OVERLAP_FLOOR:
        raise NegligibleOverlap(
            f"overlap weight {weight:.3e} below {OVERLAP_FLOOR:g}"
        )
    return GaussianWigner(mean=mean, covariance=cov, weight=weight)


def quadrature_estimator(wr: GaussianWigner, we: GaussianWigner,
                         x: LinearQuadrature) -> float:
    """∫ W_E W_ρ X / ∫ W_E W_ρ for linear X: X evaluated at the product mean."""
    if x.coeffs.size != wr.mean.size:
        raise ValidationError("shape", "quadrature coefficient length != 2n")
    product = gaussian_product(wr, we)
    if product.weight <= OVERLAP_FLOOR:
        raise NegligibleOverlap(
            f"overlap weight {product.weight:.3e} below {OVERLAP_FLOOR:g}"
        )
    return float(x.coeffs @ product.mean + x.offset)


def numeric_wigner_integral(w_list, x: LinearQuadrature | None = None,
                            points_per_axis: int | None = None,
                            half_width_sigmas: float = 8.0) -> float:
    """Tensor-grid trapezoid quadrature of Π W_i × (optional linear factor).

    Supported for 1–2 modes.  The grid spans the union of each Gaussian's
    ±half_width_sigmas interval per axis; trapezoid quadrature converges
    spectrally for Gaussians, so modest point counts reach ~1e-8.
    """
    w_list = list(w_list)
    if not w_list:
        raise ValidationError("input", "need at least one Gaussian")
    n_modes = w_list[0].n_modes
    if any(w.n_modes != n_modes for w in w_list):
        raise ValidationError("shape", "mode counts differ")
    if n_modes > 2:
        raise ValidationError("modes", "grid oracle supports 1-2 modes only")
    dim = 2 * n_modes
    if points_per_axis is None:
        points_per_axis = 801 if n_modes == 1 else 81

    axes, steps = [], []
    for i in range(dim):
        los, his = [], []
        for w in w_list:
            sig = np.sqrt(w.covariance[i, i])
            los.append(w.mean[i] - half_width_sigmas * sig)
            his.append(w.mean[i] + half_width_sigmas * sig)
        grid = np.linspace(min(los), max(his), points_per_axis)
        axes.append(grid)
        steps.append(grid[1] - grid[0])

    # trapezoid weights per axis
    axis_w = []
    for h in steps:
        wvec = np.full(points_per_axis, h)
        wvec[0] = wvec[-1] = h / 2
        axis_w.append(wvec)

    # fold the Gaussian factors into one quadratic form so each grid slice
    # costs a single einsum
    prec = np.zeros((dim, dim))
    lin = np.zeros(dim)
    log_const = 0.0
    for w in w_list:
        p = np.linalg.inv(w.covariance)
        prec += p
        lin += p @ w.mean
        log_const += (
            np.log(w.weight)
            - 0.5 * w.mean @ p @ w.mean
            - 0.5 * (dim * np.log(2 * np.pi) + np.log(np.linalg.det(w.covariance)))
        )

    def integrand(points):
        pts = np.asarray(points, dtype=float)
        expo = (-0.5 * np.einsum("...i,ij,...j->...", pts, prec, pts)
                + pts @ lin + log_const)
        val = np.exp(expo)
        if x is not None:
            val = val * x(pts)
        return val

    if dim == 2:
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        vals = integrand(pts)
        total = float(np.einsum("ij,i,j->", vals, axis_w[0], axis_w[1]))
        edge = float(np.abs(np.concatenate([vals[0], vals[-1], vals[:, 0],
                                            vals[:, -1]])).max())
    else:
        # 4-D grid, chunked over axis 0; everything not involving the axis-0
        # coordinate is precomputed on the inner 3-D grid once
        total = 0.0
        edge = 0.0
        inner = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1)
        inner_w = np.einsum("i,j,k->ijk", axis_w[1], axis_w[2], axis_w[3])
        q_inner = np.einsum("...i,ij,...j->...", inner, prec[1:, 1:], inner)
        base = -0.5 * q_inner + inner @ lin[1:] + log_const
        cross = inner @ prec[0, 1:]
        lin_inner = inner @ x.coeffs[1:] + x.offset if x is not None else None
        for idx, x0 in enumerate(axes[0]):
            expo = base + x0 * (lin[0] - cross) - 0.5 * prec[0, 0] * x0 * x0
            vals = np.exp(expo)
            if x is not None:
                vals = vals * (lin_inner + x.coeffs[0] * x0)
            total += axis_w[0][idx] * float(np.sum(vals * inner_w))
            if idx in (0, len(axes[0]) - 1):
                edge = max(edge, float(np.abs(vals).max()))
            else:
                edge = max(edge, float(np.abs(vals[0]).max()),
                           float(np.abs(vals[-1]).max()),
                           float(np.abs(vals[:, 0]).max()),
                           float(np.abs(vals[:, -1]).max()))

    scale = max(abs(total), max(w.weight for w in w_list) * 1e-30)
    if edge * float(np.prod(steps)) > 1e-9 * scale:
        warnings.warn(
            f"grid truncation error estimate {edge * float(np.prod(steps)):.3e} "
            f"is large relative to the integral {total:.3e}",
            stacklevel=2,
        )
    return total
