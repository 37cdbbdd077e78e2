r"""Splitting the total power between satellite and jamming relay.

Three schemes:

``uniform``
    ``alpha = 0.5`` regardless of the channels.
``optimal``
    per-realization maximizer of the secrecy capacity.  With equal satellite
    gains at Bob and Eve the capacity ratio is the concave rational function
    :func:`objective_f`, whose stationary point is

    .. math:: \alpha^* = \frac{\gamma_{re}+1-\sqrt{(\gamma_{re}+1)(\gamma_{sd}+1)}}
                              {\gamma_{re}-\gamma_{sd}}
                       = \frac{1}{1+\sqrt{(\gamma_{sd}+1)/(\gamma_{re}+1)}}.

    The second form is used: it has no cancellation and no 0/0 at
    ``gamma_sd == gamma_re``.
``statistical``
    grid search of the closed-form SOP over ``alpha``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel
from .errors import DomainError
from .secrecy import SecrecyParams, SnrBundle, secrecy_capacity_alpha, sop_closed_rayleigh, sop_closed_rician

__all__ = [
    "AllocationMethod",
    "AllocationResult",
    "TraversalConfig",
    "alpha_uniform",
    "objective_f",
    "stationarity_numerator",
    "alpha_optimal",
    "alpha_optimal_array",
    "alpha_optimal_from_channels",
    "traversal_grid",
    "closed_form_sop",
    "alpha_statistical",
]

EQUAL_GAMMA_RTOL = 1e-9


class AllocationMethod(str, enum.Enum):
    UNIFORM = "uniform"
    OPTIMAL_INSTANTANEOUS = "optimal"
    STATISTICAL_TRAVERSAL = "statistical"


@dataclass(frozen=True)
class AllocationResult:
    """Chosen split and the quantity the scheme optimized.

    ``objective`` is the secrecy capacity at ``alpha`` for the optimal
    scheme, the closed-form SOP for the statistical scheme and ``nan`` for
    the uniform one.
    """

    alpha: float
    method: AllocationMethod
    objective: float = math.nan

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")


@dataclass(frozen=True)
class TraversalConfig:
    """Inputs of the statistical-CSI grid search."""

    step: float
    big_p: float
    n_r: int
    params: SecrecyParams
    relay_link_model: ChannelModel = ChannelModel.RAYLEIGH
    mean_power_sd: float = 1.0
    mean_power_re: float = 1.0
    rician_k_re: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "relay_link_model", ChannelModel.parse(self.relay_link_model))
        if self.relay_link_model is ChannelModel.GAUSSIAN_APPROX:
            raise DomainError("relay links must be Rayleigh or Rician")
        if not 0 < self.step < 0.5:
            raise DomainError(f"step must lie in (0, 0.5), got {self.step!r}")
        if not (self.big_p > 0 and self.mean_power_sd > 0 and self.mean_power_re > 0):
            raise DomainError("powers must be positive")
        if int(self.n_r) != self.n_r or self.n_r < 2:
            raise DomainError("n_r must be an integer >= 2")
        if self.rician_k_re < 0:
            raise DomainError("rician_k_re must be >= 0")


def alpha_uniform() -> AllocationResult:
    return AllocationResult(0.5, AllocationMethod.UNIFORM)


def objective_f(alpha, gamma_sd, gamma_re):
    """Capacity ratio ``(1 + a g_sd) / (1 + a g_sd / ((1-a) g_re + 1))`` as a rational function."""
    alpha = np.asarray(alpha, dtype=float)
    num = -gamma_sd * gamma_re * alpha**2 + (gamma_sd * gamma_re + gamma_sd - gamma_re) * alpha + gamma_re + 1
    den = (gamma_sd - gamma_re) * alpha + gamma_re + 1
    if np.any(den <= 0):
        raise DomainError("objective denominator must be positive")
    out = num / den
    return float(out) if out.ndim == 0 else out


def stationarity_numerator(alpha, gamma_sd, gamma_re):
    """Numerator of ``dF/dalpha``; zero at the optimum."""
    g, r = gamma_sd, gamma_re
    return -g * r * (g - r) * alpha**2 - 2 * g * r * (r + 1) * alpha + g * r * (r + 1)


def alpha_optimal_array(gamma_sd, gamma_re):
    """Vectorized optimal split for arrays of SNRs (no validation)."""
    gamma_sd = np.asarray(gamma_sd, dtype=float)
    gamma_re = np.asarray(gamma_re, dtype=float)
    ratio = np.sqrt((gamma_sd + 1.0) / (gamma_re + 1.0))
    alpha = 1.0 / (1.0 + ratio)
    close = np.abs(gamma_re - gamma_sd) <= EQUAL_GAMMA_RTOL * np.maximum(gamma_re, gamma_sd)
    return np.where(close, 0.5, alpha)


def alpha_optimal(gamma_sd: float, gamma_re: float) -> AllocationResult:
    """Capacity-maximizing split for one channel realization."""
    if not (gamma_sd > 0 and gamma_re > 0 and math.isfinite(gamma_sd) and math.isfinite(gamma_re)):
        raise DomainError("gammas must be positive and finite")
    alpha = float(alpha_optimal_array(gamma_sd, gamma_re))
    cap = secrecy_capacity_alpha(alpha, SnrBundle(gamma_sd, gamma_sd, 0.0, gamma_re))
    return AllocationResult(alpha, AllocationMethod.OPTIMAL_INSTANTANEOUS, cap)


def alpha_optimal_from_channels(big_p, h_sd_norm_sq, residual, noise_bob=1.0, noise_eve=1.0):
    if min(big_p, h_sd_norm_sq, residual, noise_bob, noise_eve) <= 0:
        raise DomainError("all inputs must be positive")
    return alpha_optimal(big_p * h_sd_norm_sq / noise_bob, big_p * residual / noise_eve)


def traversal_grid(step: float) -> np.ndarray:
    """``step * i`` for ``i = 1 .. ceil(1/step) - 1``, all strictly inside (0, 1)."""
    count = math.ceil(1.0 / step - 1e-9) - 1
    grid = step * np.arange(1, count + 1)
    return grid[grid < 1.0]


def closed_form_sop(alpha, cfg: TraversalConfig):
    """Closed-form SOP at split(s) ``alpha`` for the links described by ``cfg``."""
    n_r = cfg.n_r
    if cfg.relay_link_model is ChannelModel.RICIAN:
        k = cfg.rician_k_re
        s_re = math.sqrt(k * cfg.mean_power_re / (k + 1))
        var = cfg.mean_power_re / (2 * n_r * (k + 1))
        return sop_closed_rician(alpha, cfg.big_p, cfg.mean_power_sd, cfg.params, n_r, s_re, var)
    var = cfg.mean_power_re / (2 * n_r)
    return sop_closed_rayleigh(alpha, cfg.big_p, cfg.mean_power_sd, cfg.params, n_r, var)


def alpha_statistical(cfg: TraversalConfig) -> AllocationResult:
    """Grid point with the lowest closed-form SOP (first one on ties)."""
    grid = traversal_grid(cfg.step)
    sop = np.asarray(closed_form_sop(grid, cfg))
    best = int(np.argmin(sop))
    return AllocationResult(float(grid[best]), AllocationMethod.STATISTICAL_TRAVERSAL, float(sop[best]))
