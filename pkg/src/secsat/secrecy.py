r"""SINRs, secrecy capacity and secrecy outage probability (SOP).

Three independent routes to the SOP are provided:

* :func:`sop_monte_carlo` simulates channels and counts outage events;
* :func:`sop_quadrature` integrates over the satellite-link gain with the
  exact fading laws;
* :func:`sop_closed_rayleigh` / :func:`sop_closed_rician` treat the
  satellite links as deterministic (gain ``A``) and leave only the
  residual-interference law.

Outage structure
----------------
With ``T = 2**R_s``, ``x = ||h_sd||^2 = ||h_se||^2`` and residual jamming
power ``r``, the capacity at split ``alpha`` falls below ``R_s`` exactly
when either Bob alone cannot reach the rate (``1 + alpha P x / sigma_d^2 <= T``)
or ``r`` is below the threshold returned by :func:`residual_threshold`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .channel import ChannelModel, ChannelSpec, complex_gaussian, projected_residual_power, sample_channel
from .errors import ConvergenceError, DomainError
from .numerics import DEFAULT_TOLERANCES, ToleranceConfig
from .streams import Streams

__all__ = [
    "SecrecyParams",
    "PowerSplit",
    "SnrBundle",
    "SopMethod",
    "SopEstimate",
    "LinkModel",
    "sinr_bob",
    "sinr_eve",
    "secrecy_capacity",
    "secrecy_capacity_alpha",
    "capacity_at_split",
    "residual_threshold",
    "binomial_half_width",
    "sample_residuals",
    "sample_sat_gain",
    "chunk_sizes",
    "sop_monte_carlo",
    "sop_quadrature",
    "sop_closed_rayleigh",
    "sop_closed_rician",
    "branch_point",
]

MC_CHUNK = 1 << 17


@dataclass(frozen=True)
class SecrecyParams:
    """Target secure rate (bit/s/Hz) and receiver noise powers."""

    rate_threshold: float
    noise_bob: float = 1.0
    noise_eve: float = 1.0

    def __post_init__(self):
        for name in ("rate_threshold", "noise_bob", "noise_eve"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive and finite, got {v!r}")


@dataclass(frozen=True)
class PowerSplit:
    """Total power ``P`` shared as ``alpha P`` (satellite) and ``(1-alpha) P`` (relay)."""

    total: float
    alpha: float

    def __post_init__(self):
        if not self.total > 0:
            raise DomainError(f"total power must be positive, got {self.total!r}")
        if not 0 < self.alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")

    @property
    def p_s(self) -> float:
        return self.alpha * self.total

    @property
    def p_r(self) -> float:
        return (1.0 - self.alpha) * self.total


@dataclass(frozen=True)
class SnrBundle:
    """Link SNRs normalized by the total power ``P`` (not by the split)."""

    gamma_sd: float
    gamma_se: float
    gamma_rd: float = 0.0
    gamma_re: float = 0.0

    def __post_init__(self):
        for name in ("gamma_sd", "gamma_se", "gamma_rd", "gamma_re"):
            if not getattr(self, name) >= 0:
                raise DomainError(f"{name} must be >= 0")


class SopMethod(str, enum.Enum):
    MONTE_CARLO = "monte_carlo"
    QUADRATURE = "quadrature"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class SopEstimate:
    value: float
    half_width_95: float = 0.0
    trials: int = 1
    method: SopMethod = SopMethod.CLOSED_FORM
    events: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise DomainError(f"SOP must be a probability, got {self.value!r}")
        if self.method is not SopMethod.MONTE_CARLO and self.half_width_95 != 0.0:
            raise DomainError("only Monte-Carlo estimates carry a confidence interval")


@dataclass(frozen=True)
class LinkModel:
    """Satellite and relay links of one secure transmission.

    Bob and Eve see the same satellite channel (``h_se = h_sd``).  The
    relay links ``h_rd`` and ``h_re`` are independent.

    ``residual_law`` selects how the residual jamming power at Eve is drawn:

    ``"projection"``
        sample ``h_rd`` and ``h_re`` and project ``h_re`` onto the null
        space of ``h_rd``;
    ``"nominal"``
        draw it directly from the chi-square law used by the analytical
        expressions: ``2(N_r - 1)`` degrees of freedom, per-component
        variance ``(1 - K/(K+1)) E||h_re||^2 / (2 N_r)`` and, for Rician
        links, the full line-of-sight power ``K E||h_re||^2 / (K+1)`` as
        noncentrality.  For Rayleigh links both laws coincide.
    """

    sat: ChannelSpec
    relay_eve: ChannelSpec
    relay_bob: ChannelSpec
    residual_law: str = "projection"

    def __post_init__(self):
        if self.relay_eve.dim != self.relay_bob.dim:
            raise DomainError("relay links must share the relay antenna count")
        if self.relay_eve.dim < 2:
            raise DomainError("null-space jamming needs at least two relay antennas")
        if self.residual_law not in ("projection", "nominal"):
            raise DomainError(f"unknown residual_law {self.residual_law!r}")
        if self.relay_eve.model is ChannelModel.GAUSSIAN_APPROX:
            raise DomainError("relay-to-ground links must be Rayleigh or Rician")

    @classmethod
    def build(
        cls,
        n_s: int,
        n_r: int,
        sat_model="rician",
        k_sd: float = 10.0,
        mean_power_sd: float = 1.0,
        relay_model="rayleigh",
        k_re: float = 0.0,
        mean_power_re: float = 1.0,
        mean_power_rd: float = 1.0,
        residual_law: str = "projection",
    ) -> "LinkModel":
        sat_model = ChannelModel.parse(sat_model)
        if sat_model is ChannelModel.RICIAN and k_sd == 0:
            sat_model = ChannelModel.RAYLEIGH
        relay_model = ChannelModel.parse(relay_model)
        return cls(
            sat=ChannelSpec(sat_model, n_s, mean_power_sd, k_sd),
            relay_eve=ChannelSpec(relay_model, n_r, mean_power_re, k_re),
            relay_bob=ChannelSpec(relay_model, n_r, mean_power_rd, k_re),
            residual_law=residual_law,
        )

    @property
    def n_r(self) -> int:
        return self.relay_eve.dim

    def residual_law_params(self):
        """``(half_dof, noncentrality_amplitude, per_component_variance)`` of the nominal law."""
        s, var = self.relay_eve.norm_sq_law()
        return self.n_r - 1, s, var


# --------------------------------------------------------------------------
# Instantaneous quantities


def _check_noise(noise):
    if not np.all(np.asarray(noise) > 0):
        raise DomainError("noise power must be positive")


def sinr_bob(p_s, h_sd_norm_sq, noise_bob):
    """SINR at Bob; the null-steered jamming does not reach him."""
    _check_noise(noise_bob)
    return p_s * h_sd_norm_sq / noise_bob


def sinr_eve(p_s, h_se_norm_sq, p_r, residual, noise_eve):
    """SINR at Eve, whose noise floor is raised by the residual jamming."""
    _check_noise(noise_eve)
    return p_s * h_se_norm_sq / (p_r * residual + noise_eve)


def secrecy_capacity(gamma_d, gamma_e):
    """``max(log2(1 + gamma_d) - log2(1 + gamma_e), 0)``."""
    c = np.log2(1.0 + np.asarray(gamma_d, dtype=float)) - np.log2(
        1.0 + np.asarray(gamma_e, dtype=float)
    )
    c = np.maximum(c, 0.0)
    return float(c) if c.ndim == 0 else c


def capacity_at_split(alpha, gamma_sd, gamma_se, gamma_re):
    """Vectorized secrecy capacity with power split ``alpha`` (SNRs normalized by ``P``)."""
    alpha = np.asarray(alpha, dtype=float)
    gd = alpha * gamma_sd
    ge = alpha * gamma_se / ((1.0 - alpha) * gamma_re + 1.0)
    return secrecy_capacity(gd, ge)


def secrecy_capacity_alpha(alpha: float, snr: SnrBundle) -> float:
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return float(capacity_at_split(alpha, snr.gamma_sd, snr.gamma_se, snr.gamma_re))


def residual_threshold(alpha, big_p, x_sd, params: SecrecyParams):
    """Residual power below which the link is in outage.

    Returns ``+inf`` where Bob alone cannot reach the target rate (outage is
    certain) and a possibly negative number otherwise.  With equal noise
    powers this equals ``(1 + a)(T - 1) / ((1 + a - T)(1 - alpha) P / sigma^2)``
    where ``a = alpha P x / sigma^2`` and ``T = 2**R_s``.
    """
    alpha = np.asarray(alpha, dtype=float)
    x_sd = np.asarray(x_sd, dtype=float)
    t = 2.0**params.rate_threshold
    a = alpha * big_p * x_sd / params.noise_bob
    b = alpha * big_p * x_sd / params.noise_eve
    margin = 1.0 + a - t
    with np.errstate(divide="ignore", invalid="ignore"):
        jam = (t * b / margin - 1.0) * params.noise_eve / ((1.0 - alpha) * big_p)
    return np.where(margin > 0, jam, np.inf)


def binomial_half_width(events: int, trials: int, z: float = 1.959963984540054) -> float:
    """95% half-width of a binomial proportion.

    Normal approximation, with the Wilson interval when fewer than ten
    events (or non-events) were observed.
    """
    p = events / trials
    if min(events, trials - events) >= 10:
        return z * math.sqrt(p * (1 - p) / trials)
    denom = 1 + z * z / trials
    return z / denom * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))


# --------------------------------------------------------------------------
# Monte Carlo


def sample_residuals(links: LinkModel, rng_bob, rng_eve, size: int) -> np.ndarray:
    """Residual jamming power at Eve for ``size`` independent trials."""
    if links.residual_law == "projection":
        h_rd = sample_channel(links.relay_bob, rng_bob, size)
        h_re = sample_channel(links.relay_eve, rng_eve, size)
        return projected_residual_power(h_re, h_rd)
    half_dof, s, var = links.residual_law_params()
    w = complex_gaussian(rng_eve, (size, half_dof), 2.0 * var)
    w[:, 0] += s
    return np.sum(np.abs(w) ** 2, axis=1)


def sample_sat_gain(links: LinkModel, rng, size: int) -> np.ndarray:
    """``||h_sd||^2`` for ``size`` trials."""
    if links.sat.model is ChannelModel.GAUSSIAN_APPROX:
        return np.full(size, links.sat.mean_power)
    h = sample_channel(links.sat, rng, size)
    return np.sum(np.abs(h) ** 2, axis=1)


def chunk_sizes(trials: int, chunk: int = MC_CHUNK):
    full, rest = divmod(int(trials), chunk)
    return [chunk] * full + ([rest] if rest else [])


def sop_monte_carlo(
    links: LinkModel,
    split: PowerSplit,
    params: SecrecyParams,
    trials: int,
    streams: Streams,
) -> SopEstimate:
    """Fraction of simulated trials whose secrecy capacity is below ``R_s``.

    Trials are drawn in fixed-size chunks; chunk ``i`` uses the streams
    keyed ``("chunk", i, link)`` so the estimate is reproducible for a given
    seed regardless of execution order.
    """
    if trials < 1000:
        raise DomainError("Monte-Carlo SOP needs at least 1000 trials")
    events = 0
    for i, n in enumerate(chunk_sizes(trials)):
        x = sample_sat_gain(links, streams.generator("chunk", i, "h_sd"), n)
        r = sample_residuals(
            links, streams.generator("chunk", i, "h_rd"), streams.generator("chunk", i, "h_re"), n
        )
        g_sd = split.total * x / params.noise_bob
        g_se = split.total * x / params.noise_eve
        g_re = split.total * r / params.noise_eve
        c = capacity_at_split(split.alpha, g_sd, g_se, g_re)
        events += int(np.count_nonzero(c < params.rate_threshold))
    return SopEstimate(
        value=events / trials,
        half_width_95=binomial_half_width(events, trials),
        trials=int(trials),
        method=SopMethod.MONTE_CARLO,
        events=events,
    )


# --------------------------------------------------------------------------
# Analytical routes


def _residual_cdf(links: LinkModel, r, cfg):
    half_dof, s, var = links.residual_law_params()
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    pos = r > 0
    if np.any(pos):
        if s == 0.0:
            out[pos] = numerics.chi2_cdf_even(half_dof, r[pos], var, cfg)
        else:
            out[pos] = numerics.noncentral_chi2_cdf(half_dof, s, r[pos], var, cfg)
    return out


def sop_quadrature(
    alpha: float,
    big_p: float,
    links: LinkModel,
    params: SecrecyParams,
    cfg: ToleranceConfig = DEFAULT_TOLERANCES,
) -> SopEstimate:
    """SOP by integrating over the satellite-link gain ``x = ||h_sd||^2``::

        P_out = F_x(x_b) + integral_{x_b}^{inf} f_x(x) F_r(r_th(x)) dx

    where ``x_b = (2**R_s - 1) sigma_d^2 / (alpha P)`` is the gain Bob needs on
    his own, ``F_r`` the residual-power CDF and ``r_th`` from
    :func:`residual_threshold`.  The upper limit is cut where the
    satellite-gain survival drops below ``cfg.series_tol``.
    """
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    if links.sat.model is ChannelModel.GAUSSIAN_APPROX:
        raise DomainError("quadrature needs a fading satellite link; use the closed forms")
    n_s = links.sat.dim
    s_sd, var_sd = links.sat.norm_sq_law()
    x_b = (2.0**params.rate_threshold - 1.0) * params.noise_bob / (alpha * big_p)

    def cdf_x(x):
        return numerics.noncentral_chi2_cdf(n_s, s_sd, x, var_sd, cfg)

    def survival_x(x):
        sigma = math.sqrt(var_sd)
        return numerics.marcum_q(n_s, s_sd / sigma, math.sqrt(x) / sigma, cfg)

    mean = s_sd**2 + 2 * n_s * var_sd
    sd = math.sqrt(4 * var_sd * (n_s * var_sd + s_sd**2))
    x_hi = mean + 10 * sd
    for _ in range(64):
        if survival_x(x_hi) <= cfg.series_tol:
            break
        x_hi = mean + 2 * (x_hi - mean)
    else:
        raise ConvergenceError("could not bound the satellite-gain tail")
    p_bob_fails = cdf_x(x_b)
    if x_b >= x_hi:
        return SopEstimate(value=min(1.0, p_bob_fails), method=SopMethod.QUADRATURE)

    def integrand(x):
        dens = numerics.noncentral_chi2_pdf(n_s, s_sd, x, var_sd)
        r_th = residual_threshold(alpha, big_p, x, params)
        return dens * _residual_cdf(links, r_th, cfg)

    breaks = [mean + k * sd for k in range(-6, 7)]
    integral = numerics.integrate(integrand, x_b, x_hi, cfg, breakpoints=breaks)
    value = min(1.0, max(0.0, p_bob_fails + integral))
    return SopEstimate(value=value, method=SopMethod.QUADRATURE)


def branch_point(big_p, gain_a, params: SecrecyParams) -> float:
    """Smallest split at which Bob alone reaches ``R_s`` with satellite gain ``A``."""
    return (2.0**params.rate_threshold - 1.0) * params.noise_bob / (big_p * gain_a)


def _closed_form(alpha, big_p, gain_a, params, residual_cdf):
    scalar = np.ndim(alpha) == 0
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    if np.any((alpha <= 0) | (alpha >= 1)):
        raise DomainError("alpha must lie in (0, 1)")
    if not (big_p > 0 and gain_a > 0):
        raise DomainError("total power and satellite gain must be positive")
    a_b = branch_point(big_p, gain_a, params)
    at_branch = np.isclose(alpha, a_b, rtol=1e-12, atol=0.0)
    above = (alpha > a_b) & ~at_branch
    out = np.ones_like(alpha)
    if np.any(above):
        r_th = residual_threshold(alpha[above], big_p, gain_a, params)
        out[above] = residual_cdf(r_th)
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def sop_closed_rayleigh(
    alpha, big_p, gain_a, params: SecrecyParams, n_r: int, sigma_re_sq: float,
    cfg: ToleranceConfig = DEFAULT_TOLERANCES,
):
    """Closed-form SOP with deterministic satellite gain ``A`` and Rayleigh relay links.

    Three regimes in ``alpha`` relative to :func:`branch_point`: above it the
    SOP is the central chi-square CDF (``2 N_r - 2`` degrees of freedom,
    per-component variance ``sigma_re_sq``) of the residual threshold; at and
    below it Bob cannot reach ``R_s`` and the SOP is 1.  ``alpha`` may be an
    array.
    """
    if int(n_r) != n_r or n_r < 2:
        raise DomainError("n_r must be an integer >= 2")
    if not sigma_re_sq > 0:
        raise DomainError("sigma_re_sq must be positive")

    def cdf(r):
        return np.where(r > 0, numerics.chi2_cdf_even(n_r - 1, np.maximum(r, 0), sigma_re_sq, cfg), 0.0)

    return _closed_form(alpha, big_p, gain_a, params, cdf)


def sop_closed_rician(
    alpha, big_p, gain_a, params: SecrecyParams, n_r: int, s_re: float, sigma_re_sq: float,
    cfg: ToleranceConfig = DEFAULT_TOLERANCES,
):
    """Closed-form SOP with deterministic satellite gain ``A`` and Rician relay links.

    As :func:`sop_closed_rayleigh` with the residual following a non-central
    chi-square law of amplitude ``s_re`` (Marcum-Q form, order ``N_r - 1``).
    """
    if int(n_r) != n_r or n_r < 2:
        raise DomainError("n_r must be an integer >= 2")
    if not (sigma_re_sq > 0 and s_re >= 0):
        raise DomainError("need sigma_re_sq > 0 and s_re >= 0")

    def cdf(r):
        return numerics.noncentral_chi2_cdf(n_r - 1, s_re, r, sigma_re_sq, cfg)

    return _closed_form(alpha, big_p, gain_a, params, cdf)
