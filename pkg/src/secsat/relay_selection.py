"""Choosing the jamming relay from instantaneous or statistical CSI.

Indices returned by the selectors are 1-based, and ties go to the lowest
index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSpec
from .errors import DomainError
from .numerics import chi2_cdf_even, chi2_sf_even

__all__ = [
    "RelayEnsemble",
    "select_instantaneous",
    "select_instantaneous_batch",
    "select_statistical",
    "residual_cdf",
    "residual_sf",
]


@dataclass(frozen=True)
class RelayEnsemble:
    """``M`` candidate relays, each with a (relay->Bob, relay->Eve) link pair."""

    links: tuple[tuple[ChannelSpec, ChannelSpec], ...]

    def __post_init__(self):
        object.__setattr__(self, "links", tuple(tuple(p) for p in self.links))
        if not self.links:
            raise DomainError("a relay ensemble needs at least one relay")
        dims = {spec.dim for pair in self.links for spec in pair}
        if len(dims) != 1:
            raise DomainError("all relays must share the antenna count")

    @classmethod
    def homogeneous(cls, n_r, mean_powers_re, model="rayleigh", rician_k=0.0, mean_power_rd=1.0):
        return cls(
            tuple(
                (ChannelSpec(model, n_r, mean_power_rd, rician_k), ChannelSpec(model, n_r, p, rician_k))
                for p in mean_powers_re
            )
        )

    @property
    def count(self) -> int:
        return len(self.links)

    @property
    def mean_powers_re(self) -> list[float]:
        return [eve.mean_power for _, eve in self.links]


def _first_argmax(values, name):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError(f"{name} must be a non-empty list")
    return int(np.argmax(arr)) + 1  # np.argmax returns the first maximum


def select_instantaneous(residuals) -> int:
    """Relay whose residual jamming power at Eve is largest."""
    return _first_argmax(residuals, "residuals")


def select_instantaneous_batch(residuals) -> np.ndarray:
    """Per-trial :func:`select_instantaneous` over the columns of an ``(M, trials)`` array."""
    arr = np.asarray(residuals, dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise DomainError("residuals must have shape (M, trials) with M >= 1")
    return np.argmax(arr, axis=0) + 1


def select_statistical(mean_powers_re) -> int:
    """Relay with the strongest average relay->Eve channel."""
    powers = np.asarray(mean_powers_re, dtype=float)
    if powers.size and np.any(powers <= 0):
        raise DomainError("mean powers must be positive")
    return _first_argmax(powers, "mean_powers_re")


def _check_residual_args(n_r, mean_power_re):
    if int(n_r) != n_r or n_r < 2:
        raise DomainError("n_r must be an integer >= 2")
    if not mean_power_re > 0:
        raise DomainError("mean_power_re must be positive")


def residual_cdf(r, n_r: int, mean_power_re: float):
    """CDF of the residual jamming power for Rayleigh relay links.

    Central chi-square with ``2 n_r - 2`` degrees of freedom and per-component
    variance ``mean_power_re / (2 n_r)``.
    """
    _check_residual_args(n_r, mean_power_re)
    return chi2_cdf_even(n_r - 1, r, mean_power_re / (2.0 * n_r))


def residual_sf(r, n_r: int, mean_power_re: float):
    """``1 - residual_cdf``, accurate where the CDF rounds to 1."""
    _check_residual_args(n_r, mean_power_re)
    return chi2_sf_even(n_r - 1, r, mean_power_re / (2.0 * n_r))
