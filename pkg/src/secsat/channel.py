"""Fading channel sampling, null-space bases and artificial noise.

Conventions
-----------
* A channel of dimension ``dim`` and mean power ``Omega = E||h||^2`` has
  per-entry power ``Omega / dim``.  Complex Gaussian entries have independent
  real and imaginary parts, each of variance half the per-entry power.
* Rician channels are ``sqrt(K/(K+1)) * los + sqrt(1/(K+1)) * scatter`` with
  ``los = sqrt(Omega/dim) * ones(dim)`` (all antennas in phase) and
  ``scatter`` Rayleigh of mean power ``Omega``.
* The Gaussian approximation of a strong line-of-sight link is the
  deterministic vector ``sqrt(Omega/dim) * ones(dim)``.

Sampling functions take an explicit :class:`numpy.random.Generator`; there
is no hidden global state.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChannelError, DimensionMismatchError, DomainError

__all__ = [
    "ChannelModel",
    "ChannelSpec",
    "complex_gaussian",
    "sample_channel",
    "null_space_basis",
    "an_signal",
    "residual_interference_power",
    "projected_residual_power",
]


class ChannelModel(str, enum.Enum):
    RAYLEIGH = "rayleigh"
    RICIAN = "rician"
    GAUSSIAN_APPROX = "gaussian"

    @classmethod
    def parse(cls, value) -> "ChannelModel":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        aliases = {"gaussianapprox": "gaussian", "gaussian": "gaussian"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown channel model {value!r}") from None


@dataclass(frozen=True)
class ChannelSpec:
    """Statistical description of one link.

    ``rician_k`` is ignored unless ``model`` is Rician.
    """

    model: ChannelModel
    dim: int
    mean_power: float = 1.0
    rician_k: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "model", ChannelModel.parse(self.model))
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"dim must be a positive integer, got {self.dim!r}")
        if not (self.mean_power > 0 and math.isfinite(self.mean_power)):
            raise DomainError(f"mean_power must be positive, got {self.mean_power!r}")
        if not self.rician_k >= 0:
            raise DomainError(f"rician_k must be >= 0, got {self.rician_k!r}")

    @property
    def los_fraction(self) -> float:
        """Share of the mean power carried by the line of sight."""
        if self.model is ChannelModel.RICIAN:
            return self.rician_k / (self.rician_k + 1.0)
        if self.model is ChannelModel.GAUSSIAN_APPROX:
            return 1.0
        return 0.0

    def los_vector(self) -> np.ndarray:
        return np.full(self.dim, math.sqrt(self.mean_power / self.dim), dtype=complex)

    def norm_sq_law(self):
        """``(noncentrality_amplitude, per_component_variance)`` of ``||h||^2``.

        ``||h||^2`` is non-central chi-square with ``2 * dim`` real degrees of
        freedom.  Meaningless for the deterministic Gaussian approximation.
        """
        if self.model is ChannelModel.GAUSSIAN_APPROX:
            raise DomainError("deterministic channel has no fading law")
        los = self.los_fraction
        s = math.sqrt(los * self.mean_power)
        var = (1.0 - los) * self.mean_power / (2.0 * self.dim)
        return s, var


def complex_gaussian(rng: np.random.Generator, shape, power: float = 1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with ``E|z|^2 = power``."""
    scale = math.sqrt(power / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_channel(spec: ChannelSpec, rng: np.random.Generator, size=None) -> np.ndarray:
    """Draw channel vector(s) according to ``spec``.

    Returns shape ``(dim,)`` when ``size`` is None, else ``(size, dim)``.
    """
    shape = (spec.dim,) if size is None else (int(size), spec.dim)
    if spec.model is ChannelModel.GAUSSIAN_APPROX:
        return np.broadcast_to(spec.los_vector(), shape).copy()
    per_entry = spec.mean_power / spec.dim
    scatter = complex_gaussian(rng, shape, per_entry)
    if spec.model is ChannelModel.RAYLEIGH:
        return scatter
    k = spec.rician_k
    return math.sqrt(k / (k + 1)) * spec.los_vector() + math.sqrt(1 / (k + 1)) * scatter


def null_space_basis(h) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``h``.

    Built from a complex Householder reflector that maps ``h/||h||`` onto a
    multiple of the first axis; the remaining reflector columns span the
    complement.  Deterministic in ``h``.

    Returns
    -------
    ndarray, shape (dim, dim - 1)
        Columns ``G`` with ``h^H G = 0`` and ``G^H G = I``.
    """
    h = np.asarray(h, dtype=complex).ravel()
    if h.size < 2:
        raise DomainError("null space needs dim >= 2")
    norm = np.linalg.norm(h)
    if not norm >= 1e-12:
        raise DegenerateChannelError(f"||h|| = {norm:.3g} is too small for a null space")
    u = h / norm
    phase = u[0] / abs(u[0]) if abs(u[0]) > 0 else 1.0
    v = u.copy()
    v[0] += phase
    reflector = np.eye(h.size, dtype=complex) - 2.0 * np.outer(v, v.conj()) / np.vdot(v, v).real
    return reflector[:, 1:]


def an_signal(basis, rng: np.random.Generator) -> np.ndarray:
    """Artificial-noise vector ``G z`` with unit average power.

    ``z`` has i.i.d. complex Gaussian entries of power ``1/(dim-1)`` so that
    ``E||G z||^2 = 1``; the result lies in the span of ``basis``.
    """
    basis = np.asarray(basis)
    n_cols = basis.shape[1]
    z = complex_gaussian(rng, n_cols, 1.0 / n_cols)
    return basis @ z


def residual_interference_power(h_re, basis) -> float:
    """Jamming energy reaching Eve after null steering, ``||h_re^H G||^2``."""
    h_re = np.asarray(h_re, dtype=complex).ravel()
    basis = np.asarray(basis)
    if basis.ndim != 2 or basis.shape[0] != h_re.size:
        raise DimensionMismatchError(
            f"h_re has dim {h_re.size} but basis has shape {basis.shape}"
        )
    leak = h_re.conj() @ basis
    return float(np.vdot(leak, leak).real)


def projected_residual_power(h_re, h_rd) -> np.ndarray:
    """Batched ``||h_re^H G(h_rd)||^2`` for rows of ``h_re`` and ``h_rd``.

    Uses ``G G^H = I - h_rd h_rd^H / ||h_rd||^2`` so no basis is formed.
    """
    h_re = np.asarray(h_re)
    h_rd = np.asarray(h_rd)
    if h_re.shape != h_rd.shape:
        raise DimensionMismatchError(f"shapes differ: {h_re.shape} vs {h_rd.shape}")
    e_re = np.sum(np.abs(h_re) ** 2, axis=-1)
    e_rd = np.sum(np.abs(h_rd) ** 2, axis=-1)
    cross = np.abs(np.sum(h_rd.conj() * h_re, axis=-1)) ** 2
    return np.maximum(e_re - cross / e_rd, 0.0)
