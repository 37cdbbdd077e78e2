import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from secsat.channel import (
    ChannelModel,
    ChannelSpec,
    an_signal,
    null_space_basis,
    projected_residual_power,
    residual_interference_power,
    sample_channel,
)
from secsat.errors import DegenerateChannelError, DimensionMismatchError, DomainError
from secsat.numerics import chi2_cdf_even, noncentral_chi2_cdf
from secsat.secrecy import LinkModel, sample_residuals
from secsat.streams import Streams


def _complex_vectors(dim):
    part = hnp.arrays(np.float64, dim, elements=st.floats(-1e3, 1e3))
    return st.tuples(part, part).map(lambda p: p[0] + 1j * p[1]).filter(
        lambda h: np.linalg.norm(h) > 1e-6
    )


def _max_cdf_gap(samples, cdf):
    samples = np.sort(samples)
    ecdf_hi = np.arange(1, samples.size + 1) / samples.size
    ecdf_lo = np.arange(samples.size) / samples.size
    f = cdf(samples)
    return float(max(np.max(np.abs(f - ecdf_hi)), np.max(np.abs(f - ecdf_lo))))


# ---------------------------------------------------------------- specs


def test_model_parsing_accepts_aliases():
    assert ChannelModel.parse("Rayleigh") is ChannelModel.RAYLEIGH
    assert ChannelModel.parse("gaussian_approx") is ChannelModel.GAUSSIAN_APPROX
    assert ChannelModel.parse(ChannelModel.RICIAN) is ChannelModel.RICIAN
    with pytest.raises(DomainError):
        ChannelModel.parse("nakagami")


@pytest.mark.parametrize(
    "kwargs", [dict(dim=0), dict(dim=2.5), dict(mean_power=0.0), dict(mean_power=math.inf), dict(rician_k=-1)]
)
def test_spec_validation(kwargs):
    base = dict(model="rayleigh", dim=4)
    with pytest.raises(DomainError):
        ChannelSpec(**{**base, **kwargs})


def test_norm_law_parameters():
    s, var = ChannelSpec("rician", 4, 2.0, 3.0).norm_sq_law()
    assert s == pytest.approx(math.sqrt(1.5))
    assert var == pytest.approx(0.5 / 8)
    assert ChannelSpec("rayleigh", 4, 1.0).norm_sq_law() == (0.0, 1 / 8)
    with pytest.raises(DomainError):
        ChannelSpec("gaussian", 4).norm_sq_law()


# ---------------------------------------------------------------- sampling


def test_gaussian_approx_is_deterministic(rng):
    spec = ChannelSpec("gaussian", 4, 1.0)
    a, b = sample_channel(spec, rng), sample_channel(spec, rng)
    np.testing.assert_array_equal(a, b)
    assert np.sum(np.abs(a) ** 2) == pytest.approx(1.0, abs=1e-15)


def test_rayleigh_mean_power(rng):
    h = sample_channel(ChannelSpec("rayleigh", 4, 1.0), rng, 10**6)
    assert h.shape == (10**6, 4)
    assert np.mean(np.sum(np.abs(h) ** 2, axis=1)) == pytest.approx(1.0, abs=0.01)
    # per-entry variance mean_power/dim, real and imaginary parts each half of it
    assert np.var(h.real) == pytest.approx(1 / 8, rel=0.01)
    assert np.var(h.imag) == pytest.approx(1 / 8, rel=0.01)


def test_rician_moments(rng):
    k, dim = 10.0, 4
    h = sample_channel(ChannelSpec("rician", dim, 1.0, k), rng, 10**6)
    assert np.mean(np.sum(np.abs(h) ** 2, axis=1)) == pytest.approx(1.0, abs=0.01)
    np.testing.assert_allclose(np.abs(h.mean(axis=0)), math.sqrt(k / ((k + 1) * dim)), rtol=0.01)


def test_sampling_is_reproducible():
    spec = ChannelSpec("rician", 3, 1.0, 2.0)
    a = sample_channel(spec, Streams(7).generator("x"), 100)
    b = sample_channel(spec, Streams(7).generator("x"), 100)
    c = sample_channel(spec, Streams(8).generator("x"), 100)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("model,k", [("rayleigh", 0.0), ("rician", 4.0)])
def test_norm_sq_matches_its_stated_law(rng, model, k):
    spec = ChannelSpec(model, 3, 1.5, k)
    x = np.sum(np.abs(sample_channel(spec, rng, 10**6)) ** 2, axis=1)
    s, var = spec.norm_sq_law()
    gap = _max_cdf_gap(x, lambda t: noncentral_chi2_cdf(3, s, t, var))
    assert gap <= 0.005


# ---------------------------------------------------------------- null space


@pytest.mark.parametrize("dim", [2, 4, 8])
def test_null_space_on_random_channels(rng, dim):
    for _ in range(1000):
        h = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        g = null_space_basis(h)
        assert g.shape == (dim, dim - 1)
        assert np.linalg.norm(h.conj() @ g) <= 1e-10
        assert np.max(np.abs(g.conj().T @ g - np.eye(dim - 1))) <= 1e-10
        proj = np.eye(dim) - np.outer(h, h.conj()) / np.vdot(h, h).real
        assert np.max(np.abs(g @ g.conj().T - proj)) <= 1e-10


@given(st.integers(2, 8).flatmap(_complex_vectors))
def test_null_space_property(h):
    g = null_space_basis(h)
    u = h / np.linalg.norm(h)
    assert np.linalg.norm(u.conj() @ g) <= 1e-10
    assert np.max(np.abs(g.conj().T @ g - np.eye(h.size - 1))) <= 1e-10


def test_null_space_axis_aligned():
    g = null_space_basis(np.array([1.0, 0.0]))
    assert g.shape == (2, 1)
    assert abs(g[0, 0]) <= 1e-15
    assert abs(abs(g[1, 0]) - 1.0) <= 1e-15


def test_null_space_projector_for_diagonal_vector():
    h = np.array([1.0, 1.0]) / math.sqrt(2)
    g = null_space_basis(h)
    np.testing.assert_allclose(g @ g.conj().T, np.eye(2) - np.outer(h, h), atol=1e-10)


def test_null_space_is_deterministic():
    h = np.array([0.3 - 1j, 2.0, -0.5j])
    np.testing.assert_array_equal(null_space_basis(h), null_space_basis(h.copy()))


def test_null_space_rejects_degenerate_input():
    with pytest.raises(DegenerateChannelError):
        null_space_basis(np.zeros(4))
    with pytest.raises(DomainError):
        null_space_basis(np.array([1.0 + 0j]))


# ---------------------------------------------------------------- AN and residual


def test_an_signal_power_and_orthogonality(rng):
    h = np.array([1 + 1j, -0.5, 2j, 0.1])
    g = null_space_basis(h)
    draws = np.array([an_signal(g, rng) for _ in range(20000)])
    assert np.max(np.abs(draws @ h.conj())) <= 1e-10
    # moment check at 10^6 draws, vectorized through the same basis
    z = (rng.standard_normal((10**6, 3)) + 1j * rng.standard_normal((10**6, 3))) * math.sqrt(1 / 6)
    assert np.mean(np.sum(np.abs(z @ g.T) ** 2, axis=1)) == pytest.approx(1.0, abs=0.01)
    assert np.mean(np.sum(np.abs(draws) ** 2, axis=1)) == pytest.approx(1.0, abs=0.03)


def test_an_signal_in_two_dimensions_is_multiple_of_basis(rng):
    g = null_space_basis(np.array([0.4 + 0.2j, -1.0]))
    for _ in range(50):
        x = an_signal(g, rng)
        coeff = np.vdot(g[:, 0], x)
        np.testing.assert_allclose(x, coeff * g[:, 0], atol=1e-12)


def test_residual_special_cases(rng):
    h = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    g = null_space_basis(h)
    assert residual_interference_power(h, g) <= 1e-18 * max(1.0, np.vdot(h, h).real)
    orth = g[:, 0] * 1.7
    assert residual_interference_power(orth, g) == pytest.approx(1.7**2, abs=1e-10)
    with pytest.raises(DimensionMismatchError):
        residual_interference_power(np.ones(3), g)


def test_batched_projection_equals_explicit_basis(rng):
    h_rd = rng.standard_normal((200, 5)) + 1j * rng.standard_normal((200, 5))
    h_re = rng.standard_normal((200, 5)) + 1j * rng.standard_normal((200, 5))
    fast = projected_residual_power(h_re, h_rd)
    slow = [residual_interference_power(e, null_space_basis(d)) for e, d in zip(h_re, h_rd)]
    np.testing.assert_allclose(fast, slow, rtol=1e-10, atol=1e-12)
    with pytest.raises(DimensionMismatchError):
        projected_residual_power(h_re[:, :4], h_rd)


def test_rayleigh_residual_follows_central_chi2(rng):
    spec = ChannelSpec("rayleigh", 4, 1.0)
    r = projected_residual_power(sample_channel(spec, rng, 10**6), sample_channel(spec, rng, 10**6))
    assert _max_cdf_gap(r, lambda t: chi2_cdf_even(3, t, 1 / 8)) <= 0.005


def test_rician_residual_projection_vs_nominal_law():
    """Diagnostic: how far the projected Rician residual strays from the nominal law.

    The nominal law keeps the full line-of-sight power as noncentrality and
    the per-antenna scattered variance with ``2(N_r - 1)`` degrees of
    freedom.  Projection onto the null space of an independent Rician
    ``h_rd`` sharing the same all-in-phase LOS direction removes most of the
    LOS energy, so the true law is markedly different; the sampler's
    ``"nominal"`` mode reproduces the nominal law exactly.
    """
    n_r, k = 4, 1.0
    streams = Streams(99)
    proj = LinkModel.build(4, n_r, relay_model="rician", k_re=k, residual_law="projection")
    nom = proj.__class__(proj.sat, proj.relay_eve, proj.relay_bob, "nominal")
    half_dof, s, var = proj.residual_law_params()

    def law(t):
        return noncentral_chi2_cdf(half_dof, s, t, var)

    r_proj = sample_residuals(proj, streams.generator("rd"), streams.generator("re"), 10**6)
    r_nom = sample_residuals(nom, streams.generator("rd"), streams.generator("re"), 10**6)
    gap_nominal = _max_cdf_gap(r_nom, law)
    gap_projection = _max_cdf_gap(r_proj, law)
    print(f"\nRician K_re={k}, N_r={n_r}: max CDF gap nominal={gap_nominal:.4f} projection={gap_projection:.4f}")
    assert gap_nominal <= 0.005
    assert gap_projection > 0.05
