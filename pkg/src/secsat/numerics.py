r"""Special functions and quadrature.

Everything here is the minimum needed by the closed-form distributions of
the secrecy model:

* modified Bessel function of the first kind :math:`I_\nu(x)` (and its
  exponentially scaled form), used in non-central chi-square densities;
* generalized Marcum Q-function :math:`Q_m(a, b)`;
* central chi-square CDF with an even number of degrees of freedom;
* non-central chi-square CDF in the ``1 - Q_n(s/\sigma, \sqrt{x}/\sigma)``
  parameterization;
* adaptive Simpson quadrature.

All functions are pure.  Scalars in give Python floats out; array inputs
broadcast and return arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln, xlogy

from .errors import ConvergenceError, DomainError

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOLERANCES",
    "bessel_i",
    "bessel_ie",
    "marcum_q",
    "chi2_cdf_even",
    "chi2_sf_even",
    "noncentral_chi2_cdf",
    "noncentral_chi2_pdf",
    "integrate",
]

MAX_ORDER = 64
_SERIES_X_MAX = 20.0
_BLOCK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical budgets shared by the series and quadrature routines.

    Parameters
    ----------
    series_tol : float
        Absolute truncation tolerance for infinite series.
    quad_tol : float
        Absolute tolerance requested from :func:`integrate`.
    max_terms : int
        Upper bound on the number of series terms kept.
    max_subdivisions : int
        Upper bound on the number of interval bisections in :func:`integrate`.
    """

    series_tol: float = 1e-12
    quad_tol: float = 1e-9
    max_terms: int = 20000
    max_subdivisions: int = 200000

    def __post_init__(self):
        if not (self.series_tol > 0 and self.quad_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.max_terms < 1 or self.max_subdivisions < 1:
            raise DomainError("max_terms and max_subdivisions must be >= 1")


DEFAULT_TOLERANCES = ToleranceConfig()


def _out(arr, scalar_input):
    return float(arr) if scalar_input else arr


def _check_order(order, lowest=0):
    if int(order) != order or order < lowest:
        raise DomainError(f"order must be an integer >= {lowest}, got {order!r}")
    if order > MAX_ORDER:
        raise DomainError(f"order {order} exceeds supported maximum {MAX_ORDER}")
    return int(order)


# --------------------------------------------------------------------------
# Bessel I


def _log_ie_series(nu, x):
    """log(e^{-x} I_nu(x)) by the ascending series, summed in log space."""
    x_max = float(np.max(x)) if x.size else 0.0
    n_terms = int(x_max / 2 + 10 * math.sqrt(x_max) + 40)
    k = np.arange(n_terms)[:, None]
    half = x[None, :] / 2
    # (x/2)^(2k+nu) / (k! (k+nu)!)
    logt = xlogy(2 * k + nu, half) - gammaln(k + 1) - gammaln(k + nu + 1)
    peak = logt.max(axis=0)
    s = np.exp(logt - peak).sum(axis=0)
    return peak + np.log(s) - x


def _ie_asymptotic(nu, x):
    """e^{-x} I_nu(x) from the large-argument expansion, x >> nu^2."""
    mu = 4.0 * nu * nu
    total = np.ones_like(x)
    term = np.ones_like(x)
    for k in range(1, 200):
        term = -term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        total = total + term
        if np.all(np.abs(term) < 1e-17 * np.abs(total)):
            break
    return total / np.sqrt(2 * np.pi * x)


def bessel_ie(order, x):
    """Exponentially scaled modified Bessel function ``exp(-x) * I_order(x)``.

    Safe for arguments where :math:`I_\\nu(x)` itself overflows.  The
    ascending series is used up to ``x = 20`` and wherever the asymptotic
    expansion would be inaccurate (``x < 2 order^2``); the asymptotic
    expansion is used above.
    """
    nu = _check_order(order)
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~np.isfinite(xs)):
        raise DomainError("x must be finite")
    if np.any(xs < 0):
        raise DomainError("x must be >= 0")
    out = np.empty_like(xs)
    asym = (xs > _SERIES_X_MAX) & (xs > 2.0 * nu * nu)
    zero = xs == 0
    ser = ~asym & ~zero
    if np.any(ser):
        out[ser] = np.exp(_log_ie_series(nu, xs[ser]))
    if np.any(asym):
        out[asym] = _ie_asymptotic(nu, xs[asym])
    out[zero] = 1.0 if nu == 0 else 0.0
    return _out(out.reshape(np.shape(x)) if not scalar else out[0], scalar)


def bessel_i(order, x):
    """Modified Bessel function of the first kind ``I_order(x)``.

    Raises
    ------
    DomainError
        For ``x < 0``, a negative or non-integer order, or order > 64.
    OverflowError
        When the value exceeds the double-precision range; use
        :func:`bessel_ie` in that regime.
    """
    ie = np.asarray(bessel_ie(order, x), dtype=float)
    xs = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        log_val = np.log(ie) + xs
    if np.any(log_val > 709.0):
        raise OverflowError("I_order(x) overflows double precision; use bessel_ie")
    val = ie * np.exp(xs)
    return float(val) if np.ndim(x) == 0 else val


# --------------------------------------------------------------------------
# Poisson bookkeeping shared by the chi-square CDFs


def _poisson_split(n, y, tol):
    """Return ``(P[Pois(y) < n], P[Pois(y) >= n])`` for integer arrays ``n``.

    ``n`` has shape (K,) and ``y`` shape (M,); outputs are (M, K).  Both
    sides are computed by direct summation of the smaller side so that tiny
    probabilities keep their relative accuracy.
    """
    n = np.asarray(n, dtype=int)
    y = np.asarray(y, dtype=float)
    n_max = int(n.max())
    extra = int(12 * math.sqrt(n_max) + 40)
    j = np.arange(n_max + extra + 1)
    block = max(1, _BLOCK_ELEMENTS // j.size)
    if y.size > block:
        parts = [_poisson_split(n, y[i : i + block], tol) for i in range(0, y.size, block)]
        return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])
    logp = xlogy(j[None, :], y[:, None]) - y[:, None] - gammaln(j + 1)[None, :]
    pmf = np.exp(logp)
    below = np.cumsum(pmf, axis=1)  # P[Pois <= j]
    above = np.cumsum(pmf[:, ::-1], axis=1)[:, ::-1]  # P[Pois >= j], truncated
    lower = np.where(n[None, :] > 0, below[:, np.maximum(n - 1, 0)], 0.0)
    upper_direct = above[:, n]
    # The truncated tail sum is only trusted where the upper side is small.
    upper = np.where(lower > 0.5, upper_direct, 1.0 - lower)
    lower = np.where(lower > 0.5, 1.0 - upper_direct, lower)
    return np.clip(lower, 0.0, 1.0), np.clip(upper, 0.0, 1.0)


def _marcum_pair(m, a, b, cfg):
    """Return ``(Q_m(a, b), 1 - Q_m(a, b))`` with ``b`` a 1-D array.

    Poisson mixture over the noncentrality: with ``lam = a^2/2`` and
    ``y = b^2/2``::

        Q_m(a, b) = sum_k Pois(k; lam) * P[Pois(y) < m + k]
    """
    lam = 0.5 * a * a
    y = 0.5 * b * b
    if lam == 0.0:
        ks = np.array([0])
        w = np.array([1.0])
    else:
        spread = 12.0 * math.sqrt(lam) + 40.0
        k_lo = max(0, int(lam - spread))
        k_hi = int(lam + spread) + 1
        ks = np.arange(k_lo, k_hi + 1)
        w = np.exp(xlogy(ks, lam) - lam - gammaln(ks + 1))
        keep = w > cfg.series_tol * 1e-3
        ks, w = ks[keep], w[keep]
        if ks.size > cfg.max_terms:
            raise ConvergenceError(
                f"Marcum Q series needs {ks.size} terms > max_terms={cfg.max_terms}"
            )
    # Blocks over b keep the (len(b), n_max) Poisson tables bounded.
    n_cols = int(m + ks[-1]) + int(12 * math.sqrt(m + ks[-1]) + 41)
    block = max(1, _BLOCK_ELEMENTS // n_cols)
    q = np.empty(y.size)
    cdf = np.empty(y.size)
    for start in range(0, y.size, block):
        sl = slice(start, start + block)
        q_part, cdf_part = _poisson_split(m + ks, y[sl], cfg.series_tol)
        q[sl] = q_part @ w
        cdf[sl] = cdf_part @ w
    # Q_m(a, 0) = 1 exactly.
    q = np.where(y == 0.0, 1.0, q)
    cdf = np.where(y == 0.0, 0.0, cdf)
    return np.clip(q, 0.0, 1.0), np.clip(cdf, 0.0, 1.0)


def _check_nonneg_finite(name, v):
    arr = np.asarray(v, dtype=float)
    if np.any(~np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if np.any(arr < 0):
        raise DomainError(f"{name} must be >= 0")
    return arr


def marcum_q(m, a, b, cfg: ToleranceConfig = DEFAULT_TOLERANCES):
    """Generalized Marcum Q-function ``Q_m(a, b)``.

    Parameters
    ----------
    m : int
        Order, ``1 <= m <= 64``.
    a : float
        Non-centrality parameter (scalar).
    b : float or array_like
        Threshold(s).

    Returns
    -------
    float or ndarray
        Values in [0, 1], absolute error below ``cfg.series_tol``.
    """
    m = _check_order(m, lowest=1)
    a = float(_check_nonneg_finite("a", a))
    bs = _check_nonneg_finite("b", b)
    q, _ = _marcum_pair(m, a, np.atleast_1d(bs).ravel(), cfg)
    return _out(q.reshape(bs.shape) if bs.ndim else q[0], bs.ndim == 0)


def chi2_cdf_even(half_dof, x, scale, cfg: ToleranceConfig = DEFAULT_TOLERANCES):
    """CDF of a central chi-square variable with ``2 * half_dof`` degrees of freedom.

    The variable is a sum of ``2 n`` squared zero-mean Gaussians of
    variance ``scale`` each, so the CDF is the finite sum
    ``1 - exp(-x/(2 scale)) * sum_{m<n} (x/(2 scale))^m / m!``.  Returns 0 for
    ``x <= 0``.
    """
    n = _check_order(half_dof, lowest=1)
    if not scale > 0:
        raise DomainError(f"scale must be > 0, got {scale!r}")
    xs = np.asarray(x, dtype=float)
    if np.any(np.isnan(xs)):
        raise DomainError("x must not be NaN")
    flat = np.atleast_1d(xs).ravel()
    y = np.where(flat > 0, flat, 0.0) / (2.0 * scale)
    finite = np.isfinite(y)
    out = np.ones_like(y)
    if np.any(finite):
        _, upper = _poisson_split(np.array([n]), y[finite], cfg.series_tol)
        out[finite] = upper[:, 0]
    out[flat <= 0] = 0.0
    return _out(out.reshape(xs.shape) if xs.ndim else out[0], xs.ndim == 0)


def chi2_sf_even(half_dof, x, scale, cfg: ToleranceConfig = DEFAULT_TOLERANCES):
    """Survival function ``1 - chi2_cdf_even(...)`` summed directly.

    Keeps full relative accuracy deep in the tail, where the CDF rounds to 1.
    """
    n = _check_order(half_dof, lowest=1)
    if not scale > 0:
        raise DomainError(f"scale must be > 0, got {scale!r}")
    xs = np.asarray(x, dtype=float)
    if np.any(np.isnan(xs)):
        raise DomainError("x must not be NaN")
    flat = np.atleast_1d(xs).ravel()
    y = np.where(flat > 0, flat, 0.0) / (2.0 * scale)
    finite = np.isfinite(y)
    out = np.zeros_like(y)
    if np.any(finite):
        lower, _ = _poisson_split(np.array([n]), y[finite], cfg.series_tol)
        out[finite] = lower[:, 0]
    out[flat <= 0] = 1.0
    return _out(out.reshape(xs.shape) if xs.ndim else out[0], xs.ndim == 0)


def noncentral_chi2_cdf(
    half_dof, noncentrality_amplitude, x, scale, cfg: ToleranceConfig = DEFAULT_TOLERANCES
):
    """CDF of ``||g + mu||^2`` with ``g`` having ``2 * half_dof`` i.i.d. real
    Gaussian components of variance ``scale`` and ``||mu|| = noncentrality_amplitude``.

    Equal to ``1 - Q_n(s / sigma, sqrt(x) / sigma)`` for ``x > 0`` and 0 otherwise.
    """
    n = _check_order(half_dof, lowest=1)
    if not scale > 0:
        raise DomainError(f"scale must be > 0, got {scale!r}")
    s = float(_check_nonneg_finite("noncentrality_amplitude", noncentrality_amplitude))
    xs = np.asarray(x, dtype=float)
    if np.any(np.isnan(xs)):
        raise DomainError("x must not be NaN")
    flat = np.atleast_1d(xs).ravel()
    sigma = math.sqrt(scale)
    pos = (flat > 0) & np.isfinite(flat)
    out = np.where(flat > 0, 1.0, 0.0)
    if np.any(pos):
        _, cdf = _marcum_pair(n, s / sigma, np.sqrt(flat[pos]) / sigma, cfg)
        out[pos] = cdf
    return _out(out.reshape(xs.shape) if xs.ndim else out[0], xs.ndim == 0)


def noncentral_chi2_pdf(half_dof, noncentrality_amplitude, x, scale):
    """Density matching :func:`noncentral_chi2_cdf`.

    For ``s > 0``::

        f(x) = 1/(2 sigma^2) (x / s^2)^((n-1)/2) exp(-(x + s^2) / (2 sigma^2))
               * I_{n-1}(s sqrt(x) / sigma^2)

    evaluated with the scaled Bessel function so large arguments do not
    overflow.  ``s = 0`` gives the central density.
    """
    n = _check_order(half_dof, lowest=1)
    if not scale > 0:
        raise DomainError(f"scale must be > 0, got {scale!r}")
    s = float(_check_nonneg_finite("noncentrality_amplitude", noncentrality_amplitude))
    xs = np.asarray(x, dtype=float)
    flat = np.atleast_1d(xs).ravel()
    out = np.zeros_like(flat)
    pos = flat > 0
    xp = flat[pos]
    if s == 0.0:
        logf = xlogy(n - 1, xp / (2 * scale)) - xp / (2 * scale) - gammaln(n) - math.log(
            2 * scale
        )
        out[pos] = np.exp(logf)
    elif xp.size:
        z = s * np.sqrt(xp) / scale
        ie = np.asarray(bessel_ie(n - 1, z))
        # exp(-(x+s^2)/(2 sigma^2)) * I(z) = exp(-(sqrt(x)-s)^2/(2 sigma^2)) * ie(z)
        with np.errstate(divide="ignore"):
            logf = (
                0.5 * (n - 1) * (np.log(xp) - 2 * math.log(s))
                - (np.sqrt(xp) - s) ** 2 / (2 * scale)
                + np.log(ie)
                - math.log(2 * scale)
            )
        out[pos] = np.exp(logf)
    return _out(out.reshape(xs.shape) if xs.ndim else out[0], xs.ndim == 0)


# --------------------------------------------------------------------------
# Quadrature


def _as_vector_fn(f):
    def g(x):
        try:
            y = f(x)
        except (TypeError, ValueError):
            y = np.array([f(float(t)) for t in x])
        return np.broadcast_to(np.asarray(y, dtype=float), x.shape)

    return g


def integrate(
    f: Callable,
    lo: float,
    hi: float,
    cfg: ToleranceConfig = DEFAULT_TOLERANCES,
    breakpoints=None,
    initial_panels: int = 8,
) -> float:
    """Adaptive Simpson quadrature of ``f`` over ``[lo, hi]``.

    Panels are refined breadth-first; every pass evaluates all new nodes in
    one vectorized call of ``f`` (scalar-only callables also work).  A panel
    is accepted once its two-half Simpson estimate differs from the whole
    panel estimate by at most ``15 * tol_panel``, where each panel owns a
    share of ``cfg.quad_tol`` proportional to its width.

    Parameters
    ----------
    breakpoints : sequence of float, optional
        Interior points where panels must start, e.g. around a narrow peak.
    initial_panels : int
        Number of equal panels the range (or each breakpoint segment) is cut
        into before refinement.

    Raises
    ------
    ConvergenceError
        When ``cfg.max_subdivisions`` bisections do not reach the tolerance,
        or the integrand produces non-finite values.
    """
    if not (np.isfinite(lo) and np.isfinite(hi)) or not lo < hi:
        raise DomainError(f"need finite lo < hi, got [{lo}, {hi}]")
    fv = _as_vector_fn(f)
    edges = [lo]
    for p in sorted(breakpoints or []):
        if lo < p < hi:
            edges.append(float(p))
    edges.append(hi)
    grid = np.concatenate(
        [np.linspace(u, v, initial_panels + 1)[:-1] for u, v in zip(edges[:-1], edges[1:])]
        + [np.array([hi])]
    )
    a, b = grid[:-1], grid[1:]
    m = 0.5 * (a + b)
    vals = fv(np.concatenate([a, m, b[-1:]]))
    fa = vals[: a.size]
    fm = vals[a.size : 2 * a.size]
    fb = np.append(fa[1:], vals[-1])
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError("integrand returned a non-finite value")
    whole = (b - a) / 6.0 * (fa + 4 * fm + fb)
    span = hi - lo
    tol = cfg.quad_tol * (b - a) / span

    total = 0.0
    splits = 0
    while a.size:
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        new = fv(np.concatenate([lm, rm]))
        flm, frm = new[: a.size], new[a.size :]
        if not (np.all(np.isfinite(flm)) and np.all(np.isfinite(frm))):
            raise ConvergenceError("integrand returned a non-finite value")
        left = (m - a) / 6.0 * (fa + 4 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4 * frm + fb)
        err = left + right - whole
        done = np.abs(err) <= 15.0 * tol
        # Stop refining panels that have hit floating-point resolution.
        done |= (m - a) <= 4 * np.finfo(float).eps * np.maximum(np.abs(m), 1.0)
        total += float(np.sum((left + right + err / 15.0)[done]))
        keep = ~done
        splits += int(keep.sum())
        if splits > cfg.max_subdivisions:
            raise ConvergenceError(
                f"quadrature did not reach tol={cfg.quad_tol} within "
                f"{cfg.max_subdivisions} subdivisions"
            )
        a, m, b = a[keep], m[keep], b[keep]
        fa, fm, fb = fa[keep], fm[keep], fb[keep]
        flm, frm = flm[keep], frm[keep]
        left, right, tol = left[keep], right[keep], tol[keep] / 2
        a, m, b = (
            np.concatenate([a, m]),
            np.concatenate([lm[keep], rm[keep]]),
            np.concatenate([m, b]),
        )
        fa, fm, fb = (
            np.concatenate([fa, fm]),
            np.concatenate([flm, frm]),
            np.concatenate([fm, fb]),
        )
        whole = np.concatenate([left, right])
        tol = np.concatenate([tol, tol])
    return total
