"""Rejection sampling from the radial law G_R(.; a).

The target density is ``g_R(r; a) = r^-1 exp(-r^p) / ell(a)`` on ``r >= a``.
For ``a >= 1`` the proposal is ``h1`` (a shifted exponential on the p-power
scale); for ``a < 1`` it is the two-piece mixture ``h2`` with weight beta on
the log-uniform part below 1.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .special import ell

DEFAULT_BETA = 0.5


def _check_a(a) -> None:
    arr = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("a must be positive and finite")


def _check_p(p: float) -> None:
    if not (math.isfinite(p) and p > 0):
        raise DomainError("p must be positive")


def _check_beta(beta: float) -> None:
    if not (0.0 < beta < 1.0):
        raise DomainError("beta must lie in (0, 1)")


def g_r_pdf(x, a: float, p: float):
    """Target density of G_R(.; a)."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        val = np.exp(-(x**p)) / (x * ell(a, p))
    return np.where(x >= a, val, 0.0)


def h1_pdf(x, a: float, p: float):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        val = p * x ** (p - 1) * np.exp(a**p - x**p)
    return np.where(x >= a, val, 0.0)


def h2_pdf(x, a: float, p: float, beta: float):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        low = beta / (x * math.log(1.0 / a))
        high = (1.0 - beta) * p * x ** (p - 1) * np.exp(1.0 - x**p)
    return np.where(x < a, 0.0, np.where(x < 1.0, low, high))


def envelope_c1(a: float, p: float) -> float:
    """Envelope constant for h1; its reciprocal ``exp(a^p) p ell(a)`` is the acceptance rate."""
    return 1.0 / (math.exp(a**p) * p * ell(a, p))


def _c2_max(a: float, p: float, beta: float) -> float:
    return max(1.0 / (math.e * p * (1.0 - beta)), math.log(1.0 / a) / beta)


def envelope_c2(a: float, p: float, beta: float) -> float:
    """Envelope constant for h2, valid for a in (0, 1)."""
    return _c2_max(a, p, beta) / ell(a, p)


def acceptance_probability(a: float, p: float, beta: float = DEFAULT_BETA) -> float:
    """Exact per-round acceptance probability of the sampler used for this a."""
    if a >= 1.0:
        return 1.0 / envelope_c1(a, p)
    return 1.0 / envelope_c2(a, p, beta)


def phi1(y, a: float, p: float):
    """Acceptance function of the h1 sampler on the p-power scale ``y = x^p``."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(y >= a**p, 1.0 / y, 0.0)


def _phi2(x, a, p, beta):
    # a may be an array matching x
    la = np.log(1.0 / a)
    m = np.maximum(1.0 / (math.e * p * (1.0 - beta)), la / beta)
    with np.errstate(over="ignore"):
        denom = np.where(x < 1.0, beta * np.exp(x**p) / la, (1.0 - beta) * math.e * p * x**p)
    return 1.0 / (m * denom)


def phi2(x, a: float, p: float, beta: float = DEFAULT_BETA):
    """Acceptance function of the h2 sampler, equal to ``g_R / (C2 h2)`` on ``x >= a``."""
    if not (0.0 < a < 1.0):
        raise DomainError("phi2 requires a in (0, 1)")
    _check_p(p)
    _check_beta(beta)
    x = np.asarray(x, dtype=float)
    if np.any(x < a):
        raise DomainError("phi2 requires x >= a")
    out = _phi2(x, a, p, beta)
    return float(out) if out.ndim == 0 else out


def quantile_h1(q, a: float, p: float):
    """Inverse CDF of h1: ``(a^p - log(1 - q))^(1/p)``."""
    _check_a(a)
    _check_p(p)
    qa = np.asarray(q, dtype=float)
    if np.any(qa < 0) or np.any(qa >= 1) or np.any(np.isnan(qa)):
        raise DomainError("q must lie in [0, 1)")
    # the root can round one ulp below a
    out = np.maximum((a**p - np.log1p(-qa)) ** (1.0 / p), a)
    return float(out) if out.ndim == 0 else out


def _h2_from_uniform(u, a, p, beta):
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        left = a ** (1.0 - u / beta)
        right = (1.0 - np.log1p(-u) + math.log1p(-beta)) ** (1.0 / p)
    return np.where(u <= beta, left, right)


def quantile_h2(u, a: float, p: float, beta: float = DEFAULT_BETA):
    """Map a uniform variate to an h2 draw (the mixture inversion used by the h2 sampler)."""
    if not (0.0 < a < 1.0):
        raise DomainError("h2 requires a in (0, 1)")
    _check_p(p)
    _check_beta(beta)
    out = _h2_from_uniform(u, a, p, beta)
    return float(out) if out.ndim == 0 else out


def sample_h2(a: float, p: float, beta: float = DEFAULT_BETA, rng=None, size=None):
    if not (0.0 < a < 1.0):
        raise DomainError("h2 requires a in (0, 1)")
    _check_p(p)
    _check_beta(beta)
    rng = np.random.default_rng(rng)
    out = _h2_from_uniform(rng.random(size), a, p, beta)
    return float(out) if size is None else out


def radial_cdf(r, a: float, p: float):
    """CDF of G_R(.; a): ``1 - ell(r) / ell(a)`` for r >= a."""
    r = np.asarray(r, dtype=float)
    safe = np.maximum(r, a)
    out = np.where(r < a, 0.0, 1.0 - ell(safe, p) / ell(a, p))
    return float(out) if out.ndim == 0 else out


def _propose(a: np.ndarray, p: float, beta: float, v: np.ndarray, u2: np.ndarray):
    """One proposal round per entry of ``a``; returns (candidate radius, accepted)."""
    x = np.empty_like(a)
    acc = np.empty(a.shape, dtype=bool)
    hi = a >= 1.0
    if hi.any():
        # h1 proposal, tested on the p-power scale
        y = a[hi] ** p - np.log1p(-v[hi])
        acc[hi] = u2[hi] <= 1.0 / y
        x[hi] = np.maximum(y ** (1.0 / p), a[hi])
    lo = ~hi
    if lo.any():
        al = a[lo]
        vl = v[lo]
        with np.errstate(divide="ignore", invalid="ignore"):
            left = al ** (1.0 - vl / beta)
            right = (1.0 - np.log1p(-vl) + math.log1p(-beta)) ** (1.0 / p)
        xl = np.maximum(np.where(vl <= beta, left, right), al)
        acc[lo] = u2[lo] <= _phi2(xl, al, p, beta)
        x[lo] = xl
    return x, acc


def sample_radial_batch(a, p: float, beta: float = DEFAULT_BETA, rng=None):
    """Draw one G_R(.; a_i) variate for every entry of ``a``.

    Returns
    -------
    values : ndarray
        Same shape as ``a``; every value is >= the corresponding a.
    rounds : int
        Total number of proposal rounds consumed (diagnostic counter).
    """
    _check_a(a)
    _check_p(p)
    _check_beta(beta)
    rng = np.random.default_rng(rng)
    a = np.asarray(a, dtype=float)
    flat = a.reshape(-1)
    out = np.empty_like(flat)
    pending = np.arange(flat.size)
    rounds = 0
    while pending.size:
        v = rng.random(pending.size)
        u2 = rng.random(pending.size)
        x, acc = _propose(flat[pending], p, beta, v, u2)
        rounds += pending.size
        out[pending[acc]] = x[acc]
        pending = pending[~acc]
    return out.reshape(a.shape), rounds


def sample_radial(a: float, p: float, beta: float = DEFAULT_BETA, rng=None) -> float:
    """Single draw from G_R(.; a); the h1 sampler when a >= 1, the h2 sampler otherwise."""
    values, _ = sample_radial_batch(np.array([a], dtype=float), p, beta, rng)
    return float(values[0])


def acceptance_rate(a: float, p: float, beta: float = DEFAULT_BETA, rounds: int = 100_000, rng=None) -> float:
    """Fraction of accepted proposals over a fixed number of rounds."""
    _check_a(a)
    _check_p(p)
    _check_beta(beta)
    if rounds < 1:
        raise DomainError("rounds must be >= 1")
    rng = np.random.default_rng(rng)
    v = rng.random(rounds)
    u2 = rng.random(rounds)
    _, acc = _propose(np.full(rounds, float(a)), p, beta, v, u2)
    return float(acc.mean())
