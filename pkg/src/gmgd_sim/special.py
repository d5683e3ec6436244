"""Exponential integral E1(x) = Gamma(0, x) and the radial tail function ell.

Gamma(0, x) is evaluated with the power series below x = 1 and a
continued fraction (modified Lentz) at and above it.  Both branches accept
scalars or numpy arrays.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286060651209008240243

_SERIES_TERMS = 40
_CF_MAX_ITER = 500
_CF_TOL = 1e-16
_TINY = 1e-300


def _check_positive(x: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise DomainError(f"{name} must be positive and finite")


def _series(x: np.ndarray) -> np.ndarray:
    # -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    term = np.ones_like(x)
    acc = np.zeros_like(x)
    for k in range(1, _SERIES_TERMS + 1):
        term = term * (-x) / k
        acc = acc + term / k
    return -EULER_GAMMA - np.log(x) - acc


def _continued_fraction(x: np.ndarray) -> np.ndarray:
    b = x + 1.0
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for i in range(1, _CF_MAX_ITER + 1):
        an = -float(i * i)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = c * d
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < _CF_TOL
        if done.all():
            break
    return h * np.exp(-x)


def upper_gamma_zero(x):
    """Upper incomplete gamma function at order zero, Gamma(0, x) = E1(x).

    Parameters
    ----------
    x : float or array_like
        Strictly positive, finite argument(s).

    Returns
    -------
    float or ndarray
        Gamma(0, x); underflows to 0.0 for x beyond roughly 740.
    """
    arr = np.asarray(x, dtype=float)
    _check_positive(arr, "x")
    flat = arr.reshape(-1)
    out = np.empty_like(flat)
    low = flat < 1.0
    if low.any():
        out[low] = _series(flat[low])
    if (~low).any():
        out[~low] = _continued_fraction(flat[~low])
    out = out.reshape(arr.shape)
    if np.ndim(x) == 0:
        return float(out)
    return out


def ell(u, p):
    """Tail integral int_u^inf r^-1 exp(-r^p) dr = Gamma(0, u^p) / p."""
    if not (math.isfinite(p) and p > 0):
        raise DomainError("p must be positive and finite")
    arr = np.asarray(u, dtype=float)
    _check_positive(arr, "u")
    return upper_gamma_zero(arr**p if np.ndim(u) else float(u) ** p) / p
