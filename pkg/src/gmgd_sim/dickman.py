"""Multivariate epsilon-Dickman laws and their Levy processes via the shot-noise series.

The process ``Y`` on ``[0, T]`` is represented as

    Y_t = sum_i eps * exp(-G_i / T) * xi_i * 1{T U_i <= t},

with ``G_i`` the arrival times of a rate-theta Poisson process, ``U_i``
uniform and ``xi_i`` drawn from sigma / theta.  The sum is truncated after
K terms.  Terms whose weight has underflowed to exactly 0.0 contribute
nothing, so generation stops early once every remaining weight is zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .paths import PathSkeleton
from .spectral import CallbackSpectralMeasure, SpectralMeasure, sample_atom_indices, sample_direction, total_mass

DEFAULT_K = 10_000
_BLOCK = 256
_MAX_ATOM_BINS = 4_000_000
# paths per pass; bounds block memory at roughly _ROW_CHUNK * _BLOCK * 8 bytes per array
_ROW_CHUNK = 16_384


@dataclass(frozen=True)
class DickmanSpec:
    spectral: SpectralMeasure | CallbackSpectralMeasure
    epsilon: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise DomainError("epsilon must be positive")

    @property
    def d(self) -> int:
        return self.spectral.d

    @property
    def theta(self) -> float:
        return total_mass(self.spectral)


def _check(T: float, K: int) -> None:
    if not (T > 0 and math.isfinite(T)):
        raise DomainError("horizon T must be positive")
    if int(K) != K or K < 1:
        raise DomainError("truncation K must be a positive integer")


def _series_blocks(spec: DickmanSpec, T: float, K: int, n: int, rng: np.random.Generator):
    """Yield ``(rows, weights, u, idx, xi)`` blocks of the truncated series for n independent paths.

    ``weights``, ``u`` and ``idx`` have shape ``(len(rows), b)``; weights
    exclude the epsilon factor.  For an atomic measure ``idx`` holds atom
    indices and ``xi`` is None; for a callback measure ``idx`` is None and
    ``xi`` has shape ``(len(rows), b, d)``.
    """
    theta = spec.theta
    atomic = isinstance(spec.spectral, SpectralMeasure)
    arrivals = np.zeros(n)
    rows = np.arange(n)
    used = 0
    while used < K and rows.size:
        b = min(_BLOCK, K - used)
        g = arrivals[rows, None] + np.cumsum(rng.exponential(1.0 / theta, (rows.size, b)), axis=1)
        w = np.exp(-g / T)
        u = 1.0 - rng.random((rows.size, b))
        if atomic:
            yield rows, w, u, sample_atom_indices(spec.spectral, rng, (rows.size, b)), None
        else:
            xi = sample_direction(spec.spectral, rng, rows.size * b).reshape(rows.size, b, spec.d)
            yield rows, w, u, None, xi
        arrivals[rows] = g[:, -1]
        used += b
        rows = rows[w[:, -1] > 0.0]


def _accumulate(spec: DickmanSpec, bins: np.ndarray, n_bins: int, w: np.ndarray, idx, xi) -> np.ndarray:
    """Sum ``w * xi`` into ``n_bins`` bins; returns shape ``(n_bins, d)``."""
    k = spec.spectral.n_atoms if idx is not None else 0
    if idx is None or n_bins * k > _MAX_ATOM_BINS:
        def component(c):
            x = xi[..., c] if idx is None else spec.spectral.atoms[idx, c]
            return np.bincount(bins.ravel(), weights=(w * x).ravel(), minlength=n_bins)

        return np.stack([component(c) for c in range(spec.d)], axis=1)
    per_atom = np.bincount((bins * k + idx).ravel(), weights=w.ravel(), minlength=n_bins * k)
    return per_atom.reshape(n_bins, k) @ spec.spectral.atoms


def sample_path(spec: DickmanSpec, T: float, K: int = DEFAULT_K, rng=None) -> PathSkeleton:
    """One path of the epsilon-Dickman Levy process on ``[0, T]``.

    Every jump has magnitude strictly below ``spec.epsilon``; the drift is 0.
    Terms with weight exactly zero are omitted from the skeleton.
    """
    _check(T, K)
    rng = np.random.default_rng(rng)
    if spec.spectral.is_zero:
        return PathSkeleton.zero(T, spec.d)
    times, jumps = [], []
    for _, w, u, idx, xi in _series_blocks(spec, T, int(K), 1, rng):
        keep = w[0] > 0.0
        direction = spec.spectral.atoms[idx[0, keep]] if xi is None else xi[0, keep]
        times.append(T * u[0, keep])
        jumps.append(spec.epsilon * w[0, keep, None] * direction)
    t = np.concatenate(times)
    j = np.vstack(jumps)
    return PathSkeleton.from_unsorted(T, np.zeros(spec.d), t, j, np.zeros(t.size, np.int8))


def sample_marginal(spec: DickmanSpec, rng=None, K: int = DEFAULT_K, size=None) -> np.ndarray:
    """Draw from MD^eps(sigma): the process at time 1 with horizon 1.

    Returns shape ``(d,)`` when ``size`` is None, otherwise ``(size, d)``.
    """
    _check(1.0, K)
    rng = np.random.default_rng(rng)
    n = 1 if size is None else int(size)
    out = np.zeros((n, spec.d))
    if not spec.spectral.is_zero:
        for start in range(0, n, _ROW_CHUNK):
            part = out[start : start + _ROW_CHUNK]
            for rows, w, _, idx, xi in _series_blocks(spec, 1.0, int(K), part.shape[0], rng):
                bins = np.broadcast_to(np.arange(rows.size)[:, None], w.shape)
                part[rows] += _accumulate(spec, bins, rows.size, w, idx, xi)
        out *= spec.epsilon
    return out[0] if size is None else out


def sample_values(spec: DickmanSpec, T: float, times, n: int, K: int = DEFAULT_K, rng=None) -> np.ndarray:
    """Values of n independent paths at the sorted grid ``times``; shape ``(n, len(times), d)``.

    Faster than building n skeletons: each term is binned into the first
    grid time at or after its jump time and the bins are accumulated.
    """
    _check(T, K)
    rng = np.random.default_rng(rng)
    grid = np.asarray(times, dtype=float)
    m = grid.size
    if np.any(np.diff(grid) < 0) or np.any(grid < 0) or np.any(grid > T):
        raise DomainError("times must be sorted and inside [0, T]")
    if spec.spectral.is_zero or n == 0:
        return np.zeros((n, m, spec.d))
    parts = []
    for start in range(0, n, _ROW_CHUNK):
        c = min(_ROW_CHUNK, n - start)
        out = np.zeros((c * (m + 1), spec.d))
        for rows, w, u, idx, xi in _series_blocks(spec, T, int(K), c, rng):
            bins = rows[:, None] * (m + 1) + np.searchsorted(grid, T * u, side="left")
            out += _accumulate(spec, bins, c * (m + 1), w, idx, xi)
        parts.append(np.cumsum(out.reshape(c, m + 1, spec.d)[:, :m], axis=1))
    return spec.epsilon * np.concatenate(parts)


def levy_mass(spec: DickmanSpec, a: float, b: float, atoms=None) -> float:
    """Dickman Levy measure D^eps of the sector ``{x : |x| in (a, b], x/|x| in C}``.

    ``atoms`` lists the atom indices forming C; None means every atom.
    Infinite when ``a == 0``.
    """
    if not (0 <= a < b):
        raise DomainError("need 0 <= a < b")
    eps = spec.epsilon
    if a >= eps:
        return 0.0
    mass = total_mass(spec.spectral) if atoms is None else spec.spectral.mass_of(atoms)
    if mass == 0.0:
        return 0.0
    if a == 0:
        return math.inf
    return mass * (math.log(min(b, eps)) - math.log(a))
