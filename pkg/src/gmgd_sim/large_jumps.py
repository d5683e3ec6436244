"""General multivariate gamma laws and exact simulation of their large jumps.

The Levy measure restricted to ``|x| > eps`` is finite with mass

    lambda_eps = sum_i w_i k_eps(s_i),   k_eps(s) = sum_j q_j ell(eps v_j^(1/p)),

so the large-jump process is compound Poisson.  A normalized jump is drawn
as ``W = R V^(-1/p) S``: the direction S from the tilted atom weights
``w_i k_eps(s_i) / lambda_eps``, the mixing variable V from the re-weighted
Thorin atoms ``q_j ell(eps v_j^(1/p)) / k_eps(S)``, and R from G_R(.; eps V^(1/p)).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError
from .paths import PathSkeleton
from .radial import DEFAULT_BETA, sample_radial_batch
from .special import ell
from .spectral import SpectralMeasure, uniform_circle

_PROB_TOL = 1e-12
_UNDERFLOW = 1e-300


@dataclass(frozen=True, eq=False)
class GmgdSpec:
    """Parameters of a GMGD law with atomic spectral and Thorin measures.

    ``thorin[i]`` is a ``(values, probs)`` pair describing Q_s for atom i:
    ``q(r^p, s_i) = sum_j probs[j] * exp(-r^p values[j])``.
    """

    p: float
    spectral: SpectralMeasure
    thorin: tuple
    gamma: np.ndarray = field(default=None)

    def __post_init__(self):
        if not (math.isfinite(self.p) and self.p > 0):
            raise DomainError("p must be positive")
        d = self.spectral.d
        gamma = np.zeros(d) if self.gamma is None else np.asarray(self.gamma, dtype=float).reshape(-1)
        if gamma.shape != (d,):
            raise ValueError("drift has wrong dimension")
        if len(self.thorin) != self.spectral.n_atoms:
            raise ValueError("need one Thorin measure per spectral atom")
        rows = []
        for values, probs in self.thorin:
            v = np.asarray(values, dtype=float).reshape(-1)
            q = np.asarray(probs, dtype=float).reshape(-1)
            if v.size == 0 or v.shape != q.shape:
                raise ValueError("Thorin support and weights must be non-empty and aligned")
            if np.any(~np.isfinite(v)) or np.any(v <= 0) or np.any(q <= 0):
                raise DomainError("Thorin support points and weights must be positive")
            if abs(q.sum() - 1.0) > _PROB_TOL:
                raise DomainError("Thorin weights must sum to 1")
            v.flags.writeable = False
            q.flags.writeable = False
            rows.append((v, q))
        gamma.flags.writeable = False
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "thorin", tuple(rows))

    @property
    def d(self) -> int:
        return self.spectral.d

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "p": self.p,
            "gamma": self.gamma.tolist(),
            "spectral": self.spectral.to_dict(),
            "thorin": [[[float(a), float(b)] for a, b in zip(v, q)] for v, q in self.thorin],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GmgdSpec":
        try:
            spectral = SpectralMeasure.from_dict(data["spectral"])
            if "d" in data and int(data["d"]) != spectral.d:
                raise ValueError("d does not match spectral dimension")
            thorin = []
            for row in data["thorin"]:
                arr = np.asarray(row, dtype=float).reshape(-1, 2)
                thorin.append((arr[:, 0], arr[:, 1]))
            return cls(float(data["p"]), spectral, tuple(thorin), data.get("gamma"))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed GMGD spec: {exc!r}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "GmgdSpec":
        return cls.from_dict(json.loads(text))


def study_preset_spec(n: int = 30) -> GmgdSpec:
    """Bivariate preset: uniform spectral measure on n circle points, p = 1, Q_s = delta_1, zero drift."""
    spectral = uniform_circle(n)
    thorin = tuple((np.array([1.0]), np.array([1.0])) for _ in range(n))
    return GmgdSpec(1.0, spectral, thorin, np.zeros(2))


def mgd_spec(spectral: SpectralMeasure, rates: Sequence[float], gamma=None) -> GmgdSpec:
    """Multivariate gamma law with radial density ``r^-1 exp(-b(s) r)``, i.e. p = 1 and Q_s = delta_{b(s)}."""
    thorin = tuple((np.array([float(b)]), np.array([1.0])) for b in rates)
    return GmgdSpec(1.0, spectral, thorin, gamma)


def _thorin_terms(spec: GmgdSpec, atom: int, epsilon: float) -> np.ndarray:
    v, q = spec.thorin[atom]
    terms = q * ell(epsilon * v ** (1.0 / spec.p), spec.p)
    return np.where(terms < _UNDERFLOW, 0.0, terms)


def k_epsilon(spec: GmgdSpec, atom: int, epsilon: float) -> float:
    """``int_eps^inf q(r^p, s) r^-1 dr`` for the spectral atom with the given index."""
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise DomainError("epsilon must be positive")
    return float(_thorin_terms(spec, atom, epsilon).sum())


@dataclass(frozen=True, eq=False)
class LargeJumpLaw:
    source: GmgdSpec
    epsilon: float
    lambda_eps: float
    k_values: np.ndarray
    sigma_p_weights: np.ndarray
    gv_weights: tuple

    @property
    def d(self) -> int:
        return self.source.d


def build_large_jump_law(spec: GmgdSpec, epsilon: float) -> LargeJumpLaw:
    """Tabulate lambda_eps, the tilted direction weights and the re-weighted Thorin rows."""
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise DomainError("epsilon must be positive")
    if spec.spectral.is_zero:
        raise DomainError("the zero spectral measure has no large jumps")
    rows = [_thorin_terms(spec, i, epsilon) for i in range(spec.spectral.n_atoms)]
    k = np.array([r.sum() for r in rows])
    mass = spec.spectral.weights * k
    lam = float(mass.sum())
    if not lam > 0:
        raise DomainError("large-jump intensity underflows to zero")
    gv = tuple(r / r.sum() if r.sum() > 0 else np.full(r.shape, 1.0 / r.size) for r in rows)
    return LargeJumpLaw(spec, float(epsilon), lam, k, mass / lam, gv)


def _categorical(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.minimum(np.searchsorted(cdf, u, side="right"), cdf.size - 1)


def _sample_jumps(law: LargeJumpLaw, n: int, beta: float, rng: np.random.Generator):
    """n draws from the normalized large-jump law; returns (vectors, magnitudes, atom index, rounds)."""
    spec = law.source
    p = spec.p
    cdf = np.cumsum(law.sigma_p_weights)
    cdf /= cdf[-1]
    atom = _categorical(cdf, rng.random(n)) if cdf.size > 1 else np.zeros(n, dtype=np.intp)
    v = np.empty(n)
    for i in np.unique(atom):
        sel = atom == i
        support = spec.thorin[i][0]
        if support.size == 1:
            v[sel] = support[0]
        else:
            row_cdf = np.cumsum(law.gv_weights[i])
            row_cdf /= row_cdf[-1]
            v[sel] = support[_categorical(row_cdf, rng.random(int(sel.sum())))]
    scale = v ** (-1.0 / p)
    r, rounds = sample_radial_batch(law.epsilon / scale, p, beta, rng)
    mags = r * scale
    vectors = mags[:, None] * spec.spectral.atoms[atom]
    return vectors, mags, atom, rounds


def sample_large_jump(law: LargeJumpLaw, beta: float = DEFAULT_BETA, rng=None, size=None) -> np.ndarray:
    """Draw from the normalized large-jump law; ``(d,)`` for size None else ``(size, d)``."""
    rng = np.random.default_rng(rng)
    n = 1 if size is None else int(size)
    vectors, *_ = _sample_jumps(law, n, beta, rng)
    return vectors[0] if size is None else vectors


def _check_horizon(T: float) -> None:
    if not (T > 0 and math.isfinite(T)):
        raise DomainError("horizon T must be positive")


def sample_large_jump_path(law: LargeJumpLaw, T: float, beta: float = DEFAULT_BETA, rng=None) -> PathSkeleton:
    """Compound Poisson path of large jumps on ``[0, T]`` with Poisson(T lambda_eps) jumps at uniform times."""
    _check_horizon(T)
    rng = np.random.default_rng(rng)
    n = int(rng.poisson(T * law.lambda_eps))
    u = 1.0 - rng.random(n)
    vectors, *_ = _sample_jumps(law, n, beta, rng)
    return PathSkeleton.from_unsorted(T, np.zeros(law.d), T * u, vectors, np.ones(n, np.int8))


def sample_values(law: LargeJumpLaw, T: float, times, n: int, beta: float = DEFAULT_BETA, rng=None):
    """Values of n independent large-jump paths at sorted grid times; shape ``(n, len(times), d)``.

    Also returns the total number of radial proposal rounds.
    """
    _check_horizon(T)
    rng = np.random.default_rng(rng)
    grid = np.asarray(times, dtype=float)
    m = grid.size
    counts = rng.poisson(T * law.lambda_eps, n)
    total = int(counts.sum())
    u = 1.0 - rng.random(total)
    vectors, _, _, rounds = _sample_jumps(law, total, beta, rng)
    owner = np.repeat(np.arange(n), counts)
    flat = owner * (m + 1) + np.searchsorted(grid, T * u, side="left")
    out = np.empty((n, m + 1, law.d))
    for k in range(law.d):
        out[..., k] = np.bincount(flat, weights=vectors[:, k], minlength=n * (m + 1)).reshape(n, m + 1)
    return np.cumsum(out[:, :m], axis=1), rounds
