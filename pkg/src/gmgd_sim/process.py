"""Approximate GMGD Levy process: eps * Dickman + compound Poisson large jumps + drift."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import dickman, large_jumps
from .errors import DomainError
from .large_jumps import GmgdSpec, LargeJumpLaw, build_large_jump_law
from .paths import PathSkeleton
from .radial import DEFAULT_BETA

# spawn-key roles for the master seed
SMALL_STREAM = 0
LARGE_STREAM = 1
REPLICATION_STREAM = 2


@dataclass(frozen=True)
class SimulationConfig:
    epsilon: float = 0.1
    horizon: float = 1.0
    shot_noise_K: int = dickman.DEFAULT_K
    beta: float = DEFAULT_BETA
    seed: int = 0

    def __post_init__(self):
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise DomainError("epsilon must be positive")
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise DomainError("horizon must be positive")
        if int(self.shot_noise_K) != self.shot_noise_K or self.shot_noise_K < 1:
            raise DomainError("shot_noise_K must be a positive integer")
        if not (0.0 < self.beta < 1.0):
            raise DomainError("beta must lie in (0, 1)")
        if not (0 <= int(self.seed) < 2**64):
            raise DomainError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return asdict(self)


def substreams(seed: int, *key: int) -> tuple[np.random.Generator, np.random.Generator]:
    """(small-jump, large-jump) generators derived from the master seed and an optional key prefix."""
    small = np.random.SeedSequence(seed, spawn_key=(*key, SMALL_STREAM))
    large = np.random.SeedSequence(seed, spawn_key=(*key, LARGE_STREAM))
    return np.random.default_rng(small), np.random.default_rng(large)


def _split(rng, seed: int):
    if rng is None:
        return substreams(seed)
    small, large = np.random.default_rng(rng).spawn(2)
    return small, large


def sample_path(
    spec: GmgdSpec,
    cfg: SimulationConfig,
    rng=None,
    component: str = "full",
    law: LargeJumpLaw | None = None,
) -> PathSkeleton:
    """Sample an approximate GMGD path on ``[0, cfg.horizon]``.

    Parameters
    ----------
    spec, cfg
        Law and simulation settings.  With ``rng=None`` the streams are
        derived from ``cfg.seed`` so the output is reproducible bit-for-bit.
    component : {"full", "large", "small"}
        ``"large"`` keeps only the compound Poisson part, ``"small"`` only
        the scaled Dickman part; both omit the drift.
    law
        Precomputed large-jump law for ``cfg.epsilon`` (built if omitted).
    """
    if component not in ("full", "large", "small"):
        raise ValueError(f"unknown component {component!r}")
    small_rng, large_rng = _split(rng, cfg.seed)
    T = cfg.horizon
    parts = []
    if component in ("full", "small"):
        dspec = dickman.DickmanSpec(spec.spectral, cfg.epsilon)
        parts.append(dickman.sample_path(dspec, T, cfg.shot_noise_K, small_rng))
    if component in ("full", "large"):
        law = law or build_large_jump_law(spec, cfg.epsilon)
        parts.append(large_jumps.sample_large_jump_path(law, T, cfg.beta, large_rng))
    path = parts[0] if len(parts) == 1 else parts[0].merge(parts[1])
    return path.shifted(spec.gamma) if component == "full" else path


def evaluate_path(path: PathSkeleton, times) -> np.ndarray:
    """Exact values ``drift * t + sum_{t_i <= t} j_i`` at each requested time."""
    return path.evaluate(np.asarray(times, dtype=float))


def sample_components(
    spec: GmgdSpec,
    cfg: SimulationConfig,
    times,
    n: int,
    small_rng,
    large_rng,
    law: LargeJumpLaw | None = None,
    include_small: bool = True,
):
    """Grid values of n independent paths, split into parts.

    Returns ``(large, small, rounds)`` with arrays of shape
    ``(n, len(times), d)``; ``small`` already carries the eps factor and is
    None when ``include_small`` is false.  The full process is
    ``large + small + gamma * t``.
    """
    law = law or build_large_jump_law(spec, cfg.epsilon)
    large, rounds = large_jumps.sample_values(law, cfg.horizon, times, n, cfg.beta, large_rng)
    small = None
    if include_small:
        dspec = dickman.DickmanSpec(spec.spectral, cfg.epsilon)
        small = dickman.sample_values(dspec, cfg.horizon, times, n, cfg.shot_noise_K, small_rng)
    return large, small, rounds
