"""Finite discrete spectral measures on the unit sphere."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError

UNIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Atomic measure ``sum_i w_i delta_{s_i}`` on the unit sphere in R^d.

    An instance with no atoms is the zero measure.  Atoms are stored as a
    read-only ``(k, d)`` array, weights as a read-only ``(k,)`` array.
    """

    d: int
    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if int(self.d) < 1:
            raise DomainError("dimension must be >= 1")
        atoms = np.array(self.atoms, dtype=float).reshape(-1, int(self.d))
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if atoms.shape[0] != weights.shape[0]:
            raise DomainError("atoms and weights differ in length")
        if np.any(~np.isfinite(weights)) or np.any(weights <= 0):
            raise DomainError("weights must be strictly positive")
        norms = np.linalg.norm(atoms, axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_TOL):
            raise DomainError("atoms must be unit vectors")
        atoms = atoms / norms[:, None] if len(norms) else atoms
        if len(np.unique(atoms, axis=0)) != len(atoms):
            raise DomainError("duplicate atoms")
        atoms.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def empty(cls, d: int) -> "SpectralMeasure":
        return cls(d, np.zeros((0, d)), np.zeros(0))

    @property
    def n_atoms(self) -> int:
        return len(self.weights)

    @property
    def is_zero(self) -> bool:
        return self.n_atoms == 0

    @property
    def total_mass(self) -> float:
        return total_mass(self)

    @property
    def probabilities(self) -> np.ndarray:
        return self.weights / self.weights.sum()

    def mass_of(self, indices: Sequence[int] | None) -> float:
        """sigma(C) for the atom subset C given by indices (None means all atoms)."""
        if indices is None:
            return total_mass(self)
        idx = np.asarray(list(indices), dtype=int)
        if idx.size == 0:
            return 0.0
        if np.any(idx < 0) or np.any(idx >= self.n_atoms):
            raise DomainError("atom index out of range")
        return float(self.weights[np.unique(idx)].sum())

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "atoms": self.atoms.tolist(),
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SpectralMeasure":
        try:
            d = int(data["d"])
            atoms = data.get("atoms", [])
            weights = data.get("weights", [])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed spectral measure: {exc}") from exc
        if len(atoms) == 0:
            return cls.empty(d)
        if any(len(a) != d for a in atoms):
            raise ValueError("atom length does not match d")
        return cls(d, np.asarray(atoms, dtype=float), np.asarray(weights, dtype=float))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "SpectralMeasure":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CallbackSpectralMeasure:
    """Non-atomic spectral measure given only by a direction sampler and its mass.

    ``sampler(rng, size)`` must return a ``(size, d)`` array of unit vectors
    drawn from sigma / theta.  Only the Dickman sampler accepts this type.
    """

    d: int
    mass: float
    sampler: Callable[[np.random.Generator, int], np.ndarray]

    @property
    def total_mass(self) -> float:
        return float(self.mass)

    @property
    def is_zero(self) -> bool:
        return self.mass == 0


def total_mass(m) -> float:
    if isinstance(m, CallbackSpectralMeasure):
        return float(m.mass)
    return float(m.weights.sum()) if m.n_atoms else 0.0


def sample_atom_indices(m: SpectralMeasure, rng: np.random.Generator, size) -> np.ndarray:
    """Atom indices drawn with probabilities w_i / theta."""
    if m.is_zero:
        raise DomainError("cannot sample a direction from the zero measure")
    if m.n_atoms == 1:
        return np.zeros(size, dtype=np.intp)
    if np.all(m.weights == m.weights[0]):
        return rng.integers(0, m.n_atoms, size)
    cdf = np.cumsum(m.weights)
    cdf /= cdf[-1]
    u = rng.random(size)
    return np.minimum(np.searchsorted(cdf, u, side="right"), m.n_atoms - 1)


def sample_direction(m, rng: np.random.Generator, size=None) -> np.ndarray:
    """Draw unit vector(s) from sigma / theta.

    Returns shape ``(d,)`` when ``size`` is None, otherwise ``(size, d)``.
    """
    if m.is_zero:
        raise DomainError("cannot sample a direction from the zero measure")
    n = 1 if size is None else int(size)
    if isinstance(m, CallbackSpectralMeasure):
        out = np.asarray(m.sampler(rng, n), dtype=float).reshape(n, m.d)
    else:
        out = m.atoms[sample_atom_indices(m, rng, n)]
    return out[0] if size is None else out


def uniform_circle(n: int) -> SpectralMeasure:
    """Uniform probability on n evenly spaced points of the unit circle, starting at (1, 0)."""
    if int(n) < 1:
        raise DomainError("n must be >= 1")
    angles = 2.0 * np.pi * np.arange(n) / n
    atoms = np.column_stack([np.cos(angles), np.sin(angles)])
    # exact values at quarter turns keep symmetric presets free of 1e-17 noise
    atoms[np.abs(atoms) < 1e-15] = 0.0
    return SpectralMeasure(2, atoms, np.full(n, 1.0 / n))
