"""Exact piecewise-constant-plus-drift path representation."""
from __future__ import annotations

import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

CSV_FMT = "%.17g"


@dataclass(frozen=True, eq=False)
class PathSkeleton:
    """A cadlag path ``X_t = drift * t + sum_{t_i <= t} j_i`` on ``[0, horizon]``.

    ``times`` has shape ``(m,)`` and is sorted; ``jumps`` has shape ``(m, d)``.
    ``sources`` optionally tags each jump (0 = small/Dickman, 1 = large).
    """

    horizon: float
    drift: np.ndarray
    times: np.ndarray
    jumps: np.ndarray
    sources: np.ndarray | None = None

    def __post_init__(self):
        drift = np.asarray(self.drift, dtype=float).reshape(-1)
        d = drift.shape[0]
        times = np.asarray(self.times, dtype=float).reshape(-1)
        jumps = np.asarray(self.jumps, dtype=float).reshape(-1, d)
        if self.horizon <= 0:
            raise DomainError("horizon must be positive")
        if times.shape[0] != jumps.shape[0]:
            raise ValueError("times and jumps differ in length")
        if times.size and (times[0] < 0 or times[-1] > self.horizon or np.any(np.diff(times) < 0)):
            raise ValueError("jump times must be sorted and inside [0, horizon]")
        object.__setattr__(self, "horizon", float(self.horizon))
        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "jumps", jumps)
        if self.sources is not None:
            object.__setattr__(self, "sources", np.asarray(self.sources, dtype=np.int8).reshape(-1))

    @property
    def dimension(self) -> int:
        return self.drift.shape[0]

    @property
    def n_jumps(self) -> int:
        return self.times.shape[0]

    @property
    def magnitudes(self) -> np.ndarray:
        return np.linalg.norm(self.jumps, axis=1)

    @classmethod
    def zero(cls, horizon: float, d: int) -> "PathSkeleton":
        return cls(horizon, np.zeros(d), np.zeros(0), np.zeros((0, d)))

    @classmethod
    def from_unsorted(cls, horizon, drift, times, jumps, sources=None) -> "PathSkeleton":
        # stable sort keeps generation order for tied timestamps
        order = np.argsort(np.asarray(times), kind="stable")
        src = None if sources is None else np.asarray(sources)[order]
        return cls(horizon, drift, np.asarray(times)[order], np.asarray(jumps)[order], src)

    def evaluate(self, t) -> np.ndarray:
        """Path value(s) at time(s) t; returns ``(d,)`` for scalar t, else ``(len(t), d)``."""
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(ts < 0) or np.any(ts > self.horizon):
            raise DomainError("evaluation time outside [0, horizon]")
        cum = np.vstack([np.zeros((1, self.dimension)), np.cumsum(self.jumps, axis=0)])
        counts = np.searchsorted(self.times, ts, side="right")
        out = cum[counts] + ts[:, None] * self.drift[None, :]
        return out[0] if np.ndim(t) == 0 else out

    def merge(self, other: "PathSkeleton") -> "PathSkeleton":
        """Superpose two paths; jumps of ``self`` precede ``other`` at equal times."""
        if other.horizon != self.horizon or other.dimension != self.dimension:
            raise ValueError("paths must share horizon and dimension")
        src_a = self.sources if self.sources is not None else np.zeros(self.n_jumps, np.int8)
        src_b = other.sources if other.sources is not None else np.ones(other.n_jumps, np.int8)
        return PathSkeleton.from_unsorted(
            self.horizon,
            self.drift + other.drift,
            np.concatenate([self.times, other.times]),
            np.vstack([self.jumps, other.jumps]),
            np.concatenate([src_a, src_b]),
        )

    def shifted(self, drift) -> "PathSkeleton":
        return PathSkeleton(self.horizon, self.drift + np.asarray(drift, float), self.times, self.jumps, self.sources)

    def table(self) -> np.ndarray:
        """Rows ``[t, x_1, ..., x_d]`` at 0, at every jump time and at the horizon."""
        ts = np.concatenate([[0.0], self.times, [self.horizon]])
        values = self.evaluate(ts)
        return np.column_stack([ts, values])

    def to_csv(self) -> str:
        buf = io.StringIO()
        header = ",".join(["t"] + [f"x_{i + 1}" for i in range(self.dimension)])
        np.savetxt(buf, self.table(), delimiter=",", fmt=CSV_FMT, header=header, comments="")
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "drift": self.drift.tolist(),
            "jumps": [{"t": float(t), "jump": j.tolist()} for t, j in zip(self.times, self.jumps)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PathSkeleton":
        drift = np.asarray(data["drift"], dtype=float)
        jumps = data.get("jumps", [])
        times = np.array([j["t"] for j in jumps], dtype=float)
        vecs = np.array([j["jump"] for j in jumps], dtype=float).reshape(-1, drift.shape[0])
        return cls(data["horizon"], drift, times, vecs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PathSkeleton":
        return cls.from_dict(json.loads(text))
