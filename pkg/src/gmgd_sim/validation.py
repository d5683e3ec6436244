"""Analytic moments, Monte Carlo moment studies, small-jump convergence checks and KS utilities."""
from __future__ import annotations

import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special as sc
from scipy import stats

from .dickman import _ROW_CHUNK, DickmanSpec, _accumulate, _series_blocks
from .errors import DomainError
from .large_jumps import GmgdSpec, build_large_jump_law
from .process import REPLICATION_STREAM, SimulationConfig, sample_components, substreams

CHUNK = 1000
TARGETS = ("large_jumps_only", "full_process", "drop_small_jumps")


def default_times(horizon: float = 1.0, count: int = 20) -> np.ndarray:
    return horizon * np.arange(1, count + 1) / count


# ---------------------------------------------------------------------------
# analytic moments
# ---------------------------------------------------------------------------

def _upper_gamma(s: float, x: np.ndarray) -> np.ndarray:
    return sc.gamma(s) * sc.gammaincc(s, x)


def analytic_moments(spec: GmgdSpec, epsilon: float, t: float, include_drift: bool = False):
    """Mean vector and covariance matrix at time t of the jumps with magnitude above epsilon.

    ``epsilon = 0`` gives the whole pure-jump part.  Uses
    ``int_eps^inf r^k r^-1 exp(-r^p v) dr = v^(-k/p) Gamma(k/p, eps^p v) / p``.
    """
    if epsilon < 0 or t <= 0:
        raise DomainError("need epsilon >= 0 and t > 0")
    p = spec.p
    d = spec.d
    mean = np.zeros(d)
    second = np.zeros((d, d))
    for s, w, (v, q) in zip(spec.spectral.atoms, spec.spectral.weights, spec.thorin):
        x = epsilon**p * v
        m1 = np.sum(q * v ** (-1.0 / p) * _upper_gamma(1.0 / p, x)) / p
        m2 = np.sum(q * v ** (-2.0 / p) * _upper_gamma(2.0 / p, x)) / p
        mean += w * m1 * s
        second += w * m2 * np.outer(s, s)
    mean *= t
    if include_drift:
        mean = mean + spec.gamma * t
    return mean, t * second


def analytic_moments_study(n: int, epsilon: float, t: float):
    """Closed-form moments for the uniform-circle preset with p = 1 and Q_s = delta_1.

    Returns ``(mean, variances, covariance)``.  ``epsilon = 0`` gives the
    moments of the full process.
    """
    if n < 1 or epsilon < 0 or t <= 0:
        raise DomainError("need n >= 1, epsilon >= 0, t > 0")
    angles = 2.0 * np.pi * np.arange(n) / n
    c, s = np.cos(angles), np.sin(angles)
    first = t * math.exp(-epsilon)
    second = t * (epsilon + 1.0) * math.exp(-epsilon)
    mean = first * np.array([c.mean(), s.mean()])
    var = second * np.array([(c * c).mean(), (s * s).mean()])
    cov = second * float((c * s).mean())
    return mean, var, cov


# ---------------------------------------------------------------------------
# moment study
# ---------------------------------------------------------------------------

@dataclass
class MomentReport:
    """Analytic vs empirical moments on a time grid, with scaled absolute errors."""

    target: str
    epsilon: float
    n_replications: int
    times: np.ndarray
    analytic_mean: np.ndarray
    analytic_var: np.ndarray
    analytic_cov: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    cov: np.ndarray
    err_mean: np.ndarray
    err_var: np.ndarray
    err_cov: np.ndarray
    total_error: np.ndarray
    proposal_rounds: int = 0

    def at(self, t: float) -> dict:
        i = int(np.argmin(np.abs(self.times - t)))
        return {
            "t": float(self.times[i]),
            "mean": self.mean[i].tolist(),
            "var": self.var[i].tolist(),
            "cov": float(self.cov[i]),
            "err_mean": self.err_mean[i].tolist(),
            "err_var": self.err_var[i].tolist(),
            "err_cov": float(self.err_cov[i]),
            "total_error": float(self.total_error[i]),
        }

    def to_dict(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            out[k] = v.tolist() if isinstance(v, np.ndarray) else v
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        cols = [
            ("t", self.times),
            ("analytic_mean_1", self.analytic_mean[:, 0]),
            ("analytic_mean_2", self.analytic_mean[:, 1]),
            ("analytic_var_1", self.analytic_var[:, 0]),
            ("analytic_var_2", self.analytic_var[:, 1]),
            ("analytic_cov", self.analytic_cov),
            ("mean_1", self.mean[:, 0]),
            ("mean_2", self.mean[:, 1]),
            ("var_1", self.var[:, 0]),
            ("var_2", self.var[:, 1]),
            ("cov", self.cov),
            ("err_mean_1", self.err_mean[:, 0]),
            ("err_mean_2", self.err_mean[:, 1]),
            ("err_var_1", self.err_var[:, 0]),
            ("err_var_2", self.err_var[:, 1]),
            ("err_cov", self.err_cov),
            ("total_error", self.total_error),
        ]
        buf = io.StringIO()
        np.savetxt(
            buf,
            np.column_stack([c for _, c in cols]),
            delimiter=",",
            fmt="%.17g",
            header=",".join(name for name, _ in cols),
            comments="",
        )
        return buf.getvalue()


def _chunk_sums(values: np.ndarray) -> np.ndarray:
    # per time: sum x1, sum x2, sum x1^2, sum x2^2, sum x1 x2
    x1, x2 = values[..., 0], values[..., 1]
    return np.stack([x1.sum(0), x2.sum(0), (x1 * x1).sum(0), (x2 * x2).sum(0), (x1 * x2).sum(0)])


def _fsum_stack(parts: list[np.ndarray]) -> np.ndarray:
    # exactly rounded, hence independent of chunk completion order
    stacked = np.stack(parts)
    flat = stacked.reshape(len(parts), -1)
    return np.array([math.fsum(flat[:, j]) for j in range(flat.shape[1])]).reshape(stacked.shape[1:])


def _report(target, cfg, spec, n, times, sums, rounds) -> MomentReport:
    s1, s2, q1, q2, q12 = sums
    mean = np.column_stack([s1, s2]) / n
    var = (np.column_stack([q1, q2]) - n * mean**2) / (n - 1)
    cov = (q12 - n * mean[:, 0] * mean[:, 1]) / (n - 1)
    eps = cfg.epsilon if target == "large_jumps_only" else 0.0
    drift = target != "large_jumps_only"
    a_mean = np.zeros((times.size, 2))
    a_var = np.zeros((times.size, 2))
    a_cov = np.zeros(times.size)
    for i, t in enumerate(times):
        m, c = analytic_moments(spec, eps, float(t), include_drift=drift)
        a_mean[i] = m
        a_var[i] = np.diag(c)
        a_cov[i] = c[0, 1]
    err_mean = np.abs(a_mean - mean) / times[:, None]
    err_var = np.abs(a_var - var) / times[:, None]
    err_cov = np.abs(a_cov - cov) / times
    total = np.sqrt((err_mean**2).sum(1) + (err_var**2).sum(1) + err_cov**2)
    return MomentReport(target, cfg.epsilon, n, times, a_mean, a_var, a_cov, mean, var, cov,
                        err_mean, err_var, err_cov, total, rounds)


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("GMGD_SIM_THREADS", "1"))
    return max(1, int(threads))


def run_moment_study(
    spec: GmgdSpec,
    cfg: SimulationConfig,
    N: int,
    times=None,
    targets: Sequence[str] = ("full_process",),
    threads: int | None = None,
) -> dict[str, MomentReport]:
    """Simulate N replications once and score every requested target against its analytic moments.

    All targets share the same random draws.  Replications are processed in
    blocks of ``CHUNK``; block c uses streams keyed by ``(seed, c)``, so the
    result does not depend on the thread count.
    """
    if spec.d != 2:
        raise DomainError("moment studies are defined for bivariate laws")
    if N < 2:
        raise DomainError("need at least two replications")
    for tg in targets:
        if tg not in TARGETS:
            raise ValueError(f"unknown target {tg!r}")
    times = default_times(cfg.horizon) if times is None else np.asarray(times, dtype=float)
    if np.any(times <= 0) or np.any(times > cfg.horizon) or np.any(np.diff(times) < 0):
        raise DomainError("times must be sorted and inside (0, horizon]")
    law = build_large_jump_law(spec, cfg.epsilon)
    need_small = "full_process" in targets
    drift = spec.gamma[None, None, :] * times[None, :, None]

    def work(c: int):
        n = min(CHUNK, N - c * CHUNK)
        small_rng, large_rng = substreams(cfg.seed, REPLICATION_STREAM, c)
        large, small, rounds = sample_components(spec, cfg, times, n, small_rng, large_rng, law, need_small)
        sums = {}
        for tg in targets:
            if tg == "large_jumps_only":
                sums[tg] = _chunk_sums(large)
            elif tg == "full_process":
                sums[tg] = _chunk_sums(large + small + drift)
            else:
                sums[tg] = _chunk_sums(large + drift)
        return sums, rounds

    n_chunks = -(-N // CHUNK)
    workers = resolve_threads(threads)
    if workers == 1:
        results = [work(c) for c in range(n_chunks)]
    else:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(work, range(n_chunks)))
    rounds = sum(r for _, r in results)
    return {
        tg: _report(tg, cfg, spec, N, times, _fsum_stack([s[tg] for s, _ in results]), rounds)
        for tg in targets
    }


def moment_study(
    spec: GmgdSpec,
    cfg: SimulationConfig,
    N: int,
    times=None,
    target: str = "full_process",
    threads: int | None = None,
) -> MomentReport:
    """Moment-error study for one target (``"large_jumps_only"`` or ``"full_process"``)."""
    return run_moment_study(spec, cfg, N, times, (target,), threads)[target]


def compare_drop_small_jumps(spec, cfg, N, times=None, threads=None) -> tuple[MomentReport, MomentReport]:
    """(Dickman-augmented, small-jumps-dropped) reports from the same simulated paths."""
    reports = run_moment_study(spec, cfg, N, times, ("full_process", "drop_small_jumps"), threads)
    return reports["full_process"], reports["drop_small_jumps"]


# ---------------------------------------------------------------------------
# small-jump convergence
# ---------------------------------------------------------------------------

def sample_small_jumps_exact(spec: GmgdSpec, epsilon: float, n: int, K: int = 10_000, rng=None) -> np.ndarray:
    """Draw n values at time 1 of the true small-jump process (Levy measure nu on ``|x| <= eps``).

    The eps-Dickman series has radial density ``r^-1`` on ``(0, eps]``; keeping
    each term with probability ``q(r^p, s) <= 1`` thins it to ``q(r^p, s) r^-1``.
    Subject to the same truncation at K as the Dickman sampler.
    """
    rng = np.random.default_rng(rng)
    dspec = DickmanSpec(spec.spectral, epsilon)
    out = np.zeros((n, spec.d))
    if spec.spectral.is_zero:
        return out
    width = max(v.size for v, _ in spec.thorin)
    support = np.ones((spec.spectral.n_atoms, width))
    probs = np.zeros((spec.spectral.n_atoms, width))
    for i, (v, q) in enumerate(spec.thorin):
        support[i, : v.size] = v
        probs[i, : q.size] = q
    for start in range(0, n, _ROW_CHUNK):
        part = out[start : start + _ROW_CHUNK]
        for rows, w, _, idx, _ in _series_blocks(dspec, 1.0, int(K), part.shape[0], rng):
            r = epsilon * w
            rp = r**spec.p
            keep_prob = np.zeros_like(r)
            for j in range(width):
                keep_prob += probs[idx, j] * np.exp(-rp * support[idx, j])
            keep = rng.random(r.shape) <= keep_prob
            bins = np.broadcast_to(np.arange(rows.size)[:, None], r.shape)
            part[rows] += _accumulate(dspec, bins, rows.size, np.where(keep, r, 0.0), idx, None)
    return out


def _scaled_moment_ratio(x: np.ndarray, s: float) -> np.ndarray:
    # s x^-s lowergamma(s, x) = int_0^1 s u^(s-1) exp(-x u) du
    if s == 1.0:
        return np.where(x > 0, -np.expm1(-x) / np.where(x > 0, x, 1.0), 1.0)
    return sc.gammainc(s, x) * sc.gamma(s + 1.0) * x ** (-s)


def convergence_check(
    spec: GmgdSpec,
    atoms: Sequence[int] | None = None,
    p_test: float | None = None,
    epsilons: Sequence[float] = (0.1, 0.01, 0.001, 0.0001),
) -> list[tuple[float, float]]:
    """Ratios ``eps^-p' int_{(0,eps]C} |x|^p' nu(dx) / (sigma(C) / p')`` for each eps.

    ``atoms`` selects the sector C (None = all atoms); an empty sector has
    ratio 1 by convention.  The ratios tend to 1 as eps decreases.
    """
    eps = np.asarray(list(epsilons), dtype=float)
    if np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise DomainError("epsilons must be positive and strictly decreasing")
    p_test = spec.p if p_test is None else float(p_test)
    if p_test <= 0:
        raise DomainError("p_test must be positive")
    idx = list(range(spec.spectral.n_atoms)) if atoms is None else sorted(set(int(i) for i in atoms))
    mass = spec.spectral.mass_of(idx)
    if mass == 0.0:
        return [(float(e), 1.0) for e in eps]
    s = p_test / spec.p
    out = []
    for e in eps:
        acc = math.fsum(
            spec.spectral.weights[i] * float(np.sum(spec.thorin[i][1] * _scaled_moment_ratio(e**spec.p * spec.thorin[i][0], s)))
            for i in idx
        )
        out.append((float(e), acc / mass))
    return out


def convergence_csv(rows: list[tuple[float, float]]) -> str:
    lines = ["epsilon,ratio"] + [f"{e:.17g},{r:.17g}" for e, r in rows]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# distributional tests
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KSResult:
    statistic: float
    critical_value: float
    alpha: float
    passed: bool


def _ks_coefficient(alpha: float) -> float:
    return math.sqrt(-0.5 * math.log(alpha / 2.0))


def ks_statistic(sample_a, reference: Callable | Sequence[float], alpha: float = 1e-3) -> KSResult:
    """One-sample (reference is a CDF callable) or two-sample KS test with asymptotic critical values."""
    a = np.sort(np.asarray(sample_a, dtype=float).ravel())
    n = a.size
    if n < 100:
        raise DomainError("KS test needs at least 100 points")
    if callable(reference):
        cdf = np.asarray(reference(a), dtype=float)
        i = np.arange(1, n + 1)
        stat = max(float(np.max(i / n - cdf)), float(np.max(cdf - (i - 1) / n)))
        crit = _ks_coefficient(alpha) / math.sqrt(n)
    else:
        b = np.sort(np.asarray(reference, dtype=float).ravel())
        m = b.size
        if m < 100:
            raise DomainError("KS test needs at least 100 points")
        grid = np.concatenate([a, b])
        fa = np.searchsorted(a, grid, side="right") / n
        fb = np.searchsorted(b, grid, side="right") / m
        stat = float(np.max(np.abs(fa - fb)))
        crit = _ks_coefficient(alpha) * math.sqrt((n + m) / (n * m))
    return KSResult(stat, crit, alpha, stat <= crit)


def chi_square_test(counts, probs, alpha: float = 1e-3) -> tuple[float, float, bool]:
    """Pearson goodness of fit; returns (statistic, p-value, passed)."""
    counts = np.asarray(counts, dtype=float)
    expected = counts.sum() * np.asarray(probs, dtype=float)
    stat = float(np.sum((counts - expected) ** 2 / expected))
    pval = float(stats.chi2.sf(stat, counts.size - 1))
    return stat, pval, pval >= alpha
