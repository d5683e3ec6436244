import math

import numpy as np
import pytest

from gmgd_sim import DomainError, SpectralMeasure, uniform_circle
from gmgd_sim.dickman import DickmanSpec, levy_mass, sample_marginal, sample_path, sample_values
from gmgd_sim.spectral import sample_direction
from gmgd_sim.validation import ks_statistic

# a skewed measure gives the distributional tests something asymmetric to detect
SKEWED = SpectralMeasure(
    2,
    [[1.0, 0.0], [math.cos(2.0), math.sin(2.0)], [math.cos(4.0), math.sin(4.0)]],
    [0.2, 0.5, 0.5],
)
DIRECTIONS = np.array([[1.0, 0.0], [0.0, 1.0], [math.sqrt(0.5), -math.sqrt(0.5)]])


def test_zero_measure_gives_zero_process():
    spec = DickmanSpec(SpectralMeasure.empty(2), 1.0)
    path = sample_path(spec, 1.0, 100, np.random.default_rng(0))
    assert path.n_jumps == 0
    np.testing.assert_array_equal(path.evaluate(1.0), [0.0, 0.0])
    np.testing.assert_array_equal(sample_marginal(spec, 0), [0.0, 0.0])


def test_domain_errors():
    spec = DickmanSpec(uniform_circle(3), 1.0)
    with pytest.raises(DomainError):
        sample_path(spec, 1.0, 0)
    with pytest.raises(DomainError):
        sample_path(spec, 0.0, 10)
    with pytest.raises(DomainError):
        DickmanSpec(uniform_circle(3), 0.0)


def test_path_structure():
    spec = DickmanSpec(uniform_circle(30), 0.3)
    path = sample_path(spec, 2.0, 10_000, np.random.default_rng(3))
    assert 0 < path.n_jumps <= 10_000
    assert np.all(path.magnitudes < 0.3)
    assert np.all((path.times > 0) & (path.times <= 2.0))
    assert np.all(np.diff(path.times) >= 0)
    np.testing.assert_array_equal(path.drift, [0.0, 0.0])


def test_path_and_marginal_agree_at_horizon():
    spec = DickmanSpec(SKEWED, 0.7)
    path = sample_path(spec, 1.0, 10_000, np.random.default_rng(11))
    x = sample_marginal(spec, np.random.default_rng(11))
    np.testing.assert_allclose(path.evaluate(1.0), x, rtol=1e-12, atol=1e-14)


def test_grid_values_match_skeleton():
    spec = DickmanSpec(SKEWED, 0.5)
    grid = np.linspace(0.1, 2.0, 12)
    path = sample_path(spec, 2.0, 10_000, np.random.default_rng(5))
    vals = sample_values(spec, 2.0, grid, 1, 10_000, np.random.default_rng(5))
    np.testing.assert_allclose(vals[0], path.evaluate(grid), rtol=1e-12, atol=1e-14)


def test_unit_dickman_moments_on_circle():
    # mean int s sigma(ds) = 0; covariance (1/2) * (1/n) sum s s^T = I/4
    spec = DickmanSpec(uniform_circle(30), 1.0)
    y = sample_values(spec, 1.0, [1.0], 100_000, 10_000, np.random.default_rng(8))[:, 0]
    np.testing.assert_allclose(y.mean(0), 0.0, atol=0.01)
    np.testing.assert_allclose(np.cov(y.T), 0.25 * np.eye(2), atol=0.01)


@pytest.mark.parametrize("eps, expected, tol", [(1.0, 1.0, 0.01), (2.0, 2.0, 0.02)])
def test_univariate_dickman_mean(eps, expected, tol):
    spec = DickmanSpec(SpectralMeasure(1, [[1.0]], [1.0]), eps)
    x = sample_marginal(spec, np.random.default_rng(4), size=100_000)
    assert x.mean() == pytest.approx(expected, abs=tol)


def test_levy_mass():
    spec = DickmanSpec(uniform_circle(4), 1.0)
    assert levy_mass(spec, 1.0, 3.0) == 0.0
    assert levy_mass(spec, 2.0, 3.0) == 0.0
    h = 0.01
    assert levy_mass(spec, h, 1.0) == pytest.approx(1.0 * math.log(1 / h), rel=1e-14)
    assert levy_mass(spec, 0.25, 0.5, [0]) == pytest.approx(0.25 * math.log(2), rel=1e-14)
    assert levy_mass(spec, 0.25, 0.5, [0]) == pytest.approx(0.173286, abs=1e-6)
    assert levy_mass(spec, 0.5, 10.0, [1]) == pytest.approx(0.25 * math.log(2), rel=1e-14)
    with pytest.raises(DomainError):
        levy_mass(spec, 0.5, 0.5)


def test_jump_counts_match_levy_mass():
    # expected number of jumps in a sector over [0, T] is T * D^eps(sector)
    spec = DickmanSpec(uniform_circle(4), 1.0)
    T = 10_000.0
    path = sample_path(spec, T, 200_000, np.random.default_rng(21))
    mags = path.magnitudes
    in_atom0 = np.isclose(path.jumps[:, 1], 0.0, atol=1e-300) & (path.jumps[:, 0] > 0)
    count = np.sum((mags > 0.25) & (mags <= 0.5) & in_atom0)
    expected = T * levy_mass(spec, 0.25, 0.5, [0])
    assert abs(count - expected) < 4 * math.sqrt(expected)


def test_fixed_point_equation():
    # X and U^(1/theta) (X' + eps xi) share one law
    spec = DickmanSpec(SKEWED, 0.8)
    theta = spec.theta
    n = 100_000
    x = sample_marginal(spec, np.random.default_rng(31), size=n)
    rng = np.random.default_rng(32)
    x2 = sample_marginal(spec, rng, size=n)
    u = rng.random(n)
    xi = sample_direction(SKEWED, rng, n)
    y = u[:, None] ** (1.0 / theta) * (x2 + spec.epsilon * xi)
    for z in DIRECTIONS:
        res = ks_statistic(x @ z, y @ z, alpha=1e-3)
        assert res.passed, (z, res)


@pytest.mark.parametrize("gamma", [0.5, 2.0])
def test_scaling_law(gamma):
    eps = 0.6
    a = sample_marginal(DickmanSpec(SKEWED, eps), np.random.default_rng(41), size=100_000) / gamma
    b = sample_marginal(DickmanSpec(SKEWED, eps / gamma), np.random.default_rng(42), size=100_000)
    for z in DIRECTIONS:
        res = ks_statistic(a @ z, b @ z, alpha=1e-3)
        assert res.passed, (z, res)


def test_truncation_stability():
    spec = DickmanSpec(uniform_circle(30), 1.0)
    a = sample_marginal(spec, np.random.default_rng(51), K=10_000, size=100_000)
    b = sample_marginal(spec, np.random.default_rng(51), K=20_000, size=100_000)
    se = a.std(0) / math.sqrt(a.shape[0])
    assert np.all(np.abs(a.mean(0) - b.mean(0)) < se)


def test_short_truncation_is_visible():
    # with theta large the first K terms do not reach underflow, so K matters
    spec = DickmanSpec(SpectralMeasure(1, [[1.0]], [50.0]), 1.0)
    a = sample_marginal(spec, np.random.default_rng(52), K=20, size=20_000)
    b = sample_marginal(spec, np.random.default_rng(52), K=10_000, size=20_000)
    assert b.mean() == pytest.approx(50.0, rel=0.01)
    assert a.mean() < 0.5 * b.mean()
