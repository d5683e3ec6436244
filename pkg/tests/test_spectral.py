import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gmgd_sim import DomainError, SpectralMeasure, sample_direction, total_mass, uniform_circle
from gmgd_sim.spectral import CallbackSpectralMeasure, sample_atom_indices
from gmgd_sim.validation import chi_square_test


def test_total_mass():
    assert total_mass(uniform_circle(30)) == pytest.approx(1.0, abs=1e-15)
    assert total_mass(SpectralMeasure.empty(3)) == 0
    assert total_mass(SpectralMeasure(2, [[1.0, 0.0]], [2.5])) == 2.5


def test_uniform_circle_small_cases():
    m = uniform_circle(1)
    np.testing.assert_array_equal(m.atoms, [[1.0, 0.0]])
    np.testing.assert_array_equal(m.weights, [1.0])
    m = uniform_circle(4)
    np.testing.assert_allclose(m.atoms, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-16)
    np.testing.assert_array_equal(m.weights, [0.25] * 4)


def test_uniform_circle_full_period_sums():
    m = uniform_circle(30)
    assert abs(m.atoms[:, 0].sum()) < 1e-12
    assert abs(m.atoms[:, 1].sum()) < 1e-12
    with pytest.raises(DomainError):
        uniform_circle(0)


@pytest.mark.parametrize(
    "atoms, weights",
    [
        ([[1.0, 0.1]], [1.0]),  # not unit
        ([[1.0, 0.0]], [0.0]),  # zero weight
        ([[1.0, 0.0], [1.0, 0.0]], [1.0, 1.0]),  # duplicate
        ([[1.0, 0.0]], [1.0, 2.0]),  # length mismatch
    ],
)
def test_invalid_measures_rejected(atoms, weights):
    with pytest.raises(DomainError):
        SpectralMeasure(2, atoms, weights)


def test_single_atom_direction():
    m = SpectralMeasure(2, [[1.0, 0.0]], [3.0])
    np.testing.assert_array_equal(sample_direction(m, np.random.default_rng(0)), [1.0, 0.0])
    assert np.all(sample_direction(m, np.random.default_rng(0), 100) == [1.0, 0.0])


def test_zero_measure_direction_errors():
    with pytest.raises(DomainError):
        sample_direction(SpectralMeasure.empty(2), np.random.default_rng(0))


def test_uniform_circle_frequencies(rng):
    idx = sample_atom_indices(uniform_circle(4), rng, 100_000)
    freq = np.bincount(idx, minlength=4) / 100_000
    np.testing.assert_allclose(freq, 0.25, atol=0.01)


def test_weighted_frequencies(rng):
    m = SpectralMeasure(2, [[1.0, 0.0], [0.0, 1.0]], [1.0, 3.0])
    draws = sample_direction(m, rng, 100_000)
    assert np.mean(draws[:, 1] == 1.0) == pytest.approx(0.75, abs=0.01)


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.floats(0.05, 10.0), min_size=1, max_size=8),
    st.integers(0, 2**32 - 1),
)
def test_chi_square_goodness_of_fit(weights, seed):
    k = len(weights)
    angles = 2 * np.pi * np.arange(k) / k + 0.1
    m = SpectralMeasure(2, np.column_stack([np.cos(angles), np.sin(angles)]), weights)
    idx = sample_atom_indices(m, np.random.default_rng(seed), 100_000)
    counts = np.bincount(idx, minlength=k)
    if k == 1:
        assert counts[0] == 100_000
        return
    _, pval, ok = chi_square_test(counts, m.probabilities, alpha=1e-3)
    assert ok, pval


def test_json_round_trip():
    m = SpectralMeasure(3, [[0, 0, 1.0], [1.0, 0, 0]], [0.5, 2.0])
    back = SpectralMeasure.from_json(m.to_json())
    np.testing.assert_array_equal(back.atoms, m.atoms)
    np.testing.assert_array_equal(back.weights, m.weights)
    doc = json.loads(m.to_json())
    assert set(doc) == {"d", "atoms", "weights"}
    assert SpectralMeasure.from_dict({"d": 2, "atoms": [], "weights": []}).is_zero


def test_mass_of_subsets():
    m = uniform_circle(4)
    assert m.mass_of(None) == 1.0
    assert m.mass_of([]) == 0.0
    assert m.mass_of([0, 2]) == 0.5
    with pytest.raises(DomainError):
        m.mass_of([7])


def test_callback_measure():
    def sampler(rng, n):
        v = rng.normal(size=(n, 3))
        return v / np.linalg.norm(v, axis=1, keepdims=True)

    m = CallbackSpectralMeasure(3, 2.0, sampler)
    assert total_mass(m) == 2.0
    draws = sample_direction(m, np.random.default_rng(1), 50)
    np.testing.assert_allclose(np.linalg.norm(draws, axis=1), 1.0)
