import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from guegaps.eigen import Spectrum, hermitian_eigenvalues
from guegaps.sampler import SeedSpec, sample_gue
from guegaps.semicircle import (
    EdgeProximityError,
    gap_scale,
    renormalize_gaps,
    sc_cdf,
    sc_density,
    sc_quantile,
)


def _cdf_by_quadrature(x: float) -> float:
    """Independent oracle: Gauss-Legendre quadrature of the density after
    the substitution t = arcsin(u), which removes the endpoint singularity."""
    theta_lo, theta_hi = -np.pi / 2, np.arcsin(np.clip(x, -1.0, 1.0))
    t, w = np.polynomial.legendre.leggauss(200)
    theta = 0.5 * (theta_hi - theta_lo) * (t + 1) + theta_lo
    ww = 0.5 * (theta_hi - theta_lo) * w
    return float(np.sum(ww * (2.0 / np.pi) * np.cos(theta) ** 2))


def test_density_values():
    assert_allclose(sc_density(0.0), 2.0 / np.pi, rtol=1e-15)
    assert sc_density(1.0) == 0.0
    assert sc_density(-1.0) == 0.0
    assert sc_density(2.0) == 0.0
    assert sc_density(-3.5) == 0.0


def test_density_integrates_to_one():
    assert abs(_cdf_by_quadrature(1.0) - 1.0) <= 1e-12


def test_cdf_fixed_points():
    assert sc_cdf(0.0) == 0.5
    assert sc_cdf(1.0) == 1.0
    assert sc_cdf(-1.0) == 0.0
    assert sc_cdf(5.0) == 1.0
    assert sc_cdf(-5.0) == 0.0


@pytest.mark.parametrize("x", [-0.95, -0.5, 0.25, 0.5, 0.9])
def test_cdf_matches_quadrature_oracle(x):
    assert abs(sc_cdf(x) - _cdf_by_quadrature(x)) <= 1e-12


def test_cdf_nondecreasing_on_grid():
    grid = np.linspace(-1.05, 1.05, 10_000)
    vals = np.array([sc_cdf(float(x)) for x in grid])
    assert np.all(np.diff(vals) >= 0.0)


def test_quantile_median_and_roundtrip():
    assert sc_quantile(0.5) == pytest.approx(0.0, abs=1e-13)
    for p in np.arange(0.01, 1.0, 0.01):
        assert abs(sc_cdf(sc_quantile(float(p))) - p) <= 1e-12


def test_quantile_antisymmetry():
    for p in (0.01, 0.1, 0.3, 0.45):
        assert abs(sc_quantile(p) + sc_quantile(1.0 - p)) <= 1e-12


def test_quantile_domain():
    with pytest.raises(ValueError):
        sc_quantile(0.0)
    with pytest.raises(ValueError):
        sc_quantile(1.0)
    with pytest.raises(ValueError):
        sc_quantile(-0.2)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-6, 1.0 - 1e-6))
def test_quantile_roundtrip_property(p):
    assert abs(sc_cdf(sc_quantile(p)) - p) <= 1e-12


def test_gap_scale_center():
    for n in (10, 100, 401):
        if n % 2 == 0:
            assert gap_scale(n // 2, n) == pytest.approx(np.sqrt(2.0 / n) * np.pi / 2, rel=1e-12)


def test_gap_scale_edge_symmetry():
    n = 144
    for i in (20, 50, 71):
        assert gap_scale(i, n) == pytest.approx(gap_scale(n - i, n), rel=1e-12)


def test_gap_scale_composition():
    expected = np.sqrt(0.02) / sc_density(sc_quantile(0.25))
    assert gap_scale(25, 100) == pytest.approx(expected, rel=1e-14)


def test_gap_scale_rejects_edge():
    # i/N so extreme that the density at the quantile underflows the floor
    with pytest.raises(EdgeProximityError):
        gap_scale(1, 10**24)


def test_gap_scale_index_validation():
    with pytest.raises(ValueError):
        gap_scale(0, 10)
    with pytest.raises(ValueError):
        gap_scale(10, 10)


def test_renormalize_anchored_gap_is_one():
    # synthetic spectrum whose gap at index j equals the predicted scale
    n, j = 40, 17
    values = np.linspace(-5.0, 5.0, n)
    values[j:] += gap_scale(j, n) - (values[j] - values[j - 1])
    obs = renormalize_gaps(Spectrum(values), j, j)
    assert obs.values[0] == pytest.approx(1.0, rel=1e-12)


def test_renormalized_gaps_nonnegative():
    spec = hermitian_eigenvalues(sample_gue(30, SeedSpec(1, 0)))
    obs = renormalize_gaps(spec, 9, 21)
    assert np.all(obs.values >= 0.0)
    assert obs.index_range == (9, 21)
    assert obs.values.size == 13


@settings(max_examples=30, deadline=None)
@given(st.floats(-50.0, 50.0))
def test_renormalize_translation_invariant(c):
    spec = hermitian_eigenvalues(sample_gue(24, SeedSpec(8, 2)))
    base = renormalize_gaps(spec, 8, 16).values
    shifted = renormalize_gaps(Spectrum(spec.values + c), 8, 16).values
    assert_allclose(shifted, base, rtol=1e-9, atol=1e-12)


def test_renormalize_index_validation():
    spec = Spectrum(np.arange(5.0))
    with pytest.raises(ValueError):
        renormalize_gaps(spec, 0, 3)
    with pytest.raises(ValueError):
        renormalize_gaps(spec, 2, 5)
    with pytest.raises(ValueError):
        renormalize_gaps(spec, 3, 2)
