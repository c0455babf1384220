import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghost_duality.errors import DomainError, RegimeError
from ghost_duality.experiment import (
    DetectorModel,
    Geometry,
    Pattern,
    coincidence_pattern,
    duality_margin,
    exact_fringe_spacing,
    find_extrema,
    local_visibility,
    measured_fringe_spacing,
    measured_visibility,
)


def _patterns(branches, c, z):
    p = coincidence_pattern(branches, DetectorModel(c), 0.0, z)
    ref = coincidence_pattern(branches, DetectorModel(0.0), 0.0, z)
    return p, ref


def test_local_visibility_at_centre(geom):
    assert local_visibility(geom, DetectorModel(0.5), 0.0) == pytest.approx(0.5)


def test_local_visibility_monotone(geom):
    z = np.linspace(0, 40, 200)
    v = local_visibility(geom, DetectorModel(0.9), z)
    assert np.all(np.diff(v) <= 0)
    np.testing.assert_allclose(local_visibility(geom, DetectorModel(0.9), -z), v)


def test_local_visibility_refuses_outside_regime():
    g = Geometry(sigma=1.0, omega=5.0, epsilon=0.3, z0=1.0, wavelength=0.1, L1=100.0, L2=10.0)
    with pytest.raises(RegimeError):
        local_visibility(g, DetectorModel(0.5), 0.0)


def test_fringeless_pattern(branches, z2_grid):
    p, ref = _patterns(branches, 0.0, z2_grid)
    v = measured_visibility(p, 0.0, ref)
    assert v.value == 0.0 and v.no_fringes
    assert measured_visibility(p).value <= 1e-6


def test_full_overlap_visibility(branches, z2_grid):
    p, ref = _patterns(branches, 1.0, z2_grid)
    assert measured_visibility(p, 0.0, ref).value == pytest.approx(1.0, abs=1e-3)
    assert measured_visibility(p).value == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("c", [0.6, 0.6j, -0.6])
def test_partial_overlap_visibility(branches, z2_grid, c):
    p, ref = _patterns(branches, c, z2_grid)
    assert measured_visibility(p, 0.0, ref).value == pytest.approx(0.6, abs=1e-2)


@pytest.mark.parametrize("c", [0.25, 0.5, 0.75, 1.0])
def test_reference_visibility_never_exceeds_overlap(branches, z2_grid, c):
    p, ref = _patterns(branches, c, z2_grid)
    assert measured_visibility(p, 0.0, ref).value <= c + 1e-12


def test_visibility_follows_cosh_law(branches, geom, z2_grid):
    p, ref = _patterns(branches, 0.5, z2_grid)
    period = exact_fringe_spacing(geom)
    for station in (period, 2 * period):
        measured = measured_visibility(p, station, ref).value
        assert measured == pytest.approx(local_visibility(geom, DetectorModel(0.5), station), abs=1e-2)


@given(
    st.floats(0.05, 1.0),
    st.floats(0.5, 3.0),
    st.floats(-math.pi, math.pi),
)
@settings(max_examples=60, deadline=None)
def test_synthetic_cosine_visibility(v, k, phase):
    z = np.linspace(-10, 10, 4001)
    p = Pattern(z, 1.0 + v * np.cos(k * z + phase))
    assert measured_visibility(p).value == pytest.approx(v, abs=1e-6)


@given(st.floats(1.0, 3.0), st.floats(-math.pi, math.pi))
@settings(max_examples=40, deadline=None)
def test_synthetic_spacing(k, phase):
    z = np.linspace(-10, 10, 4001)
    p = Pattern(z, 1.0 + 0.5 * np.cos(k * z + phase))
    assert measured_fringe_spacing(p) == pytest.approx(2 * math.pi / k, rel=1e-5)


def test_extrema_alternate():
    z = np.linspace(-10, 10, 2001)
    ext = find_extrema(Pattern(z, 2 + np.cos(2 * z)))
    kinds = [e.kind for e in ext]
    assert all(a != b for a, b in zip(kinds, kinds[1:]))


def test_spacing_needs_two_maxima():
    z = np.linspace(-1, 1, 101)
    with pytest.raises(DomainError):
        measured_fringe_spacing(Pattern(z, np.exp(-z * z)))


def test_reference_must_share_grid(branches):
    a, _ = _patterns(branches, 0.5, np.linspace(-5, 5, 101))
    _, b = _patterns(branches, 0.5, np.linspace(-5, 5, 102))
    with pytest.raises(DomainError):
        measured_visibility(a, 0.0, b)


@pytest.mark.parametrize("overlap,v,expected", [(0.0, 0.0, 0.0), (0.6, 0.6, 0.0), (0.6, 0.3, 0.27)])
def test_duality_margin(overlap, v, expected):
    assert duality_margin(DetectorModel(overlap), v) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("v", [-0.1, 1.5])
def test_duality_margin_domain(v):
    with pytest.raises(DomainError):
        duality_margin(DetectorModel(0.5), v)


@given(st.floats(0, 1), st.floats(-math.pi, math.pi))
@settings(max_examples=50, deadline=None)
def test_margin_nonnegative_below_ceiling(mag, phase):
    det = DetectorModel.from_polar(mag, phase)
    assert duality_margin(det, mag) == pytest.approx(0.0, abs=1e-12)
    assert duality_margin(det, 0.5 * mag) >= 0.0
