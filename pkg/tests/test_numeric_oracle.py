import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghost_duality.errors import DomainError, ResolutionError
from ghost_duality.experiment import (
    DetectorModel,
    Geometry,
    Pattern,
    approx_pattern,
    coincidence_pattern,
    detector_branches,
    measured_visibility,
)
from ghost_duality.gaussian_core import (
    GaussianPacket,
    evaluate_bipartite,
    evaluate_packet,
    free_evolve_bipartite,
    free_evolve_packet,
    make_epr,
    project_particle1,
)
from ghost_duality.numeric_oracle import (
    Grid1D,
    Grid2D,
    compare_patterns,
    extract_gaussian_params,
    momentum_space_propagate,
    oracle_branches,
    pattern_from_oracle,
    pattern_numeric,
    quadrature_project,
    sample_bipartite,
    sample_packet,
    spectral_evaluate,
)


# -- grids and sampling ---------------------------------------------------------


def test_grid_spacing_and_alignment():
    g = Grid1D(4.0, 64)
    assert g.spacing == pytest.approx(0.125)
    assert g.z[0] == pytest.approx(-4.0)
    a = Grid1D.aligned(0.3, 0.05, -2.0, 2.0)
    assert np.min(np.abs(a.z - 0.3)) < 1e-12
    assert a.z[0] <= -2.0 and a.z[-1] >= 2.0
    assert a.n_points & (a.n_points - 1) == 0


def test_grid_rejects_bad_shapes():
    with pytest.raises(DomainError):
        Grid1D(1.0, 8, np.zeros(7))
    with pytest.raises(DomainError):
        Grid1D(-1.0, 8)


def test_epr_discrete_norm(epr_grid):
    assert epr_grid.norm_sq() == pytest.approx(1.0, abs=1e-9)


def test_epr_samples_equal_closed_form(epr_grid):
    i, j = 700, 1333
    z1, z2 = epr_grid.axis1.z[i], epr_grid.axis2.z[j]
    assert epr_grid.samples[i, j] == evaluate_bipartite(make_epr(1.0, 10.0), z1, z2)


def test_sampling_rejects_small_domain():
    with pytest.raises(ResolutionError):
        sample_bipartite(make_epr(1.0, 10.0), Grid2D.square(10.0, 256))
    with pytest.raises(ResolutionError):
        sample_packet(GaussianPacket.normalized(0.0, 4.0), Grid1D(3.0, 256))


def test_sampling_suggests_finer_grid():
    packet = GaussianPacket.normalized(0.0, 0.01, 40.0)
    grid = Grid1D(2.0, 128)
    with pytest.raises(ResolutionError) as info:
        sample_packet(packet, grid)
    n = info.value.suggested_n_points
    assert n is not None and n > grid.n_points
    sample_packet(packet, Grid1D(2.0, n))


# -- propagation ----------------------------------------------------------------


def _packet_grid(packet, tau, n=4096):
    spread = abs(packet.width_param + 2j * tau) / math.sqrt(packet.width_param.real)
    return Grid1D(abs(packet.center) + 14.0 * spread, n)


@pytest.mark.parametrize(
    "center,beta,k,tau",
    [(0.0, 1.0, 0.0, 2.0), (1.5, 0.3 + 0.2j, 2.0, 0.7), (-2.0, 2.0, -1.0, 5.0)],
)
def test_fft_propagation_matches_closed_form(center, beta, k, tau):
    p = GaussianPacket.normalized(center, beta, k)
    grid = sample_packet(p, _packet_grid(p, tau))
    moved = momentum_space_propagate(grid, tau)
    closed = evaluate_packet(free_evolve_packet(p, tau), grid.z)
    assert np.abs(moved.samples - closed).max() <= 1e-8


def test_fft_propagation_zero_is_identity():
    p = GaussianPacket.normalized(0.2, 0.5, 1.0)
    grid = sample_packet(p, Grid1D(8.0, 1024))
    assert np.array_equal(momentum_space_propagate(grid, 0.0).samples, grid.samples)


@given(st.floats(0.0, 5.0), st.floats(0.3, 2.0))
@settings(max_examples=15, deadline=None)
def test_fft_propagation_unitary(tau, beta):
    p = GaussianPacket.normalized(0.0, beta)
    grid = sample_packet(p, _packet_grid(p, 5.0, 8192))
    assert momentum_space_propagate(grid, tau).norm_sq() == pytest.approx(grid.norm_sq(), abs=1e-12)


def test_aliasing_detected():
    z = Grid1D(5.0, 64)
    noisy = z.with_samples(np.exp(1j * 0.97 * math.pi / z.spacing * z.z) * np.exp(-z.z**2))
    with pytest.raises(ResolutionError):
        momentum_space_propagate(noisy, 0.1)


def test_wraparound_detected():
    p = GaussianPacket.normalized(0.0, 0.05)
    grid = sample_packet(p, Grid1D(3.0, 1024))
    with pytest.raises(ResolutionError):
        momentum_space_propagate(grid, 20.0)


def test_negative_tau_rejected():
    grid = sample_packet(GaussianPacket.normalized(0.0, 1.0), Grid1D(10.0, 256))
    with pytest.raises(DomainError):
        momentum_space_propagate(grid, -1.0)


def test_bipartite_fft_matches_closed_form(epr_grid_tau3):
    closed = free_evolve_bipartite(make_epr(1.0, 10.0), 3.0)
    z1, z2 = np.meshgrid(epr_grid_tau3.axis1.z, epr_grid_tau3.axis2.z, indexing="ij")
    err = np.abs(epr_grid_tau3.samples - evaluate_bipartite(closed, z1, z2)).max()
    assert err <= 1e-8


def test_bipartite_fft_unitary(epr_grid, epr_grid_tau3):
    assert epr_grid_tau3.norm_sq() == pytest.approx(epr_grid.norm_sq(), abs=1e-12)


def test_spectral_evaluate_off_grid():
    p = GaussianPacket.normalized(0.3, 0.8, 1.2)
    grid = sample_packet(p, Grid1D(10.0, 1024))
    z = np.array([-1.234, 0.0001, 2.5])
    np.testing.assert_allclose(spectral_evaluate(grid, z), evaluate_packet(p, z), atol=1e-12)


# -- projection -------------------------------------------------------------------


def test_quadrature_projection_matches_closed_form(epr_grid_tau3):
    probe = GaussianPacket.normalized(1.0, 0.25)
    numeric = quadrature_project(epr_grid_tau3, probe)
    closed = evaluate_packet(project_particle1(free_evolve_bipartite(make_epr(1.0, 10.0), 3.0), probe), numeric.z)
    assert np.abs(numeric.samples - closed).max() <= 1e-8


def test_projection_far_probe_vanishes(epr_grid):
    eps = 0.5
    # 20 widths outside the support of the state along z1
    probe = GaussianPacket.normalized(epr_grid.axis1.half_extent + 20 * eps, eps * eps)
    assert quadrature_project(epr_grid, probe).norm_sq() <= 1e-24


def test_projection_scales_linearly(epr_grid):
    probe = GaussianPacket.normalized(0.5, 0.3)
    one = quadrature_project(epr_grid, probe)
    two = quadrature_project(epr_grid.with_samples(2.0 * epr_grid.samples), probe)
    np.testing.assert_allclose(two.samples, 2.0 * one.samples, rtol=1e-15, atol=1e-300)


def test_slit_packets_from_separable_oracle(slit_geom):
    # particle-2 packets at the slit plane, from the u/w oracle, against the closed form
    from ghost_duality.experiment import slit_packets, state_at_slits

    ob = oracle_branches(slit_geom, 0.0, np.linspace(-4, 4, 128))
    closed = project_particle1(state_at_slits(slit_geom), slit_packets(slit_geom)[0])
    grid = ob.slit_packets2["d1"]
    assert np.abs(grid.samples - evaluate_packet(closed, grid.z)).max() <= 1e-8


def test_refinement_reduces_error_until_floor():
    # trapezoid projection on progressively finer grids, built without the resolution guard
    state = free_evolve_bipartite(make_epr(1.0, 2.0), 0.5)
    probe = GaussianPacket.normalized(0.4, 0.16)
    closed = project_particle1(state, probe)
    errors = []
    for n in (24, 48, 96, 192, 384):
        axis = Grid1D(12.0, n)
        z1, z2 = np.meshgrid(axis.z, axis.z, indexing="ij")
        grid = Grid2D(axis, axis, evaluate_bipartite(state, z1, z2))
        errors.append(np.abs(quadrature_project(grid, probe).samples - evaluate_packet(closed, axis.z)).max())
    for coarse, fine in zip(errors, errors[1:]):
        assert fine <= 1e-10 or fine <= coarse / 4
    assert errors[-1] <= 1e-10


def test_packet_parameter_extraction():
    p = GaussianPacket.normalized(0.7, 0.5 + 1.5j, 0.8)
    grid = sample_packet(p, Grid1D(30.0, 4096))
    beta, zc = extract_gaussian_params(grid)
    assert beta == pytest.approx(p.width_param, rel=1e-8)
    assert zc == pytest.approx(p.complex_center, rel=1e-8)


# -- end-to-end patterns ----------------------------------------------------------


def test_numeric_pattern_matches_exact(geom, branches, z2_grid):
    ob = oracle_branches(geom, 0.0, z2_grid)
    for c in (0.0, 0.5, 1.0, 0.3 - 0.6j):
        exact = coincidence_pattern(branches, DetectorModel(c), 0.0, z2_grid)
        numeric = pattern_from_oracle(ob, DetectorModel(c))
        assert compare_patterns(numeric, exact).max_rel_error <= 1e-6


def test_numeric_pattern_off_axis_detector(geom, branches):
    z = np.linspace(-8, 8, 512)
    exact = coincidence_pattern(branches, DetectorModel(0.7), 1.3, z)
    numeric = pattern_numeric(geom, DetectorModel(0.7), 1.3, z)
    assert compare_patterns(numeric, exact).max_rel_error <= 1e-6


def test_numeric_pattern_nonuniform_grid(geom, branches):
    z = np.sort(np.random.default_rng(3).uniform(-6, 6, 200))
    exact = coincidence_pattern(branches, DetectorModel(0.5), 0.0, z)
    numeric = pattern_numeric(geom, DetectorModel(0.5), 0.0, z)
    assert compare_patterns(numeric, exact).max_rel_error <= 1e-6


def test_numeric_pattern_normalization_modes(geom, z2_grid):
    p = pattern_numeric(geom, DetectorModel(0.5), 0.0, z2_grid, normalization="unit-peak")
    assert p.normalization == "unit-peak"
    assert p.intensity.max() == pytest.approx(1.0)


def test_numeric_pattern_regime_agreement():
    g = Geometry(sigma=4.0, omega=250.0, epsilon=0.2, z0=6.0, wavelength=0.1, L1=360.0, L2=20.0)
    z = np.linspace(-15, 15, 2048)
    numeric = pattern_numeric(g, DetectorModel(0.5), 0.0, z)
    approx = approx_pattern(g, DetectorModel(0.5), z)
    assert compare_patterns(approx, numeric).max_rel_error <= 0.01


def test_numeric_fringeless_without_overlap(geom, z2_grid):
    p = pattern_numeric(geom, DetectorModel(0.0), 0.0, z2_grid)
    assert measured_visibility(p).value <= 1e-6


def test_top_hat_slits_are_experimental(geom):
    z = np.linspace(-10, 10, 256)
    p = pattern_numeric(geom, DetectorModel(1.0), 0.0, z, slit_profile="top-hat")
    assert np.all(np.isfinite(p.intensity)) and np.all(p.intensity >= 0)
    assert measured_visibility(p).value > 0.5
    with pytest.raises(DomainError):
        pattern_numeric(geom, DetectorModel(1.0), 0.0, z, slit_profile="round")


# -- comparison reports -----------------------------------------------------------


def test_compare_identical(branches, z2_grid):
    p = coincidence_pattern(branches, DetectorModel(0.5), 0.0, z2_grid)
    r = compare_patterns(p, p)
    assert r.max_abs_error == r.max_rel_error == r.l2_error == 0.0


def test_compare_scaled_with_unit_peak(branches, z2_grid):
    p = coincidence_pattern(branches, DetectorModel(0.5), 0.0, z2_grid)
    q = Pattern(p.z2, 1.0001 * p.intensity, dict(p.metadata))
    assert compare_patterns(q, p, align="unit-peak").max_rel_error <= 1e-15
    assert compare_patterns(q, p).max_rel_error == pytest.approx(1e-4, rel=1e-6)


def test_compare_mixed_modes_aligns(branches, z2_grid):
    p = coincidence_pattern(branches, DetectorModel(0.5), 0.0, z2_grid)
    assert compare_patterns(p.normalized("unit-peak"), p).max_rel_error <= 1e-15


def test_compare_grid_mismatch():
    a = Pattern(np.linspace(0, 1, 5), np.ones(5))
    b = Pattern(np.linspace(0, 1, 6), np.ones(6))
    with pytest.raises(DomainError):
        compare_patterns(a, b)


def test_report_values_nonnegative(geom, branches):
    z = np.linspace(-5, 5, 128)
    r = compare_patterns(pattern_numeric(geom, DetectorModel(0.2), 0.0, z), coincidence_pattern(branches, DetectorModel(0.2), 0.0, z))
    assert min(r.max_abs_error, r.max_rel_error, r.l2_error) >= 0
    assert -5 <= r.location_of_max <= 5
