"""Brute-force numerical rebuild of the pipeline, used to check the closed forms.

Everything here works on sampled grids: free evolution is a momentum-space
phase multiply, slit projection is a trapezoid sum and the pattern is read
off the propagated samples. Closed-form evaluation is used only to sample
the initial pair state and the slit probes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ResolutionError
from .experiment.geometry import DetectorModel, Geometry
from .experiment.patterns import Pattern, _check_mode, _finish, _grid
from .experiment.pipeline import slit_packets
from .gaussian_core import (
    BipartiteGaussianState,
    GaussianPacket,
    evaluate_bipartite,
    evaluate_packet,
    make_epr,
)

DEFAULT_POINTS = 2048
EDGE_TOL = 1e-10  # allowed energy fraction at the band edge or domain edge
# exp(-37) ~ 1e-16: Gaussian tails below double precision relative to the peak
_TAIL = math.sqrt(37.0)


def _next_pow2(n: int) -> int:
    return 1 << max(4, int(math.ceil(math.log2(max(n, 2)))))


@dataclass
class Grid1D:
    """Uniform periodic grid ``center - half_extent + i * spacing``, i < n_points."""

    half_extent: float
    n_points: int = DEFAULT_POINTS
    samples: np.ndarray | None = None
    center: float = 0.0

    def __post_init__(self):
        if not (self.half_extent > 0 and self.n_points >= 2):
            raise DomainError("grid needs positive half_extent and at least two points")
        if self.samples is not None:
            self.samples = np.asarray(self.samples, dtype=complex)
            if self.samples.shape != (self.n_points,):
                raise DomainError("samples do not match n_points")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_extent / self.n_points

    @property
    def z(self) -> np.ndarray:
        return self.center - self.half_extent + self.spacing * np.arange(self.n_points)

    @property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, self.spacing)

    @classmethod
    def aligned(cls, anchor: float, spacing: float, lo: float, hi: float, pow2: bool = True):
        """Grid of the given spacing containing ``anchor`` exactly and covering [lo, hi]."""
        m0 = math.floor((lo - anchor) / spacing)
        start = anchor + m0 * spacing
        n = int(math.ceil((hi - start) / spacing)) + 1
        n = _next_pow2(n) if pow2 else max(n, 2)
        half = 0.5 * n * spacing
        return cls(half, n, None, start + half)

    def index_of(self, z: float) -> int:
        return int(round((z - self.z[0]) / self.spacing))

    def with_samples(self, samples) -> "Grid1D":
        return Grid1D(self.half_extent, self.n_points, samples, self.center)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.spacing)


@dataclass
class Grid2D:
    """Product of two 1-D grids; ``samples[i, j]`` sits at ``(axis1.z[i], axis2.z[j])``."""

    axis1: Grid1D
    axis2: Grid1D
    samples: np.ndarray | None = None

    def __post_init__(self):
        if self.samples is not None:
            self.samples = np.asarray(self.samples, dtype=complex)
            if self.samples.shape != (self.axis1.n_points, self.axis2.n_points):
                raise DomainError("samples do not match the axis sizes")

    @classmethod
    def square(cls, half_extent: float, n_points: int = DEFAULT_POINTS) -> "Grid2D":
        return cls(Grid1D(half_extent, n_points), Grid1D(half_extent, n_points))

    @property
    def half_extent(self) -> tuple[float, float]:
        return self.axis1.half_extent, self.axis2.half_extent

    @property
    def n_points(self) -> tuple[int, int]:
        return self.axis1.n_points, self.axis2.n_points

    def with_samples(self, samples) -> "Grid2D":
        return Grid2D(self.axis1, self.axis2, samples)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.axis1.spacing * self.axis2.spacing)


@dataclass(frozen=True)
class ComparisonReport:
    max_abs_error: float
    max_rel_error: float
    l2_error: float
    location_of_max: float
    extra: dict = field(default_factory=dict, compare=False)


# -- sampling -----------------------------------------------------------------


def _suggest_points(required_spacing: float, span: float) -> int:
    return _next_pow2(int(math.ceil(span / required_spacing)))


def sample_packet(packet: GaussianPacket, grid: Grid1D) -> Grid1D:
    """Evaluate a packet on the grid after checking that the grid resolves it."""
    z = grid.z
    values = evaluate_packet(packet, z)
    mag = np.abs(values)
    peak = mag.max()
    if peak == 0 or max(mag[0], mag[-1]) > math.sqrt(EDGE_TOL) * peak:
        raise ResolutionError(
            "half_extent too small: packet does not decay at the grid edge",
            suggested_n_points=grid.n_points * 2,
        )
    a, b, _ = packet.quadratic()
    support = mag > 1e-10 * peak
    grad = np.abs(-2.0 * a.imag * z[support] + b.imag).max()
    width = 1.0 / math.sqrt(2.0 * a.real)
    required = min(math.pi / (4.0 * grad) if grad > 0 else math.inf, width / 4.0)
    if grid.spacing > required:
        raise ResolutionError(
            f"grid spacing {grid.spacing:.3g} exceeds the resolvable {required:.3g}",
            suggested_n_points=_suggest_points(required, 2.0 * grid.half_extent),
        )
    return grid.with_samples(values)


def sample_bipartite(state: BipartiteGaussianState, grid: Grid2D, check_norm: bool = True) -> Grid2D:
    """Evaluate a two-particle state on the grid; discrete norm must match within 1e-9."""
    z1, z2 = np.meshgrid(grid.axis1.z, grid.axis2.z, indexing="ij")
    values = evaluate_bipartite(state, z1, z2)
    mag = np.abs(values)
    peak = mag.max()
    edge = max(mag[0].max(), mag[-1].max(), mag[:, 0].max(), mag[:, -1].max())
    if peak == 0 or edge > math.sqrt(EDGE_TOL) * peak:
        raise ResolutionError(
            "half_extent too small: state does not decay at the grid edge",
            suggested_n_points=grid.axis1.n_points * 2,
        )
    support = mag > 1e-10 * peak
    q, l = state.quad, state.lin
    g1 = np.abs(-2.0 * (q[0, 0] * z1 + q[0, 1] * z2).imag + l[0].imag)[support].max()
    g2 = np.abs(-2.0 * (q[1, 0] * z1 + q[1, 1] * z2).imag + l[1].imag)[support].max()
    dx = max(grid.axis1.spacing, grid.axis2.spacing)
    grad = max(g1, g2)
    width = 1.0 / math.sqrt(2.0 * np.linalg.eigvalsh(q.real).max())
    required = min(math.pi / (4.0 * grad) if grad > 0 else math.inf, width / 4.0)
    if dx > required:
        raise ResolutionError(
            f"grid spacing {dx:.3g} exceeds the resolvable {required:.3g}",
            suggested_n_points=_suggest_points(required, 2.0 * max(grid.half_extent)),
        )
    out = grid.with_samples(values)
    if check_norm:
        discrete = out.norm_sq()
        exact = state.norm() ** 2
        if abs(discrete - exact) > 1e-9 * exact:
            raise ResolutionError(
                f"discrete norm {discrete!r} deviates from analytic {exact!r}",
                suggested_n_points=grid.axis1.n_points * 2,
            )
    return out


# -- propagation --------------------------------------------------------------


def _band_edge_fraction(spectrum: np.ndarray, k_axes: list[np.ndarray]) -> float:
    power = np.abs(spectrum) ** 2
    total = power.sum()
    if total == 0:
        return 0.0
    mask = np.zeros(power.shape, dtype=bool)
    for axis, k in enumerate(k_axes):
        shape = [1] * power.ndim
        shape[axis] = -1
        edge = np.abs(k) >= 0.9 * np.abs(k).max()
        mask |= edge.reshape(shape)
    return float(power[mask].sum() / total)


def _domain_edge_fraction(values: np.ndarray) -> float:
    power = np.abs(values) ** 2
    total = power.sum()
    if total == 0:
        return 0.0
    mask = np.zeros(power.shape, dtype=bool)
    for axis, n in enumerate(power.shape):
        w = max(1, n // 20)
        idx = np.zeros(n, dtype=bool)
        idx[:w] = True
        idx[-w:] = True
        shape = [1] * power.ndim
        shape[axis] = -1
        mask |= idx.reshape(shape)
    return float(power[mask].sum() / total)


def momentum_space_propagate(grid, tau: float, mass: float = 1.0, check: bool = True):
    """Free evolution by a Fourier-space phase ``exp(-i k^2 tau / (2 mass))``.

    Works on :class:`Grid1D` and :class:`Grid2D`. Raises
    :class:`ResolutionError` when the input has energy at the band edge or
    the output has wrapped around the periodic domain.
    """
    if tau < 0:
        raise DomainError("tau must be >= 0")
    if grid.samples is None:
        raise DomainError("grid has no samples")
    if tau == 0:
        return grid.with_samples(grid.samples.copy())
    if isinstance(grid, Grid2D):
        ks = [grid.axis1.k, grid.axis2.k]
        spectrum = np.fft.fft2(grid.samples)
        k1, k2 = np.meshgrid(ks[0], ks[1], indexing="ij")
        phase = np.exp(-0.5j * tau * (k1 * k1 + k2 * k2) / mass)
    else:
        ks = [grid.k]
        spectrum = np.fft.fft(grid.samples)
        phase = np.exp(-0.5j * tau * ks[0] ** 2 / mass)
    if check and _band_edge_fraction(spectrum, ks) > EDGE_TOL:
        raise ResolutionError("aliasing: energy at the band edge, refine the grid")
    out = np.fft.ifftn(spectrum * phase)
    if check and _domain_edge_fraction(out) > EDGE_TOL:
        raise ResolutionError("wrap-around: propagated state reaches the grid edge")
    return grid.with_samples(out)


def spectral_evaluate(grid: Grid1D, z) -> np.ndarray:
    """Trigonometric interpolation of periodic samples at arbitrary points."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    n = grid.n_points
    coeff = np.fft.fft(grid.samples) / n
    k = grid.k
    x0 = grid.z[0]
    out = np.empty(z.size, dtype=complex)
    for s in range(0, z.size, 256):
        zz = z[s : s + 256]
        out[s : s + 256] = np.exp(1j * np.outer(zz - x0, k)) @ coeff
    return out


# -- projection ---------------------------------------------------------------


def quadrature_project(grid: Grid2D, probe) -> Grid1D:
    """``psi(z2) = sum_i w_i conj(probe(z1_i)) Psi(z1_i, z2) dz1`` (composite trapezoid).

    ``probe`` is a :class:`GaussianPacket` or an array of samples on ``axis1``.
    """
    if grid.samples is None:
        raise DomainError("grid has no samples")
    z1 = grid.axis1.z
    p = evaluate_packet(probe, z1) if isinstance(probe, GaussianPacket) else np.asarray(probe)
    w = np.full(z1.size, grid.axis1.spacing)
    w[0] *= 0.5
    w[-1] *= 0.5
    return grid.axis2.with_samples((w * np.conj(p)) @ grid.samples)


def extract_gaussian_params(grid: Grid1D, floor: float = 1e-3) -> tuple[complex, complex]:
    """Fit ``log psi = -z^2/beta + b z + g`` on the samples; return ``(beta, complex center)``."""
    mag = np.abs(grid.samples)
    sel = mag >= floor * mag.max()
    z = grid.z[sel]
    logv = np.log(mag[sel]) + 1j * np.unwrap(np.angle(grid.samples[sel]))
    zc = z.mean()
    coef = np.polyfit(z - zc, logv, 2)
    a = -coef[0]
    b = coef[1] + 2.0 * a * zc
    return 1.0 / a, b / (2.0 * a)


# -- end-to-end pattern -------------------------------------------------------


@dataclass
class OracleBranches:
    """Numerically propagated branch amplitudes for one geometry."""

    z2: np.ndarray
    amplitudes: dict
    pass_probability: float
    slit_packets2: dict  # particle-2 packets at the slit plane, as Grid1D
    info: dict


def _momentum_bounds(grid: Grid1D) -> tuple[float, float]:
    """Smallest and largest wavenumber carrying non-negligible spectral weight."""
    power = np.abs(np.fft.fft(grid.samples)) ** 2
    k = grid.k
    order = np.argsort(k)
    k, power = k[order], power[order]
    cum = np.cumsum(power) / power.sum()
    tol = 1e-24
    lo = k[np.searchsorted(cum, tol)]
    hi = k[min(np.searchsorted(cum, 1.0 - tol), k.size - 1)]
    return float(lo), float(hi)


def _spatial_bounds(grid: Grid1D) -> tuple[float, float]:
    mag = np.abs(grid.samples)
    idx = np.flatnonzero(mag > 1e-13 * mag.max())
    z = grid.z
    return float(z[idx[0]]), float(z[idx[-1]])


def _propagate_and_read(samples: Grid1D, tau: float, targets: np.ndarray, check=True) -> np.ndarray:
    """Embed ``samples`` in a grid wide enough for flight ``tau`` and read at ``targets``."""
    h = samples.spacing
    zlo, zhi = _spatial_bounds(samples)
    klo, khi = _momentum_bounds(samples)
    lo = min(zlo + min(klo, 0.0) * tau, targets.min()) - 40 * h
    hi = max(zhi + max(khi, 0.0) * tau, targets.max()) + 40 * h
    span = hi - lo
    lo, hi = lo - 0.15 * span, hi + 0.15 * span
    big = Grid1D.aligned(samples.z[0], h, lo, hi)
    data = np.zeros(big.n_points, dtype=complex)
    i0 = big.index_of(samples.z[0])
    data[i0 : i0 + samples.n_points] = samples.samples
    out = momentum_space_propagate(big.with_samples(data), tau, check=check)
    idx = np.rint((targets - big.z[0]) / h).astype(int)
    if np.all(np.abs(big.z[idx] - targets) <= 1e-9 * h):
        return out.samples[idx]
    return spectral_evaluate(out, targets)


def _oracle_spacing(geom: Geometry, z2: np.ndarray) -> float:
    k_rel = 13.0 * geom.sigma
    k_com = 13.0 / (2.0 * geom.omega)
    k_probe = 13.0 / geom.epsilon
    h = 0.9 * min(
        math.pi / (k_rel + k_com),
        math.pi / k_probe,
        2.0 * math.pi / (k_rel + k_com + k_probe),
    )
    if z2.size > 1:
        steps = np.diff(z2)
        s = steps.mean()
        if s > 0 and np.allclose(steps, s, rtol=1e-9, atol=0):
            # make every pattern sample a grid point
            h = s / math.ceil(s / h)
    return h


def oracle_branches(
    geom: Geometry,
    z1_fixed: float = 0.0,
    z2_grid=None,
    slit_profile: str = "gaussian",
) -> OracleBranches:
    """Numerically propagated, renormalized branch amplitudes at the detectors.

    The pair state is sampled in relative ``u = z1 - z2`` and centre-of-mass
    ``w = z1 + z2`` coordinates, where the free Hamiltonian separates into two
    one-dimensional problems of mass 1/2. Each factor is propagated to the
    slit plane on its own FFT grid and the product is gathered onto
    slit-local (z1, z2) windows for the projection.

    ``slit_profile="top-hat"`` swaps the Gaussian slits for hard-edged ones.
    This is an experimental, non-band-limited option; its results are not
    expected to meet the Gaussian accuracy thresholds.
    """
    if slit_profile not in ("gaussian", "top-hat"):
        raise DomainError("slit_profile must be 'gaussian' or 'top-hat'")
    z2 = _grid(z2_grid)
    state0 = make_epr(geom.sigma, geom.omega)
    q = state0.quad
    if not (np.isclose(q[0, 0], q[1, 1]) and np.allclose(state0.lin, 0)):
        raise DomainError("pair state is not separable in relative/centre-of-mass coordinates")

    h = _oracle_spacing(geom, z2)
    tau0, tau = geom.tau_slit, geom.tau_flight
    half_slit = 9.0 * geom.epsilon
    # relative-coordinate support at the slit plane (mass 1/2 doubles tau)
    beta_u = 1.0 / geom.sigma**2 + 4j * tau0
    u_sup = _TAIL / math.sqrt((1.0 / beta_u).real)
    beta_w = 4.0 * geom.omega**2 + 4j * tau0
    w_sup = _TAIL / math.sqrt((1.0 / beta_w).real)

    anchor2 = float(z2[0])
    phi = dict(zip(("d1", "d2"), slit_packets(geom)))
    centers = {"d1": geom.z0, "d2": -geom.z0}

    def relative_window(lo, hi):
        # grid of u containing every z1_i - z2_j offset and the support of f
        return Grid1D.aligned(z1_fixed - anchor2, h, lo, hi)

    amps, norms, packets2, info = {}, {}, {}, {"spacing": h}
    f_cache = {}
    for tag, zs in centers.items():
        ax1 = Grid1D.aligned(z1_fixed, h, zs - half_slit, zs + half_slit, pow2=False)
        ax2 = Grid1D.aligned(anchor2, h, zs - half_slit - u_sup, zs + half_slit + u_sup, pow2=False)
        z1w, z2w = ax1.z, ax2.z
        u_lo = min(z1w[0] - z2w[-1], -u_sup) - 4 * h
        u_hi = max(z1w[-1] - z2w[0], u_sup) + 4 * h
        w_lo = min(z1w[0] + z2w[0], -w_sup) - 4 * h
        w_hi = max(z1w[-1] + z2w[-1], w_sup) + 4 * h
        key = (round(u_lo / h), round(u_hi / h), round(w_lo / h), round(w_hi / h))
        if key not in f_cache:
            span_u = u_hi - u_lo
            gu = Grid1D.aligned(z1_fixed - anchor2, h, u_lo - 0.1 * span_u, u_hi + 0.1 * span_u)
            gw = Grid1D.aligned(z1_fixed + anchor2, h, w_lo, w_hi)
            # initial sampling from the closed form along the u and w axes
            norm0 = evaluate_bipartite(state0, 0.0, 0.0)
            f0 = evaluate_bipartite(state0, 0.5 * gu.z, -0.5 * gu.z)
            g0 = evaluate_bipartite(state0, 0.5 * gw.z, 0.5 * gw.z) / norm0
            ft = momentum_space_propagate(gu.with_samples(f0), tau0, mass=0.5)
            gt = momentum_space_propagate(gw.with_samples(g0), tau0, mass=0.5)
            f_cache[key] = (ft, gt)
        ft, gt = f_cache[key]
        iu = ft.index_of(z1w[0] - z2w[0]) + np.subtract.outer(np.arange(ax1.n_points), np.arange(ax2.n_points))
        iw = gt.index_of(z1w[0] + z2w[0]) + np.add.outer(np.arange(ax1.n_points), np.arange(ax2.n_points))
        if iu.min() < 0 or iu.max() >= ft.n_points or iw.min() < 0 or iw.max() >= gt.n_points:
            raise ResolutionError("internal window exceeds the propagated factor grids")
        psi_t0 = Grid2D(ax1, ax2, ft.samples[iu] * gt.samples[iw])

        if slit_profile == "gaussian":
            probe1 = evaluate_packet(phi[tag], z1w)
        else:
            probe1 = np.where(np.abs(z1w - zs) <= geom.epsilon, 1.0 / math.sqrt(2.0 * geom.epsilon), 0.0)
        psi2 = quadrature_project(psi_t0, probe1)
        packets2[tag] = psi2
        norms[tag] = psi2.norm_sq()

        # particle-1 amplitude at the fixed detector after the flight
        if slit_profile == "gaussian":
            width1 = _TAIL * geom.epsilon
            g1 = Grid1D.aligned(z1_fixed, h, zs - width1, zs + width1, pow2=False)
            p1 = g1.with_samples(evaluate_packet(phi[tag], g1.z))
            a1 = _propagate_and_read(p1, tau, np.array([z1_fixed]))[0]
        else:
            g1 = Grid1D.aligned(z1_fixed, h, zs - 2 * geom.epsilon, zs + 2 * geom.epsilon, pow2=False)
            box = np.where(np.abs(g1.z - zs) <= geom.epsilon, 1.0 / math.sqrt(2.0 * geom.epsilon), 0.0)
            a1 = _propagate_and_read(g1.with_samples(box), tau, np.array([z1_fixed]), check=False)[0]
        a2 = _propagate_and_read(psi2, tau, z2, check=slit_profile == "gaussian")
        amps[tag] = a1 * a2

    pass_prob = norms["d1"] + norms["d2"]
    scale = 1.0 / math.sqrt(pass_prob)
    amps = {tag: scale * a for tag, a in amps.items()}
    info["slit_profile"] = slit_profile
    return OracleBranches(z2, amps, pass_prob, packets2, info)


def pattern_from_oracle(
    ob: OracleBranches,
    det: DetectorModel,
    normalization: str = "raw",
    geometry: Geometry | None = None,
    z1_fixed: float = 0.0,
) -> Pattern:
    a1, a2 = ob.amplitudes["d1"], ob.amplitudes["d2"]
    intensity = np.abs(a1) ** 2 + np.abs(a2) ** 2 + 2.0 * np.real(det.overlap * np.conj(a1) * a2)
    meta = {
        "geometry": geometry,
        "overlap": det.overlap,
        "z1_fixed": float(z1_fixed),
        "kind": "numeric",
    }
    return _finish(ob.z2, intensity, meta, normalization)


def eraser_from_oracle(ob: OracleBranches, basis: str, normalization: str = "raw") -> Pattern:
    sign = {"plus": 1.0, "minus": -1.0}[basis]
    amp = (ob.amplitudes["d1"] + sign * ob.amplitudes["d2"]) / math.sqrt(2.0)
    return _finish(ob.z2, np.abs(amp) ** 2, {"kind": f"numeric_eraser_{basis}"}, normalization)


def pattern_numeric(
    geom: Geometry,
    det: DetectorModel,
    z1_fixed: float = 0.0,
    z2_grid=None,
    normalization: str = "raw",
    slit_profile: str = "gaussian",
) -> Pattern:
    """End-to-end numerical coincidence pattern (same normalization modes as the analytic one)."""
    _check_mode(normalization)
    ob = oracle_branches(geom, z1_fixed, z2_grid, slit_profile)
    return pattern_from_oracle(ob, det, normalization, geom, z1_fixed)


def compare_patterns(a: Pattern, b: Pattern, align: str | None = None) -> ComparisonReport:
    """Error norms of ``a`` against reference ``b`` on an identical z2 grid.

    Relative errors are measured against the peak of ``b``. Patterns in
    different normalization modes (or with ``align="unit-peak"``) are both
    brought to unit peak first.
    """
    if a.z2.shape != b.z2.shape or not np.array_equal(a.z2, b.z2):
        raise DomainError("patterns are sampled on different z2 grids")
    if align is None and a.normalization != b.normalization:
        align = "unit-peak"
    if align is not None:
        a, b = a.normalized(align), b.normalized(align)
    diff = np.abs(a.intensity - b.intensity)
    peak = np.abs(b.intensity).max()
    i = int(np.argmax(diff))
    ref_l2 = math.sqrt(float(np.sum(b.intensity**2)))
    l2 = math.sqrt(float(np.sum(diff**2))) / ref_l2 if ref_l2 > 0 else math.sqrt(float(np.sum(diff**2)))
    return ComparisonReport(
        max_abs_error=float(diff.max()),
        max_rel_error=float(diff.max() / peak) if peak > 0 else float(diff.max()),
        l2_error=l2,
        location_of_max=float(a.z2[i]),
    )
