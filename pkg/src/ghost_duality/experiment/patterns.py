"""Coincidence patterns at the scanning detector."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError, PreconditionError
from ..gaussian_core import evaluate_packet
from .geometry import (
    DetectorModel,
    Geometry,
    _require_regime,
    envelope_argument,
    fringe_phase_argument,
)
from .pipeline import BranchedState

NORMALIZATION_MODES = ("raw", "unit-peak")

# <q|d_i> for the two eraser projections, d1 and d2 orthonormal
ERASER_BASIS = {
    "plus": {"d1": 1.0 / math.sqrt(2.0), "d2": 1.0 / math.sqrt(2.0)},
    "minus": {"d1": 1.0 / math.sqrt(2.0), "d2": -1.0 / math.sqrt(2.0)},
}


@dataclass
class Pattern:
    """Coincidence intensity sampled on a grid of z2 positions."""

    z2: np.ndarray
    intensity: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.z2 = np.asarray(self.z2, dtype=float)
        self.intensity = np.asarray(self.intensity, dtype=float)
        if self.z2.shape != self.intensity.shape or self.z2.ndim != 1:
            raise DomainError("z2 and intensity must be 1-D arrays of equal length")

    def __len__(self):
        return self.z2.size

    @property
    def normalization(self) -> str:
        return self.metadata.get("normalization_mode", "raw")

    def normalized(self, mode: str) -> "Pattern":
        """Copy of the pattern in the requested normalization mode."""
        _check_mode(mode)
        if mode == self.normalization:
            return Pattern(self.z2.copy(), self.intensity.copy(), dict(self.metadata))
        if mode == "unit-peak":
            peak = self.intensity.max()
            scale = 1.0 / peak if peak > 0 else 1.0
            meta = dict(self.metadata, normalization_mode=mode, raw_peak=float(peak))
            return Pattern(self.z2.copy(), self.intensity * scale, meta)
        raw_peak = self.metadata.get("raw_peak")
        if raw_peak is None:
            raise DomainError("cannot recover raw normalization: raw_peak not recorded")
        meta = dict(self.metadata, normalization_mode="raw")
        return Pattern(self.z2.copy(), self.intensity * raw_peak, meta)


def _check_mode(mode):
    if mode not in NORMALIZATION_MODES:
        raise DomainError(f"normalization must be one of {NORMALIZATION_MODES}, got {mode!r}")


def _grid(z2_grid) -> np.ndarray:
    z2 = np.asarray(z2_grid, dtype=float).ravel()
    if z2.size == 0:
        raise DomainError("z2 grid is empty")
    if not np.all(np.isfinite(z2)):
        raise DomainError("z2 grid contains non-finite values")
    return z2


def _finish(z2, intensity, metadata, normalization) -> Pattern:
    _check_mode(normalization)
    intensity = np.clip(intensity, 0.0, None)
    p = Pattern(z2, intensity, dict(metadata, normalization_mode="raw"))
    return p if normalization == "raw" else p.normalized(normalization)


def branch_amplitudes(bs: BranchedState, z1_fixed: float, z2) -> dict[str, np.ndarray]:
    """Particle amplitude at (z1_fixed, z2) for each detector tag."""
    out = {}
    for b in bs.branches:
        amp = b.weight * evaluate_packet(b.packet1, z1_fixed) * evaluate_packet(b.packet2, z2)
        out[b.detector_tag] = out.get(b.detector_tag, 0) + amp
    return out


def intensity_from_amplitudes(amps: dict, det: DetectorModel) -> np.ndarray:
    """``sum_ij conj(a_i) a_j <d_i|d_j>``."""
    a1 = amps.get("d1", 0)
    a2 = amps.get("d2", 0)
    cross = np.real(det.overlap * np.conj(a1) * a2)
    return np.abs(a1) ** 2 + np.abs(a2) ** 2 + 2.0 * cross


def coincidence_pattern(
    bs: BranchedState,
    det: DetectorModel,
    z1_fixed: float = 0.0,
    z2_grid=None,
    normalization: str = "raw",
    geometry: Geometry | None = None,
) -> Pattern:
    """Coincidence density at D2 given that D1 at ``z1_fixed`` fired."""
    z2 = _grid(z2_grid)
    amps = branch_amplitudes(bs, z1_fixed, z2)
    intensity = intensity_from_amplitudes(amps, det)
    meta = {
        "geometry": geometry,
        "overlap": det.overlap,
        "z1_fixed": float(z1_fixed),
        "kind": "coincidence",
    }
    return _finish(z2, intensity, meta, normalization)


def eraser_pattern(
    bs: BranchedState,
    basis: str,
    z1_fixed: float = 0.0,
    z2_grid=None,
    det: DetectorModel | None = None,
    normalization: str = "raw",
    geometry: Geometry | None = None,
) -> Pattern:
    """Pattern after projecting the detector onto ``(d1 +/- d2)/sqrt(2)``.

    Only defined for orthogonal detector states.
    """
    det = det if det is not None else DetectorModel(0.0)
    if not det.orthogonal:
        raise PreconditionError("the eraser requires orthogonal which-path detector states")
    if basis not in ERASER_BASIS:
        raise DomainError(f"basis must be 'plus' or 'minus', got {basis!r}")
    z2 = _grid(z2_grid)
    amps = branch_amplitudes(bs, z1_fixed, z2)
    coeff = ERASER_BASIS[basis]
    projected = sum(coeff[tag] * a for tag, a in amps.items())
    meta = {
        "geometry": geometry,
        "overlap": det.overlap,
        "z1_fixed": float(z1_fixed),
        "kind": f"eraser_{basis}",
    }
    return _finish(z2, np.abs(projected) ** 2, meta, normalization)


def _approx_prefactor(geom: Geometry) -> float:
    """Prefactor of the large-omega pattern, with each branch carrying norm 1/2.

    Product of 1/2 and the peak densities of the normalized, evolved slit
    packet at z1 = 0 and of the particle-2 packet.
    """
    eps2 = geom.epsilon**2
    b1 = complex(eps2, 2.0 * geom.tau_flight)
    phi0 = math.sqrt(2.0 / math.pi) * geom.epsilon / abs(b1) * math.exp(
        -2.0 * geom.z0**2 * eps2 / abs(b1) ** 2
    )
    g = math.sqrt(geom.gamma_sq)
    b2 = complex(geom.gamma_sq, geom.wavelength * geom.D / math.pi)
    psi_peak = math.sqrt(2.0 / math.pi) * g / abs(b2)
    return 0.5 * phi0 * psi_peak


def approx_pattern(
    geom: Geometry,
    det: DetectorModel,
    z2_grid,
    normalization: str = "raw",
) -> Pattern:
    """Large-omega closed form of the coincidence pattern at ``z1 = 0``.

    ``2 alpha exp(-2 (z2^2 + z0^2)/W) [cosh(4 z2 z0/W) + |c| cos(theta + arg c)]``
    with ``W = gamma^2 + (lambda D/(pi gamma))^2``.
    """
    _require_regime(geom, "approx_pattern")
    z2 = _grid(z2_grid)
    c = det.overlap
    w = geom.envelope_width
    env = np.exp(-2.0 * (z2 * z2 + geom.z0**2) / w)
    theta = fringe_phase_argument(geom, z2)
    body = np.cosh(envelope_argument(geom, z2)) + abs(c) * np.cos(theta + cmath.phase(c))
    intensity = 2.0 * _approx_prefactor(geom) * env * body
    meta = {"geometry": geom, "overlap": c, "z1_fixed": 0.0, "kind": "approx"}
    return _finish(z2, intensity, meta, normalization)


def approx_eraser_pattern(
    geom: Geometry,
    basis: str,
    z2_grid,
    normalization: str = "raw",
) -> Pattern:
    """Large-omega eraser pattern; ``plus`` restores fringes, ``minus`` gives anti-fringes."""
    _require_regime(geom, "approx_eraser_pattern")
    if basis not in ERASER_BASIS:
        raise DomainError(f"basis must be 'plus' or 'minus', got {basis!r}")
    z2 = _grid(z2_grid)
    sign = 1.0 if basis == "plus" else -1.0
    env = np.exp(-2.0 * (z2 * z2 + geom.z0**2) / geom.envelope_width)
    body = np.cosh(envelope_argument(geom, z2)) + sign * np.cos(fringe_phase_argument(geom, z2))
    intensity = _approx_prefactor(geom) * env * body
    meta = {"geometry": geom, "overlap": 0j, "z1_fixed": 0.0, "kind": f"approx_eraser_{basis}"}
    return _finish(z2, intensity, meta, normalization)
