"""Fringe visibility, spacing and the which-path/visibility duality margin."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .geometry import DetectorModel, Geometry, _require_regime, distinguishability, envelope_argument
from .patterns import Pattern


def local_visibility(geom: Geometry, det: DetectorModel, z2) -> float | np.ndarray:
    """Fringe visibility ``|<d1|d2>| / cosh(4 z2 z0 / W)`` of the large-omega pattern."""
    _require_regime(geom, "local_visibility")
    v = abs(det.overlap) / np.cosh(envelope_argument(geom, np.asarray(z2, dtype=float)))
    return float(v) if np.ndim(v) == 0 else v


@dataclass(frozen=True)
class Extremum:
    index: int
    position: float
    value: float
    kind: str  # "max" or "min"


@dataclass(frozen=True)
class VisibilityMeasurement:
    value: float
    i_max: float
    i_min: float
    z_max: float
    z_min: float
    no_fringes: bool = False

    def __float__(self):
        return self.value


def _signal(p: Pattern, reference: Pattern | None) -> np.ndarray:
    if reference is None:
        return p.intensity
    if reference.z2.shape != p.z2.shape or not np.array_equal(reference.z2, p.z2):
        raise DomainError("reference pattern must share the z2 grid")
    ref = reference.intensity
    if not np.any(ref > 0):
        raise DomainError("reference pattern vanishes everywhere")
    # samples where the reference underflows carry no fringe information
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(ref > 0, p.intensity / ref, np.nan)


def _refine(z: np.ndarray, s: np.ndarray, i: int) -> tuple[float, float]:
    """Three-point parabolic refinement of an interior extremum."""
    y0, y1, y2 = s[i - 1], s[i], s[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0:
        return float(z[i]), float(y1)
    offset = 0.5 * (y0 - y2) / denom
    h = 0.5 * (z[i + 1] - z[i - 1])
    return float(z[i] + offset * h), float(y1 - 0.25 * (y0 - y2) * offset)


def find_extrema(p: Pattern, reference: Pattern | None = None) -> list[Extremum]:
    """Interior local maxima and minima, refined by parabolic interpolation.

    With ``reference`` the pattern is first divided by it, which removes a
    slowly varying envelope shared by both.
    """
    s = _signal(p, reference)
    z = p.z2
    if s.size < 3:
        return []
    left, mid, right = s[:-2], s[1:-1], s[2:]
    is_max = (mid > left) & (mid >= right)
    is_min = (mid < left) & (mid <= right)
    out = []
    for i in np.flatnonzero(is_max | is_min) + 1:
        pos, val = _refine(z, s, i)
        out.append(Extremum(int(i), pos, val, "max" if is_max[i - 1] else "min"))
    return out


def measured_visibility(
    p: Pattern,
    around: float = 0.0,
    reference: Pattern | None = None,
) -> VisibilityMeasurement:
    """Born-Wolf visibility ``(I_max - I_min)/(I_max + I_min)`` near ``around``.

    The extremum nearest ``around`` is paired with the flanking extrema of
    the opposite kind; when both flanks exist their values are averaged.
    A pattern without alternating extrema yields 0 with ``no_fringes`` set.
    """
    ext = find_extrema(p, reference)
    if not ext:
        return VisibilityMeasurement(0.0, math.nan, math.nan, math.nan, math.nan, True)
    k = min(range(len(ext)), key=lambda j: abs(ext[j].position - around))
    centre = ext[k]
    flanks = []
    for step in (-1, 1):
        j = k + step
        while 0 <= j < len(ext):
            if ext[j].kind != centre.kind:
                flanks.append(ext[j])
                break
            j += step
    if not flanks:
        return VisibilityMeasurement(0.0, math.nan, math.nan, math.nan, math.nan, True)
    flank_value = sum(f.value for f in flanks) / len(flanks)
    flank_pos = min(flanks, key=lambda f: abs(f.position - around)).position
    if centre.kind == "max":
        i_max, i_min, z_max, z_min = centre.value, flank_value, centre.position, flank_pos
    else:
        i_max, i_min, z_max, z_min = flank_value, centre.value, flank_pos, centre.position
    total = i_max + i_min
    value = (i_max - i_min) / total if total > 0 else 0.0
    return VisibilityMeasurement(float(value), i_max, i_min, z_max, z_min)


def maxima_positions(p: Pattern, reference: Pattern | None = None) -> np.ndarray:
    return np.array([e.position for e in find_extrema(p, reference) if e.kind == "max"])


def minima_positions(p: Pattern, reference: Pattern | None = None) -> np.ndarray:
    return np.array([e.position for e in find_extrema(p, reference) if e.kind == "min"])


def measured_fringe_spacing(
    p: Pattern, around: float = 0.0, reference: Pattern | None = None
) -> float:
    """Peak-to-peak distance of the maxima adjacent to the one nearest ``around``."""
    peaks = np.sort(maxima_positions(p, reference))
    if peaks.size < 2:
        raise DomainError("fewer than two fringe maxima in the pattern")
    k = int(np.argmin(np.abs(peaks - around)))
    if 0 < k < peaks.size - 1:
        return float(0.5 * (peaks[k + 1] - peaks[k - 1]))
    j = k + 1 if k == 0 else k - 1
    return float(abs(peaks[k] - peaks[j]))


def duality_margin(det: DetectorModel, v2_peak: float) -> float:
    """``1 - (D1^2 + V2^2)``; non-negative whenever the duality bound holds."""
    d1 = distinguishability(det)
    if not (0.0 <= v2_peak <= 1.0):
        raise DomainError(f"visibility must lie in [0, 1], got {v2_peak}")
    return 1.0 - (d1 * d1 + v2_peak * v2_peak)
