"""Ghost-interference pipeline with a which-path detector and quantum eraser."""

from .geometry import (
    APPROX_RATIO,
    DEFAULT_GEOMETRY,
    DetectorModel,
    Geometry,
    distinguishability,
    exact_fringe_spacing,
    fringe_spacing,
    gamma_param,
    slit_image_center,
)
from .patterns import (
    Pattern,
    approx_eraser_pattern,
    approx_pattern,
    coincidence_pattern,
    eraser_pattern,
)
from .pipeline import (
    Branch,
    BranchedState,
    apply_double_slit,
    detector_branches,
    propagate_branches,
    slit_packets,
    state_at_slits,
)
from .visibility import (
    VisibilityMeasurement,
    duality_margin,
    find_extrema,
    local_visibility,
    maxima_positions,
    measured_fringe_spacing,
    measured_visibility,
    minima_positions,
)

__all__ = [
    "APPROX_RATIO",
    "DEFAULT_GEOMETRY",
    "Branch",
    "BranchedState",
    "DetectorModel",
    "Geometry",
    "Pattern",
    "VisibilityMeasurement",
    "apply_double_slit",
    "approx_eraser_pattern",
    "approx_pattern",
    "coincidence_pattern",
    "detector_branches",
    "distinguishability",
    "duality_margin",
    "eraser_pattern",
    "exact_fringe_spacing",
    "find_extrema",
    "fringe_spacing",
    "gamma_param",
    "local_visibility",
    "maxima_positions",
    "measured_fringe_spacing",
    "measured_visibility",
    "minima_positions",
    "propagate_branches",
    "slit_image_center",
    "slit_packets",
    "state_at_slits",
]
