"""Plain-text run configuration: ``key = value`` lines with ``#`` comments."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

from ..errors import ConfigError, DomainError
from ..experiment import DetectorModel, Geometry
from ..experiment.patterns import NORMALIZATION_MODES

MODES = ("pattern", "eraser_plus", "eraser_minus", "sweep", "validate")
GEOMETRY_KEYS = ("sigma", "omega", "epsilon", "z0", "lambda", "L1", "L2")
MIN_Z2_POINTS = 16

# key -> (attribute, kind); kinds: float, int, str, floats
_KEYS = {
    "sigma": ("sigma", "float"),
    "omega": ("omega", "float"),
    "epsilon": ("epsilon", "float"),
    "z0": ("z0", "float"),
    "lambda": ("wavelength", "float"),
    "L1": ("L1", "float"),
    "L2": ("L2", "float"),
    "overlap_magnitude": ("overlap_magnitude", "float"),
    "overlap_phase": ("overlap_phase", "float"),
    "z1_fixed": ("z1_fixed", "float"),
    "z2_min": ("z2_min", "float"),
    "z2_max": ("z2_max", "float"),
    "z2_points": ("z2_points", "int"),
    "normalization": ("normalization", "str"),
    "mode": ("mode", "str"),
    "sweep_parameter": ("sweep_parameter", "str"),
    "sweep_values": ("sweep_values", "floats"),
    "workers": ("workers", "int"),
    "seed": ("seed", "int"),
    "out": ("out", "str"),
}
SWEEPABLE = tuple(k for k, (_, kind) in _KEYS.items() if kind == "float")


@dataclass(frozen=True)
class RunConfig:
    sigma: float
    omega: float
    epsilon: float
    z0: float
    wavelength: float
    L1: float
    L2: float
    overlap_magnitude: float = 0.0
    overlap_phase: float = 0.0
    z1_fixed: float = 0.0
    z2_min: float = -15.0
    z2_max: float = 15.0
    z2_points: int = 2048
    normalization: str = "raw"
    mode: str = "pattern"
    sweep_parameter: str | None = None
    sweep_values: tuple[float, ...] = field(default_factory=tuple)
    workers: int = 1
    seed: int = 0
    out: str = "."

    def __post_init__(self):
        self.geometry()  # raises DomainError on bad geometry
        for attr in ("overlap_phase", "z1_fixed", "z2_min", "z2_max"):
            if not math.isfinite(getattr(self, attr)):
                raise DomainError(f"{attr} must be finite")
        if not 0.0 <= self.overlap_magnitude <= 1.0:
            raise DomainError(f"overlap_magnitude must lie in [0, 1], got {self.overlap_magnitude}")
        if self.z2_points < MIN_Z2_POINTS:
            raise DomainError(f"z2_points must be >= {MIN_Z2_POINTS}, got {self.z2_points}")
        if not self.z2_max > self.z2_min:
            raise DomainError("z2_max must exceed z2_min")
        if self.normalization not in NORMALIZATION_MODES:
            raise DomainError(f"normalization must be one of {NORMALIZATION_MODES}")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}")
        if self.sweep_parameter is not None and self.sweep_parameter not in SWEEPABLE:
            raise DomainError(f"sweep_parameter must be one of {SWEEPABLE}")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")

    def geometry(self) -> Geometry:
        return Geometry(self.sigma, self.omega, self.epsilon, self.z0, self.wavelength, self.L1, self.L2)

    def detector(self) -> DetectorModel:
        return DetectorModel.from_polar(self.overlap_magnitude, self.overlap_phase)

    def z2_grid(self):
        import numpy as np

        return np.linspace(self.z2_min, self.z2_max, self.z2_points)

    def with_value(self, key: str, value) -> "RunConfig":
        """Copy with one config key (file spelling, e.g. ``lambda``) changed."""
        attr, _ = _KEYS[key]
        return dataclasses.replace(self, **{attr: value})


def _convert(key: str, raw: str, line):
    kind = _KEYS[key][1]
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "floats":
            return tuple(float(v) for v in raw.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"value {raw!r} for {key!r} is not numeric", line=line, key=key) from None
    if not raw:
        raise ConfigError(f"empty value for {key!r}", line=line, key=key)
    return raw


def parse_config(text: str, overrides: dict[str, str] | None = None) -> RunConfig:
    """Parse config text; ``overrides`` (e.g. from ``--set``) win over file values.

    Syntax problems raise :class:`ConfigError` naming the line; values
    outside their domain raise :class:`DomainError` naming the key.
    """
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", line=lineno)
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r}", line=lineno, key=key)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", line=lineno, key=key)
        values[key] = _convert(key, raw, lineno)
    for key, raw in (overrides or {}).items():
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r} in override", key=key)
        values[key] = _convert(key, str(raw).strip(), f"--set {key}")
    missing = [k for k in GEOMETRY_KEYS if k not in values]
    if missing:
        n = len(text.splitlines())
        raise ConfigError(f"missing required key(s): {', '.join(missing)}", line=f"{n} (end of file)", key=missing[0])
    kwargs = {_KEYS[k][0]: v for k, v in values.items()}
    try:
        return RunConfig(**kwargs)
    except DomainError as exc:
        raise DomainError(f"invalid configuration: {str(exc).replace('wavelength', 'lambda')}") from None


def _fmt(value) -> str:
    if isinstance(value, float):
        return "%.17g" % value
    if isinstance(value, tuple):
        return ", ".join("%.17g" % v for v in value)
    return str(value)


def emit_config(cfg: RunConfig) -> str:
    """Serialize a config so that ``parse_config(emit_config(cfg)) == cfg``."""
    lines = []
    for key, (attr, _) in _KEYS.items():
        value = getattr(cfg, attr)
        if value is None or value == ():
            continue
        lines.append(f"{key} = {_fmt(value)}")
    return "\n".join(lines) + "\n"
