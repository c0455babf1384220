"""Experimental geometry, which-path detector model and slit-plane closed forms."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from ..errors import DomainError, RegimeError

# Omega must exceed this multiple of max(epsilon, 1/sigma) before the
# large-Omega formulas are used.
APPROX_RATIO = 100.0


@dataclass(frozen=True)
class Geometry:
    """Source, slit and detector parameters (all lengths in one unit ``u``).

    ``sigma`` is an inverse length (momentum correlation), ``omega`` the
    position spread of the pair, ``epsilon`` the slit width parameter,
    ``z0`` the slit half-separation, ``wavelength`` the de Broglie
    wavelength, ``L1`` the slit-to-detector distance and ``L2`` the
    source-to-slit distance.
    """

    sigma: float
    omega: float
    epsilon: float
    z0: float
    wavelength: float
    L1: float
    L2: float

    def __post_init__(self):
        for name in ("sigma", "omega", "epsilon", "z0", "wavelength", "L1", "L2"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"geometry parameter {name} must be positive, got {value}")
            object.__setattr__(self, name, value)

    @property
    def D(self) -> float:
        return self.L1 + 2.0 * self.L2

    @property
    def gamma_sq(self) -> float:
        return self.epsilon**2 + 1.0 / self.sigma**2

    @property
    def tau_slit(self) -> float:
        """Evolution parameter from source to slit plane."""
        return self.wavelength * self.L2 / (2.0 * math.pi)

    @property
    def tau_flight(self) -> float:
        """Evolution parameter from slit plane to detectors."""
        return self.wavelength * self.L1 / (2.0 * math.pi)

    @property
    def approx_valid(self) -> bool:
        return self.omega >= APPROX_RATIO * max(self.epsilon, 1.0 / self.sigma)

    @property
    def envelope_width(self) -> float:
        """``gamma^2 + (lambda D / (pi gamma))^2``, the envelope scale of the pattern."""
        g2 = self.gamma_sq
        return g2 + (self.wavelength * self.D / math.pi) ** 2 / g2

    def replace(self, **changes) -> "Geometry":
        values = {k: getattr(self, k) for k in self.__dataclass_fields__}
        values.update(changes)
        return Geometry(**values)


@dataclass(frozen=True)
class DetectorModel:
    """Which-path detector described by the overlap ``<d1|d2>``."""

    overlap: complex = 0.0
    atol: float = field(default=1e-15, repr=False)

    def __post_init__(self):
        c = complex(self.overlap)
        if not (abs(c) <= 1.0 + 1e-15):
            raise DomainError(f"|<d1|d2>| must not exceed 1, got {abs(c)}")
        object.__setattr__(self, "overlap", c)

    @classmethod
    def from_polar(cls, magnitude: float, phase: float = 0.0) -> "DetectorModel":
        if not 0.0 <= magnitude <= 1.0:
            raise DomainError(f"overlap magnitude must lie in [0, 1], got {magnitude}")
        return cls(cmath.rect(magnitude, phase))

    @property
    def orthogonal(self) -> bool:
        return abs(self.overlap) <= self.atol

    def gram(self, tag_i: str, tag_j: str) -> complex:
        """``<tag_i|tag_j>`` for tags in {"d1", "d2"}."""
        if tag_i == tag_j:
            return 1.0 + 0j
        if (tag_i, tag_j) == ("d1", "d2"):
            return self.overlap
        if (tag_i, tag_j) == ("d2", "d1"):
            return self.overlap.conjugate()
        raise DomainError(f"unknown detector tags {tag_i!r}, {tag_j!r}")


def distinguishability(det: DetectorModel) -> float:
    """Which-path distinguishability ``sqrt(1 - |<d1|d2>|^2)``."""
    c = abs(det.overlap)
    if c > 1.0 + 1e-15:
        raise DomainError(f"|<d1|d2>| must not exceed 1, got {c}")
    return math.sqrt(max(0.0, 1.0 - c * c))


def _require_regime(geom: Geometry, what: str) -> None:
    if not geom.approx_valid:
        raise RegimeError(
            f"{what} needs omega >= {APPROX_RATIO:g} * max(epsilon, 1/sigma); "
            f"got omega={geom.omega:g}, epsilon={geom.epsilon:g}, 1/sigma={1 / geom.sigma:g}"
        )


def slit_image_center(geom: Geometry, exact: bool = True) -> complex | float:
    """Displacement ``z0'`` of the particle-2 packet conditioned on slit A.

    The exact value is complex: the packet is ``exp(-(z2 - z0')^2 / Gamma)``
    with a complex center, which is a real center plus a linear phase. With
    ``tau_slit = 0`` it reduces to the real-valued expression
    ``z0 / ((4 W^2 s^2 + 1)/(4 W^2 s^2 - 1) + 4 eps^2 / (4 W^2 - 1/s^2))``.
    In the large-omega regime ``z0' ~ z0`` (returned as a float).
    """
    if not exact:
        _require_regime(geom, "approximate z0'")
        return geom.z0
    a = geom.sigma**2
    b = 1.0 / (4.0 * geom.omega**2)
    e = geom.epsilon**2 + 2j * geom.tau_slit
    return geom.z0 * (a - b) / ((a + b) + 4.0 * a * b * e)


def gamma_param(geom: Geometry, exact: bool = True) -> complex:
    """Complex width ``Gamma`` of the particle-2 packets at the slit plane.

    Exact form (tau0 = tau_slit, E = eps^2 + 2 i tau0)::

        Gamma = (E + 1/s^2 + E/(4 W^2 s^2)) / (1 + E/W^2 + 1/(4 W^2 s^2)) + 2 i tau0

    Approximate form: ``gamma^2 + 4 i tau0``.
    """
    tau0 = geom.tau_slit
    if not exact:
        _require_regime(geom, "approximate Gamma")
        return geom.gamma_sq + 4j * tau0
    s2 = geom.sigma**2
    w2 = geom.omega**2
    e = geom.epsilon**2 + 2j * tau0
    num = e + 1.0 / s2 + e / (4.0 * w2 * s2)
    den = 1.0 + e / w2 + 1.0 / (4.0 * w2 * s2)
    return num / den + 2j * tau0


def fringe_spacing(geom: Geometry) -> float:
    """Period of the ghost fringes, ``(gamma^4 pi^2 + lambda^2 D^2) / (2 z0 lambda D)``."""
    _require_regime(geom, "fringe_spacing")
    if geom.z0 <= 0:
        raise DomainError("fringe spacing undefined for z0 = 0")
    ld = geom.wavelength * geom.D
    return (geom.gamma_sq**2 * math.pi**2 + ld * ld) / (2.0 * geom.z0 * ld)


def exact_fringe_spacing(geom: Geometry) -> float:
    """Fringe period from the exact detector-plane packets.

    The cross term ``conj(psi_A) psi_B`` carries the phase
    ``4 z2 Im(z0' / beta)`` with ``beta = Gamma + 2 i tau_flight``.
    """
    zc = slit_image_center(geom, exact=True)
    beta = gamma_param(geom, exact=True) + 2j * geom.tau_flight
    k = 4.0 * abs((zc / beta).imag)
    if k == 0:
        raise DomainError("no fringes: cross-term phase is constant")
    return 2.0 * math.pi / k


def fringe_phase_argument(geom: Geometry, z2):
    """Argument of the cosine term of the large-omega pattern."""
    ld = geom.wavelength * geom.D
    return 4.0 * z2 * geom.z0 * ld * math.pi / (geom.gamma_sq**2 * math.pi**2 + ld * ld)


def envelope_argument(geom: Geometry, z2):
    """Argument ``4 z2 z0 / (gamma^2 + (lambda D / pi gamma)^2)`` of the cosh envelope."""
    return 4.0 * z2 * geom.z0 / geom.envelope_width


# Reference configuration used by tests, scripts and the CLI examples:
# omega = 200 * max(epsilon, 1/sigma), short source-to-slit leg.
DEFAULT_GEOMETRY = Geometry(sigma=4.0, omega=50.0, epsilon=0.2, z0=6.0, wavelength=0.1, L1=360.0, L2=20.0)
