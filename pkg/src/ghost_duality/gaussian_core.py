"""Closed-form algebra for one- and two-coordinate complex Gaussians.

Natural units hbar = m = 1 are used throughout, so free evolution depends on
time only through ``tau = hbar * t / m`` (a squared length).

A one-coordinate packet is stored in the form

    p(z) = exp(log_coeff - (z - center)**2 / width_param + 1j * linear_phase * (z - center))

and a two-coordinate state as

    Psi(z) = exp(-z @ quad @ z + lin @ z + log_coeff),   z = (z1, z2).

Internally a packet is converted to the polynomial form ``-a z**2 + b z + g``
whenever integrals are taken.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "GaussianPacket",
    "BipartiteGaussianState",
    "make_epr",
    "free_evolve_packet",
    "free_evolve_bipartite",
    "project_particle1",
    "packet_overlap",
    "packet_norm",
    "evaluate_packet",
    "evaluate_bipartite",
    "normalize_packet",
    "tau_from_distance",
]


def tau_from_distance(wavelength: float, distance: float) -> float:
    """Evolution parameter for a flight of ``distance`` at de Broglie ``wavelength``."""
    if wavelength <= 0 or distance < 0:
        raise DomainError("wavelength must be positive and distance non-negative")
    return wavelength * distance / (2.0 * math.pi)


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not math.isfinite(tau) or tau < 0:
        raise DomainError(f"evolution parameter tau must be finite and >= 0, got {tau}")
    return tau


def _log_gauss_integral(a: complex, b: complex, g: complex) -> complex:
    """log of the integral over the real line of exp(-a z^2 + b z + g)."""
    if a.real <= 0:
        raise DomainError("Gaussian integral diverges: Re(a) must be positive")
    return g + b * b / (4.0 * a) + 0.5 * (math.log(math.pi) - cmath.log(a))


@dataclass(frozen=True)
class GaussianPacket:
    """Complex Gaussian amplitude in one coordinate.

    Parameters
    ----------
    log_coeff : complex
        Log of the amplitude prefactor.
    center : float
        Position of the intensity maximum.
    width_param : complex
        The ``beta`` in ``exp(-(z - center)**2 / beta)``; ``Re(beta) > 0``.
    linear_phase : float
        Wavenumber of the plane-wave factor.
    """

    log_coeff: complex
    center: float
    width_param: complex
    linear_phase: float = 0.0

    def __post_init__(self):
        beta = complex(self.width_param)
        if not (beta.real > 0 and math.isfinite(abs(beta))):
            raise DomainError(f"width_param must have positive real part, got {beta}")
        object.__setattr__(self, "width_param", beta)
        object.__setattr__(self, "log_coeff", complex(self.log_coeff))
        object.__setattr__(self, "center", float(self.center))
        object.__setattr__(self, "linear_phase", float(self.linear_phase))

    @classmethod
    def normalized(cls, center: float, width_param: complex, linear_phase: float = 0.0):
        """Packet with unit L2 norm."""
        p = cls(0.0, center, width_param, linear_phase)
        return normalize_packet(p)

    @classmethod
    def from_quadratic(cls, a: complex, b: complex, g: complex) -> "GaussianPacket":
        """Build from the exponent ``-a z**2 + b z + g``."""
        a, b, g = complex(a), complex(b), complex(g)
        if a.real <= 0:
            raise DomainError("quadratic coefficient must have positive real part")
        c = b.real / (2.0 * a.real)
        k = b.imag - 2.0 * a.imag * c
        log_coeff = g + a * c * c + 1j * k * c
        return cls(log_coeff, c, 1.0 / a, k)

    def quadratic(self) -> tuple[complex, complex, complex]:
        """Coefficients ``(a, b, g)`` of the exponent ``-a z**2 + b z + g``."""
        a = 1.0 / self.width_param
        c, k = self.center, self.linear_phase
        b = 2.0 * a * c + 1j * k
        g = self.log_coeff - a * c * c - 1j * k * c
        return a, b, g

    @property
    def complex_center(self) -> complex:
        """Center ``zc`` such that the exponent is ``-(z - zc)**2 / beta + const``."""
        return self.center + 0.5j * self.linear_phase * self.width_param

    def __call__(self, z):
        return evaluate_packet(self, z)

    def scaled(self, factor: complex) -> "GaussianPacket":
        if factor == 0:
            raise DomainError("cannot scale a packet by zero")
        return GaussianPacket(
            self.log_coeff + cmath.log(factor), self.center, self.width_param, self.linear_phase
        )


def evaluate_packet(p: GaussianPacket, z):
    """Pointwise amplitude; accepts scalars or arrays."""
    z = np.asarray(z, dtype=float)
    d = z - p.center
    out = np.exp(p.log_coeff - d * d / p.width_param + 1j * p.linear_phase * d)
    return out if out.ndim else complex(out)


def packet_overlap(p: GaussianPacket, q: GaussianPacket) -> complex:
    """Inner product <p|q> = integral of conj(p) q."""
    ap, bp, gp = p.quadratic()
    aq, bq, gq = q.quadratic()
    return cmath.exp(
        _log_gauss_integral(ap.conjugate() + aq, bp.conjugate() + bq, gp.conjugate() + gq)
    )


def packet_norm(p: GaussianPacket) -> float:
    """L2 norm of the packet."""
    a, b, g = p.quadratic()
    ar = a.real
    log_norm_sq = 2.0 * g.real + b.real**2 / (2.0 * ar) + 0.5 * math.log(math.pi / (2.0 * ar))
    return math.exp(0.5 * log_norm_sq)


def normalize_packet(p: GaussianPacket) -> GaussianPacket:
    n = packet_norm(p)
    return GaussianPacket(p.log_coeff - math.log(n), p.center, p.width_param, p.linear_phase)


def free_evolve_packet(packet: GaussianPacket, tau: float) -> GaussianPacket:
    """Free Schroedinger evolution; the width parameter becomes ``beta + 2i tau``."""
    tau = _check_tau(tau)
    if tau == 0:
        return packet
    a, b, g = packet.quadratic()
    m = 1.0 + 2j * a * tau
    # Im(m) = 2 tau Re(a) >= 0 along the whole path, so the principal log is
    # the continuous branch starting from m = 1
    g_new = g + 0.5j * b * b * tau / m - 0.5 * cmath.log(m)
    out = GaussianPacket.from_quadratic(a / m, b / m, g_new)
    return GaussianPacket(
        out.log_coeff, out.center, packet.width_param + 2j * tau, out.linear_phase
    )


@dataclass(frozen=True, eq=False)
class BipartiteGaussianState:
    """Two-coordinate complex Gaussian ``exp(-z.Q.z + l.z + g)``."""

    quad: np.ndarray
    lin: np.ndarray
    log_coeff: complex = 0.0

    def __post_init__(self):
        q = np.array(self.quad, dtype=complex).reshape(2, 2)
        q = 0.5 * (q + q.T)
        lin = np.array(self.lin, dtype=complex).reshape(2)
        if np.any(np.linalg.eigvalsh(q.real) <= 0):
            raise DomainError("real part of the quadratic form must be positive definite")
        q.setflags(write=False)
        lin.setflags(write=False)
        object.__setattr__(self, "quad", q)
        object.__setattr__(self, "lin", lin)
        object.__setattr__(self, "log_coeff", complex(self.log_coeff))

    def __call__(self, z1, z2):
        return evaluate_bipartite(self, z1, z2)

    def norm(self) -> float:
        """L2 norm over the plane."""
        m = 2.0 * self.quad.real
        j = 2.0 * self.lin.real
        log_norm_sq = (
            2.0 * self.log_coeff.real
            + math.log(math.pi)
            - 0.5 * float(np.sum(np.log(np.linalg.eigvalsh(m))))
            + 0.25 * float(j @ np.linalg.solve(m, j))
        )
        return math.exp(0.5 * log_norm_sq)

    def normalize(self) -> "BipartiteGaussianState":
        return BipartiteGaussianState(self.quad, self.lin, self.log_coeff - math.log(self.norm()))

    def allclose(self, other: "BipartiteGaussianState", rtol=1e-12, atol=1e-14) -> bool:
        return (
            np.allclose(self.quad, other.quad, rtol=rtol, atol=atol)
            and np.allclose(self.lin, other.lin, rtol=rtol, atol=atol)
            and cmath.isclose(self.log_coeff, other.log_coeff, rel_tol=rtol, abs_tol=atol)
        )


def total_norm(state: BipartiteGaussianState) -> float:
    return state.norm()


def make_epr(sigma: float, omega: float) -> BipartiteGaussianState:
    """Normalized generalized EPR state.

    ``sqrt(2 sigma / (pi omega)) exp(-(z1 - z2)**2 sigma**2 - (z1 + z2)**2 / (4 omega**2))``

    The prefactor carries the factor 2 that the change of variables
    ``dz1 dz2 = du dw / 2`` requires for unit norm.
    """
    if not (sigma > 0 and omega > 0):
        raise DomainError(f"sigma and omega must be positive, got sigma={sigma}, omega={omega}")
    s2 = sigma * sigma
    w = 1.0 / (4.0 * omega * omega)
    quad = np.array([[s2 + w, w - s2], [w - s2, s2 + w]])
    log_coeff = 0.5 * math.log(2.0 * sigma / (math.pi * omega))
    return BipartiteGaussianState(quad, np.zeros(2), log_coeff)


def evaluate_bipartite(s: BipartiteGaussianState, z1, z2):
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    q, l = s.quad, s.lin
    expo = (
        -(q[0, 0] * z1 * z1 + 2.0 * q[0, 1] * z1 * z2 + q[1, 1] * z2 * z2)
        + l[0] * z1
        + l[1] * z2
        + s.log_coeff
    )
    out = np.exp(expo)
    return out if out.ndim else complex(out)


def free_evolve_bipartite(state: BipartiteGaussianState, tau: float) -> BipartiteGaussianState:
    """Evolve under ``H = p1**2/2 + p2**2/2`` for parameter ``tau``.

    Q -> Q (1 + 2i tau Q)^-1 and l -> (1 + 2i tau Q)^-1 l, with the complex
    center of the Gaussian left unchanged.
    """
    tau = _check_tau(tau)
    if tau == 0:
        return state
    q, l = state.quad, state.lin
    basis = _common_real_eigenbasis(q)
    if basis is not None:
        # each eigen-direction evolves as an independent 1-D Gaussian; this
        # keeps Re(Q) accurate when it is small next to Im(Q)
        mu = np.diag(basis.T @ q @ basis)
        factor = 1.0 / (1.0 + 2j * tau * mu)
        new_q = basis @ np.diag(mu * factor) @ basis.T
        m_inv = basis @ np.diag(factor) @ basis.T
    else:
        mu = np.linalg.eigvals(q)
        m_inv = np.linalg.inv(np.eye(2) + 2j * tau * q)
        new_q = q @ m_inv
    new_l = m_inv @ l
    # eigenvalues of Q have positive real part, so each factor lies in the
    # upper half plane and the summed principal logs stay on the right sheet
    log_det = sum(cmath.log(1.0 + 2j * tau * x) for x in mu)
    shift = 0.5j * tau * complex(l @ m_inv @ l)
    return BipartiteGaussianState(new_q, new_l, state.log_coeff + shift - 0.5 * log_det)


def _common_real_eigenbasis(q: np.ndarray) -> np.ndarray | None:
    """Real orthogonal basis diagonalizing both Re(Q) and Im(Q), if they commute."""
    re, im = q.real, q.imag
    scale = np.abs(q).max() ** 2
    if np.abs(re @ im - im @ re).max() > 1e-13 * scale:
        return None
    _, v = np.linalg.eigh(re + np.pi * im)  # generic combination splits shared degeneracies
    off = v.T @ q @ v
    if abs(off[0, 1]) > 1e-13 * np.abs(q).max():
        return None
    return v


def project_particle1(state: BipartiteGaussianState, probe: GaussianPacket) -> GaussianPacket:
    """Particle-2 amplitude ``psi(z2) = integral conj(probe(z1)) Psi(z1, z2) dz1``.

    The result is not normalized; its squared norm is the probability of the
    probe outcome.
    """
    ap, bp, gp = probe.quadratic()
    q, l = state.quad, state.lin
    a1 = ap.conjugate() + q[0, 0]
    b1 = bp.conjugate() + l[0]
    if a1.real <= 0:
        raise DomainError("projection integral diverges")
    a_out = q[1, 1] - q[0, 1] ** 2 / a1
    b_out = l[1] - q[0, 1] * b1 / a1
    g_out = _log_gauss_integral(a1, b1, gp.conjugate() + state.log_coeff)
    return GaussianPacket.from_quadratic(a_out, b_out, g_out)
