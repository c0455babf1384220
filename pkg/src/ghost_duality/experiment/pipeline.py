"""Closed-form double-slit pipeline: slit projection, detector entanglement, flight."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

from ..errors import DomainError
from ..gaussian_core import (
    BipartiteGaussianState,
    GaussianPacket,
    free_evolve_bipartite,
    free_evolve_packet,
    make_epr,
    packet_norm,
    packet_overlap,
    project_particle1,
)
from .geometry import DetectorModel, Geometry

TAGS = ("d1", "d2")

# |<phi_A|phi_B>| above which the two slit packets are flagged as degenerate
DEGENERATE_OVERLAP = 1e-3


@dataclass(frozen=True)
class Branch:
    weight: complex
    detector_tag: str
    packet1: GaussianPacket
    packet2: GaussianPacket

    def __post_init__(self):
        if self.detector_tag not in TAGS:
            raise DomainError(f"detector_tag must be one of {TAGS}, got {self.detector_tag!r}")

    @property
    def norm_sq(self) -> float:
        return abs(self.weight) ** 2 * packet_norm(self.packet1) ** 2 * packet_norm(self.packet2) ** 2


@dataclass(frozen=True)
class BranchedState:
    """Sum of product branches, each tagged with a which-path detector state.

    ``pass_probability`` is the squared renormalization constant, i.e. the
    probability that particle 1 made it through either slit.
    """

    branches: tuple[Branch, ...]
    pass_probability: float
    degenerate: bool = False

    def diagonal_norm(self) -> float:
        """Sum of branch norms with cross terms dropped (the renormalization rule)."""
        return sum(b.norm_sq for b in self.branches)

    def exact_norm(self, det: DetectorModel) -> float:
        """Full norm including ``<d_i|d_j><phi_i|phi_j><psi_i|psi_j>`` cross terms."""
        total = 0j
        for bi in self.branches:
            for bj in self.branches:
                total += (
                    bi.weight.conjugate()
                    * bj.weight
                    * det.gram(bi.detector_tag, bj.detector_tag)
                    * packet_overlap(bi.packet1, bj.packet1)
                    * packet_overlap(bi.packet2, bj.packet2)
                )
        return total.real


def slit_packets(geom: Geometry) -> tuple[GaussianPacket, GaussianPacket]:
    """Normalized slit wavepackets centred at +z0 (A) and -z0 (B), width ``epsilon``."""
    beta = geom.epsilon**2
    log_c = -0.25 * math.log(math.pi / 2.0) - 0.5 * math.log(geom.epsilon)
    return (
        GaussianPacket(log_c, geom.z0, beta),
        GaussianPacket(log_c, -geom.z0, beta),
    )


def state_at_slits(geom: Geometry) -> BipartiteGaussianState:
    """EPR pair evolved from the source to the slit plane."""
    return free_evolve_bipartite(make_epr(geom.sigma, geom.omega), geom.tau_slit)


def apply_double_slit(
    state_at_t0: BipartiteGaussianState,
    geom: Geometry,
    det: DetectorModel | None = None,
) -> BranchedState:
    """Project particle 1 onto the two slit packets and renormalize.

    The blocked part of the wavefunction is discarded. The remaining two
    branches are rescaled by ``1/A`` with ``A^2 = <psi_A|psi_A> + <psi_B|psi_B>``.
    ``det`` is accepted for interface symmetry; the branch amplitudes do not
    depend on the detector overlap.
    """
    phi_a, phi_b = slit_packets(geom)
    psi_a = project_particle1(state_at_t0, phi_a)
    psi_b = project_particle1(state_at_t0, phi_b)
    pass_prob = packet_norm(psi_a) ** 2 + packet_norm(psi_b) ** 2
    if not pass_prob > 0:
        raise DomainError("particle 1 has vanishing probability to pass the slits")
    w = 1.0 / math.sqrt(pass_prob)
    degenerate = abs(packet_overlap(phi_a, phi_b)) > DEGENERATE_OVERLAP
    if degenerate:
        warnings.warn(
            "slit packets overlap strongly (z0 comparable to epsilon); "
            "which-path branches are not well separated",
            stacklevel=2,
        )
    return BranchedState(
        (
            Branch(w, "d1", phi_a, psi_a),
            Branch(w, "d2", phi_b, psi_b),
        ),
        pass_prob,
        degenerate,
    )


def propagate_branches(bs: BranchedState, tau: float) -> BranchedState:
    """Free evolution of both particles in every branch; weights are untouched."""
    return replace(
        bs,
        branches=tuple(
            replace(b, packet1=free_evolve_packet(b.packet1, tau), packet2=free_evolve_packet(b.packet2, tau))
            for b in bs.branches
        ),
    )


def detector_branches(geom: Geometry) -> BranchedState:
    """Full closed-form pipeline: source -> slits -> detectors."""
    bs = apply_double_slit(state_at_slits(geom), geom)
    return propagate_branches(bs, geom.tau_flight)
