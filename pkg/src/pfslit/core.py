"""Constants, beam and slit descriptions, and the particle/field momentum algebra.

Unit conventions: SI throughout. The probability-field value |chi|^2 carries
units of m^2 (c_F has dimension of length), so p^2 |chi|^2 / hbar^2 is
dimensionless. The plane-field amplitude A_p likewise carries a length so
that A_p * k is dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

H = 6.62607015e-34  # J s, exact since the 2019 SI redefinition
HBAR = H / (2.0 * math.pi)


class InvalidBeamError(ValueError):
    """Beam parameters outside the physically admissible domain."""


@dataclass(frozen=True)
class Constants:
    h: float = H
    hbar: float = HBAR


CONSTANTS = Constants()


@dataclass(frozen=True)
class BeamSpec:
    """Incident beam: de Broglie wavelength, mass, and plane-field scale factor.

    ``a0`` is the ratio of the de Broglie momentum to the bare particle
    momentum before the slits. ``a_p`` (plane-field amplitude, metres) is
    optional; when given, :func:`a0_from_field_amplitude` derives ``a0``.
    """

    lambda0: float
    mass: float
    a0: float = 1.0
    a_p: float | None = None

    def __post_init__(self):
        if not (self.lambda0 > 0 and math.isfinite(self.lambda0)):
            raise InvalidBeamError(f"lambda0 must be positive, got {self.lambda0!r}")
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise InvalidBeamError(f"mass must be positive, got {self.mass!r}")
        if not (self.a0 >= 1.0 and math.isfinite(self.a0)):
            raise InvalidBeamError(f"a0 must be >= 1, got {self.a0!r}")
        if self.a_p is not None and not (self.a_p >= 0 and math.isfinite(self.a_p)):
            raise InvalidBeamError(f"a_p must be >= 0, got {self.a_p!r}")

    @property
    def p0(self) -> float:
        """de Broglie momentum magnitude h / lambda0."""
        return H / self.lambda0

    @property
    def k0(self) -> float:
        return self.p0 / HBAR

    @classmethod
    def from_field_amplitude(cls, lambda0: float, mass: float, a_p: float) -> "BeamSpec":
        probe = cls(lambda0=lambda0, mass=mass, a_p=a_p)
        return replace(probe, a0=a0_from_field_amplitude(probe))


@dataclass(frozen=True)
class SlitGeometry:
    """Two slits along y at ``y1``/``y2`` in the plane x = x0, screen at x0 + L."""

    width: float
    y1: float
    y2: float
    screen_distance: float
    x0: float = 0.0
    z0: float = 0.0

    def __post_init__(self):
        # width == 0 is accepted as a degenerate point source; validate_slit_width rejects it
        if not (self.width >= 0 and math.isfinite(self.width)):
            raise ValueError(f"slit width must be >= 0, got {self.width!r}")
        if not (self.screen_distance > 0 and math.isfinite(self.screen_distance)):
            raise ValueError(f"screen distance must be positive, got {self.screen_distance!r}")

    @property
    def separation(self) -> float:
        return abs(self.y2 - self.y1)

    @property
    def centers(self) -> tuple[float, float]:
        return (self.y1, self.y2)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.y1 + self.y2)

    @classmethod
    def symmetric(cls, width: float, separation: float, screen_distance: float) -> "SlitGeometry":
        return cls(width=width, y1=-0.5 * separation, y2=0.5 * separation,
                   screen_distance=screen_distance)


@dataclass(frozen=True)
class MomentumState:
    p_total: float
    p_particle: float
    p_y: float
    p_x: float


@dataclass(frozen=True)
class SlitWidthVerdict:
    passed: bool
    margin: float
    bound: float = field(repr=False, default=0.0)

    def __bool__(self):
        return self.passed


def a0_from_field_amplitude(beam: BeamSpec) -> float:
    """Scale factor A0 for an isotropic pre-slit momentum.

    With all three particle-momentum components sharing one sign,
    (sum p_P,b)^2 = 9 p_P,b^2 = 3 p0^2 / A0^2, and the isotropic energy balance
    p0^2 (1 - A_p^2 (sum p_P,b)^2 / (3 hbar^2)) = p_P0^2 = p0^2 / A0^2 collapses to
    A0^2 = 1 + (A_p k0)^2.
    """
    a_p = beam.a_p
    if a_p is None:
        return beam.a0
    if not (a_p >= 0 and math.isfinite(a_p)):
        raise InvalidBeamError(f"field amplitude must be >= 0, got {a_p!r}")
    a0_sq = 1.0 + (a_p * beam.k0) ** 2
    if not math.isfinite(a0_sq):
        raise InvalidBeamError("field amplitude overflows the scale factor")
    return math.sqrt(a0_sq)


def field_amplitude_from_a0(lambda0: float, a0: float) -> float:
    """Inverse of :func:`a0_from_field_amplitude`: the A_p consistent with a given A0."""
    if a0 < 1.0:
        raise InvalidBeamError(f"a0 must be >= 1, got {a0!r}")
    return math.sqrt(a0 * a0 - 1.0) / (2.0 * math.pi / lambda0)


def isotropic_sum_denominator(beam: BeamSpec, a0: float | None = None) -> float:
    """The factor 1 - A_p^2 (sum p_P,b)^2 / (3 hbar^2) relating p_P0^2 to p0^2."""
    a0 = a0_from_field_amplitude(beam) if a0 is None else a0
    a_p = beam.a_p or 0.0
    comp = isotropic_component_momentum(replace(beam, a0=a0))
    pi_sq = (3.0 * comp) ** 2
    return 1.0 - a_p * a_p * pi_sq / (3.0 * HBAR * HBAR)


def isotropic_component_momentum(beam: BeamSpec) -> float:
    """Magnitude of each Cartesian particle-momentum component before the slits."""
    return beam.p0 / (math.sqrt(3.0) * beam.a0)


def slit_position_moments(geometry: SlitGeometry, slit_index: int) -> tuple[float, float]:
    """Mean and variance of the launch position, uniform across the slit."""
    if slit_index not in (1, 2):
        raise ValueError(f"slit_index must be 1 or 2, got {slit_index!r}")
    center = geometry.y1 if slit_index == 1 else geometry.y2
    return center, geometry.width ** 2 / 12.0


def min_slit_width(lambda0: float) -> float:
    return 3.0 * lambda0 / (2.0 * math.pi)


def validate_slit_width(beam: BeamSpec, geometry: SlitGeometry) -> SlitWidthVerdict:
    """Check a >= 3 lambda0 / (2 pi), from Delta-y Delta-p >= hbar/2."""
    bound = min_slit_width(beam.lambda0)
    return SlitWidthVerdict(geometry.width >= bound, geometry.width / bound, bound)


def estimate_box_quantum_number(beam: BeamSpec, geometry: SlitGeometry) -> int:
    # n^2 h^2 / (4 a^2) = h^2 / (3 lambda0^2)
    return int(round(2.0 * geometry.width / (math.sqrt(3.0) * beam.lambda0)))


def solve_particle_momentum(beam: BeamSpec, chi_sq):
    """Particle momentum p_P that conserves h/lambda0 given the field value |chi|^2 (m^2).

    Evaluated in the rationalised form p_P^2 = 2 p0^2 / (1 + sqrt(1 + x)),
    x = p0^2 |chi|^2 / hbar^2, which has no cancellation as x -> 0.
    Accepts scalars or arrays.
    """
    chi_sq = np.asarray(chi_sq, dtype=float)
    if np.any(chi_sq < 0) or np.any(np.isnan(chi_sq)):
        raise ValueError("chi_sq must be non-negative")
    p0 = beam.p0
    x = (p0 / HBAR) ** 2 * chi_sq
    out = p0 * np.sqrt(2.0 / (1.0 + np.sqrt(1.0 + x)))
    return out if out.ndim else float(out)


def pf_total_momentum(p_particle, chi_sq):
    """Particle-field momentum p = p_P sqrt(1 + p_P^2 |chi|^2 / (4 hbar^2))."""
    p_particle = np.asarray(p_particle, dtype=float)
    chi_sq = np.asarray(chi_sq, dtype=float)
    out = p_particle * np.sqrt(1.0 + p_particle ** 2 * chi_sq / (4.0 * HBAR * HBAR))
    return out if out.ndim else float(out)


def momentum_components(p_particle: float, theta: float, chi_sq: float) -> MomentumState:
    """In-plane components of the particle-field momentum (polar angle fixed at pi/2)."""
    if abs(theta) > math.pi / 2:
        raise ValueError(f"|theta| must be <= pi/2, got {theta!r}")
    scale = math.sqrt(1.0 + p_particle ** 2 * chi_sq / (4.0 * HBAR * HBAR))
    return MomentumState(
        p_total=p_particle * scale,
        p_particle=p_particle,
        p_y=p_particle * math.sin(theta) * scale,
        p_x=p_particle * math.cos(theta) * scale,
    )


def field_velocity(beam: BeamSpec, particle_velocity, k0_components) -> tuple[float, float]:
    """Plane-field speed |A_p sum v_P,b k_b| and its kinetic energy m v_F^2 / 2."""
    a_p = beam.a_p or 0.0
    v = np.asarray(particle_velocity, dtype=float)
    k = np.asarray(k0_components, dtype=float)
    v_f = abs(a_p * float(np.dot(v, k)))
    return v_f, 0.5 * beam.mass * v_f * v_f
