"""Wavefunctions, probability field, and the normalized angular scattering density.

Phases use p / (2 hbar), not p / hbar, throughout. That convention is what
makes the scattering angle here twice the textbook one; do not "fix" it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .core import H, HBAR, BeamSpec, SlitGeometry, solve_particle_momentum
from .quadrature import QuadratureError, adaptive_simpson, richardson_simpson

APPROXIMATE = "approximate"
EXACT = "exact"
DENSITY_MODES = (APPROXIMATE, EXACT)

NORM_INTERVALS = 2 ** 15
FIXED_POINT_RTOL = 1e-12
FIXED_POINT_MAX_ITER = 100
_SINC_SERIES_CUTOFF = 1e-4


class FixedPointError(ArithmeticError):
    """The self-consistent particle momentum iteration failed to settle."""

    def __init__(self, message, previous, last):
        super().__init__(message)
        self.previous = previous
        self.last = last


@dataclass(frozen=True)
class FieldParams:
    """Entire-field amplitude ``c_f`` (metres) and post-slit reference time ``epsilon``."""

    c_f: float
    epsilon: float = 1e-9

    def __post_init__(self):
        if not (self.c_f >= 0 and math.isfinite(self.c_f)):
            raise ValueError(f"c_f must be >= 0, got {self.c_f!r}")
        if not (self.epsilon > 0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")


def alpha(p_py, geometry: SlitGeometry):
    """Single-slit envelope argument a p_Py / (4 hbar)."""
    return geometry.width * np.asarray(p_py) / (4.0 * HBAR)


def phi(p_py, geometry: SlitGeometry):
    """Two-slit phase d p_Py / (2 hbar)."""
    return geometry.separation * np.asarray(p_py) / (2.0 * HBAR)


def sinc(a):
    """sin(a)/a with the removable singularity patched by its Taylor series."""
    a = np.asarray(a, dtype=float)
    small = np.abs(a) < _SINC_SERIES_CUTOFF
    safe = np.where(small, 1.0, a)
    a2 = a * a
    out = np.where(small, 1.0 - a2 / 6.0 + a2 * a2 / 120.0, np.sin(safe) / safe)
    return out if out.ndim else float(out)


def sinc_sq(a):
    s = sinc(a)
    return s * s


def _shape(theta, p_particle, geometry):
    """sinc^2(alpha) cos^2(phi/2) at angle theta for particle momentum p_particle."""
    p_py = p_particle * np.sin(theta)
    return sinc_sq(alpha(p_py, geometry)) * np.cos(0.5 * phi(p_py, geometry)) ** 2


def _chi_sq(theta, p_particle, geometry, c_f):
    return 4.0 * c_f * c_f * _shape(theta, p_particle, geometry)


def solve_fixed_point(theta, beam: BeamSpec, geometry: SlitGeometry, c_f: float,
                      rtol: float = FIXED_POINT_RTOL, max_iter: int = FIXED_POINT_MAX_ITER):
    """Iterate p_P <- solve_particle_momentum(|chi(theta; p_P)|^2) from p_P = h/lambda0.

    Vectorized over ``theta``. Returns ``(p_particle, iterations)`` where
    ``iterations`` is the count needed by the slowest element.
    """
    theta = np.asarray(theta, dtype=float)
    p = np.full(theta.shape, beam.p0)
    for it in range(1, max_iter + 1):
        p_new = np.asarray(solve_particle_momentum(beam, _chi_sq(theta, p, geometry, c_f)))
        if np.all(np.abs(p_new - p) <= rtol * p_new):
            return (p_new if p_new.ndim else float(p_new)), it
        p_prev, p = p, p_new
    worst = int(np.argmax(np.abs(p - p_prev) / p))
    raise FixedPointError(
        f"fixed point not reached after {max_iter} iterations",
        previous=float(np.ravel(p_prev)[worst]), last=float(np.ravel(p)[worst]))


@dataclass(frozen=True)
class AngularDensityModel:
    """Normalized angular scattering density over [-theta_max, theta_max].

    In ``approximate`` mode the particle momentum is taken as h/lambda0; in
    ``exact`` mode it is the self-consistent solution at each angle. The
    normalization constant is computed once at construction.
    """

    beam: BeamSpec
    geometry: SlitGeometry
    field: FieldParams
    theta_max: float
    mode: str = APPROXIMATE
    norm: float = field(init=False)
    norm_gap: float = field(init=False, repr=False)

    def __post_init__(self):
        if self.mode not in DENSITY_MODES:
            raise ValueError(f"unknown density mode {self.mode!r}")
        if not (0 < self.theta_max <= math.pi / 2):
            raise ValueError(f"theta_max must lie in (0, pi/2], got {self.theta_max!r}")
        integral, gap = richardson_simpson(self.shape, -self.theta_max, self.theta_max,
                                           NORM_INTERVALS)
        object.__setattr__(self, "norm", 1.0 / integral)
        object.__setattr__(self, "norm_gap", gap)

    def particle_momentum(self, theta):
        if self.mode == APPROXIMATE:
            return np.full(np.shape(theta), self.beam.p0) if np.ndim(theta) else self.beam.p0
        return solve_fixed_point(theta, self.beam, self.geometry, self.field.c_f)[0]

    def shape(self, theta):
        """Unnormalized density sinc^2(alpha) cos^2(phi/2)."""
        return _shape(theta, self.particle_momentum(theta), self.geometry)

    def chi_sq(self, theta):
        return 4.0 * self.field.c_f ** 2 * self.shape(theta)

    def density(self, theta):
        return self.norm * self.shape(theta)

    __call__ = density

    @property
    def peak_density(self) -> float:
        return self.density(0.0)


def chi_sq_field(theta, model: AngularDensityModel):
    """Probability-field value |chi(theta)|^2 in m^2."""
    return model.chi_sq(theta)


def fixed_point_momentum(theta, model: AngularDensityModel):
    return solve_fixed_point(theta, model.beam, model.geometry, model.field.c_f)[0]


def angular_density(theta, model: AngularDensityModel):
    theta_arr = np.asarray(theta)
    if np.any(np.abs(theta_arr) > model.theta_max * (1 + 1e-12)):
        raise ValueError("theta outside [-theta_max, theta_max]")
    return model.density(theta)


REGIME_MAX_FIELD = "field-maximal"
REGIME_NULL_FIELD = "null-field"
REGIME_INTERMEDIATE = "intermediate"


def field_kinetic_energy(theta: float, model: AngularDensityModel) -> tuple[float, str]:
    """Field kinetic energy K_F = p_P^4 |chi|^2 / (8 m hbar^2) and its regime label.

    Regimes: ``field-maximal`` where sin(theta) = 0, ``null-field`` where
    |chi|^2 vanishes (to 1e-12 of its peak), ``intermediate`` otherwise.
    """
    p = float(model.particle_momentum(theta))
    chi_sq = float(model.chi_sq(theta))
    k_f = p ** 4 * chi_sq / (8.0 * model.beam.mass * HBAR * HBAR)
    if math.sin(theta) == 0.0:
        regime = REGIME_MAX_FIELD
    elif chi_sq <= 1e-12 * 4.0 * model.field.c_f ** 2:
        regime = REGIME_NULL_FIELD
    else:
        regime = REGIME_INTERMEDIATE
    return k_f, regime


def propagator_ky(y, t: float, y_eps, field: FieldParams, mass: float):
    """Free-particle propagator sqrt(m / (i h tau)) exp(i m (y - y_eps)^2 / (2 hbar tau)).

    Normalized so that its integral over y_eps is one and it tends to a delta
    function as tau = t - epsilon -> 0.
    """
    tau = t - field.epsilon
    if tau <= 0:
        raise ValueError("propagator needs t > epsilon")
    pref = math.sqrt(mass / (H * tau)) * cmath.exp(-0.25j * math.pi)
    dy = np.asarray(y) - np.asarray(y_eps)
    return pref * np.exp(1j * mass * dy * dy / (2.0 * HBAR * tau))


def psi_y_closed(y: float, t: float, p_py: float, geometry: SlitGeometry,
                 field: FieldParams) -> complex:
    """Post-slit y wavefunction, up to the constant prefactor."""
    tau = t - field.epsilon
    if tau <= 0:
        raise ValueError("wavefunction needs t > epsilon")
    k = p_py / (2.0 * HBAR)
    phases = sum(cmath.exp(-1j * k * c) for c in geometry.centers)
    return sinc(alpha(p_py, geometry)) * cmath.exp(1j * k * y) / math.sqrt(tau) * phases


def psi_y_quadrature(y: float, t: float, p_py: float, geometry: SlitGeometry,
                     field: FieldParams, mass: float, slits=(1, 2),
                     rel_tol: float = 1e-12) -> complex:
    """Same wavefunction by adaptive Simpson over the launch position in each slit."""
    tau = t - field.epsilon
    if tau <= 0:
        raise ValueError("wavefunction needs t > epsilon")
    a = geometry.width
    pref = math.sqrt(mass / (H * tau)) * cmath.exp(-0.25j * math.pi) / math.sqrt(2.0 * a)
    k = p_py / (2.0 * HBAR)
    total = 0j
    for idx in slits:
        c = geometry.centers[idx - 1]
        # integrate over u in [-1/2, 1/2], y_eps = c + a u
        integrand = lambda u, c=c: cmath.exp(1j * k * (y - c - a * u))
        try:
            total += a * adaptive_simpson(integrand, -0.5, 0.5, abs_tol=rel_tol)
        except QuadratureError as exc:
            raise QuadratureError(f"wavefunction quadrature failed at p_py={p_py!r}") from exc
    return pref * total


def chi_x(x, p_px: float, x0: float, c_fx: float):
    """Field factor along x; |chi_x| = c_fx everywhere."""
    return c_fx * np.exp(1j * p_px * (np.asarray(x) - x0) / (2.0 * HBAR))


chi_z = chi_x


def chi_y(y, p_py: float, geometry: SlitGeometry, c_fy: float):
    k = p_py / (2.0 * HBAR)
    phases = sum(np.exp(-1j * k * c) for c in geometry.centers)
    return c_fy * sinc(alpha(p_py, geometry)) * np.exp(1j * k * np.asarray(y)) * phases
