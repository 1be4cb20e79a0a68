"""Straight-line propagation of particle-field systems to the detecting screen."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BeamSpec, SlitGeometry

PAPER = "paper"
GEOMETRIC = "geometric"
PROPAGATION_MODES = (PAPER, GEOMETRIC)


class NoScreenCrossing(ValueError):
    pass


@dataclass(frozen=True)
class DetectionEvent:
    particle_id: int
    slit_index: int
    y_eps: float
    theta: float
    y_det: float
    x_det: float
    flight_scale: float


def screen_offset(theta, geometry: SlitGeometry, beam: BeamSpec, mode: str = PAPER):
    """Transverse displacement y_det - y_eps for scattering angle ``theta``.

    paper: A0 L sin(theta), taking v_P0 (T - eps) ~ L.
    geometric: L tan(theta), the ray actually crossing x = x0 + L.
    """
    theta = np.asarray(theta, dtype=float)
    L = geometry.screen_distance
    if mode == PAPER:
        out = beam.a0 * L * np.sin(theta)
    elif mode == GEOMETRIC:
        if np.any(np.cos(theta) <= 0):
            raise NoScreenCrossing("ray never reaches the screen (cos(theta) <= 0)")
        out = L * np.tan(theta)
    else:
        raise ValueError(f"unknown propagation mode {mode!r}")
    return out if out.ndim else float(out)


def propagate_arrays(slit_index, y_eps, theta, geometry: SlitGeometry, beam: BeamSpec,
                     mode: str = PAPER):
    """Vectorized :func:`propagate`; returns ``(y_det, x_det, flight_scale)`` arrays."""
    theta = np.asarray(theta, dtype=float)
    L = geometry.screen_distance
    y_det = np.asarray(y_eps, dtype=float) + screen_offset(theta, geometry, beam, mode)
    if mode == PAPER:
        flight = np.full(theta.shape, L)
        x_det = geometry.x0 + beam.a0 * L * np.cos(theta)
    else:
        flight = L / np.cos(theta)
        x_det = np.full(theta.shape, geometry.x0 + L)
    return y_det, x_det, flight


def propagate(event_in, geometry: SlitGeometry, beam: BeamSpec, mode: str = PAPER,
              particle_id: int = 0) -> DetectionEvent:
    slit_index, y_eps, theta = event_in
    if abs(theta) >= math.pi / 2:
        raise ValueError("|theta| must be below pi/2")
    y_det, x_det, flight = propagate_arrays(slit_index, y_eps, theta, geometry, beam, mode)
    return DetectionEvent(particle_id, int(slit_index), float(y_eps), float(theta),
                          float(y_det), float(x_det), float(flight))


def particle_trajectory_y(t, y_eps, p_py, mass, epsilon):
    """y(t) = y(eps) + (t - eps) p_Py / m for t >= eps."""
    t = np.asarray(t, dtype=float)
    if np.any(t < epsilon):
        raise ValueError("trajectory defined only for t >= epsilon")
    out = y_eps + (t - epsilon) * p_py / mass
    return out if np.ndim(out) else float(out)


def particle_trajectory_x(t, x0, p_px, mass, epsilon):
    return particle_trajectory_y(t, x0, p_px, mass, epsilon)
