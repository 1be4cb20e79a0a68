"""Particle-field Monte Carlo model of the double-slit experiment."""

from .core import BeamSpec, SlitGeometry
from .experiment import RunConfig, ScreenModel, run
from .wavefield import AngularDensityModel, FieldParams

__all__ = ["AngularDensityModel", "BeamSpec", "FieldParams", "RunConfig", "ScreenModel",
           "SlitGeometry", "run"]
