"""Spectral collocation approximation of HUM boundary controls for the wave equation."""

from .adjoint1d import AdjointFinalData, TimeGrid
from .cutoff import WeightFunction, default_delta
from .hum1d import ControlSet, HUMSolution, solve_hum
from .operators1d import build_discretization
from .quadrature import lgl_rule

__version__ = "0.1.0"

__all__ = [
    "AdjointFinalData",
    "ControlSet",
    "HUMSolution",
    "TimeGrid",
    "WeightFunction",
    "build_discretization",
    "default_delta",
    "lgl_rule",
    "solve_hum",
]
