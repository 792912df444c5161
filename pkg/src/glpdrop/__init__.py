"""Droplet formation in the non-local mean-field free energy on a periodic grid."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .errors import (ConvergenceError, DomainError, GLPError, NoDoubleWellError, StateError)
from .field import EnergyBreakdown, Field, glp_energy, gradient, total_energy
from .instanton import InstantonProfile, solve_instanton, surface_tension
from .kernel import KernelSpec, make_kernel
from .model import Model, ModelParams
from .thermo import F, solve_m_beta

__all__ = [
    "BACKEND", "ConvergenceError", "DomainError", "EnergyBreakdown", "F", "Field", "GLPError",
    "InstantonProfile", "KernelSpec", "Model", "ModelParams", "NoDoubleWellError", "StateError",
    "glp_energy", "gradient", "make_kernel", "solve_instanton", "solve_m_beta", "surface_tension",
    "total_energy",
]
