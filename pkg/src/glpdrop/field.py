"""Order-parameter fields on the periodic grid and their free energies.

Integrals use cell-center quadrature; with the unit-mass discrete kernel the
quadratic-difference form and the ``-m J m`` form of the interaction differ by
exactly ``(1/2) int m**2``, so the two functionals differ by a field-independent
constant.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import thermo
from .errors import ConstraintError, DomainError
from .kernel import DiscreteKernel, convolve_values

CLIP = 1e-7


@dataclass(frozen=True, eq=False)
class Field:
    """Samples of m at cell centers of the torus ``[0, L)^d``."""

    values: np.ndarray
    L: float
    beta: float = float("nan")

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim not in (1, 2, 3) or len(set(v.shape)) != 1:
            raise DomainError(f"field must be a cube of 1-3 dims, got shape {v.shape}")
        if not self.L > 2:
            raise DomainError(f"L must exceed 2, got {self.L}")
        if not np.all(np.isfinite(v)) or np.any(np.abs(v) > 1.0 - CLIP * (1 - 1e-9)):
            raise DomainError("field values must lie in the clip band [-1+1e-7, 1-1e-7]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def uniform(cls, value, N, L, d, beta=float("nan")):
        return cls(np.full((N,) * d, float(value)), L, beta)

    @classmethod
    def clipped(cls, values, L, beta=float("nan")):
        return cls(np.clip(values, -1.0 + CLIP, 1.0 - CLIP), L, beta)

    @property
    def d(self) -> int:
        return self.values.ndim

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def cell_volume(self) -> float:
        return self.h**self.d

    @property
    def volume(self) -> float:
        return self.L**self.d

    def mean(self) -> float:
        return float(self.values.mean())

    def integrate(self, arr) -> float:
        return float(np.sum(arr)) * self.cell_volume

    def with_values(self, values) -> "Field":
        return Field(values, self.L, self.beta)

    def shifted(self, shift) -> "Field":
        """Cyclic shift by whole cells (tuple, one entry per axis)."""
        return self.with_values(np.roll(self.values, shift, axis=tuple(range(self.d))))

    def coordinates(self):
        """Cell-center coordinates, one array per axis (``indexing='ij'``)."""
        ax = (np.arange(self.N) + 0.5) * self.h
        return np.meshgrid(*([ax] * self.d), indexing="ij")


@dataclass(frozen=True)
class EnergyBreakdown:
    local: float
    interaction: float
    total: float
    glp_raw: float


def _quadratic_form(values, kernel, L):
    h_d = (L / values.shape[0]) ** values.ndim
    w = values - values.mean()
    return 0.5 * h_d * float(np.sum(w * (w - convolve_values(kernel, w, L))))


def interaction_energy(field: Field, kernel: DiscreteKernel) -> float:
    """``(1/4) sum_xy (m_x - m_y)^2 J(x-y)`` with cell volumes; invariant under constants."""
    return _quadratic_form(field.values, kernel, field.L)


def glp_energy(field: Field, kernel: DiscreteKernel, beta: float) -> EnergyBreakdown:
    m_beta = thermo.solve_m_beta(beta)
    v = field.values
    local = field.integrate(thermo.F(v, beta, m_beta))
    inter = interaction_energy(field, kernel)
    f_local = -thermo.entropy(v) / beta
    raw = field.integrate(f_local) - 0.5 * field.integrate(v * convolve_values(kernel, v, field.L))
    return EnergyBreakdown(local, inter, local + inter, raw)


def glp_offset(L: float, d: int, beta: float) -> float:
    """Field-independent value of ``glp_raw - total``."""
    m_beta = thermo.solve_m_beta(beta)
    return L**d * (-thermo.entropy(m_beta) / beta - 0.5 * m_beta**2)


def total_energy(field: Field, kernel: DiscreteKernel, beta: float) -> float:
    m_beta = thermo.solve_m_beta(beta)
    return field.integrate(thermo.F(field.values, beta, m_beta)) + interaction_energy(field, kernel)


def gradient(field: Field, kernel: DiscreteKernel, beta: float) -> np.ndarray:
    """Pointwise first variation ``F'(m) + m - J*m``.

    The directional derivative of the total along ``v`` is
    ``h**d * sum(gradient * v)``.
    """
    v = field.values
    return thermo.F_prime(v, beta) + v - convolve_values(kernel, v, field.L)


def g_functional(omega, kernel: DiscreteKernel, beta: float, n: float, L: float) -> float:
    """Energy relative to the uniform profile for a mean-zero deviation ``omega``."""
    w = np.asarray(omega, dtype=float)
    if abs(w.mean()) > 1e-12:
        raise ConstraintError(f"omega must have zero mean, got {w.mean()}")
    if np.any(np.abs(n + w) > 1.0 - CLIP * (1 - 1e-9)):
        raise DomainError("n + omega leaves the clip band")
    h_d = (L / w.shape[0]) ** w.ndim
    return _quadratic_form(w, kernel, L) + h_d * float(np.sum(thermo.G(w, beta, n)))
