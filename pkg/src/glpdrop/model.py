"""Problem statement and the derived constants shared across modules."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from . import reduced_model as rm
from . import thermo
from .errors import DomainError
from .instanton import InstantonProfile, solve_instanton
from .kernel import DiscreteKernel, KernelSpec, make_kernel


@dataclass(frozen=True)
class ModelParams:
    """Dimension, inverse temperature, torus side, cells per axis, kernel."""

    beta: float = 2.0
    d: int = 2
    L: float = 40.0
    N: int = 320
    kernel: str = "indicator"
    instanton_Z: float = 12.0
    instanton_h: float = 1.0 / 32

    def __post_init__(self):
        if not self.L > 2:
            raise DomainError(f"L must exceed 2, got {self.L}")
        if self.L / self.N > 0.25 + 1e-15:
            raise DomainError(f"grid spacing L/N = {self.L / self.N} exceeds 1/4")

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def spec(self) -> KernelSpec:
        return KernelSpec(self.kernel, self.d)


@dataclass(eq=False)
class Model:
    """Lazily computed constants for one :class:`ModelParams`."""

    params: ModelParams
    _cache: dict = field(default_factory=dict, repr=False)

    @cached_property
    def m_beta(self) -> float:
        return thermo.solve_m_beta(self.params.beta)

    @cached_property
    def chi(self) -> float:
        return thermo.chi(self.params.beta)

    @cached_property
    def instanton(self) -> InstantonProfile:
        p = self.params
        return solve_instanton(p.beta, p.spec, Z=p.instanton_Z, h=p.instanton_h)

    @property
    def S(self) -> float:
        return self.instanton.S

    @cached_property
    def kernel(self) -> DiscreteKernel:
        return make_kernel(self.params.spec, 1.0 / self.params.h)

    @cached_property
    def K_star(self) -> float:
        return rm.k_star(self.params.d, self.m_beta, self.chi, self.S)

    @property
    def C_star(self) -> float:
        return rm.c_star(self.params.d)

    @property
    def eta_star(self) -> float:
        return rm.eta_star(self.params.d)

    def n_of_k(self, K: float) -> float:
        return rm.n_of_k(K, self.params.L, self.params.d, self.m_beta)

    def k_of_n(self, n: float) -> float:
        return rm.k_of_n(n, self.params.L, self.params.d, self.m_beta)

    def C_of_k(self, K: float) -> float:
        return rm.c_of_k(K, self.params.d, self.m_beta, self.chi, self.S)

    def eta_predicted(self, K: float) -> float:
        return rm.minimize_phi(self.C_of_k(K), self.params.d)

    def energy_predicted(self, K: float) -> float:
        p = self.params
        return rm.theorem1_rhs(K, p.L, p.d, self.m_beta, self.chi, self.S)

    def leading_term(self, K: float, eta: float) -> float:
        """Surface plus bulk cost of the fractional droplet at volume fraction ``eta``."""
        p = self.params
        return rm.surface_prefactor(K, p.L, p.d, self.m_beta, self.S) * rm.phi(eta, self.C_of_k(K), p.d)

    def D0(self, n: float) -> float:
        return rm.equimolar(n, self.params.L, self.params.d, self.m_beta)[0]
