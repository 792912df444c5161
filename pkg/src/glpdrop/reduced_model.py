"""Volume-fraction ansatz: equimolar droplet, bulk/surface ratio C, Phi(eta).

All functions are closed-form except :func:`minimize_phi`, which brackets the
interior stationary point of ``eta**(1-1/d) + C (1-eta)**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, ParameterError


def sigma(d: int) -> float:
    """Surface area of the unit sphere in R^d (``sigma_1 = 2``)."""
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def ball_volume(r: float, d: int) -> float:
    return sigma(d) / d * r**d


def ball_radius(volume: float, d: int) -> float:
    return (d * volume / sigma(d)) ** (1.0 / d)


@dataclass(frozen=True)
class GeometryParams:
    d: int
    L: float

    def __post_init__(self):
        if self.d < 1:
            raise DomainError(f"dimension must be >= 1, got {self.d}")
        if not self.L > 2:
            raise DomainError(f"L must exceed 2 kernel ranges, got {self.L}")

    @property
    def sigma_d(self) -> float:
        return sigma(self.d)


@dataclass(frozen=True)
class ReducedModel:
    D0: float
    r0: float
    C: float
    S: float
    eta_c: float


def _check_positive(**kw):
    for name, v in kw.items():
        if not v > 0:
            raise ParameterError(f"{name} must be positive, got {v}")


def equimolar(n: float, L: float, d: int, m_beta: float) -> tuple[float, float]:
    """Equimolar volume and radius for mean ``n``."""
    if not -m_beta <= n < m_beta:
        raise DomainError(f"n={n} outside the phase gap [-m_beta, m_beta)")
    D0 = (n + m_beta) / (2.0 * m_beta) * L**d
    return D0, ball_radius(D0, d)


def c_of_d0(D0, L, d, m_beta, chi, S) -> float:
    _check_positive(chi=chi, S=S)
    if D0 < 0:
        raise ParameterError(f"D0 must be nonnegative, got {D0}")
    return (
        (2.0 * m_beta) ** 2 / (2.0 * d * chi * S)
        * (d / sigma(d)) ** (1.0 / d)
        * D0 ** (1.0 + 1.0 / d)
        / L**d
    )


def c_of_k(K, d, m_beta, chi, S) -> float:
    _check_positive(chi=chi, S=S)
    if K < 0:
        raise ParameterError(f"K must be nonnegative, got {K}")
    return (
        2.0 * m_beta**2 / (d * chi * S)
        * (d / sigma(d)) ** (1.0 / d)
        * (K / (2.0 * m_beta)) ** (1.0 + 1.0 / d)
    )


def c_star(d: int) -> float:
    return (1.0 / d) * ((d + 1) / 2.0) ** ((d + 1) / d)


def eta_star(d: int) -> float:
    return 2.0 / (d + 1)


def phi(eta, C, d):
    """Normalized reduced free energy ``eta**(1-1/d) + C (1-eta)**2``."""
    eta = np.asarray(eta, dtype=float)
    surface = np.where(eta > 0, np.abs(eta) ** (1.0 - 1.0 / d), 0.0)
    out = surface + C * (1.0 - eta) ** 2
    return float(out) if out.ndim == 0 else out


def phi_minimizers(C: float, d: int) -> list[float]:
    """Global minimizers of :func:`phi` on [0, 1]; two entries at a tie."""
    if C < 0:
        raise ParameterError(f"C must be nonnegative, got {C}")
    if d == 1:
        # eta**0 = 1 for eta > 0 but the droplet term vanishes at eta = 0
        # only in the limit; phi is then 1 + C(1-eta)^2 on (0,1], minimized at 1
        return [0.0] if C < 1.0 else ([0.0, 1.0] if C == 1.0 else [1.0])
    cs = c_star(d)
    if C == 0.0:
        return [0.0]
    res = minimize_scalar(
        lambda e: phi(e, C, d), bounds=(eta_star(d) * 0.5, 1.0), method="bounded",
        options={"xatol": 1e-13},
    )
    eta_int = float(res.x)
    p0, p1 = phi(0.0, C, d), phi(eta_int, C, d)
    if math.isclose(C, cs, rel_tol=1e-12):
        return [0.0, eta_star(d)]
    if C < cs:
        return [0.0]
    return [eta_int] if p1 < p0 else [0.0]


def minimize_phi(C: float, d: int) -> float:
    """Optimal volume fraction; at the tie the droplet branch is returned."""
    return max(phi_minimizers(C, d))


def phi_min(C: float, d: int) -> float:
    return phi(minimize_phi(C, d), C, d)


def k_star(d, m_beta, chi, S) -> float:
    # solves c_of_k(K) = c_star(d) exactly
    _check_positive(chi=chi, S=S)
    return (
        (d + 1) * m_beta
        * (chi * S / (2.0 * m_beta**2)) ** (d / (d + 1.0))
        * (sigma(d) / d) ** (1.0 / (d + 1.0))
    )


def n_of_k(K, L, d, m_beta) -> float:
    """Critical-scaling mean ``-m_beta + K L**(-d/(d+1))``."""
    return -m_beta + K * L ** (-d / (d + 1.0))


def k_of_n(n, L, d, m_beta) -> float:
    return (n + m_beta) * L ** (d / (d + 1.0))


def n_critical(L, d, m_beta, chi, S) -> float:
    return n_of_k(k_star(d, m_beta, chi, S), L, d, m_beta)


def surface_prefactor(K, L, d, m_beta, S) -> float:
    """Surface energy of the equimolar ball, ``S sigma_d r0**(d-1)``."""
    sd = sigma(d)
    return L ** ((d * d - d) / (d + 1.0)) * S * sd * (K * d / (2.0 * m_beta * sd)) ** (1.0 - 1.0 / d)


def theorem1_rhs(K, L, d, m_beta, chi, S) -> float:
    """Predicted minimal free energy at ``n = -m_beta + K L**(-d/(d+1))``."""
    C = c_of_k(K, d, m_beta, chi, S)
    return surface_prefactor(K, L, d, m_beta, S) * phi_min(C, d)


def reduced_model(n, L, d, m_beta, chi, S) -> ReducedModel:
    D0, r0 = equimolar(n, L, d, m_beta)
    C = c_of_d0(D0, L, d, m_beta, chi, S)
    return ReducedModel(D0, r0, C, S, minimize_phi(C, d))
