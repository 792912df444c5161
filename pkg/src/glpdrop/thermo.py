"""Local free energy of the lattice gas and its tilted potential.

The local term is ``f(m) = -s(m)/beta`` with ``s`` the lattice gas entropy;
``F`` is the double well ``f(m) - m**2/2`` shifted so that ``F(+-m_beta) = 0``.
All functions accept scalars or numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .errors import ConvexityLossError, DomainError, NoDipError, NoDoubleWellError

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class ThermoParams:
    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class ThermoConstants:
    beta: float
    m_beta: float
    chi: float
    chi_minus: float | None = None
    omega_minus: float | None = None
    omega_plus: float | None = None
    omega_star: float | None = None


def _xlogx(x):
    return xlogy(x, x)


def _check_closed(m):
    m = np.asarray(m, dtype=float)
    if not np.all(np.abs(m) <= 1.0):
        raise DomainError("magnetization must lie in [-1, 1]")
    return m


def _check_open(m):
    m = np.asarray(m, dtype=float)
    if not np.all(np.abs(m) < 1.0):
        raise DomainError("derivatives of F are singular at |m| = 1")
    return m


def _scalar(x, like):
    return float(x) if np.ndim(like) == 0 else x


def entropy(m):
    """Lattice gas entropy, continuous at the endpoints ``m = +-1``."""
    mm = _check_closed(m)
    s = -_xlogx((1.0 - mm) / 2.0) - _xlogx((1.0 + mm) / 2.0)
    return _scalar(s, m)


def _require_double_well(beta):
    if not beta > 1.0:
        raise NoDoubleWellError(f"no double well for beta={beta} (need beta > 1)")


def solve_m_beta(beta: float) -> float:
    """Positive root of ``m = tanh(beta m)``: bisection, then Newton polish."""
    _require_double_well(beta)
    g = lambda m: m - math.tanh(beta * m)
    # g < 0 on (0, m_beta) and g(1) > 0
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    m = 0.5 * (lo + hi)
    for _ in range(5):
        t = math.tanh(beta * m)
        dg = 1.0 - beta * (1.0 - t * t)
        if dg == 0:
            break
        step = (m - t) / dg
        m -= step
        if abs(step) < 1e-17:
            break
    return m


def _bulk(m, beta):
    return -entropy(m) / beta - np.asarray(m, dtype=float) ** 2 / 2.0


def F(m, beta: float, m_beta: float | None = None):
    """Shifted double well, zero exactly at ``+-m_beta``."""
    _require_double_well(beta)
    if m_beta is None:
        m_beta = solve_m_beta(beta)
    mm = _check_closed(m)
    out = _bulk(mm, beta) - _bulk(m_beta, beta)
    return _scalar(out, m)


def F_prime(m, beta: float):
    mm = _check_open(m)
    out = np.arctanh(mm) / beta - mm
    return _scalar(out, m)


def F_double_prime(m, beta: float):
    mm = _check_open(m)
    out = 1.0 / (beta * (1.0 - mm * mm)) - 1.0
    return _scalar(out, m)


def F_triple_prime(m, beta: float):
    mm = _check_open(m)
    out = 2.0 * mm / (beta * (1.0 - mm * mm) ** 2)
    return _scalar(out, m)


def chi(beta: float) -> float:
    """Compressibility ``1/F''(m_beta)``."""
    return 1.0 / F_double_prime(solve_m_beta(beta), beta)


def chi_minus(beta: float, kappa: float) -> float:
    """Compressibility at the lower slicing level ``h_- = -m_beta + kappa``."""
    m_beta = solve_m_beta(beta)
    if not 0.0 < kappa < m_beta:
        raise DomainError(f"kappa must lie in (0, m_beta={m_beta}), got {kappa}")
    curv = F_double_prime(-m_beta + kappa, beta)
    if curv <= 0:
        raise ConvexityLossError(f"F''(h_-) = {curv} <= 0 for kappa={kappa}")
    return 1.0 / curv


def spinodal(beta: float) -> float:
    """Positive zero of F'' (the edge of the concave region)."""
    _require_double_well(beta)
    return math.sqrt(1.0 - 1.0 / beta)


def G(omega, beta: float, n: float, m_beta: float | None = None):
    """Tilted potential ``F(n+w) - F(n) - F'(n) w``."""
    if m_beta is None:
        m_beta = solve_m_beta(beta)
    w = np.asarray(omega, dtype=float)
    out = F(n + w, beta, m_beta) - F(n, beta, m_beta) - F_prime(n, beta) * w
    return _scalar(out, omega)


def _bisect(fun, lo, hi, tol=1e-15, maxiter=300):
    flo = fun(lo)
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def _newton(fun, dfun, x, lo, hi, steps=6):
    for _ in range(steps):
        d = dfun(x)
        if d == 0:
            break
        nx = x - fun(x) / d
        if not lo < nx < hi:
            break
        if abs(nx - x) < 1e-17:
            x = nx
            break
        x = nx
    return x


def g_roots(beta: float, n: float) -> tuple[float, float, float]:
    """Return ``(omega_minus, omega_plus, omega_star)`` of the tilted potential.

    Valid for ``n`` in the metastable window ``(-m_beta, -spinodal)`` where G
    has a local minimum at 0 and a negative dip near ``2 m_beta``. When the
    dip extends to the saturation point (moderate ``n + m_beta``), the upper
    zero is reported as ``1 - n``.
    """
    m_beta = solve_m_beta(beta)
    m_sp = spinodal(beta)
    if not -m_beta < n < -m_sp:
        raise NoDipError(
            f"n={n} outside the dip regime (-m_beta, -m_sp) = ({-m_beta}, {-m_sp})"
        )
    fp_n = F_prime(n, beta)
    # F' is increasing on (m_sp, 1); F'(m_beta) = 0 < F'(n)
    dF = lambda m: F_prime(m, beta) - fp_n
    top = 1.0 - 1e-16
    m_star = _bisect(dF, m_beta, top)
    m_star = _newton(dF, lambda m: F_double_prime(m, beta), m_star, m_sp, 1.0)
    # middle root of F'(m) = F'(n): G has its local max there
    m_mid = _bisect(dF, -m_sp, m_sp)
    g = lambda m: G(m - n, beta, n, m_beta)
    dg = lambda m: F_prime(m, beta) - fp_n
    if not g(m_star) < 0:
        raise NoDipError(f"G(omega_star) = {g(m_star)} is not negative")
    if not g(m_mid) > 0:
        raise NoDipError("G has no positive barrier between 0 and the dip")
    m_lo = _bisect(g, m_mid, m_star)
    m_lo = _newton(g, dg, m_lo, m_mid, m_star)
    if G(1.0 - n, beta, n, m_beta) > 0:
        m_hi = _bisect(g, m_star, 1.0)
        m_hi = _newton(g, dg, m_hi, m_star, 1.0)
    else:
        # dip reaches saturation: G < 0 on all of (omega_minus, 1 - n]
        m_hi = 1.0
    return m_lo - n, m_hi - n, m_star - n


def constants(beta: float, kappa: float | None = None, n: float | None = None) -> ThermoConstants:
    """Bundle the scalar constants; the optional ones need ``kappa`` / ``n``."""
    m_beta = solve_m_beta(beta)
    c = 1.0 / F_double_prime(m_beta, beta)
    cm = chi_minus(beta, kappa) if kappa is not None else None
    roots = g_roots(beta, n) if n is not None else (None, None, None)
    return ThermoConstants(beta, m_beta, c, cm, *roots)
