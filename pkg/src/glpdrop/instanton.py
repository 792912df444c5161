"""Planar front between the two phases and the surface tension S.

The front solves the Euler-Lagrange fixed point ``m = tanh(beta Jbar*m)`` on
``[-Z, Z]`` with the two bulk values padded outside; the zero crossing is kept
at the origin by recentering after every sweep.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import thermo
from .errors import ConvergenceError, DomainError, NoDoubleWellError, StateError
from .formats import csv_text, fmt
from .kernel import KernelSpec, jbar


@dataclass(frozen=True, eq=False)
class InstantonProfile:
    z: np.ndarray
    values: np.ndarray
    S: float
    beta: float
    m_beta: float
    spec: KernelSpec
    h: float
    Z: float
    iterations: int
    step: float
    residual: float
    converged: bool

    def __call__(self, z):
        """Profile at arbitrary ``z``; bulk values beyond ``[-Z, Z]``."""
        return np.interp(z, self.z, self.values, left=self.m_beta, right=-self.m_beta)

    def to_csv(self) -> str:
        return csv_text(["z", "m"], zip(self.z, self.values), comments=[f"S={fmt(self.S)}"])


def _grid(Z, h):
    n = int(round(2 * Z / h))
    if not math.isclose(n * h, 2 * Z, rel_tol=1e-12):
        raise DomainError(f"2Z={2 * Z} is not a multiple of h={h}")
    return -Z + (np.arange(n) + 0.5) * h


def marginal_weights(spec: KernelSpec, h: float) -> np.ndarray:
    """Jbar sampled at offsets ``k h``, ``|k h| <= 1``, renormalized to unit mass."""
    R = int(math.floor(1.0 / h + 1e-9))
    w = np.asarray(jbar(spec, np.arange(-R, R + 1) * h), dtype=float)
    return w / (w.sum() * h)


def _pad(values, m_beta, width):
    return np.concatenate([np.full(width, m_beta), values, np.full(width, -m_beta)])


def _sweep(values, w, beta, m_beta, h):
    R = (len(w) - 1) // 2
    conv = np.convolve(_pad(values, m_beta, R), w * h, mode="valid")
    return np.tanh(beta * conv)


def zero_crossing(z, values) -> float:
    i = int(np.argmax(values <= 0.0))
    if i == 0:
        return float(z[0])
    z0, z1, v0, v1 = z[i - 1], z[i], values[i - 1], values[i]
    return float(z0 + v0 * (z1 - z0) / (v0 - v1))


def _recenter(z, values, m_beta):
    c = zero_crossing(z, values)
    if abs(c) < 1e-15:
        return values
    return np.interp(z + c, z, values, left=m_beta, right=-m_beta)


def front_energy(values, w, beta, m_beta, h) -> float:
    """``int F(m) + (1/4) int int (m(z)-m(z'))^2 Jbar(z-z')`` with bulk padding."""
    R = (len(w) - 1) // 2
    local = h * float(np.sum(thermo.F(values, beta, m_beta)))
    ext = _pad(values, m_beta, 2 * R)
    M = len(values) + 2 * R
    base = ext[R:R + M]
    inter = 0.0
    for k in range(-R, R + 1):
        if k == 0 or w[k + R] == 0.0:
            continue
        diff = ext[R + k:R + k + M] - base
        inter += w[k + R] * float(np.dot(diff, diff))
    return local + 0.25 * h * h * inter


def solve_instanton(beta: float, spec: KernelSpec | None = None, Z: float = 12.0,
                    N1: int | None = None, h: float | None = None, tol: float = 1e-12,
                    max_iter: int = 200000, symmetrize: bool = False,
                    record=None) -> InstantonProfile:
    """Iterate the front equation from the sign step ``-m_beta sgn(z)``.

    ``h`` defaults to 1/32 (or ``2Z/N1`` when ``N1`` is given). With
    ``symmetrize`` every iterate is projected onto odd functions instead of
    being recentered. ``record`` (a list) collects every iterate.
    """
    if not beta > 1:
        raise NoDoubleWellError(f"no front for beta={beta} (need beta > 1)")
    spec = spec or KernelSpec("indicator", 2)
    if h is None:
        h = 2.0 * Z / N1 if N1 is not None else 1.0 / 32.0
    if Z < 8:
        raise DomainError(f"Z={Z} too small (need Z >= 8)")
    if h > 1.0 / 16 + 1e-15:
        raise DomainError(f"h={h} too coarse (need h <= 1/16)")
    m_beta = thermo.solve_m_beta(beta)
    z = _grid(Z, h)
    w = marginal_weights(spec, h)
    m = -m_beta * np.sign(z)
    step = math.inf
    it = 0
    if record is not None:
        record.append(m.copy())
    while it < max_iter:
        new = _sweep(m, w, beta, m_beta, h)
        if symmetrize:
            new = 0.5 * (new - new[::-1])
        else:
            new = _recenter(z, new, m_beta)
        step = float(np.max(np.abs(new - m)))
        m = new
        it += 1
        if record is not None:
            record.append(m.copy())
        if step < tol:
            break
    residual = float(np.max(np.abs(m - _sweep(m, w, beta, m_beta, h))))
    converged = step < tol
    S = front_energy(m, w, beta, m_beta, h)
    prof = InstantonProfile(z, m, S, beta, m_beta, spec, h, Z, it, step, residual, converged)
    if not converged:
        raise ConvergenceError(f"front iteration stalled at step {step:.3e} after {it} sweeps", prof)
    return prof


def surface_tension(profile: InstantonProfile) -> float:
    if not profile.converged:
        raise StateError("surface tension of an unconverged profile")
    w = marginal_weights(profile.spec, profile.h)
    return front_energy(profile.values, w, profile.beta, profile.m_beta, profile.h)
