"""Fractional-droplet trial fields ``m0(|x - c| - r_eta) + alpha``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import reduced_model as rm
from .errors import GeometryError, SaturationError
from .field import CLIP, Field
from .instanton import InstantonProfile
from .model import Model


def smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


@dataclass(frozen=True, eq=False)
class M0Profile:
    """Front profile that equals the instanton near 0 and the bulk values far away."""

    instanton: InstantonProfile
    collar: float

    @property
    def m_beta(self) -> float:
        return self.instanton.m_beta

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        bulk = -self.m_beta * np.sign(z)
        s = smoothstep((np.abs(z) - self.collar) / self.collar)
        return (1.0 - s) * self.instanton(z) + s * bulk


def build_m0(instanton: InstantonProfile, L: float, d: int) -> M0Profile:
    collar = L ** ((d - 1) / (d + 1.0))
    if collar < 2.0:
        raise GeometryError(f"collar L^((d-1)/(d+1)) = {collar} is below 2")
    return M0Profile(instanton, collar)


@dataclass(frozen=True)
class TrialSpec:
    eta: float
    K: float
    center: tuple | None = None


def min_image(field_like_coords, center, L):
    """Minimum-image distance on the torus from ``center``."""
    r2 = 0.0
    for x, c in zip(field_like_coords, center):
        dx = (x - c + 0.5 * L) % L - 0.5 * L
        r2 = r2 + dx * dx
    return np.sqrt(r2)


@dataclass(frozen=True, eq=False)
class Trial:
    field: Field
    alpha: float
    alpha_asymptotic: float
    r_eta: float
    r0: float
    n: float


def alpha_asymptotic(eta, r0, L, d, m_beta) -> float:
    return 2.0 * m_beta * rm.sigma(d) / d * r0**d / L**d * (1.0 - eta)


def build_trial(spec: TrialSpec, model: Model, m0: M0Profile | None = None) -> Trial:
    p = model.params
    n = model.n_of_k(spec.K)
    _, r0 = rm.equimolar(n, p.L, p.d, model.m_beta)
    r_eta = spec.eta ** (1.0 / p.d) * r0
    asym = alpha_asymptotic(spec.eta, r0, p.L, p.d, model.m_beta)
    if spec.eta == 0.0:
        # no droplet: the background carries all of the excess
        f = Field.uniform(n, p.N, p.L, p.d, p.beta)
        return Trial(f, n + model.m_beta, asym, 0.0, r0, n)
    m0 = m0 or build_m0(model.instanton, p.L, p.d)
    if not 2.0 * (r_eta + 2.0 * m0.collar) < p.L:
        raise GeometryError(
            f"droplet of radius {r_eta:.3f} with collar {m0.collar:.3f} does not fit in L={p.L}"
        )
    center = spec.center if spec.center is not None else (0.5 * p.L,) * p.d
    coords = (np.arange(p.N) + 0.5) * p.h
    grids = np.meshgrid(*([coords] * p.d), indexing="ij")
    base = m0(min_image(grids, center, p.L) - r_eta)
    alpha = n - float(base.mean())
    values = base + alpha
    if np.max(values) > 1.0 - CLIP or np.min(values) < -1.0 + CLIP:
        raise SaturationError(f"alpha={alpha} pushes the trial field out of the clip band")
    # remove the last rounding bit of the mean
    values = values + (n - values.mean())
    return Trial(Field(values, p.L, p.beta), alpha, asym, r_eta, r0, n)
