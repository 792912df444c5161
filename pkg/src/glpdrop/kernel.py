"""Radial interaction kernels, their 1-D marginals and periodic convolution."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate

from . import _backend
from .errors import DomainError, GLPError, ResolutionError
from .reduced_model import sigma

FAMILIES = ("indicator", "bump")


def _profile(family, r):
    r = np.asarray(r, dtype=float)
    inside = r <= 1.0
    if family == "indicator":
        return inside.astype(float)
    return np.where(inside, 0.5 * (1.0 + np.cos(np.pi * np.minimum(r, 1.0))), 0.0)


@lru_cache(maxsize=None)
def _norm(family, d):
    if family == "indicator":
        return d / sigma(d)
    # int_0^1 (1 + cos(pi r))/2 r^(d-1) dr
    moment = {1: 0.5, 2: 0.25 - 1.0 / math.pi**2, 3: 1.0 / 6.0 - 1.0 / math.pi**2}[d]
    return 1.0 / (sigma(d) * moment)


@dataclass(frozen=True)
class KernelSpec:
    """Radial kernel of unit range and unit mass.

    ``indicator`` is the normalized unit-ball indicator; ``bump`` is the
    raised cosine ``(1 + cos(pi r))/2`` on the unit ball, normalized.
    """

    family: str = "indicator"
    d: int = 2

    def __post_init__(self):
        fam = {"cosine-bump": "bump"}.get(self.family, self.family)
        object.__setattr__(self, "family", fam)
        if fam not in FAMILIES:
            raise DomainError(f"unknown kernel family {self.family!r}")
        if self.d not in (1, 2, 3):
            raise DomainError(f"dimension must be 1, 2 or 3, got {self.d}")

    @property
    def norm(self) -> float:
        return _norm(self.family, self.d)

    def radial(self, r):
        return self.norm * _profile(self.family, r)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.radial(np.sqrt(np.sum(x * x, axis=-1)))

    @property
    def a(self) -> float:
        """Lower bound of J on the ball of radius 1/2."""
        return float(self.radial(0.5))


def jbar(spec: KernelSpec, z):
    """Marginal of J over the d-1 transverse coordinates."""
    z = np.abs(np.asarray(z, dtype=float))
    d = spec.d
    if d == 1:
        out = spec.radial(z)
    elif spec.family == "indicator":
        c = sigma(d - 1) / (d - 1) if d > 1 else 1.0
        out = np.where(z < 1.0, spec.norm * c * np.clip(1.0 - z * z, 0.0, None) ** ((d - 1) / 2.0), 0.0)
    else:
        out = np.array([_jbar_quad(spec, float(zz)) for zz in np.ravel(z)]).reshape(z.shape)
    return float(out) if out.ndim == 0 else out


def _jbar_quad(spec, z):
    if z >= 1.0:
        return 0.0
    d = spec.d
    top = math.sqrt(1.0 - z * z)
    val, err = integrate.quad(lambda rho: float(spec.radial(math.hypot(rho, z))) * rho ** (d - 2),
                              0.0, top, epsabs=1e-14, epsrel=1e-12, limit=200)
    if not np.isfinite(val) or err > 1e-9:
        raise GLPError(f"quadrature of the kernel marginal did not converge at z={z}")
    return sigma(d - 1) * val


@dataclass(frozen=True, eq=False)
class DiscreteKernel:
    """Kernel sampled at cell-center offsets, renormalized to unit discrete mass.

    ``stencil`` has shape ``(2R+1,)*d`` with the zero offset at index R;
    ``correction`` is the raw discrete mass before renormalization.
    """

    spec: KernelSpec
    spacing: float
    stencil: np.ndarray
    correction: float
    _fft_cache: dict = field(default_factory=dict, repr=False)

    @property
    def d(self) -> int:
        return self.spec.d

    @property
    def radius_cells(self) -> int:
        return (self.stencil.shape[0] - 1) // 2

    def offsets(self):
        """Nonzero stencil entries as (offsets, weights) with weights * h**d."""
        R = self.radius_cells
        idx = np.argwhere(self.stencil > 0)
        w = self.stencil[tuple(idx.T)] * self.spacing**self.d
        return idx - R, w

    def periodic(self, shape) -> np.ndarray:
        """The stencil wrapped onto a periodic array of ``shape`` (times h**d)."""
        arr = np.zeros(shape)
        off, w = self.offsets()
        idx = tuple((off % np.array(shape)).T)
        np.add.at(arr, idx, w)
        return arr

    def _spectrum(self, shape):
        spec = self._fft_cache.get(shape)
        if spec is None:
            spec = np.fft.rfftn(self.periodic(shape))
            self._fft_cache[shape] = spec
        return spec


def make_kernel(spec: KernelSpec, n_per_unit: float) -> DiscreteKernel:
    """Sample ``spec`` on a grid with spacing ``1/n_per_unit``."""
    h = 1.0 / float(n_per_unit)
    if h > 0.25 + 1e-15:
        raise ResolutionError(f"spacing {h} exceeds 1/4 of the kernel range")
    R = int(math.floor(1.0 / h + 1e-9))
    ax = np.arange(-R, R + 1) * h
    grids = np.meshgrid(*([ax] * spec.d), indexing="ij")
    r = np.sqrt(sum(g * g for g in grids))
    # tolerance keeps offsets lying exactly on the unit sphere
    raw = np.where(r <= 1.0 + 1e-12, spec.radial(np.minimum(r, 1.0)), 0.0)
    mass = raw.sum() * h**spec.d
    stencil = raw / mass
    stencil.setflags(write=False)
    return DiscreteKernel(spec, h, stencil, float(mass))


def _check_spacing(kernel, values, L):
    values = np.asarray(values)
    if values.ndim != kernel.d:
        raise DomainError(f"field has {values.ndim} dims, kernel has {kernel.d}")
    if L is not None:
        h = L / values.shape[0]
        if not math.isclose(h, kernel.spacing, rel_tol=1e-12):
            raise DomainError(f"field spacing {h} differs from kernel spacing {kernel.spacing}")


def convolve_values(kernel: DiscreteKernel, values, L=None, method="fft", backend=None):
    """Periodic ``(J * m)(x) = h**d sum_y J(x-y) m(y)`` on a raw array."""
    _check_spacing(kernel, values, L)
    values = np.asarray(values, dtype=float)
    if method == "fft":
        out = np.fft.irfftn(np.fft.rfftn(values) * kernel._spectrum(values.shape), s=values.shape,
                            axes=tuple(range(values.ndim)))
        return out
    if method == "direct":
        off, w = kernel.offsets()
        return _backend.stencil_sum(values, off, w, backend=backend)
    raise DomainError(f"unknown convolution method {method!r}")


def convolve(kernel: DiscreteKernel, field, method="fft", backend=None):
    """Convolve a :class:`~glpdrop.field.Field`; returns a raw array."""
    return convolve_values(kernel, field.values, field.L, method=method, backend=backend)


def marginal_from_stencil(kernel: DiscreteKernel) -> tuple[np.ndarray, np.ndarray]:
    """Discrete marginal along axis 0: ``(z, Jbar_h(z))``."""
    R = kernel.radius_cells
    st = kernel.stencil
    other = tuple(range(1, kernel.d))
    jb = st.sum(axis=other) * kernel.spacing ** (kernel.d - 1) if other else st.copy()
    return np.arange(-R, R + 1) * kernel.spacing, jb
