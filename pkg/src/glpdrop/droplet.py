"""Level-set diagnostics of a field: slicing, truncation, rearrangement, shape."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from . import _backend, thermo
from . import reduced_model as rm
from .errors import DomainError, SlicingError
from .field import EnergyBreakdown, Field, total_energy


@dataclass
class DropletReport:
    kappa: float
    h_minus: float
    h_plus: float
    vol_A: float
    vol_B: float
    vol_C: float
    R: float
    D0: float
    eta_measured: float
    asymmetry: float = float("nan")
    deficit: float = float("nan")
    energies: EnergyBreakdown | None = None

    def flat(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k != "energies"}
        if self.energies is not None:
            for k, v in asdict(self.energies).items():
                out[f"energy_{k}"] = v
        return out


def levels(beta: float, n: float) -> tuple[float, float, float]:
    """``(kappa, h_-, h_+)`` with ``kappa = (n + m_beta)**(1/3)``."""
    m_beta = thermo.solve_m_beta(beta)
    delta = n + m_beta
    if delta <= 0:
        raise SlicingError(f"n={n} is not above -m_beta")
    kappa = delta ** (1.0 / 3.0)
    if kappa >= m_beta:
        raise SlicingError(f"kappa={kappa} >= m_beta={m_beta}")
    return kappa, -m_beta + kappa, m_beta - kappa


def partition(values, h_minus, h_plus):
    """Masks ``(A, B, C)``; cells exactly at a level go to B or C."""
    v = np.asarray(values)
    B = v <= h_minus
    C = v >= h_plus
    A = ~(B | C)
    return A, B, C


def slice_field(field: Field, beta: float, K: float | None = None, n: float | None = None,
                with_shape: bool = False) -> DropletReport:
    """Measure A/B/C volumes; ``K`` (critical-scaling amplitude) or ``n`` sets the levels.

    Without either, ``n`` is the field mean.
    """
    if not beta > 1:
        raise DomainError(f"beta must exceed 1, got {beta}")
    m_beta = thermo.solve_m_beta(beta)
    d, L = field.d, field.L
    if n is None:
        n = rm.n_of_k(K, L, d, m_beta) if K is not None else field.mean()
    kappa, h_minus, h_plus = levels(beta, n)
    A, B, C = partition(field.values, h_minus, h_plus)
    cv = field.cell_volume
    counts = [int(A.sum()), int(B.sum()), int(C.sum())]
    vA, vB, vC = (c * cv for c in counts)
    D0 = rm.equimolar(n, L, d, m_beta)[0]
    rep = DropletReport(kappa, h_minus, h_plus, vA, vB, vC, rm.ball_radius(vC, d), D0,
                        vC / D0 if D0 > 0 else float("nan"))
    if with_shape and counts[2] > 0:
        rep.asymmetry = fraenkel_asymmetry(C, L)
        rep.deficit = isoperimetric_deficit(C, L)
    return rep


def droplet_mask(field: Field, beta: float, n: float | None = None):
    n = field.mean() if n is None else n
    _, h_minus, h_plus = levels(beta, n)
    return partition(field.values, h_minus, h_plus)[2]


@dataclass(frozen=True, eq=False)
class Truncation:
    field: Field
    upper: float
    lower: float
    feasible: bool
    changed: bool
    partition_preserved: bool


def truncate_profile(field: Field, beta: float, n: float | None = None) -> Truncation:
    """Clamp at ``n + omega_star`` and raise the lowest values to restore the mean."""
    n = field.mean() if n is None else n
    if abs(field.mean() - n) > 1e-12:
        raise DomainError(f"field mean {field.mean()} differs from n={n}")
    _, _, w_star = thermo.g_roots(beta, n)
    upper = n + w_star
    v = field.values
    top = np.minimum(v, upper)
    removed = float(np.sum(v - top))
    if removed <= 0.0:
        return Truncation(field, upper, float(v.min()), True, False, True)

    def raised(a):
        return float(np.sum(np.maximum(a - top, 0.0)))

    lo, hi = float(top.min()), n
    if raised(hi) < removed:
        return Truncation(field, upper, float("nan"), False, False, True)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if raised(mid) < removed:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(hi)):
            break
    a = 0.5 * (lo + hi)
    out = np.maximum(top, a)
    new = field.with_values(out)
    _, h_minus, h_plus = levels(beta, n)
    before = partition(v, h_minus, h_plus)
    after = partition(out, h_minus, h_plus)
    same = all(np.array_equal(x, y) for x, y in zip(before, after))
    return Truncation(new, upper, a, True, True, same)


def _center_index(values):
    flat = int(np.argmax(values))  # first maximum in C order
    return np.unravel_index(flat, values.shape)


def rearrangement_order(shape, center):
    """Cell linear indices ordered by distance from ``center`` (circular in 1-D)."""
    N = shape[0]
    if len(shape) == 1:
        c = int(center[0])
        seq = [c]
        for k in range(1, N):
            seq.append((c + (k + 1) // 2 * (1 if k % 2 else -1)) % N)
        return np.array(seq)
    idx = np.indices(shape).reshape(len(shape), -1)
    r2 = np.zeros(idx.shape[1])
    for ax in range(len(shape)):
        dx = (idx[ax] - center[ax] + N // 2) % N - N // 2
        r2 += dx.astype(float) ** 2
    return np.argsort(r2, kind="stable")


def rearrange_decreasing(field: Field) -> Field:
    """Decreasing rearrangement about the cell holding the maximum value."""
    v = field.values
    order = rearrangement_order(v.shape, _center_index(v))
    out = np.empty(v.size)
    out[order] = np.sort(v.ravel())[::-1]
    return field.with_values(out.reshape(v.shape))


def extend_with_background(field: Field, h_minus: float, ranges: int = 2) -> Field:
    """Embed the cube in a box enlarged by ``ranges`` kernel ranges per side.

    New cells hold ``h_minus``. The enlarged box is returned as a periodic
    field; its wrap-around pairs are all background pairs and contribute nothing.
    """
    P = int(math.ceil(ranges / field.h - 1e-9))
    v = np.pad(field.values, P, mode="constant", constant_values=h_minus)
    return Field(v, field.L + 2 * P * field.h, field.beta)


def _ball_offsets(r_cells, d):
    R = int(math.floor(r_cells))
    ax = np.arange(-R, R + 1)
    grids = np.meshgrid(*([ax] * d), indexing="ij")
    r2 = sum(g.astype(float) ** 2 for g in grids)
    sel = r2 <= r_cells * r_cells + 1e-9
    return np.stack([g[sel] for g in grids], axis=1)


def ball_overlaps(mask, r_cells, method="fft", backend=None):
    """For every cell center c, the number of set cells within ``r_cells`` of c."""
    mask = np.asarray(mask, dtype=bool)
    off = _ball_offsets(r_cells, mask.ndim)
    if method == "direct":
        out = _backend.stencil_sum(mask.astype(float), -off, np.ones(len(off)), backend=backend)
    else:
        ball = np.zeros(mask.shape)
        np.add.at(ball, tuple((off % mask.shape[0]).T), 1.0)
        out = np.fft.irfftn(np.fft.rfftn(mask.astype(float)) * np.conj(np.fft.rfftn(ball)),
                            s=mask.shape, axes=tuple(range(mask.ndim)))
    return np.rint(out).astype(np.int64), len(off)


def fraenkel_asymmetry(mask, L: float, method="fft", backend=None) -> float:
    """``min_x |E sym-diff B(r, x)| / |E|`` over cell-center ball positions."""
    mask = np.asarray(mask, dtype=bool)
    count = int(mask.sum())
    if count == 0:
        raise DomainError("asymmetry of an empty set is undefined")
    d, N = mask.ndim, mask.shape[0]
    h = L / N
    r = rm.ball_radius(count * h**d, d)
    overlaps, ball_count = ball_overlaps(mask, r / h, method=method, backend=backend)
    best = int(overlaps.max())
    return (count + ball_count - 2 * best) / count


def perimeter(mask, L: float) -> float:
    """Exposed cell faces times ``h**(d-1)`` (periodic); biased upward for curved sets."""
    mask = np.asarray(mask, dtype=bool)
    h = L / mask.shape[0]
    faces = sum(int(np.count_nonzero(mask != np.roll(mask, 1, axis=ax))) for ax in range(mask.ndim))
    return faces * h ** (mask.ndim - 1)


def isoperimetric_deficit(mask, L: float) -> float:
    """Relative perimeter excess over the ball of equal volume; nan when P = 0."""
    mask = np.asarray(mask, dtype=bool)
    count = int(mask.sum())
    if count == 0:
        raise DomainError("deficit of an empty set is undefined")
    d = mask.ndim
    vol = count * (L / mask.shape[0]) ** d
    P = perimeter(mask, L)
    if P == 0.0:
        return float("nan")
    ball = d ** ((d - 1) / d) * rm.sigma(d) ** (1.0 / d) * vol ** ((d - 1) / d)
    return P / ball - 1.0


def analyze(field: Field, model, K: float | None = None, with_shape: bool = True) -> DropletReport:
    """Full report for a field under ``model`` (energies included)."""
    from .field import glp_energy

    rep = slice_field(field, model.params.beta, K=K, with_shape=with_shape)
    rep.energies = glp_energy(field, model.kernel, model.params.beta)
    return rep
