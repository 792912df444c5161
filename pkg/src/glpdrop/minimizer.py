"""Constrained descent of the free energy at fixed mean, with multi-start."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from . import droplet, thermo
from .errors import ConvergenceError, DomainError, GLPError, InfeasibleError
from .field import CLIP, EnergyBreakdown, Field, glp_energy
from .formats import csv_text, fmt
from .kernel import convolve_values

LO, HI = -1.0 + CLIP, 1.0 - CLIP


def default_etas(d: int) -> tuple[float, ...]:
    return (0.0, 0.2, 2.0 / (d + 1), 0.8, 1.0)


def project_values(v, n: float, tol: float = 1e-13) -> np.ndarray:
    """Least-squares projection onto ``{mean = n, LO <= v <= HI}``.

    The minimizer has the form ``clip(v + lam)``; ``lam`` is found by
    shift-then-clip iterations (a Newton step on the free cells) inside a
    bisection bracket.
    """
    if not LO < n < HI:
        raise InfeasibleError(f"mean {n} is outside the clip band")
    v = np.asarray(v, dtype=float)
    size = v.size

    def resid(lam):
        w = np.clip(v + lam, LO, HI)
        return float(w.mean()) - n, w

    lo, hi = LO - float(v.max()), HI - float(v.min())
    lam = 0.0 if lo < 0.0 < hi else 0.5 * (lo + hi)
    for _ in range(200):
        r, w = resid(lam)
        if abs(r) <= tol:
            return w
        if r > 0:
            hi = lam
        else:
            lo = lam
        free = np.count_nonzero((w > LO) & (w < HI))
        step = lam - r * size / free if free else 0.5 * (lo + hi)
        lam = step if lo < step < hi else 0.5 * (lo + hi)
        if hi - lo < 1e-300:
            break
    r, w = resid(lam)
    if abs(r) > tol:
        raise InfeasibleError(f"projection stalled with mean residual {r:.3g}")
    return w


def project(field: Field, n: float) -> Field:
    """Closest field with mean ``n`` and values in the clip band."""
    return field.with_values(project_values(field.values, n))


@dataclass
class MinimizerConfig:
    max_iters: int = 20000
    grad_tol: float = 1e-6
    energy_tol: float = 1e-13
    patience: int = 20
    armijo: float = 1e-4
    max_halvings: int = 60
    starts: Sequence = ("uniform",)
    seed: int = 0
    perturb: float = 0.0
    threads: int | None = None
    step_rule: str = "abb"

    def __post_init__(self):
        if not (self.grad_tol > 0 and self.energy_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.step_rule not in ("bb1", "bb2", "abb"):
            raise DomainError(f"unknown step rule {self.step_rule!r}")
        if self.max_iters < 1 or len(self.starts) == 0:
            raise DomainError("need max_iters >= 1 and at least one start")


@dataclass
class MinimizeResult:
    field: Field
    energy: EnergyBreakdown
    iterations: int
    converged: bool
    start_label: str
    grad_norm: float = float("nan")
    reason: str = ""
    history: list = dc_field(default_factory=list, repr=False)
    table: list = dc_field(default_factory=list, repr=False)
    near: list = dc_field(default_factory=list)
    evaluations: int = 0

    def table_csv(self) -> str:
        rows = [(lab, fmt(e), it, int(c)) for lab, e, it, c in self.table]
        return csv_text(["start_label", "energy", "iterations", "converged"], rows)


class _Problem:
    """Energy and gradient on raw arrays; one convolution per evaluation."""

    def __init__(self, kernel, beta, L):
        self.kernel, self.beta, self.L = kernel, beta, L
        self.m_beta = thermo.solve_m_beta(beta)
        self.F0 = float(thermo.F(0.0, beta, self.m_beta))
        self.evaluations = 0

    def local_sum(self, x):
        # F(m) - F(0) = [(1+m) log(1+m) + (1-m) log(1-m)] / (2 beta) - m^2/2, inside the clip band
        s = (1.0 + x) * np.log1p(x)
        s += (1.0 - x) * np.log1p(-x)
        return float(np.sum(s)) / (2.0 * self.beta) - 0.5 * float(np.dot(x.ravel(), x.ravel())) + self.F0 * x.size

    def evaluate(self, x):
        self.evaluations += 1
        Jx = convolve_values(self.kernel, x, self.L)
        mean = x.mean()
        cv = (self.L / x.shape[0]) ** x.ndim
        w = x - mean
        E = cv * self.local_sum(x) + 0.5 * cv * float(np.sum(w * (x - Jx)))
        return E, Jx

    def grad(self, x, Jx):
        g = thermo.F_prime(x, self.beta) + x - Jx
        return g - g.mean()


def descend(start: Field, kernel, beta: float, config: MinimizerConfig,
            n: float | None = None, label: str = "start") -> MinimizeResult:
    """Projected gradient descent from one start."""
    n = start.mean() if n is None else n
    prob = _Problem(kernel, beta, start.L)
    cv = start.cell_volume
    x = project_values(start.values, n)
    E, Jx = prob.evaluate(x)
    g = prob.grad(x, Jx)
    history = [E]
    t = 1.0
    stall = 0
    converged, reason, gnorm = False, "max_iters", float("inf")
    it = 0
    for it in range(1, config.max_iters + 1):
        gnorm = float(np.max(np.abs(project_values(x - g, n) - x)))
        if gnorm < config.grad_tol:
            converged, reason = True, "grad_tol"
            it -= 1
            break
        accepted = False
        for _ in range(config.max_halvings):
            xn = project_values(x - t * g, n)
            dx = xn - x
            slope = cv * float(np.sum(g * dx))
            if -slope <= config.energy_tol * abs(E):
                # predicted decrease is below the energy tolerance
                break
            En, Jn = prob.evaluate(xn)
            if En <= E + config.armijo * slope:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            if -slope <= config.energy_tol * abs(E):
                converged, reason = True, "energy_tol"
            else:
                reason = "line_search"
            it -= 1
            break
        gn = prob.grad(xn, Jn)
        s, y = dx, gn - g
        sy = float(np.sum(s * y))
        if sy > 0:
            bb1 = float(np.sum(s * s)) / sy
            bb2 = sy / float(np.sum(y * y))
            rule = config.step_rule
            if rule == "abb":
                rule = "bb2" if bb2 < 0.5 * bb1 else "bb1"
            t = bb1 if rule == "bb1" else bb2
        else:
            t = 2.0 * t
        t = min(max(t, 1e-8), 1e4)
        drop = (E - En) / max(abs(E), 1e-300)
        x, E, g = xn, En, gn
        history.append(E)
        stall = stall + 1 if drop < config.energy_tol else 0
        if stall >= config.patience:
            converged, reason = True, "energy_tol"
            break
    f = start.with_values(x)
    out = MinimizeResult(f, glp_energy(f, kernel, beta), it, converged, label,
                         gnorm, reason, history)
    out.evaluations = prob.evaluations
    return out


def _resolve_start(handle, model, n, K):
    from .trial import TrialSpec, build_trial

    p = model.params
    if isinstance(handle, Field):
        return handle, "field"
    if isinstance(handle, str):
        if handle != "uniform":
            raise DomainError(f"unknown start {handle!r}")
        return Field.uniform(n, p.N, p.L, p.d, p.beta), "uniform"
    if isinstance(handle, TrialSpec):
        return build_trial(handle, model).field, f"eta={handle.eta:.6g}"
    eta = float(handle)
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta start must lie in [0, 1], got {eta}")
    if K is None:
        K = model.k_of_n(n)
    label = "uniform" if eta == 0.0 else f"eta={eta:.6g}"
    return build_trial(TrialSpec(eta, K), model).field, label


def minimize(model, K: float | None = None, n: float | None = None,
             config: MinimizerConfig | None = None, near_alpha: float | None = None) -> MinimizeResult:
    """Best result over ``config.starts`` for mean ``n`` (or amplitude ``K``)."""
    config = config or MinimizerConfig()
    p = model.params
    if n is None:
        if K is None:
            raise DomainError("give K or n")
        n = model.n_of_k(K)
    rng = np.random.default_rng(config.seed)
    jobs = []
    for h in config.starts:
        try:
            f, label = _resolve_start(h, model, n, K)
        except GLPError as exc:
            jobs.append((None, f"{h}", exc))
            continue
        if config.perturb > 0:
            f = f.with_values(np.clip(f.values + config.perturb * rng.standard_normal(f.values.shape), LO, HI))
        jobs.append((f, label, None))

    def run(job):
        f, label, exc = job
        if f is None:
            return None
        return descend(f, model.kernel, p.beta, config, n=n, label=label)

    threads = config.threads or int(os.environ.get("GLP_THREADS", "1") or 1)
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    table = []
    done = []
    for (f, label, exc), r in zip(jobs, results):
        if r is None:
            table.append((label, float("nan"), 0, False))
        else:
            table.append((r.start_label, r.energy.total, r.iterations, r.converged))
            done.append(r)
    if not done:
        raise ConvergenceError("no start could be built", best=None)
    pool = [r for r in done if r.converged] or done
    best = min(pool, key=lambda r: r.energy.total)
    best.table = table
    if near_alpha is not None:
        best.near = [r.start_label for r in done if r.energy.total < best.energy.total + near_alpha]
    if not best.converged:
        raise ConvergenceError("no start converged", best=best)
    return best


def multi_start_sweep(model, K: float, etas: Sequence[float] | None = None,
                      config: MinimizerConfig | None = None, near_alpha: float | None = None) -> MinimizeResult:
    """Uniform start plus trial starts at each ``eta``; returns the global best."""
    etas = default_etas(model.params.d) if etas is None else tuple(etas)
    if any(not 0.0 <= e <= 1.0 for e in etas):
        raise DomainError("etas must lie in [0, 1]")
    base = config or MinimizerConfig()
    cfg = MinimizerConfig(**{**base.__dict__, "starts": etas})
    return minimize(model, K=K, config=cfg, near_alpha=near_alpha)


def eta_measured(result: MinimizeResult, beta: float) -> float:
    return droplet.slice_field(result.field, beta).eta_measured
