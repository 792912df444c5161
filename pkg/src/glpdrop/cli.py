"""Command-line experiments: ``glpdrop <command> [options]``.

Exit codes: 0 success, 1 numeric failure, 2 invalid arguments or parameters.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import __version__, droplet, thermo
from . import reduced_model as rm
from .errors import DomainError, GLPError
from .field import glp_energy
from .formats import atomic_write, csv_text, fmt, json_text, mask_csv, read_field, write_field
from .minimizer import MinimizerConfig, default_etas, multi_start_sweep
from .model import Model, ModelParams
from .trial import TrialSpec, build_trial


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seeds: list = dc_field(default_factory=list)
    kernel: str = ""
    grid: dict = dc_field(default_factory=dict)
    version: str = __version__
    timestamps: dict = dc_field(default_factory=dict)
    outputs: list = dc_field(default_factory=list)

    def flat(self) -> dict:
        out = {"command": self.command, "version": self.version, "kernel": self.kernel}
        for k, v in sorted(self.parameters.items()):
            out[f"param.{k}"] = v if not isinstance(v, (list, tuple)) else ",".join(map(fmt, v))
        for k, v in self.grid.items():
            out[f"grid.{k}"] = v
        out["seeds"] = ",".join(map(str, self.seeds))
        for k, v in self.timestamps.items():
            out[f"time.{k}"] = v
        out["outputs"] = ",".join(self.outputs)
        return out


class _Run:
    """Collects outputs of one invocation and writes its manifest."""

    def __init__(self, args, cmd):
        self.args = args
        params = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()
                  if not callable(v)}
        self.manifest = RunManifest(cmd, params, kernel=getattr(args, "kernel", "") or "")
        self.manifest.seeds = [getattr(args, "seed", 0)]
        if not args.deterministic:
            self.manifest.timestamps["start"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
        self.mpath = None
        if getattr(args, "out", None):
            self.mpath = Path(str(args.out) + ".manifest.json")

    def emit(self, text: str, path=None):
        path = path or getattr(self.args, "out", None)
        if path is None:
            sys.stdout.write(text)
            return
        self.manifest.outputs.append(str(path))
        atomic_write(path, text)

    def emit_bytes(self, data_writer, path):
        self.manifest.outputs.append(str(path))
        data_writer(path)

    def finish(self):
        if self.mpath is None:
            return
        if not self.args.deterministic:
            self.manifest.timestamps["end"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
        atomic_write(self.mpath, json_text(self.manifest.flat()))

    @property
    def ref(self):
        return f"manifest={self.mpath.name}" if self.mpath else None


def _model(args) -> Model:
    N = args.N if getattr(args, "N", None) else int(round(8 * args.L))
    p = ModelParams(beta=args.beta, d=args.d, L=args.L, N=N, kernel=args.kernel)
    thermo.solve_m_beta(p.beta)
    return Model(p)


def _config(args) -> MinimizerConfig:
    return MinimizerConfig(max_iters=args.max_iters, grad_tol=args.grad_tol, seed=args.seed,
                           perturb=args.perturb)


def _svg_polyline(series, width=480, height=320, pad=30) -> str:
    xs = np.concatenate([np.asarray(s[0], float) for s in series])
    ys = np.concatenate([np.asarray(s[1], float) for s in series])
    ok = np.isfinite(xs) & np.isfinite(ys)
    x0, x1 = xs[ok].min(), xs[ok].max()
    y0, y1 = ys[ok].min(), ys[ok].max()
    sx = (width - 2 * pad) / ((x1 - x0) or 1.0)
    sy = (height - 2 * pad) / ((y1 - y0) or 1.0)
    colors = ["#1f77b4", "#d62728", "#2ca02c"]
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
             'fill="none" stroke="#888"/>']
    for k, (x, y) in enumerate(series):
        pts = " ".join(f"{pad + (a - x0) * sx:.2f},{height - pad - (b - y0) * sy:.2f}"
                       for a, b in zip(x, y) if np.isfinite(a) and np.isfinite(b))
        lines.append(f'<polyline fill="none" stroke="{colors[k % 3]}" points="{pts}"/>')
    lines.append("</svg>\n")
    return "\n".join(lines)


def cmd_constants(args, run):
    m_beta = thermo.solve_m_beta(args.beta)
    spec_model = Model(ModelParams(beta=args.beta, d=args.d, L=args.L or 40.0,
                                   N=int(round(8 * (args.L or 40.0))), kernel=args.kernel))
    out = {
        "beta": args.beta, "d": args.d, "kernel": args.kernel,
        "m_beta": m_beta, "chi": thermo.chi(args.beta), "S": spec_model.S,
        "C_star": rm.c_star(args.d), "eta_star": rm.eta_star(args.d), "K_star": spec_model.K_star,
    }
    if args.L:
        out["L"] = args.L
        out["n_c"] = rm.n_of_k(spec_model.K_star, args.L, args.d, m_beta)
    if run.ref:
        out["manifest"] = run.mpath.name
    run.emit(json_text(out))


def _scan_row(model, K, args):
    try:
        res = multi_start_sweep(model, K, config=_config(args), near_alpha=args.near_alpha)
        eta = droplet.slice_field(res.field, args.beta).eta_measured
        return (K, eta, model.eta_predicted(K), res.energy.total, model.energy_predicted(K),
                res.start_label, "ok")
    except GLPError as exc:
        return (K, float("nan"), model.eta_predicted(K), float("nan"), model.energy_predicted(K),
                "", f"{type(exc).__name__}: {exc}")


def cmd_scan(args, run):
    model = _model(args)
    unit = model.K_star if args.relative else 1.0
    kmin = args.kmin if args.kmin is not None else (0.5 if args.relative else 0.5 * model.K_star)
    kmax = args.kmax if args.kmax is not None else (2.0 if args.relative else 2.0 * model.K_star)
    Ks = sorted(np.linspace(kmin, kmax, args.steps) * unit)
    threads = int(os.environ.get("GLP_THREADS", "1") or 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(lambda K: _scan_row(model, K, args), Ks))
    else:
        rows = [_scan_row(model, K, args) for K in Ks]
    header = ["K", "eta_measured", "eta_predicted", "energy", "energy_predicted", "start_label", "status"]
    comments = [f"K_star={model.K_star!r}"] + ([run.ref] if run.ref else [])
    run.emit(csv_text(header, rows, comments))
    if args.svg:
        r = np.array([row[:2] for row in rows], float)
        p = np.array([(row[0], row[2]) for row in rows], float)
        run.emit(_svg_polyline([(r[:, 0], r[:, 1]), (p[:, 0], p[:, 1])]), args.svg)
    return 0 if all(row[-1] == "ok" for row in rows) else 1


def _report_json(rep, res=None, run=None) -> str:
    out = rep.flat()
    if res is not None:
        out.update(start_label=res.start_label, iterations=res.iterations, converged=res.converged)
    if run is not None and run.ref:
        out["manifest"] = run.mpath.name
    return json_text(out)


def cmd_minimize(args, run):
    model = _model(args)
    etas = tuple(args.eta) if args.eta else default_etas(args.d)
    res = multi_start_sweep(model, args.K, etas=etas, config=_config(args), near_alpha=args.near_alpha)
    rep = droplet.analyze(res.field, model)
    if args.out:
        run.emit_bytes(lambda p: write_field(p, res.field), args.out)
        run.emit(res.table_csv(), str(args.out) + ".starts.csv")
        run.emit(_report_json(rep, res, run), str(args.out) + ".report.json")
    else:
        sys.stdout.write(_report_json(rep, res))
    return 0


def cmd_trial(args, run):
    model = _model(args)
    eta = args.eta[0] if args.eta else model.eta_predicted(args.K)
    tr = build_trial(TrialSpec(eta, args.K), model)
    E = glp_energy(tr.field, model.kernel, args.beta)
    out = {"eta": eta, "K": args.K, "n": tr.n, "alpha": tr.alpha, "alpha_asymptotic": tr.alpha_asymptotic,
           "energy": E.total, "leading_term": model.leading_term(args.K, eta),
           "energy_predicted": model.energy_predicted(args.K)}
    if args.out:
        run.emit_bytes(lambda p: write_field(p, tr.field), args.out)
        if run.ref:
            out["manifest"] = run.mpath.name
        run.emit(json_text(out), str(args.out) + ".json")
    else:
        sys.stdout.write(json_text(out))
    return 0


def cmd_analyze(args, run):
    f = read_field(args.field)
    beta = f.beta if np.isfinite(f.beta) else args.beta
    model = Model(ModelParams(beta=beta, d=f.d, L=f.L, N=f.N, kernel=args.kernel))
    rep = droplet.analyze(f, model)
    run.emit(_report_json(rep, run=run))
    if args.mask:
        run.emit(mask_csv(droplet.droplet_mask(f, beta)), args.mask)
    return 0


def cmd_instanton(args, run):
    model = Model(ModelParams(beta=args.beta, d=args.d, kernel=args.kernel,
                              instanton_Z=args.Z, instanton_h=args.h))
    prof = model.instanton
    text = prof.to_csv()
    if run.ref:
        text = text + f"# {run.ref}\r\n"
    run.emit(text)
    if args.svg:
        run.emit(_svg_polyline([(prof.z, prof.values)]), args.svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="glpdrop", description="Droplet experiments for the non-local free energy.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, grid=True):
        p.add_argument("--beta", type=float, default=2.0)
        p.add_argument("--d", type=int, default=2, choices=(1, 2, 3))
        p.add_argument("--kernel", default="indicator", choices=("indicator", "bump"))
        p.add_argument("--out", type=Path)
        p.add_argument("--deterministic", action="store_true",
                       help="omit timestamps so repeated runs are byte-identical")
        if grid:
            p.add_argument("--L", type=float, default=40.0)
            p.add_argument("--N", type=int, help="cells per axis (default 8 L)")

    def descent(p):
        p.add_argument("--max-iters", type=int, default=20000)
        p.add_argument("--grad-tol", type=float, default=1e-6)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--perturb", type=float, default=0.0)
        p.add_argument("--near-alpha", type=float, default=None,
                       help="report starts whose energy is within this of the best")

    p = sub.add_parser("constants", help="m_beta, chi, S and the critical constants")
    common(p, grid=False)
    p.add_argument("--L", type=float)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("scan", help="minimize over a range of K")
    common(p)
    descent(p)
    p.add_argument("--kmin", type=float)
    p.add_argument("--kmax", type=float)
    p.add_argument("--steps", type=int, default=12)
    p.add_argument("--relative", action="store_true", help="kmin/kmax in units of K_star")
    p.add_argument("--svg", type=Path)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("minimize", help="multi-start minimization at one K")
    common(p)
    descent(p)
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--eta", type=float, nargs="+")
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("trial", help="trial droplet energy against the leading term")
    common(p)
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--eta", type=float, nargs=1)
    p.set_defaults(func=cmd_trial)

    p = sub.add_parser("analyze", help="droplet report of a saved field")
    p.add_argument("field", type=Path)
    p.add_argument("--beta", type=float, default=2.0, help="used when the file carries no beta")
    p.add_argument("--kernel", default="indicator", choices=("indicator", "bump"))
    p.add_argument("--out", type=Path)
    p.add_argument("--mask", type=Path)
    p.add_argument("--deterministic", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("instanton", help="planar front profile as CSV")
    common(p, grid=False)
    p.add_argument("--Z", type=float, default=12.0)
    p.add_argument("--h", type=float, default=1.0 / 32)
    p.add_argument("--svg", type=Path)
    p.set_defaults(func=cmd_instanton)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if os.environ.get("GLP_DETERMINISTIC"):
        args.deterministic = True
    run = _Run(args, args.command)
    try:
        code = args.func(args, run) or 0
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GLPError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1
    run.finish()
    return code


if __name__ == "__main__":
    sys.exit(main())
