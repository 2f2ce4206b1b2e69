"""``spintop`` command line.

Exit codes: 0 success, 1 runtime failure, 2 bad config or arguments,
3 domain or chart violation.
"""

from __future__ import annotations

import argparse
import os
import sys
from contextlib import contextmanager

import numpy as np

from . import dynamics as dyn
from . import hessian as hs
from . import model as md
from . import noether
from . import schemas
from . import spinor as sp
from .errors import ConfigError, DomainError, SpintopError
from .io import dumps, load_config, validate, write_csv

EXIT_RUNTIME, EXIT_CONFIG, EXIT_DOMAIN = 1, 2, 3


@contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _config(args, schema, what, default=None):
    cfg = load_config(args.config) if args.config else (default or {})
    validate(cfg, schema, what)
    return cfg


# --- commands -----------------------------------------------------------------


def cmd_casimir(args) -> int:
    cfg = _config(args, schemas.CASIMIR, "casimir")
    model = md.model_from_dict(cfg["model"])
    gx, gy = cfg["grid"]["x"], cfg["grid"]["y"]
    rows = []
    for x in np.linspace(gx[0], gx[1], gx[2]):
        for y in np.linspace(gy[0], gy[1], gy[2]):
            try:
                vals = [
                    md.casimir_mass(model, x, y),
                    md.casimir_spin(model, x, y),
                    md.e_c(model, x, y),
                    md.jacobian_cmcj(model, x, y),
                    md.closed_form_hessian_factor(model, x, y),
                ]
                rows.append([x, y, *vals, "ok"])
            except DomainError as exc:
                rows.append([x, y, None, None, None, None, None, f"domain: {exc}"])
    with _output(args.out) as fh:
        write_csv(fh, ["x", "y", "C_M", "C_J", "E_C", "jacobian", "hessian_factor", "status"], rows)
    return 0


def cmd_hessian(args) -> int:
    cfg = _config(args, schemas.HESSIAN, "hessian")
    model = md.model_from_dict(cfg["model"])
    state = hs.ReducedState.from_q(cfg["state"]["q"], cfg["state"]["qdot"])
    policy = hs.StepPolicy(**cfg.get("step", {}))
    rep = hs.hessian_matrix(model, cfg.get("m", 1.0), cfg.get("ell", 1.0), state, policy, cfg.get("tau_rank", hs.DEFAULT_TAU_RANK))
    with _output(args.out) as fh:
        fh.write(dumps(rep.to_dict()))
    return 0


def cmd_fundcheck(args) -> int:
    default = {"model": {"family": args.family}} if args.family else None
    if default is None and not args.config:
        raise ConfigError("fundcheck needs a family argument or --config")
    cfg = _config(args, schemas.FUNDCHECK, "fundcheck", default)
    model = md.model_from_dict(cfg["model"])
    n = args.n if args.n is not None else cfg.get("n", 1000)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    r_m, r_j = md.fundamental_residuals(model, n, seed)
    report = {"model": model.to_dict(), "n": n, "seed": seed, "max_abs_cm_minus_1": r_m, "max_abs_cj_minus_1": r_j}
    with _output(args.out) as fh:
        fh.write(dumps(report))
    return 0


def _run_kwargs(cfg) -> dict:
    kw = {k: cfg[k] for k in ("rtol", "atol", "n_samples") if k in cfg}
    return kw


def cmd_integrate(args) -> int:
    cfg = _config(args, schemas.INTEGRATE, "integrate")
    pt0 = dyn.PhasePoint.from_dict(cfg["initial"])
    g = dyn.GaugeFunctions.from_dict(cfg["gauge"])
    tr = dyn.integrate(pt0, g, cfg["m"], cfg["ell"], tuple(cfg["span"]), **_run_kwargs(cfg))
    with _output(args.out) as fh:
        write_csv(fh, dyn.CSV_COLUMNS, dyn.trajectory_rows(tr, dyn.observables(tr)))
    return 0


def cmd_tube(args) -> int:
    cfg = _config(args, schemas.TUBE, "tube")
    if not args.out:
        raise ConfigError("tube writes a directory; pass --out DIR")
    pt0 = dyn.PhasePoint.from_dict(cfg["initial"])
    gauges = [dyn.GaugeFunctions.from_dict(g) for g in cfg["gauges"]]
    trs, rep = dyn.tube_sample(pt0, gauges, cfg["m"], cfg["ell"], tuple(cfg["span"]), **_run_kwargs(cfg))
    os.makedirs(args.out, exist_ok=True)
    for i, tr in enumerate(trs):
        with open(os.path.join(args.out, f"member_{i}.csv"), "w", encoding="utf-8", newline="") as fh:
            write_csv(fh, dyn.CSV_COLUMNS, dyn.trajectory_rows(tr, dyn.observables(tr)))
    with open(os.path.join(args.out, "tube_report.json"), "w", encoding="utf-8") as fh:
        fh.write(dumps({**rep.to_dict(), "members": len(trs), "gauges": [g.to_dict() for g in gauges]}))
    sys.stdout.write(dumps(rep.to_dict()))
    return 0


def _parse_complex(s) -> complex:
    if isinstance(s, (int, float)):
        return complex(s)
    try:
        return complex(str(s).strip().replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"not a complex number: {s!r}") from exc


def cmd_spinor(args) -> int:
    if args.spinor:
        parts = args.spinor.split(",")
        if len(parts) != 2:
            raise ConfigError("spinor needs two comma-separated components, e.g. 1,0 or 1+2i,0.5")
        cfg = {"u": parts}
    else:
        cfg = _config(args, schemas.SPINOR, "spinor")
    validate(cfg, schemas.SPINOR, "spinor")
    u = np.array([_parse_complex(c) for c in cfg["u"]])
    t = sp.flag_from_spinor(u)
    report = {
        "u": [[c.real, c.imag] for c in u],
        "k": t.k.tolist(),
        "a": t.a.tolist(),
        "b": t.b.tolist(),
        "residuals": t.residuals(),
    }
    if args.sphere:
        data = sp.riemann_sphere_data(t, cfg.get("lambdas", [-1.0, 0.0, 1.0]), cfg.get("n_points", 64))
        with open(args.sphere, "w", encoding="utf-8", newline="") as fh:
            data.to_csv(fh)
        report["sphere_csv"] = args.sphere
    with _output(args.out) as fh:
        fh.write(dumps(report))
    return 0


def cmd_dof(args) -> int:
    if args.counts:
        if len(args.counts) != 3:
            raise ConfigError("dof takes three integers: N_v N_I N_II")
        cfg = dict(zip(("n_v", "n_i", "n_ii"), args.counts))
        if args.single:
            cfg["casimir_constraints"] = 1
    else:
        cfg = _config(args, schemas.DOF, "dof")
    validate(cfg, schemas.DOF, "dof")
    lag, ham, disc = noether.dof_count(cfg["n_v"], cfg["n_i"], cfg["n_ii"], cfg.get("casimir_constraints", 2))
    with _output(args.out) as fh:
        fh.write(dumps({**cfg, "lagrangian": lag, "hamiltonian": ham, "discrepancy": disc}))
    return 0


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help='JSON config; "-" reads standard input')
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", metavar="PATH", help="output file (directory for tube); default stdout")

    ap = argparse.ArgumentParser(prog="spintop", description="Spinning-particle models: Casimir checks, Hessian rank, constrained dynamics.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("casimir", parents=[common], help="closed-form Casimirs over an (x, y) grid (CSV)").set_defaults(func=cmd_casimir)
    sub.add_parser("hessian", parents=[common], help="velocity Hessian of the reduced Lagrangian (JSON)").set_defaults(func=cmd_hessian)
    p = sub.add_parser("fundcheck", parents=[common], help="fundamental-condition residuals of a model (JSON)")
    p.add_argument("family", nargs="?", choices=sorted(md.FAMILIES))
    p.add_argument("--n", type=int, default=None)
    p.set_defaults(func=cmd_fundcheck)
    sub.add_parser("integrate", parents=[common], help="one constrained trajectory (CSV)").set_defaults(func=cmd_integrate)
    sub.add_parser("tube", parents=[common], help="trajectories for several gauges from one point").set_defaults(func=cmd_tube)
    p = sub.add_parser("spinor", parents=[common], help="null flag of a spinor (JSON)")
    p.add_argument("spinor", nargs="?", help="two complex components, e.g. 1,0")
    p.add_argument("--sphere", metavar="CSV", help="also write Riemann-sphere circle data")
    p.set_defaults(func=cmd_spinor)
    p = sub.add_parser("dof", parents=[common], help="degree-of-freedom count (JSON)")
    p.add_argument("counts", nargs="*", type=int, metavar="N")
    p.add_argument("--single", action="store_true", help="one Casimir relation instead of two fixed values")
    p.set_defaults(func=cmd_dof)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"spintop: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"spintop: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SpintopError as exc:
        print(f"spintop: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
