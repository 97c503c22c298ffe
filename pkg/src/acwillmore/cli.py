"""Command line front end.

Subcommands mirror the library operations: single evaluations (``adm``,
``com``, ``hawking``, ``g-eval``), solver drivers (``critical-point``,
``trace``, ``scan``) and the canned experiment runner (``experiment``).
Results are printed as JSON with sorted keys; ``experiment`` also writes
``result.json``, ``traces.csv`` and ``scan.csv`` under the output
directory and exits nonzero when any recorded assertion fails.

``--threads`` caps the BLAS/OpenMP thread pools.  It is honored by
peeking at the raw argument list before anything numerical is imported,
which is why all heavy imports in this module live inside the command
handlers.  Output is expected to be byte-identical (timestamp aside)
whatever the thread count; the integration kernels use fixed-order
reductions precisely so this holds.
"""

from __future__ import annotations

import argparse
import json
import os
import pathlib
import sys

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS")


def _apply_threads_env(argv):
    """Set thread-pool env vars from ``--threads`` before numpy loads."""
    value = None
    for i, tok in enumerate(argv):
        if tok == "--threads" and i + 1 < len(argv):
            value = argv[i + 1]
        elif tok.startswith("--threads="):
            value = tok.split("=", 1)[1]
    if value is None:
        return
    try:
        n = int(value)
    except ValueError:
        return  # argparse will report it properly
    if n > 0:
        for var in _THREAD_VARS:
            os.environ[var] = str(n)


def _parse_vec(text):
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"expected three comma separated numbers, got {text!r}")
    return tuple(float(p) for p in parts)


def _parse_resolution(text):
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(
            f"expected 'n_polar,n_azimuth', got {text!r}")
    return int(parts[0]), int(parts[1])


def _parse_lams(text):
    parts = [p for p in text.replace(",", " ").split() if p]
    if not parts:
        raise argparse.ArgumentTypeError("expected a list of radii")
    return tuple(float(p) for p in parts)


def _detuple(obj):
    """JSON arrays arrive as lists; the model constructors want tuples."""
    if isinstance(obj, list):
        return tuple(_detuple(v) for v in obj)
    if isinstance(obj, dict):
        return {k: _detuple(v) for k, v in obj.items()}
    return obj


def _default_out():
    return os.environ.get("ACWILLMORE_OUT", os.getcwd())


def _emit(doc):
    print(json.dumps(doc, indent=2, sort_keys=True))


def _build_model(args):
    from .metrics import make_model

    params = {}
    if getattr(args, "model_params", None):
        params = _detuple(json.loads(args.model_params))
        if not isinstance(params, dict):
            raise SystemExit("--model-params must be a JSON object")
    return make_model(args.model, **params)


def _resolution_kwargs(args):
    kw = {}
    if getattr(args, "resolution", None):
        kw["n_polar"], kw["n_azimuth"] = args.resolution
    return kw


def _add_model_args(sub):
    sub.add_argument("--model", default="schwarzschild",
                     help="catalog metric name (default: schwarzschild)")
    sub.add_argument("--model-params", default="",
                     help="JSON object of model constructor arguments")


def _add_common_args(sub):
    sub.add_argument("--threads", type=int, default=None,
                     help="cap BLAS/OpenMP threads (applied before numpy "
                          "is imported)")
    sub.add_argument("--resolution", type=_parse_resolution, default=None,
                     metavar="NP,NA",
                     help="override sphere quadrature as 'n_polar,n_azimuth'")


# ---------------------------------------------------------------------------
# handlers


def _cmd_adm(args):
    from .flux import adm_mass

    model = _build_model(args)
    mass = adm_mass(model, args.lam, extrapolate=not args.raw,
                    **_resolution_kwargs(args))
    _emit({"adm_mass": mass, "lam": args.lam,
           "extrapolated": not args.raw, "model": args.model})
    return 0


def _cmd_com(args):
    from .flux import adm_mass, hamiltonian_com

    model = _build_model(args)
    kw = _resolution_kwargs(args)
    mass = adm_mass(model, args.lam, **kw)
    center = hamiltonian_com(model, args.lam, mass=mass,
                             extrapolate=not args.raw, **kw)
    _emit({"center": list(map(float, center)), "mass": mass,
           "lam": args.lam, "extrapolated": not args.raw,
           "model": args.model})
    return 0


def _cmd_hawking(args):
    from .flux import hawking_mass

    model = _build_model(args)
    m = hawking_mass(model, args.center, args.radius,
                     **_resolution_kwargs(args))
    _emit({"hawking_mass": m, "center": list(args.center),
           "radius": args.radius, "model": args.model})
    return 0


def _cmd_g_eval(args):
    from .reduced import g_total, hawking_from_g

    model = _build_model(args)
    ev = g_total(model, args.xi, args.lam, **_resolution_kwargs(args))
    _emit({"xi": list(map(float, ev.xi)), "lam": ev.lam,
           "G1": ev.g1, "G2": ev.g2, "G": ev.g,
           "grad_G1": list(map(float, ev.grad_g1)),
           "grad_G2": list(map(float, ev.grad_g2)),
           "grad_G": list(map(float, ev.grad_g)),
           "hawking_from_G": hawking_from_g(ev.g, ev.lam),
           "model": args.model})
    return 0


def _cp_doc(cp):
    return {"xi": list(map(float, cp.xi)), "lam": cp.lam,
            "grad_norm": cp.grad_norm,
            "hessian_eigenvalues": list(map(float, cp.hessian_eigenvalues)),
            "barycenter": list(map(float, cp.barycenter)),
            "rho": cp.rho, "theta": cp.theta,
            "classification": cp.classification}


def _cmd_critical_point(args):
    from .solver import find_critical_point

    model = _build_model(args)
    cp = find_critical_point(model, args.lam, delta=args.delta,
                             **_resolution_kwargs(args))
    _emit({"critical_point": _cp_doc(cp), "model": args.model})
    return 0


def _cmd_trace(args):
    from .solver import trace_branch

    model = _build_model(args)
    trace = trace_branch(model, args.lams, delta=args.delta,
                         **_resolution_kwargs(args))
    _emit({"points": [{"lam": lam, **_cp_doc(cp)}
                      for lam, cp in trace.points],
           "oscillation": list(map(float, trace.oscillation)),
           "model": args.model})
    return 0


def _cmd_scan(args):
    from .solver import stationary_scan

    model = _build_model(args)
    kw = _resolution_kwargs(args)
    scan = stationary_scan(model, args.lam, delta=args.delta,
                           spacing=args.spacing,
                           refine=not args.no_refine, **kw)
    _emit({"min_grad_norm": scan.min_grad_norm,
           "argmin": list(map(float, scan.argmin)),
           "grid_min_grad_norm": scan.grid_min_grad_norm,
           "grid_argmin": list(map(float, scan.grid_argmin)),
           "n_points": scan.n_points, "spacing": scan.spacing,
           "model": args.model})
    return 0


def _cmd_experiment(args):
    from .experiments import default_config, emit_report, run_experiment

    cfg = default_config(args.id)
    if args.config:
        with open(args.config) as fh:
            overlay = json.load(fh)
        if not isinstance(overlay, dict):
            raise SystemExit("--config must contain a JSON object")
        for key, value in overlay.items():
            if key == "extra":
                cfg.extra = {**cfg.extra, **_detuple(value)}
            elif key == "model_params":
                cfg.model_params = _detuple(value)
            elif key == "lams":
                cfg.lams = tuple(float(v) for v in value)
            elif key in ("model", "delta", "n_polar", "n_azimuth",
                         "n_radial"):
                setattr(cfg, key, value)
            elif key == "experiment":
                if value != cfg.experiment:
                    raise SystemExit(
                        f"config is for {value}, requested {cfg.experiment}")
            else:
                raise SystemExit(f"unknown config key {key!r}")
    if args.resolution:
        cfg.n_polar, cfg.n_azimuth = args.resolution
    out_dir = pathlib.Path(args.out) / args.id.lower()
    result = run_experiment(cfg)
    report = emit_report(result, out_dir)
    _emit({"experiment": cfg.experiment, "passed": result.passed,
           "failed": [a.name for a in result.assertions if not a.passed],
           "n_assertions": len(result.assertions),
           "report": str(report),
           "wall_clock_s": round(result.wall_clock, 3)})
    return 0 if result.passed else 1


# ---------------------------------------------------------------------------
# parser


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="acwillmore",
        description="Reduced Willmore energy laboratory for asymptotically "
                    "flat conformal metrics")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("adm", help="mass flux at a sphere radius")
    _add_model_args(p)
    _add_common_args(p)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--raw", action="store_true",
                   help="skip Richardson extrapolation over {lam,2lam,4lam}")
    p.set_defaults(func=_cmd_adm)

    p = subs.add_parser("com", help="center of mass flux at a sphere radius")
    _add_model_args(p)
    _add_common_args(p)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--raw", action="store_true")
    p.set_defaults(func=_cmd_com)

    p = subs.add_parser("hawking", help="Hawking mass of a coordinate sphere")
    _add_model_args(p)
    _add_common_args(p)
    p.add_argument("--center", type=_parse_vec, default=(0.0, 0.0, 0.0),
                   metavar="X,Y,Z")
    p.add_argument("--radius", type=float, required=True)
    p.set_defaults(func=_cmd_hawking)

    p = subs.add_parser("g-eval", help="reduced energy and gradient at "
                                       "one translation parameter")
    _add_model_args(p)
    _add_common_args(p)
    p.add_argument("--xi", type=_parse_vec, required=True, metavar="X,Y,Z")
    p.add_argument("--lam", type=float, required=True)
    p.set_defaults(func=_cmd_g_eval)

    p = subs.add_parser("critical-point", help="locate a stationary point "
                                               "of the reduced energy")
    _add_model_args(p)
    _add_common_args(p)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.25)
    p.set_defaults(func=_cmd_critical_point)

    p = subs.add_parser("trace", help="track the critical point over a "
                                      "radius ladder")
    _add_model_args(p)
    _add_common_args(p)
    p.add_argument("--lams", type=_parse_lams, required=True,
                   metavar="L1,L2,...")
    p.add_argument("--delta", type=float, default=0.25)
    p.set_defaults(func=_cmd_trace)

    p = subs.add_parser("scan", help="gradient-norm grid scan")
    _add_model_args(p)
    _add_common_args(p)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.25)
    p.add_argument("--spacing", type=float, default=0.05)
    p.add_argument("--no-refine", action="store_true")
    p.set_defaults(func=_cmd_scan)

    p = subs.add_parser("experiment", help="run a canned experiment and "
                                           "write its report files")
    p.add_argument("id", choices=("E1", "E2", "E3", "E4", "E5", "E6"))
    p.add_argument("--config", default="",
                   help="JSON file overriding the experiment defaults")
    p.add_argument("--out", default=_default_out(),
                   help="output directory (default: $ACWILLMORE_OUT or cwd)")
    _add_common_args(p)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    _apply_threads_env(argv)
    parser = _build_parser()
    args = parser.parse_args(argv)

    from .errors import (BracketingError, DomainError, NonConvergenceError,
                         SingularityError)

    try:
        return args.func(args)
    except (DomainError, SingularityError, NonConvergenceError,
            BracketingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
