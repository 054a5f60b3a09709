"""``cmcflux`` command line.

Exit codes: 0 success / all checks pass, 1 a check failed, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import flux as fx
from . import io
from . import twizzler as tw
from . import verify as vf
from .config import Config, read_config_file
from .errors import CMCFluxError
from .surface import write_obj

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

EPILOG = """exit codes:
  0  success (verify: every check passed)
  1  a check failed (verify, flux --assert-conserved)
  2  usage, seeding, domain or quadrature error
"""


def _common(p: argparse.ArgumentParser):
    g = p.add_argument_group("parameters")
    g.add_argument("--config", help="flat key = value file; flags override it")
    g.add_argument("--R", type=float, help="circle radius of the S^1 factor")
    g.add_argument("--H", type=float, help="target mean curvature (sum of principal curvatures)")
    g.add_argument("--c", type=float, help="first-integral constant")
    g.add_argument("--C", type=float, help="support-function level (c = pi R C)")
    g.add_argument("--seed", help="seed point 'x,y' of the generating curve")
    g.add_argument("--direction", type=int, choices=(-1, 1), help="outward (1) or inward (-1) branch at the seed")
    g.add_argument("--steps", type=int)
    g.add_argument("--ds", type=float)
    g.add_argument("--no-project", dest="project", action="store_const", const=False,
                   help="disable level-set projection after each step")
    g.add_argument("--quad-order", dest="quad_order", type=int, help="Gauss-Legendre order per cap direction")
    g.add_argument("--curve-order", dest="curve_order", type=int, help="Gauss-Legendre order along helices")
    g.add_argument("--n-caps", dest="n_caps", type=int)
    g.add_argument("--levels", help="comma separated support levels")
    g.add_argument("--nu", type=int)
    g.add_argument("--nv", type=int)
    o = p.add_argument_group("output")
    o.add_argument("--input", help="curve CSV written by 'generate'")
    o.add_argument("--out", help="output directory (default: out)")
    o.add_argument("--obj", help="also write a triangle mesh here")
    o.add_argument("--figures", action="store_true", help="render PNG figures next to the data (matplotlib)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cmcflux", description=__doc__.splitlines()[0] if __doc__ else None,
                                 epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_, epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
        _common(p)
        return p

    add("generate", "integrate a generating curve (or, with --C, a support trajectory)")
    p = add("flux", "flux across caps along a curve")
    p.add_argument("--family", choices=("twizzler", "circle", "perturbed"), default="twizzler",
                   help="inline family when --input is absent")
    p.add_argument("--r", type=float, default=2.0, help="circle radius for --family circle")
    p.add_argument("--amplitude", type=float, default=0.1, help="bend of --family perturbed")
    p.add_argument("--assert-conserved", action="store_true", help="exit 1 if the spread exceeds --tol")
    p.add_argument("--tol", type=float, default=1e-7)
    add("phase", "support-function phase portrait (CSV + SVG)")
    p = add("verify", "run the scenario suite")
    p.add_argument("--all", action="store_true", help="run every registered scenario (default)")
    p.add_argument("--scenario", action="append", default=[], help="run only this scenario (repeatable)")
    p.add_argument("--list", action="store_true", help="list scenarios and exit")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-timing", action="store_true", help="zero all timings for bitwise-stable JSON")
    add("export", "mesh a curve CSV as OBJ")
    return ap


def _config(args) -> Config:
    cfg = Config()
    if args.config:
        cfg.update(**read_config_file(args.config))
    keys = ("R", "H", "c", "C", "seed", "direction", "steps", "ds", "project", "quad_order",
            "curve_order", "n_caps", "levels", "nu", "nv", "out", "obj")
    cfg.update(**{k: getattr(args, k, None) for k in keys})
    if getattr(args, "scenario", None):
        cfg.update(scenarios=args.scenario)
    return cfg


def _outdir(cfg) -> Path:
    d = Path(cfg.out)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _emit(obj):
    print(json.dumps(obj, sort_keys=True, default=io._json_default))


def _generate_curve(cfg):
    params = tw.TwizzlerParams(cfg.R, cfg.H, cfg.c)
    return tw.integrate_generating_curve(params, cfg.seed, cfg.direction, cfg.steps, cfg.ds, cfg.project)


def _mesh(curve, cfg, path):
    header = "cmcflux mesh\nconfig: " + cfg.dumps()
    return write_obj(path, tw.build_surface(curve), cfg.nu, cfg.nv, header)


def cmd_generate(args, cfg):
    out = _outdir(cfg)
    meta = cfg.to_dict()
    if cfg.C is not None:
        p = tw.SupportParams(cfg.R, cfg.H, cfg.C)
        traj = tw.integrate_support(p, cfg.seed.real, cfg.direction, cfg.steps, cfg.ds)
        io.write_trajectory_csv(out / "trajectory.csv", traj, meta)
        curve = tw.reconstruct_from_support(traj)
        summary = {"trajectory": str(out / "trajectory.csv"), "max_level_residual": float(traj.level_residuals.max()),
                   "flagged_samples": len(curve.flagged)}
    else:
        curve = _generate_curve(cfg)
        summary = {}
    io.write_curve_csv(out / "curve.csv", curve, meta)
    summary.update({"curve": str(out / "curve.csv"), "samples": len(curve), "length": curve.length,
                    "max_residual": float(curve.residuals.max()), "c": curve.params.c, "config": meta})
    if cfg.obj:
        summary["obj"] = {"path": cfg.obj, **_mesh(curve, cfg, cfg.obj)}
    if args.figures:
        from .plots import plot_curve

        plot_curve(curve, out / "curve.png", meta)
        summary["figure"] = str(out / "curve.png")
    _emit(summary)
    return EXIT_OK


def _flux_curve(args, cfg):
    if args.input:
        return io.read_curve_csv(args.input)
    if args.family == "circle":
        return tw.circle_curve(args.r, cfg.R, cfg.H)
    if args.family == "perturbed":
        return vf.perturbed_curve(cfg.R, cfg.H, args.amplitude)
    return _generate_curve(cfg)


def cmd_flux(args, cfg):
    out = _outdir(cfg)
    meta = cfg.to_dict()
    curve = _flux_curve(args, cfg)
    H = curve.params.H if args.input and args.H is None else cfg.H
    rep = fx.curve_flux_report(curve, H=H, n_samples=cfg.n_caps, cap_order=cfg.quad_order,
                               curve_order=cfg.curve_order)
    io.write_flux_report(rep, out / "flux.csv", out / "flux.json", meta)
    summary = {"flux_csv": str(out / "flux.csv"), "flux_json": str(out / "flux.json"),
               "max_spread": rep.max_spread, "max_closedform_err": rep.max_closedform_err,
               "mean_flux": float(rep.fluxes.mean()) if len(rep.samples) else None, "config": meta}
    if args.figures:
        from .plots import plot_flux

        plot_flux(rep, out / "flux.png", meta)
        summary["figure"] = str(out / "flux.png")
    conserved = rep.max_spread <= args.tol
    summary["conserved"] = conserved
    _emit(summary)
    if args.assert_conserved and not conserved:
        print(f"flux spread {rep.max_spread:.3e} exceeds {args.tol:.1e}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_phase(args, cfg):
    out = _outdir(cfg)
    meta = cfg.to_dict()
    levels = cfg.levels or ((cfg.C,) if cfg.C is not None else (0.2, 0.5, 0.8))
    pp = tw.phase_portrait_samples(cfg.R, cfg.H, levels=levels)
    io.write_phase_csv(out / "phase.csv", pp, meta)
    io.write_phase_svg(out / "phase.svg", pp, meta)
    x, F = tw.critical_point_y0(cfg.R, cfg.H)
    summary = {"csv": str(out / "phase.csv"), "svg": str(out / "phase.svg"), "levels": list(levels),
               "critical_point": [x, 0.0], "critical_value": F, "config": meta}
    if args.figures:
        from .plots import plot_phase

        plot_phase(pp, out / "phase.png", meta)
        summary["figure"] = str(out / "phase.png")
    _emit(summary)
    return EXIT_OK


def cmd_verify(args, cfg):
    registry = {s.name: s for s in vf.DEFAULT_REGISTRY + (vf.AUDIT,)}
    if args.list:
        for name in sorted(registry):
            print(name)
        return EXIT_OK
    if cfg.scenarios:
        unknown = [n for n in cfg.scenarios if n not in registry]
        if unknown:
            print(f"unknown scenario(s): {', '.join(unknown)}", file=sys.stderr)
            return EXIT_USAGE
        scenarios = [registry[n] for n in cfg.scenarios]
    else:
        scenarios = None
    results, code = vf.run_full_suite(scenarios, timing=not args.no_timing, jobs=args.jobs)
    out = _outdir(cfg)
    text = vf.summary_json(results, cfg.to_dict())
    (out / "verify.json").write_text(text + "\n")
    print(vf.format_table(results))
    n = sum(len(r.checks) for r in results)
    bad = sum(not c.passed for r in results for c in r.checks)
    print(f"\n{n - bad}/{n} checks passed; summary in {out / 'verify.json'}")
    return code


def cmd_export(args, cfg):
    if not args.input:
        print("export needs --input curve.csv", file=sys.stderr)
        return EXIT_USAGE
    curve = io.read_curve_csv(args.input)
    path = cfg.obj or str(_outdir(cfg) / "surface.obj")
    counts = _mesh(curve, cfg, path)
    _emit({"obj": path, **counts, "config": cfg.to_dict()})
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "flux": cmd_flux, "phase": cmd_phase, "verify": cmd_verify,
            "export": cmd_export}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except (CMCFluxError, ValueError, KeyError, OSError) as exc:
        print(f"cmcflux {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
