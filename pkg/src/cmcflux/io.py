"""CSV / JSON / SVG interchange.

CSV files start with ``#`` comment lines carrying the effective config and
the curve parameters as JSON; readers skip them.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .twizzler import GeneratingCurve, PhasePortrait, SupportTrajectory, TwizzlerParams, curvature

CURVE_COLUMNS = ["s", "re_gamma", "im_gamma", "re_dot", "im_dot", "residual"]
FLUX_COLUMNS = ["p_re", "p_im", "conormal_term", "cap_term", "flux", "closed_form", "abs_err"]
TRAJ_COLUMNS = ["t", "k", "kdot", "level_residual"]


def _header(fh, meta: dict):
    for key, value in meta.items():
        fh.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")


def _read_header(path) -> tuple[dict, list[str]]:
    meta, body = {}, []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                try:
                    meta[key.strip()] = json.loads(val)
                except json.JSONDecodeError:
                    meta[key.strip()] = val.strip()
            else:
                body.append(line)
    return meta, body


def _g(x) -> str:
    return "" if x is None else repr(float(x))


def write_curve_csv(path, curve: GeneratingCurve, config: dict | None = None):
    p = curve.params
    with open(path, "w", newline="") as fh:
        _header(fh, {"config": config or {}, "params": {"R": p.R, "H": p.H, "c": p.c}})
        w = csv.writer(fh)
        w.writerow(CURVE_COLUMNS)
        for s, g, t, r in zip(curve.s, curve.gamma, curve.tangent, curve.residuals):
            w.writerow([_g(s), _g(g.real), _g(g.imag), _g(t.real), _g(t.imag), _g(r)])


def read_curve_csv(path) -> GeneratingCurve:
    meta, body = _read_header(path)
    pr = meta.get("params")
    if not isinstance(pr, dict):
        raise ValueError(f"{path}: missing '# params:' header")
    params = TwizzlerParams(float(pr["R"]), float(pr["H"]), float(pr["c"]))
    rows = list(csv.DictReader(body))
    s = np.array([float(r["s"]) for r in rows])
    gamma = np.array([complex(float(r["re_gamma"]), float(r["im_gamma"])) for r in rows])
    tang = np.array([complex(float(r["re_dot"]), float(r["im_dot"])) for r in rows])
    res = np.array([float(r["residual"]) for r in rows])
    theta = np.unwrap(np.angle(tang))
    rad = np.abs(gamma)
    if len(rad) > 1 and np.var(rad) <= 1e-10:
        kappa = 1.0 / rad
    else:
        kappa = np.array([curvature(params, g, th) for g, th in zip(gamma, theta)])
    step = float(np.min(np.diff(s))) if len(s) > 1 else 1e-3
    return GeneratingCurve(params, s, gamma, theta, kappa, res, max_step=min(step, 1e-3))


def write_trajectory_csv(path, traj: SupportTrajectory, config: dict | None = None):
    p = traj.params
    with open(path, "w", newline="") as fh:
        _header(fh, {"config": config or {}, "params": {"R": p.R, "H": p.H, "C": p.C}})
        w = csv.writer(fh)
        w.writerow(TRAJ_COLUMNS)
        for row in zip(traj.t, traj.k, traj.kd, traj.level_residuals):
            w.writerow([_g(x) for x in row])


def flux_report_dict(report, config: dict | None = None) -> dict:
    return {
        "config": config or {},
        "meta": report.meta,
        "max_spread": report.max_spread,
        "max_closedform_err": report.max_closedform_err,
        "samples": [
            {
                "p_re": s.p.real, "p_im": s.p.imag, "conormal_term": s.conormal_term,
                "cap_term": s.cap_term, "flux": s.flux, "closed_form": s.closed_form,
                "abs_err": s.abs_err,
            }
            for s in report.samples
        ],
    }


def write_flux_report(report, csv_path=None, json_path=None, config: dict | None = None):
    d = flux_report_dict(report, config)
    if json_path:
        Path(json_path).write_text(json.dumps(d, indent=2, sort_keys=True))
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            _header(fh, {"config": config or {}, "meta": report.meta,
                         "max_spread": report.max_spread, "max_closedform_err": report.max_closedform_err})
            w = csv.writer(fh)
            w.writerow(FLUX_COLUMNS)
            for row in d["samples"]:
                w.writerow([_g(row[k]) for k in FLUX_COLUMNS])
    return d


def read_flux_csv(path):
    meta, body = _read_header(path)
    rows = list(csv.DictReader(body))
    return meta, [{k: (float(v) if v != "" else None) for k, v in r.items()} for r in rows]


def write_phase_csv(path, portrait: PhasePortrait, config: dict | None = None):
    with open(path, "w", newline="") as fh:
        _header(fh, {"config": config or {}, "params": {"R": portrait.R, "H": portrait.H}})
        w = csv.writer(fh)
        w.writerow(["x", "y", "F"])
        for i, y in enumerate(portrait.y):
            for j, x in enumerate(portrait.x):
                w.writerow([_g(x), _g(y), _g(portrait.F[i, j])])


def write_phase_svg(path, portrait: PhasePortrait, config: dict | None = None, size: int = 600):
    """Level polylines of ``F`` as SVG; y grows upward in the picture."""
    x0, x1 = float(portrait.x[0]), float(portrait.x[-1])
    y0, y1 = float(portrait.y[0]), float(portrait.y[-1])
    sx = size / (x1 - x0)
    sy = size / (y1 - y0)
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]

    def pt(x, y):
        return f"{(x - x0) * sx:.3f},{(y1 - y) * sy:.3f}"

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f"<!-- config: {json.dumps(config or {}, sort_keys=True)} -->",
        f'<line x1="0" y1="{(y1) * sy:.3f}" x2="{size}" y2="{(y1) * sy:.3f}" stroke="#999" stroke-width="0.5"/>',
    ]
    for n, (level, segs) in enumerate(sorted(portrait.levels.items())):
        col = colors[n % len(colors)]
        lines.append(f'<g id="level-{level:g}" stroke="{col}" fill="none" stroke-width="1.2">')
        for seg in segs:
            pts = " ".join(pt(x, y) for x, y in seg)
            lines.append(f'<polyline data-level="{level:g}" points="{pts}"/>')
        lines.append("</g>")
    lines.append("</svg>")
    Path(path).write_text("\n".join(lines) + "\n")


def dump_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")
