"""Scenario harness: conservation, converse instances and consistency checks.

Each :class:`Scenario` names a family, the operations it exercises and its
own tolerances. Running it yields one :class:`CheckResult` per check; a
failing check is a result, never an exception.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from . import ambient as amb
from . import flux as fx
from . import surface as sf
from . import twizzler as tw
from .errors import CMCFluxError, OracleFailure
from .revolution import integrate_delaunay, unit_sphere_profile

PI = math.pi

ALL_OPS = (
    "evaluate_killing", "apply_screw", "eval_log_density",
    "unit_normal", "mean_curvature", "weighted_mean_curvature", "fd_curvature_oracle",
    "cap_flux_term", "conormal_flux_term", "flux", "alternate_cap_flux", "disk_cap_flux_revolution",
    "first_integral_lhs", "integrate_generating_curve", "build_surface", "integrate_support",
    "support_ode_step", "reconstruct_from_support", "phase_portrait_samples",
    "orbit_space_weighted_curvature",
)


@dataclass(frozen=True)
class Scenario:
    name: str
    kind: str
    family: dict
    checks: dict  # check name -> (tolerance, "<=" | ">=")
    ops: tuple[str, ...] = ()
    ambient: str = "cylinder_product"


@dataclass
class CheckResult:
    scenario: str
    check: str
    measured: float | None
    tolerance: float
    comparison: str
    passed: bool
    seconds: float
    note: str = ""


@dataclass
class VerifyResult:
    scenario: str
    checks: list[CheckResult] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _judge(measured, tol, cmp):
    if measured is None or not math.isfinite(measured):
        return False
    return measured <= tol if cmp == "<=" else measured >= tol


class _Recorder:
    def __init__(self, sc: Scenario, timing: bool):
        self.sc = sc
        self.timing = timing
        self.out: list[CheckResult] = []
        self._t = time.perf_counter()

    def check(self, name, measured, note=""):
        tol, cmp = self.sc.checks[name]
        now = time.perf_counter()
        secs = round(now - self._t, 6) if self.timing else 0.0
        self._t = now
        m = None if measured is None else float(measured)
        self.out.append(CheckResult(self.sc.name, name, m, tol, cmp, _judge(m, tol, cmp), secs, note))


# --- cached families --------------------------------------------------------------


@lru_cache(maxsize=16)
def twizzler_curve(R, H, c, seed=1.0, hint=1, steps=4000, ds=1e-3):
    return tw.integrate_generating_curve(tw.TwizzlerParams(R, H, c), seed, hint, steps, ds)


def _family_curve(fam):
    if fam["type"] == "twizzler":
        return twizzler_curve(fam["R"], fam["H"], fam["c"], fam.get("seed", 1.0), fam.get("hint", 1),
                              fam.get("steps", 4000), fam.get("ds", 1e-3))
    if fam["type"] == "cylinder":
        return tw.circle_curve(fam["r"], fam["R"], fam["H"], fam.get("n", 400))
    if fam["type"] == "perturbed":
        return perturbed_curve(fam["R"], fam["H"], fam["amplitude"], fam.get("length", 2.0))
    raise ValueError(f"no generating curve for family {fam['type']!r}")


def perturbed_curve(R, H, amplitude, length=2.0, n=2001) -> tw.GeneratingCurve:
    """``g(t) = t + i a t^2`` for ``t`` in ``[0.1, 0.1 + length]``; neither CMC nor invariant."""
    t = np.linspace(0.1, 0.1 + length, n)
    g = t + 1j * amplitude * t * t
    d = 1 + 2j * amplitude * t
    params = tw.TwizzlerParams(R, H, 0.0)
    lhs = np.array([tw.first_integral_lhs(a, b, params) for a, b in zip(g, d)])
    from scipy.integrate import cumulative_simpson

    s = cumulative_simpson(np.abs(d), x=t, initial=0.0)
    kappa = 2 * amplitude / np.abs(d) ** 3
    return tw.GeneratingCurve(params, s, g, np.angle(d), kappa, np.abs(lhs))


# --- runners ----------------------------------------------------------------------


def _surface_dev(S, H, nu=40, nv=40, margin=0.0):
    rep = sf.curvature_report(S, H, nu, nv, margin=margin)
    return rep


def _oracle_dev(S, H, nu=40, nv=40, margin=0.02):
    us, vs = S.grid(nu, nv, margin)
    dev = 0.0
    for u in us:
        for v in vs:
            dev = max(dev, abs(sf.fd_curvature_oracle(S, u, v) - H))
    return dev


def run_conservation_suite(sc: Scenario, timing: bool = True, conormal_sign: int = 1) -> VerifyResult:
    rec = _Recorder(sc, timing)
    fam = sc.family
    t0 = time.perf_counter()
    if fam["type"] == "revolution":
        prof = _family_profile(fam)
        fluxes = _latitude_fluxes(prof)
        name = "latitude_flux_max_abs" if "latitude_flux_max_abs" in sc.checks else "flux_spread"
        if name == "latitude_flux_max_abs":
            rec.check(name, max(abs(f) for f in fluxes))
        else:
            rec.check(name, max(fluxes) - min(fluxes))
        if "curvature_max_dev" in sc.checks:
            rec.check("curvature_max_dev", _surface_dev(prof.surface(), prof.H, 40, 12).max_abs_deviation)
        return VerifyResult(sc.name, rec.out, time.perf_counter() - t0 if timing else 0.0)

    curve = _family_curve(fam)
    H = fam["H"]
    rep = fx.curve_flux_report(curve, H=H, n_samples=fam.get("n_caps", 20), conormal_sign=conormal_sign)
    f = rep.fluxes
    for name in sc.checks:
        if name == "flux_spread":
            rec.check(name, rep.max_spread)
        elif name == "flux_max_abs":
            rec.check(name, float(np.max(np.abs(f))))
        elif name == "closed_form_err":
            rec.check(name, rep.max_closedform_err)
        elif name == "flux_vs_pi_R_r":
            rec.check(name, float(np.max(np.abs(f - PI * fam["R"] * fam["r"]))))
        elif name == "flux_vs_c":
            rec.check(name, float(np.max(np.abs(f - fam["c"]))))
        elif name == "first_integral_residual":
            rec.check(name, float(curve.residuals.max()))
        elif name == "reduced_conormal":
            rec.check(name, max(abs(s.reduced_conormal - s.conormal_term) for s in rep.samples))
        elif name == "curvature_max_dev":
            rec.check(name, _surface_dev(tw.build_surface(curve), H).max_abs_deviation)
        elif name == "oracle_max_dev":
            rec.check(name, _oracle_dev(tw.build_surface(curve), H))
        elif name == "screw_isometry_h":
            rec.check(name, _screw_h_invariance(tw.build_surface(curve)))
    return VerifyResult(sc.name, rec.out, time.perf_counter() - t0 if timing else 0.0)


def _family_profile(fam):
    if fam.get("profile") == "sphere":
        return unit_sphere_profile()
    return integrate_delaunay(fam["H"], fam["k"], fam.get("rho0", 1.0), 0.0, 1, 0.0, fam.get("length", 8.0))


def _latitude_fluxes(prof, stride=100):
    Y = amb.KillingField.translation(amb.AmbientSpace.euclid3(), (1, 0, 0))
    out = []
    for i in range(0, len(prof.s), stride):
        th = prof.theta[i]
        out.append(fx.disk_cap_flux_revolution(prof.rho[i], prof.x[i], Y, prof.H, (math.cos(th), math.sin(th))).flux)
    return out


def _screw_h_invariance(S, t=0.7, n=12):
    field_ = amb.KillingField.screw(S.ambient)
    moved = transformed_surface(S, field_, t)
    us, vs = S.grid(n, n, 0.05)
    return max(abs(sf.mean_curvature(S, u, v) - sf.mean_curvature(moved, u, v)) for u in us for v in vs)


def transformed_surface(S: sf.ParametricSurface, field_, t: float) -> sf.ParametricSurface:
    """Image of ``S`` under the time-``t`` flow of a Killing field (an affine isometry)."""
    b = field_.flow(t, np.zeros(3))
    A = np.column_stack([field_.flow(t, e) - b for e in np.eye(3)])

    def jets(u, v):
        j = S.jet(u, v)
        return sf.SurfaceJet(A @ j.X + b, A @ j.Xu, A @ j.Xv, A @ j.Xuu, A @ j.Xuv, A @ j.Xvv)

    return sf.ParametricSurface(S.domain, lambda u, v: jets(u, v).X, jets, S.ambient, S.orientation,
                                S.periodic_v, S.regularity, S.name + "-moved")


def run_converse_suite(sc: Scenario, timing: bool = True) -> VerifyResult:
    rec = _Recorder(sc, timing)
    fam = sc.family
    t0 = time.perf_counter()
    if fam["type"] == "cylinder":
        curve = _family_curve(fam)
        rep = fx.curve_flux_report(curve, H=fam["H"], n_samples=20)
        rec.check("flux_spread", rep.max_spread)
        S = tw.build_surface(curve)
        crep = sf.curvature_report(S, fam["H"], 20, 20)
        gaps = [abs(s[2] - fam["H"]) for s in crep.samples]
        rec.check("min_h_gap", min(gaps))
        rec.check("h_gap_variation", max(gaps) - min(gaps))
        # the same cylinder about the x-axis in R^3 with the axial translations
        Y = amb.KillingField.translation(amb.AmbientSpace.euclid3(), (1, 0, 0))
        rev = [fx.disk_cap_flux_revolution(fam["r"], x0, Y, fam["H"]).flux for x0 in np.linspace(-3, 3, 20)]
        rec.check("axial_flux_spread", max(rev) - min(rev))
    elif fam["type"] == "revolution":
        prof = _family_profile(fam)
        fl = _latitude_fluxes(prof)
        rec.check("flux_spread", max(fl) - min(fl))
        rec.check("curvature_max_dev", _surface_dev(prof.surface(), prof.H, 40, 12).max_abs_deviation)
        rec.check("translation_defect", prof.translation_defect(fam.get("shift", 0.1)))
    elif fam["type"] == "perturbed":
        curve = _family_curve(fam)
        rep = fx.curve_flux_report(curve, H=fam["H"], n_samples=20)
        rec.check("flux_spread", rep.max_spread)
    else:
        raise ValueError(f"converse suite does not handle {fam['type']!r}")
    return VerifyResult(sc.name, rec.out, time.perf_counter() - t0 if timing else 0.0)


def run_ambient_suite(sc: Scenario, timing: bool = True) -> VerifyResult:
    rec = _Recorder(sc, timing)
    t0 = time.perf_counter()
    rng = np.random.default_rng(sc.family.get("rng", 12345))
    R = sc.family.get("R", 1.0)
    C = amb.AmbientSpace.cylinder_product(R)
    E = amb.AmbientSpace.euclid3()
    fields_ = [
        (C, amb.KillingField.screw(C)), (C, amb.KillingField.plane_rotation(C)),
        (C, amb.KillingField.translation(C, (1, 0, 0))), (C, amb.KillingField.translation(C, (0, 0, 1))),
        (C, amb.KillingField.rotation(C, (0, 0, 1))),
        (E, amb.KillingField.translation(E, (1, 2, 3))), (E, amb.KillingField.rotation(E, (1, -1, 2))),
        (E, amb.KillingField.plane_rotation(E)),
    ]
    iso, div = 0.0, 0.0
    for sp, Y in fields_:
        P = rng.uniform(-2, 2, (200, 3))
        Q = P + rng.uniform(-0.5, 0.5, (200, 3))
        FP, FQ = Y.flow(1e-3, P), Y.flow(1e-3, Q)
        for a, b, fa, fb in zip(P, Q, FP, FQ):
            d0 = sp.distance(sp.from_unrolled(a), sp.from_unrolled(b))
            d1 = sp.distance(sp.from_unrolled(fa), sp.from_unrolled(fb))
            iso = max(iso, abs(d1 - d0))
        for p in rng.uniform(-2, 2, (100, 3)):
            div = max(div, abs(amb.divergence_fd(Y, p)))
    rec.check("isometry", iso)
    rec.check("divergence", div)

    mu = amb.LogDensity.orbit_length(R)
    gerr = 0.0
    for p in rng.uniform(-2, 2, (50, 2)):
        _, g = amb.eval_log_density(mu, p)
        h = 1e-6
        fd = [(mu.value(p + h * e) - mu.value(p - h * e)) / (2 * h) for e in np.eye(2)]
        gerr = max(gerr, float(np.max(np.abs(g - fd))))
    rec.check("density_gradient", gerr)
    ex = abs(mu.value(0j) - math.log(2 * PI)) + abs(mu.value(1 + 0j) - math.log(2 * PI * math.sqrt(2)))
    ex += float(np.linalg.norm(amb.evaluate_killing(amb.KillingField.plane_rotation(C), C.point(1, 0)) - [0, -1, 0]))
    rec.check("catalog_examples", ex)

    curve = twizzler_curve(R, 1.0, 0.3)
    S = tw.build_surface(curve)
    worst = 0.0
    for idx in range(0, len(curve), 400):
        for v in (0.0, 1.3, 4.0):
            x = S.position(curve.s[idx], v)
            q = amb.apply_screw(0.9, C.from_unrolled(x))
            worst = max(worst, tw.on_surface_distance(curve, q.unrolled()))
    rec.check("screw_membership", worst)
    return VerifyResult(sc.name, rec.out, time.perf_counter() - t0 if timing else 0.0)


def surface_corpus(R=1.0):
    return [(sf.plane_patch(), 0.0)] + [(sf.sphere_patch(r), 2 / r) for r in (0.5, 1.0, 3.0)] + \
        [(sf.cylinder_patch(r), 1 / r) for r in (0.5, 1.0, 3.0)] + [(sf.helicoid_patch(R), 0.0)]


def run_surface_suite(sc: Scenario, timing: bool = True) -> VerifyResult:
    rec = _Recorder(sc, timing)
    t0 = time.perf_counter()
    n = sc.family.get("grid", 20)
    agree, flip, expected, wzero = 0.0, 0.0, 0.0, 0.0
    failures = 0
    zero = amb.LogDensity.zero()
    for S, h_true in surface_corpus():
        flipped = S.swapped()
        us, vs = S.grid(n, n, 0.02)
        for u in us:
            for v in vs:
                h = sf.mean_curvature(S, u, v)
                expected = max(expected, abs(h - h_true))
                try:
                    agree = max(agree, abs(h - sf.fd_curvature_oracle(S, u, v)))
                except OracleFailure:
                    failures += 1
                flip = max(flip, abs(h + sf.mean_curvature(flipped, v, u)))
                wzero = max(wzero, abs(sf.weighted_mean_curvature(S, zero, u, v) - h))
    rec.check("oracle_agreement", agree, note=f"{failures} oracle failures")
    rec.check("closed_form_curvature", expected)
    rec.check("orientation_flip", flip)
    rec.check("weighted_zero_density", wzero)
    # circle in the orbit-space plane with the orbit-length density and flat metric
    mu = amb.LogDensity.orbit_length(1.0)
    err = 0.0
    for r in (0.5, 1.0, 2.0):
        c = sf.PlanarCurve(lambda t, r=r: (r * np.exp(1j * t), 1j * r * np.exp(1j * t), -r * np.exp(1j * t)))
        for t in np.linspace(0, 2 * PI, 7):
            err = max(err, abs(sf.weighted_mean_curvature(c, mu, t) - (1 / r + r / (1 + r * r))))
    rec.check("planar_weighted_circle", err)
    return VerifyResult(sc.name, rec.out, time.perf_counter() - t0 if timing else 0.0)


def run_caps_suite(sc: Scenario, timing: bool = True) -> VerifyResult:
    rec = _Recorder(sc, timing)
    t0 = time.perf_counter()
    fam = sc.family
    curve = _family_curve(fam)
    R, H = fam["R"], fam["H"]
    Y = amb.KillingField.plane_rotation(amb.AmbientSpace.cylinder_product(R))
    worst = 0.0
    for idx in np.linspace(0, len(curve) - 1, fam.get("points", 5)).astype(int):
        p, gd = complex(curve.gamma[idx]), complex(curve.tangent[idx])
        helix = fx.BoundaryHelix(p, R, gd)
        vals = [fx.alternate_cap_flux(p, arc, Y, H, R=R, helix=helix)
                for arc in (fx.segment_arc(p), fx.detour_arc(p), fx.folded_arc(p))]
        worst = max(worst, max(vals) - min(vals))
    rec.check("pairwise_diff", worst)
    a = 2.5
    p, gd = complex(curve.gamma[0]), complex(curve.tangent[0])
    s1 = fx.flux(fx.HelicoidalCap(p, R), fx.BoundaryHelix(p, R, gd), Y, H)
    s2 = fx.flux(fx.HelicoidalCap(p, R), fx.BoundaryHelix(p, R, gd), a * Y, H)
    s3 = fx.flux(fx.HelicoidalCap(p, R), fx.BoundaryHelix(p, R, gd), Y + a * Y, H)
    rec.check("linearity", max(abs(s2.flux - a * s1.flux), abs(s3.flux - (1 + a) * s1.flux)))
    return VerifyResult(sc.name, rec.out, time.perf_counter() - t0 if timing else 0.0)


def support_two_route(R=1.0, H=1.0, C=0.8, k0=1.0, steps=2000, dt=2e-3):
    """Support trajectory, its reconstruction and the direct curve with ``c = pi R C``."""
    p = tw.SupportParams(R, H, C)
    traj = tw.integrate_support(p, k0, 1, steps, dt)
    rec = tw.reconstruct_from_support(traj)
    g0, t0 = complex(rec.gamma[0]), complex(rec.tangent[0])
    hint = 1 if (t0.conjugate() * g0).real >= 0 else -1
    L = rec.length
    n = int(math.ceil(L / 1e-3))
    direct = tw.integrate_generating_curve(rec.params, abs(g0), hint, n, L / n)
    return traj, rec, direct, math.atan2(g0.imag, g0.real)


def run_consistency_suite(sc: Scenario, timing: bool = True) -> VerifyResult:
    rec = _Recorder(sc, timing)
    t0 = time.perf_counter()
    fam = sc.family
    traj, recon, direct, angle = support_two_route(fam["R"], fam["H"], fam["C"], fam["k0"])
    rec.check("level_residual", float(traj.level_residuals.max()))
    rec.check("convex_flags", float(len(recon.flagged)))
    rec.check("calibration", float(recon.residuals.max()))
    d, _ = tw.aligned_hausdorff(direct.gamma, recon.gamma, angle)
    rec.check("aligned_hausdorff", d)
    pts = recon.gamma
    rt = max(abs(tw.support_from_curve(pts, t, directions=traj.t) - k) for t, k in zip(traj.t[::10], traj.k[::10]))
    rec.check("support_roundtrip", rt)
    return VerifyResult(sc.name, rec.out, time.perf_counter() - t0 if timing else 0.0)


def run_phase_suite(sc: Scenario, timing: bool = True) -> VerifyResult:
    rec = _Recorder(sc, timing)
    t0 = time.perf_counter()
    R, H = sc.family["R"], sc.family["H"]
    pp = tw.phase_portrait_samples(R, H, levels=tuple(sc.family.get("levels", (0.2, 0.5, 0.8))))
    rec.check("y_symmetry", float(np.max(np.abs(pp.F - pp.F[::-1, :]))))
    x, Fc = tw.critical_point_y0(R, H)
    rec.check("critical_x", abs(x - 1 / H))
    rec.check("critical_F", abs(Fc - 1 / H))
    # Hessian at (1/H, 0): negative definite => isolated maximum of the bounded component
    hxx = -2 * H
    hyy = -2 * (1 / (H * R * R) + H)
    rec.check("hessian_max_eig", max(hxx, hyy))
    traj = tw.integrate_support(tw.SupportParams(R, H, sc.family.get("C", 0.8)), 1.0, 1, 1500, 2e-3)
    rec.check("trajectory_on_level", float(traj.level_residuals.max()))
    return VerifyResult(sc.name, rec.out, time.perf_counter() - t0 if timing else 0.0)


def run_orbit_suite(sc: Scenario, timing: bool = True) -> VerifyResult:
    rec = _Recorder(sc, timing)
    t0 = time.perf_counter()
    fam = sc.family
    curve = _family_curve(fam)
    ss = np.linspace(curve.s[0], curve.s[-1], fam.get("points", 50))
    dev = max(abs(tw.orbit_space_weighted_curvature(*curve.jets(s), fam["R"]) - fam["H"]) for s in ss)
    rec.check("h_mu_dev", dev)
    err = 0.0
    for r in (0.5, 2.0):
        g = r + 0j
        err = max(err, abs(tw.orbit_space_weighted_curvature(g, 1j, -1 / r + 0j, fam["R"]) - 1 / r))
    rec.check("circle_h_mu", err)
    return VerifyResult(sc.name, rec.out, time.perf_counter() - t0 if timing else 0.0)


def run_dichotomy_suite(sc: Scenario, timing: bool = True) -> VerifyResult:
    rec = _Recorder(sc, timing)
    t0 = time.perf_counter()
    fam = sc.family
    R, H = fam["R"], fam["H"]
    circ = tw.circle_curve(fam["r"], R, H)
    rep = fx.curve_flux_report(circ, H=H)
    rec.check("circle_flux_spread", rep.max_spread)
    rec.check("circle_detected", 1.0 if tw.classify_curve(circ) == "circle" else 0.0)
    S = tw.build_surface(circ)
    hs = [s[2] for s in sf.curvature_report(S, H, 10, 10).samples]
    rec.check("circle_h_is_1_over_r", max(abs(h - 1 / fam["r"]) for h in hs))
    cmc = twizzler_curve(R, H, fam["c"])
    rec.check("twizzler_not_circle", 1.0 if tw.classify_curve(cmc) == "cmc" else 0.0)
    rec.check("twizzler_h_dev", sf.curvature_report(tw.build_surface(cmc), H, 20, 20).max_abs_deviation)
    return VerifyResult(sc.name, rec.out, time.perf_counter() - t0 if timing else 0.0)


def run_mutation_suite(sc: Scenario, timing: bool = True) -> VerifyResult:
    """Negate the conormal and record which checks notice."""
    rec = _Recorder(sc, timing)
    t0 = time.perf_counter()
    tw_fam = {"type": "twizzler", "R": 1.0, "H": 1.0, "c": 0.3}
    rep = fx.curve_flux_report(_family_curve(tw_fam), H=1.0, conormal_sign=-1)
    rec.check("closed_form_err_detected", rep.max_closedform_err)
    rec.check("twizzler_spread_detected", rep.max_spread)
    hel = fx.curve_flux_report(twizzler_curve(1.0, 0.0, 0.0), H=0.0, conormal_sign=-1)
    rec.check("helicoid_spread_blind", hel.max_spread)
    cyl = fx.curve_flux_report(tw.circle_curve(2.0, 1.0, 0.5), H=0.5, conormal_sign=-1)
    rec.check("cylinder_spread_blind", cyl.max_spread)
    rec.check("cylinder_closed_form_detected", cyl.max_closedform_err)
    return VerifyResult(sc.name, rec.out, time.perf_counter() - t0 if timing else 0.0)


def run_audit(sc: Scenario, registry, timing: bool = True) -> VerifyResult:
    rec = _Recorder(sc, timing)
    covered = set()
    for s in registry:
        covered.update(s.ops)
    missing = [op for op in ALL_OPS if op not in covered]
    rec.check("uncovered_ops", float(len(missing)), note=",".join(missing))
    return VerifyResult(sc.name, rec.out, 0.0)


RUNNERS = {
    "conservation": run_conservation_suite,
    "converse": run_converse_suite,
    "ambient": run_ambient_suite,
    "surface": run_surface_suite,
    "caps": run_caps_suite,
    "consistency": run_consistency_suite,
    "phase": run_phase_suite,
    "orbit": run_orbit_suite,
    "dichotomy": run_dichotomy_suite,
    "mutation": run_mutation_suite,
}

LE, GE = "<=", ">="
TWZ = {"type": "twizzler", "R": 1.0, "H": 1.0, "c": 0.3}

DEFAULT_REGISTRY = (
    Scenario("ambient_killing", "ambient", {"R": 1.0, "rng": 12345},
             {"isometry": (1e-8, LE), "divergence": (1e-6, LE), "density_gradient": (1e-6, LE),
              "catalog_examples": (1e-12, LE), "screw_membership": (1e-9, LE)},
             ("evaluate_killing", "apply_screw", "eval_log_density", "build_surface")),
    Scenario("surface_oracle_corpus", "surface", {"grid": 20},
             {"oracle_agreement": (1e-4, LE), "closed_form_curvature": (1e-10, LE),
              "orientation_flip": (1e-10, LE), "weighted_zero_density": (1e-15, LE),
              "planar_weighted_circle": (1e-12, LE)},
             ("unit_normal", "mean_curvature", "fd_curvature_oracle", "weighted_mean_curvature"),
             "euclid3"),
    Scenario("helicoid_conservation", "conservation", {"type": "twizzler", "R": 1.0, "H": 0.0, "c": 0.0},
             {"flux_spread": (1e-10, LE), "flux_max_abs": (1e-10, LE), "curvature_max_dev": (1e-6, LE)},
             ("integrate_generating_curve", "flux", "cap_flux_term", "conormal_flux_term")),
    Scenario("twizzler_conservation", "conservation", TWZ,
             {"flux_spread": (1e-7, LE), "flux_vs_c": (1e-7, LE), "closed_form_err": (1e-8, LE),
              "first_integral_residual": (1e-9, LE), "reduced_conormal": (1e-10, LE),
              "curvature_max_dev": (1e-6, LE), "oracle_max_dev": (1e-3, LE), "screw_isometry_h": (1e-10, LE)},
             ("integrate_generating_curve", "first_integral_lhs", "build_surface", "flux",
              "cap_flux_term", "conormal_flux_term", "mean_curvature", "fd_curvature_oracle")),
    Scenario("cylinder_cmc_conservation", "conservation", {"type": "cylinder", "r": 2.0, "R": 1.0, "H": 0.5},
             {"flux_spread": (1e-9, LE), "flux_vs_pi_R_r": (1e-8, LE), "closed_form_err": (1e-8, LE),
              "curvature_max_dev": (1e-6, LE)},
             ("flux", "build_surface")),
    Scenario("sphere_revolution", "conservation", {"type": "revolution", "profile": "sphere", "H": 2.0},
             {"latitude_flux_max_abs": (1e-8, LE), "curvature_max_dev": (1e-6, LE)},
             ("disk_cap_flux_revolution", "mean_curvature"), "euclid3"),
    Scenario("cap_independence", "caps", dict(TWZ, points=5),
             {"pairwise_diff": (1e-7, LE), "linearity": (1e-10, LE)},
             ("alternate_cap_flux", "flux")),
    Scenario("cylinder_converse", "converse", {"type": "cylinder", "r": 2.0, "R": 1.0, "H": 1.0},
             {"flux_spread": (1e-9, LE), "min_h_gap": (0.5 - 1e-9, GE), "h_gap_variation": (1e-9, LE),
              "axial_flux_spread": (1e-9, LE)},
             ("flux", "mean_curvature", "disk_cap_flux_revolution")),
    Scenario("unduloid_converse", "converse", {"type": "revolution", "H": 1.0, "k": 0.3, "length": 8.0, "shift": 0.1},
             {"flux_spread": (1e-7, LE), "curvature_max_dev": (1e-6, LE), "translation_defect": (1e-3, GE)},
             ("disk_cap_flux_revolution", "mean_curvature"), "euclid3"),
    Scenario("perturbed_curve_converse", "converse", {"type": "perturbed", "R": 1.0, "H": 1.0, "amplitude": 0.1},
             {"flux_spread": (1e-3, GE)},
             ("flux", "first_integral_lhs")),
    Scenario("support_two_route", "consistency", {"R": 1.0, "H": 1.0, "C": 0.8, "k0": 1.0},
             {"level_residual": (1e-9, LE), "convex_flags": (0.0, LE), "calibration": (1e-7, LE),
              "aligned_hausdorff": (1e-5, LE), "support_roundtrip": (1e-8, LE)},
             ("integrate_support", "support_ode_step", "reconstruct_from_support", "integrate_generating_curve")),
    Scenario("phase_portrait", "phase", {"R": 1.0, "H": 1.0, "C": 0.8, "levels": (0.2, 0.5, 0.8)},
             {"y_symmetry": (0.0, LE), "critical_x": (1e-12, LE), "critical_F": (1e-12, LE),
              "hessian_max_eig": (0.0, LE), "trajectory_on_level": (1e-9, LE)},
             ("phase_portrait_samples", "integrate_support")),
    Scenario("orbit_space", "orbit", dict(TWZ, points=50),
             {"h_mu_dev": (1e-5, LE), "circle_h_mu": (1e-12, LE)},
             ("orbit_space_weighted_curvature",)),
    Scenario("cohomogeneity_one_dichotomy", "dichotomy", {"R": 1.0, "H": 1.0, "r": 2.0, "c": 0.3},
             {"circle_flux_spread": (1e-9, LE), "circle_detected": (1.0, GE), "circle_h_is_1_over_r": (1e-12, LE),
              "twizzler_not_circle": (1.0, GE), "twizzler_h_dev": (1e-6, LE)},
             ("build_surface", "flux")),
    Scenario("mutation_conormal_sign", "mutation", {},
             {"closed_form_err_detected": (1e-3, GE), "twizzler_spread_detected": (1e-3, GE),
              "helicoid_spread_blind": (1e-10, LE), "cylinder_spread_blind": (1e-9, LE),
              "cylinder_closed_form_detected": (1e-3, GE)},
             ("flux",)),
)

AUDIT = Scenario("registry_audit", "audit", {}, {"uncovered_ops": (0.0, LE)})


def run_scenario(sc: Scenario, timing: bool = True, registry=DEFAULT_REGISTRY) -> VerifyResult:
    if sc.kind == "audit":
        return run_audit(sc, registry, timing)
    try:
        return RUNNERS[sc.kind](sc, timing)
    except CMCFluxError as exc:
        # generation failures become a failed check rather than a crash
        tol = next(iter(sc.checks.values()))[0] if sc.checks else 0.0
        return VerifyResult(sc.name, [CheckResult(sc.name, "error", None, tol, "<=", False, 0.0, repr(exc))])


def _run_named(args):
    name, timing = args
    reg = {s.name: s for s in DEFAULT_REGISTRY + (AUDIT,)}
    return run_scenario(reg[name], timing)


def run_full_suite(scenarios=None, timing: bool = True, jobs: int = 1, registry=DEFAULT_REGISTRY):
    """Run scenarios; returns ``(results, exit_code)`` sorted by scenario name.

    ``scenarios=None`` means the default registry plus its coverage audit.
    """
    if scenarios is None:
        scenarios = list(registry) + [AUDIT]
    scenarios = sorted(scenarios, key=lambda s: s.name)
    if jobs > 1 and registry is DEFAULT_REGISTRY and all(
            s in DEFAULT_REGISTRY or s is AUDIT for s in scenarios):
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_run_named, [(s.name, timing) for s in scenarios]))
    else:
        results = [run_scenario(s, timing, registry) for s in scenarios]
    code = 0 if all(r.passed for r in results) else 1
    return results, code


def summary_dict(results, config: dict | None = None) -> dict:
    checks = []
    for r in results:
        for c in r.checks:
            d = asdict(c)
            d["pass"] = d.pop("passed")
            checks.append(d)
    return {
        "config": config or {},
        "checks": checks,
        "scenarios": [{"scenario": r.scenario, "pass": r.passed, "seconds": round(r.seconds, 6)} for r in results],
        "passed": all(r.passed for r in results),
    }


def summary_json(results, config: dict | None = None) -> str:
    return json.dumps(summary_dict(results, config), indent=2, sort_keys=True)


def format_table(results) -> str:
    rows = [("scenario", "check", "measured", "cmp", "tolerance", "result")]
    for r in results:
        for c in r.checks:
            m = "n/a" if c.measured is None else f"{c.measured:.3e}"
            rows.append((c.scenario, c.check, m, c.comparison, f"{c.tolerance:.3e}", "PASS" if c.passed else "FAIL"))
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)) for row in rows)
