"""End-to-end acceptance criteria, one test (and one summary line) each."""

import json
import math
import subprocess
import sys
import time

import numpy as np

from cmcflux import flux as fx
from cmcflux import surface as sf
from cmcflux import twizzler as tw
from cmcflux import verify as vf
from cmcflux.ambient import AmbientSpace, KillingField
from cmcflux.revolution import integrate_delaunay, unit_sphere_profile

PI = math.pi


def _rot(R):
    return KillingField.plane_rotation(AmbientSpace.cylinder_product(R))


def test_1_closed_form_flux(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    cap_rel = con_rel = 0.0
    for _ in range(50):
        R = rng.uniform(0.5, 3)
        p = rng.uniform(0.1, 3) * np.exp(1j * rng.uniform(0, 2 * PI))
        H = rng.uniform(0, 2)
        gd = complex(*rng.normal(size=2))
        Y = _rot(R)
        cap = fx.cap_flux_term(fx.HelicoidalCap(p, R), Y, H)
        con = fx.conormal_flux_term(fx.BoundaryHelix(p, R, gd), Y)
        cap_rel = max(cap_rel, abs(cap - fx.cap_closed_form(p, R, H)) / abs(fx.cap_closed_form(p, R, H)))
        cf = fx.conormal_closed_form(p, gd, R)
        con_rel = max(con_rel, abs(con - cf) / abs(cf))
    secs = time.perf_counter() - t0
    ok = cap_rel <= 1e-8 and con_rel <= 1e-8 and secs <= 5
    acceptance(1, "closed-form flux agreement", ok,
               f"cap rel {cap_rel:.2e}, conormal rel {con_rel:.2e} (tol 1e-8), {secs:.2f}s (<= 5s)")
    assert ok


def test_2_conservation(acceptance):
    t0 = time.perf_counter()
    twz = tw.integrate_generating_curve(tw.TwizzlerParams(1.0, 1.0, 0.3), 1.0, 1, 4000, 1e-3)
    rep = fx.curve_flux_report(twz, n_samples=20)
    hel = tw.integrate_generating_curve(tw.TwizzlerParams(1.0, 0.0, 0.0), 1.0, 1, 4000, 1e-3)
    hrep = fx.curve_flux_report(hel, n_samples=20)
    cyl = fx.curve_flux_report(tw.circle_curve(2.0, 1.0, 0.5), n_samples=20)
    cyl_err = float(np.max(np.abs(cyl.fluxes - PI * 1.0 * 2.0)))
    hel_max = float(np.max(np.abs(hrep.fluxes)))
    secs = time.perf_counter() - t0
    ok = (twz.length >= 4 and len(rep.samples) == 20 and rep.max_spread <= 1e-7
          and hrep.max_spread <= 1e-10 and hel_max <= 1e-10 and cyl_err <= 1e-8 and secs <= 10)
    acceptance(2, "flux conservation", ok,
               f"twizzler spread {rep.max_spread:.2e} (1e-7) over s in [0, {twz.length:.1f}], "
               f"helicoid spread {hrep.max_spread:.2e} max |flux| {hel_max:.2e} (1e-10), "
               f"cylinder |flux - pi R r| {cyl_err:.2e} (1e-8), {secs:.2f}s (<= 10s)")
    assert ok


def test_3_cmc_verification(acceptance, twz):
    t0 = time.perf_counter()
    S = tw.build_surface(twz)
    dev = sf.curvature_report(S, 1.0, 40, 40).max_abs_deviation
    odev = 0.0
    us, vs = S.grid(40, 40, 0.02)
    for u in us:
        for v in vs:
            odev = max(odev, abs(sf.fd_curvature_oracle(S, u, v) - 1.0))
    secs = time.perf_counter() - t0
    ok = dev <= 1e-6 and odev <= 1e-3 and secs <= 10
    acceptance(3, "CMC verification", ok,
               f"fundamental forms {dev:.2e} (1e-6), oracle {odev:.2e} (1e-3) on 40x40, {secs:.2f}s (<= 10s)")
    assert ok


def test_4_cap_independence(acceptance, twz):
    Y = _rot(1.0)
    worst = 0.0
    for idx in np.linspace(0, len(twz) - 1, 5).astype(int):
        p, gd = complex(twz.gamma[idx]), complex(twz.tangent[idx])
        helix = fx.BoundaryHelix(p, 1.0, gd)
        vals = [fx.alternate_cap_flux(p, arc, Y, 1.0, helix=helix)
                for arc in (fx.segment_arc(p), fx.detour_arc(p), fx.folded_arc(p))]
        worst = max(worst, max(vals) - min(vals))
    ok = worst <= 1e-7
    acceptance(4, "cap independence", ok, f"max pairwise difference {worst:.2e} (1e-7) at 5 points")
    assert ok


def test_5_two_route_consistency(acceptance):
    traj, rec, direct, angle = vf.support_two_route(1.0, 1.0, 0.8, 1.0)
    d, _ = tw.aligned_hausdorff(direct.gamma, rec.gamma, angle)
    rt = max(abs(tw.support_from_curve(rec.gamma, t, directions=traj.t) - k) for t, k in zip(traj.t, traj.k))
    ok = d <= 1e-5 and rt <= 1e-8 and rec.params.c == PI * 1.0 * 0.8
    acceptance(5, "two-route consistency", ok,
               f"C = 0.8, aligned Hausdorff {d:.2e} (1e-5), support round trip {rt:.2e} (1e-8)")
    assert ok


def test_6_phase_portrait(acceptance):
    pp = tw.phase_portrait_samples(1.0, 1.0, levels=(0.2, 0.5, 0.8))
    sym = float(np.max(np.abs(pp.F - pp.F[::-1, :])))
    x, F = tw.critical_point_y0(1.0, 1.0)
    worst = 0.0
    for C in (0.2, 0.5, 0.8, 0.95):
        traj = tw.integrate_support(tw.SupportParams(1.0, 1.0, C), 1.0, 1, 1500, 2e-3)
        worst = max(worst, float(traj.level_residuals.max()))
    ok = sym == 0.0 and abs(x - 1) <= 1e-12 and abs(F - 1) <= 1e-12 and worst <= 1e-9
    acceptance(6, "phase-portrait invariants", ok,
               f"symmetry defect {sym:.1e} (exact), critical point |x - 1/H| {abs(x - 1):.1e} "
               f"|F - 1/H| {abs(F - 1):.1e} (1e-12), level residual {worst:.2e} (1e-9)")
    assert ok


def test_7_converse_instances(acceptance):
    cyl = tw.circle_curve(2.0, 1.0, 1.0)
    rep = fx.curve_flux_report(cyl, H=1.0)
    S = tw.build_surface(cyl)
    gaps = [abs(h - 1.0) for _, _, h, _ in sf.curvature_report(S, 1.0, 20, 20).samples]
    gap_ok = max(abs(g - 0.5) for g in gaps) <= 1e-12

    Yx = KillingField.translation(AmbientSpace.euclid3(), (1, 0, 0))
    spreads = {}
    for name, prof in (("sphere", unit_sphere_profile()), ("unduloid", integrate_delaunay(1.0, 0.3, 1.0, s_fwd=8.0))):
        vals = [fx.disk_cap_flux_revolution(prof.rho[i], prof.x[i], Yx, prof.H,
                                            (math.cos(prof.theta[i]), math.sin(prof.theta[i]))).flux
                for i in range(0, len(prof.s), 100)]
        spreads[name] = max(vals) - min(vals)
    pert = fx.curve_flux_report(vf.perturbed_curve(1.0, 1.0, 0.1), H=1.0)
    ok = (rep.max_spread <= 1e-9 and gap_ok and spreads["sphere"] <= 1e-7 and spreads["unduloid"] <= 1e-7
          and pert.max_spread >= 1e-3)
    acceptance(7, "converse instances", ok,
               f"cylinder spread {rep.max_spread:.2e} (1e-9) with |h - H| = 0.5, sphere spread "
               f"{spreads['sphere']:.2e}, unduloid spread {spreads['unduloid']:.2e} (1e-7), "
               f"perturbed spread {pert.max_spread:.2e} (>= 1e-3)")
    assert ok


def test_8_orbit_space(acceptance, twz):
    ss = np.linspace(twz.s[0], twz.s[-1], 50)
    dev = max(abs(tw.orbit_space_weighted_curvature(*twz.jets(s), 1.0) - 1.0) for s in ss)
    ok = dev <= 1e-5
    acceptance(8, "orbit-space reformulation", ok, f"max |h_mu - 1| {dev:.2e} (1e-5) at 50 points")
    assert ok


def test_9_full_suite(acceptance, tmp_path):
    texts, times, codes = [], [], []
    out = tmp_path / "run"   # the output path is part of the echoed config
    for _ in range(2):
        t0 = time.perf_counter()
        r = subprocess.run([sys.executable, "-m", "cmcflux", "verify", "--all", "--no-timing", "--out", str(out)],
                           capture_output=True, text=True)
        times.append(time.perf_counter() - t0)
        codes.append(r.returncode)
        texts.append((out / "verify.json").read_bytes())
    summary = json.loads(texts[0])
    n = len(summary["checks"])
    ok = codes == [0, 0] and texts[0] == texts[1] and summary["passed"] and max(times) <= 60
    acceptance(9, "full verify --all suite", ok,
               f"exit codes {codes}, {n} checks over {len(summary['scenarios'])} scenarios, "
               f"JSON identical: {texts[0] == texts[1]}, slowest run {max(times):.1f}s (<= 60s)")
    assert ok
