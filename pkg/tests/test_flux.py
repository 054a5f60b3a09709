import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmcflux import flux as fx
from cmcflux import twizzler as tw
from cmcflux.ambient import AmbientSpace, KillingField, LogDensity
from cmcflux.errors import DomainError

PI = math.pi


def Yrot(R):
    return KillingField.plane_rotation(AmbientSpace.cylinder_product(R))


def test_cap_term_examples():
    assert fx.cap_flux_term(fx.HelicoidalCap(1 + 0j, 1.0), Yrot(1.0), 1.0) == pytest.approx(PI, rel=1e-12)
    assert fx.cap_flux_term(fx.HelicoidalCap(0.5j, 2.0), Yrot(2.0), 3.0) == pytest.approx(1.5 * PI, rel=1e-12)
    assert fx.cap_flux_term(fx.HelicoidalCap(0.5j, 2.0), KillingField.screw(AmbientSpace.cylinder_product(2.0)), 0.0) == 0.0


def test_conormal_term_examples():
    R, r = 1.7, 2.0
    circle = fx.BoundaryHelix(r + 0j, R, 1j * r)
    assert fx.conormal_flux_term(circle, Yrot(R)) == pytest.approx(2 * PI * R * r, rel=1e-12)
    radial = fx.BoundaryHelix(1.5 + 0j, R, 1.0)
    assert abs(fx.conormal_flux_term(radial, Yrot(R))) < 1e-13
    a = fx.conormal_flux_term(fx.BoundaryHelix(0.3 + 0.8j, R, 0.4 - 1j), Yrot(R))
    b = fx.conormal_flux_term(fx.BoundaryHelix(0.3 + 0.8j, R, 7 * (0.4 - 1j)), Yrot(R))
    assert a == pytest.approx(b, rel=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.5, 3), st.floats(0.1, 3), st.floats(0, 2 * PI), st.floats(0, 2 * PI), st.floats(0, 2))
def test_closed_forms_match_quadrature(R, rho, arg_p, arg_d, H):
    p = rho * complex(math.cos(arg_p), math.sin(arg_p))
    gd = complex(math.cos(arg_d), math.sin(arg_d))
    s = fx.flux(fx.HelicoidalCap(p, R), fx.BoundaryHelix(p, R, gd), Yrot(R), H)
    assert s.cap_term == pytest.approx(fx.cap_closed_form(p, R, H), rel=1e-9, abs=1e-12)
    assert s.conormal_term == pytest.approx(fx.conormal_closed_form(p, gd, R), rel=1e-9, abs=1e-11)
    assert s.reduced_conormal == pytest.approx(s.conormal_term, rel=1e-9, abs=1e-11)


def test_conormal_orientation(twz):
    h = fx.BoundaryHelix(complex(twz.gamma[10]), 1.0, complex(twz.tangent[10]))
    v = np.linspace(0, 2 * PI, 9)
    eta = fx.conormal(h, v)
    _, Xu, Xv = h.frame(v)
    assert np.allclose(np.einsum("ij,ij->i", eta, Xv), 0, atol=1e-14)
    assert np.allclose(np.linalg.norm(eta, axis=1), 1)


def test_helicoid_flux_zero(helicoid_curve):
    rep = fx.curve_flux_report(helicoid_curve, H=0.0, n_samples=8)
    assert np.max(np.abs(rep.fluxes)) < 1e-12


def test_cylinder_flux_closed_form():
    R, r = 1.0, 2.0
    rep = fx.curve_flux_report(tw.circle_curve(r, R, 1 / r), n_samples=8)
    assert np.allclose(rep.fluxes, PI * R * r, atol=1e-10)


def test_twizzler_flux_is_c(twz):
    rep = fx.curve_flux_report(twz, n_samples=20)
    assert np.allclose(rep.fluxes, 0.3, atol=1e-9)
    assert rep.max_spread <= 1e-7


def test_flux_linear_in_field(twz):
    p, gd = complex(twz.gamma[50]), complex(twz.tangent[50])
    C = AmbientSpace.cylinder_product(1.0)
    s1 = fx.flux(fx.HelicoidalCap(p, 1.0), fx.BoundaryHelix(p, 1.0, gd), KillingField.screw(C), 1.0)
    s2 = fx.flux(fx.HelicoidalCap(p, 1.0), fx.BoundaryHelix(p, 1.0, gd), 3 * KillingField.screw(C), 1.0)
    assert s2.flux == pytest.approx(3 * s1.flux, rel=1e-12)


def test_density_weighting_changes_value(twz):
    p, gd = complex(twz.gamma[50]), complex(twz.tangent[50])
    mu = LogDensity.orbit_length(1.0)
    s0 = fx.flux(fx.HelicoidalCap(p, 1.0), fx.BoundaryHelix(p, 1.0, gd), Yrot(1.0), 1.0)
    s1 = fx.flux(fx.HelicoidalCap(p, 1.0), fx.BoundaryHelix(p, 1.0, gd), Yrot(1.0), 1.0, mu)
    assert s1.reduced_conormal is None
    assert abs(s1.flux - s0.flux) > 1e-3


@pytest.mark.parametrize("arc", [fx.segment_arc, fx.detour_arc, fx.folded_arc])
def test_alternate_caps_agree(arc, twz):
    p, gd = complex(twz.gamma[2000]), complex(twz.tangent[2000])
    ref = fx.cap_flux_term(fx.HelicoidalCap(p, 1.0), Yrot(1.0), 1.0)
    assert fx.alternate_cap_flux(p, arc(p), Yrot(1.0), 1.0) == pytest.approx(ref, abs=1e-9)


def test_mismatched_pieces_rejected():
    with pytest.raises(DomainError):
        fx.flux(fx.HelicoidalCap(1 + 0j, 1.0), fx.BoundaryHelix(2 + 0j, 1.0, 1j), Yrot(1.0), 1.0)
    with pytest.raises(DomainError):
        fx.alternate_cap_flux(1 + 0j, fx.segment_arc(2 + 0j), Yrot(1.0), 1.0)
    with pytest.raises(DomainError):
        fx.conormal_flux_term(fx.BoundaryHelix(1 + 0j, 1.0, 0j), Yrot(1.0))


def test_revolution_disk_flux_examples():
    E = AmbientSpace.euclid3()
    Yx = KillingField.translation(E, (1, 0, 0))
    r = 2.0
    for x0 in (-1.0, 0.0, 2.5):
        s = fx.disk_cap_flux_revolution(r, x0, Yx, 1 / r)
        assert s.flux == pytest.approx(PI * r, abs=1e-12)
        assert s.abs_err < 1e-12
    eq = fx.disk_cap_flux_revolution(1.0, 0.0, Yx, 2.0, tangent=(1.0, 0.0))
    assert eq.flux == pytest.approx(0.0, abs=1e-12)


def test_catenoid_force_constant():
    E = AmbientSpace.euclid3()
    Yx = KillingField.translation(E, (1, 0, 0))
    a = 0.7
    vals = []
    for x in np.linspace(-1, 1, 7):
        rho, drho = a * math.cosh(x / a), math.sinh(x / a)
        vals.append(fx.disk_cap_flux_revolution(rho, x, Yx, 0.0, tangent=(1.0, drho)).flux)
    assert np.ptp(vals) < 1e-12
    assert vals[0] == pytest.approx(2 * PI * a, rel=1e-12)
