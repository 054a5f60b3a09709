import numpy as np
import pytest

from cmcflux import surface as sf
from cmcflux.errors import DomainError, SeedingError
from cmcflux.revolution import integrate_delaunay, profile_first_integral, unit_sphere_profile


def test_sphere_profile_is_round():
    prof = unit_sphere_profile()
    assert np.max(np.abs(np.hypot(prof.x, prof.rho) - 1)) < 1e-10
    S = prof.surface(0.05)
    us, vs = S.grid(6, 6)
    for u in us:
        assert sf.mean_curvature(S, u, vs[2]) == pytest.approx(2.0, abs=1e-9)


def test_unduloid_first_integral_and_h():
    prof = integrate_delaunay(1.0, 0.3, 1.0, s_fwd=6.0)
    assert prof.residuals.max() < 1e-13
    S = prof.surface(0.01)
    rep = sf.curvature_report(S, 1.0, 20, 6)
    assert rep.max_abs_deviation < 1e-8
    assert prof.rho.min() > 0.1


def test_unduloid_not_translation_invariant():
    prof = integrate_delaunay(1.0, 0.3, 1.0, s_fwd=8.0)
    assert prof.translation_defect(0.1) > 1e-3


def test_cylinder_profile_translation_invariant():
    prof = integrate_delaunay(1.0, 0.5, 1.0, s_fwd=3.0)   # rho = 1/H, theta = 0
    assert np.ptp(prof.rho) < 1e-13
    assert prof.translation_defect(0.5) < 1e-12


def test_bad_seed():
    with pytest.raises(SeedingError) as exc:
        integrate_delaunay(1.0, 5.0, 1.0)
    assert exc.value.interval[1] == pytest.approx(0.5)
    with pytest.raises(DomainError):
        integrate_delaunay(1.0, 0.3, -1.0)


def test_first_integral_formula():
    assert profile_first_integral(2.0, 0.0, 0.5) == pytest.approx(1.0)
