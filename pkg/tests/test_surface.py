import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmcflux import surface as sf
from cmcflux import twizzler as tw
from cmcflux.ambient import AmbientSpace, LogDensity
from cmcflux.errors import SingularityError


def test_cylinder_normal_is_outward():
    S = sf.cylinder_patch(2.0)
    for u, v in [(0.1, 0.3), (-0.5, 2.0)]:
        X = S.position(u, v)
        n = sf.unit_normal(S, u, v)
        radial = np.array([0.0, X[1], X[2]]) / 2.0
        assert np.allclose(n, radial, atol=1e-14)


def test_plane_normal():
    assert np.allclose(sf.unit_normal(sf.plane_patch(), 0.2, -0.4), [0, 0, 1])


def test_line_twizzler_normal():
    S = sf.helicoidal_surface(lambda u: (complex(u), 1 + 0j, 0j), 1.0, (0.5, 2.0), AmbientSpace.cylinder_product(1.0))
    n = sf.unit_normal(S, 1.0, 0.0)
    assert abs(n @ [1, 0, 0]) < 1e-15
    assert abs(n @ [0, 1, 1]) < 1e-15
    assert np.linalg.norm(n) == pytest.approx(1.0)


@pytest.mark.parametrize("r", [0.5, 2.0, 3.0])
def test_cylinder_mean_curvature(r):
    S = sf.cylinder_patch(r)
    assert sf.mean_curvature(S, 0.3, 1.1) == pytest.approx(1 / r, abs=1e-13)


def test_sphere_mean_curvature():
    assert abs(sf.mean_curvature(sf.sphere_patch(1.0), 1.0, 0.5)) == pytest.approx(2.0, abs=1e-13)


def test_helicoid_is_minimal():
    S = sf.helicoid_patch(1.3)
    us, vs = S.grid(8, 8)
    for u in us:
        for v in vs:
            assert abs(sf.mean_curvature(S, u, v)) < 1e-12
            assert abs(sf.fd_curvature_oracle(S, u, v)) < 1e-4


def test_orientation_flip_negates_h():
    S = sf.sphere_patch(0.7)
    assert sf.mean_curvature(S.flipped(), 1.0, 2.0) == pytest.approx(-sf.mean_curvature(S, 1.0, 2.0), abs=1e-12)
    assert sf.mean_curvature(S.swapped(), 2.0, 1.0) == pytest.approx(-sf.mean_curvature(S, 1.0, 2.0), abs=1e-12)


def test_analytic_and_fd_jets_agree(twz_surface):
    S = twz_surface
    for u in (0.5, 2.0, 3.5):
        a, b = S.jet(u, 0.7), S.fd_jet(u, 0.7)
        for x, y in zip(a, b):
            assert np.allclose(x, y, atol=1e-6)


def test_degenerate_point_raises():
    # the cone point of a revolution profile through the axis
    S = sf.surface_of_revolution(lambda u: (u, u, 1.0, 1.0, 0.0, 0.0), (0.0, 1.0))
    with pytest.raises(SingularityError):
        sf.mean_curvature(S, 0.0, 0.5)
    rep = sf.curvature_report(S, 0.0, 5, 5)
    assert rep.singular


@pytest.mark.parametrize("S,h", [(sf.sphere_patch(1.0), 2.0), (sf.cylinder_patch(2.0), 0.5)])
def test_oracle_examples(S, h):
    assert sf.fd_curvature_oracle(S, 1.0, 0.4) == pytest.approx(h, abs=1e-4)


def test_oracle_on_twizzler(twz_surface):
    assert sf.fd_curvature_oracle(twz_surface, 2.0, 1.0) == pytest.approx(1.0, abs=1e-3)


def test_weighted_zero_density_is_h(twz_surface):
    z = LogDensity.zero()
    h = sf.mean_curvature(twz_surface, 1.0, 0.2)
    assert abs(sf.weighted_mean_curvature(twz_surface, z, 1.0, 0.2) - h) <= 1e-15


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 4.0), st.floats(0, 2 * math.pi))
def test_planar_circle_weighted_curvature(r, t):
    mu = LogDensity.orbit_length(1.0)
    c = sf.PlanarCurve(lambda s: (r * np.exp(1j * s), 1j * r * np.exp(1j * s), -r * np.exp(1j * s)))
    assert sf.weighted_mean_curvature(c, mu, t) == pytest.approx(1 / r + r / (1 + r * r), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.1, 1.5), st.floats(0, 6))
def test_cylinder_h_property(r, u, v):
    assert sf.mean_curvature(sf.cylinder_patch(r), u, v) == pytest.approx(1 / r, rel=1e-12)


def test_obj_roundtrip(tmp_path, twz_surface):
    path = tmp_path / "m.obj"
    counts = sf.write_obj(path, twz_surface, 12, 8, header="test")
    verts, norms, faces = sf.read_obj(path)
    assert counts == {"vertices": 96, "faces": 11 * 8 * 2}
    assert len(verts) == len(norms) == 96 and len(faces) == counts["faces"]
    # closed in v: every edge of the v-ring is shared by two faces except the u-boundary
    assert np.asarray(faces).max() == 96


def test_obj_winding_matches_normal(tmp_path):
    S = sf.cylinder_patch(1.0)
    sf.write_obj(tmp_path / "c.obj", S, 6, 10)
    verts, norms, faces = sf.read_obj(tmp_path / "c.obj")
    V, N = np.asarray(verts), np.asarray(norms)
    for f in faces[:20]:
        a, b, c = (V[i - 1] for i in f)
        assert np.cross(b - a, c - a) @ N[f[0] - 1] > 0


def test_screw_invariance_of_h(twz_surface):
    from cmcflux.ambient import KillingField
    from cmcflux.verify import transformed_surface

    moved = transformed_surface(twz_surface, KillingField.screw(twz_surface.ambient), 1.3)
    for u in (0.4, 1.9, 3.3):
        assert abs(sf.mean_curvature(moved, u, 0.5) - sf.mean_curvature(twz_surface, u, 0.5)) <= 1e-10


def test_circle_builds_cylinder():
    S = tw.build_surface(tw.circle_curve(2.0, 1.0, 0.5))
    assert sf.mean_curvature(S, 1.0, 0.3) == pytest.approx(0.5, abs=1e-14)
