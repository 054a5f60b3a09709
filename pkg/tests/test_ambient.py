import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmcflux.ambient import (AmbientSpace, KillingField, LogDensity, apply_screw, divergence_fd,
                             eval_log_density, evaluate_killing)
from cmcflux.errors import DomainError

C1 = AmbientSpace.cylinder_product(1.0)
E3 = AmbientSpace.euclid3()
coord = st.floats(-3, 3, allow_nan=False)


def test_plane_rotation_at_one():
    Y = KillingField.plane_rotation(C1)
    assert np.allclose(evaluate_killing(Y, C1.point(1 + 0j, 0.0)), [0.0, -1.0, 0.0])


def test_fixed_point_gives_zero():
    assert np.allclose(evaluate_killing(KillingField.plane_rotation(C1), C1.point(0j, 2.0)), 0.0)


def test_translation_is_constant():
    Y = KillingField.translation(E3, (1, 0, 0))
    for p in [(0, 0, 0), (3, -1, 2)]:
        assert np.allclose(evaluate_killing(Y, E3.from_unrolled(p)), [1, 0, 0])


def test_screw_generator_direction():
    Y = KillingField.screw(C1)
    z = 0.5 - 2j
    v = evaluate_killing(Y, C1.point(z, 0.3))
    assert complex(v[0], v[1]) == pytest.approx(1j * z)
    assert v[2] == pytest.approx(1.0)


def test_ambient_mismatch_raises():
    with pytest.raises(DomainError):
        evaluate_killing(KillingField.translation(E3, (1, 0, 0)), C1.point(1, 0))
    with pytest.raises(DomainError):
        apply_screw(0.1, E3.from_unrolled((1, 0, 0)))
    with pytest.raises((DomainError, ValueError)):
        AmbientSpace.cylinder_product(-1.0)


def test_killing_linearity():
    Y = KillingField.plane_rotation(C1)
    p = C1.point(0.3 + 0.7j, 1.0)
    assert np.allclose(evaluate_killing(2.5 * Y, p), 2.5 * evaluate_killing(Y, p))
    assert np.allclose(evaluate_killing(Y + Y, p), 2 * evaluate_killing(Y, p))


def test_screw_examples():
    p = C1.point(1 + 0j, 0.0)
    q = apply_screw(0.0, p)
    assert q.z == p.z and q.t == p.t
    q = apply_screw(2 * math.pi, p)
    assert abs(q.z - p.z) < 1e-15 and C1.distance(p, q) < 1e-14
    q = apply_screw(math.pi, p)
    assert abs(q.z - (-1)) < 1e-15 and q.t == pytest.approx(math.pi)


@settings(max_examples=60, deadline=None)
@given(coord, coord, st.floats(0, 2 * math.pi), st.floats(-7, 7), st.floats(-7, 7))
def test_screw_group_law(x, y, t0, s, t):
    p = C1.point(complex(x, y), t0)
    a = apply_screw(s, apply_screw(t, p))
    b = apply_screw(s + t, p)
    assert abs(a.z - b.z) < 1e-12
    assert C1.distance(a, b) < 1e-11


@settings(max_examples=60, deadline=None)
@given(coord, coord, coord, coord, coord, coord, st.floats(-4, 4))
def test_screw_is_isometry(x1, y1, w1, x2, y2, w2, t):
    p, q = C1.from_unrolled((x1, y1, w1)), C1.from_unrolled((x2, y2, w2))
    d0 = C1.distance(p, q)
    d1 = C1.distance(apply_screw(t, p), apply_screw(t, q))
    assert d1 == pytest.approx(d0, abs=1e-11)


def test_theta_reduced():
    p = C1.point(1, 7.0)
    assert 0 <= p.t < 2 * math.pi
    assert p.t == pytest.approx(7.0 - 2 * math.pi)


def test_circle_aware_distance():
    C2 = AmbientSpace.cylinder_product(2.0)
    p, q = C2.point(0, 0.1), C2.point(0, 2 * math.pi - 0.1)
    assert C2.distance(p, q) == pytest.approx(0.4)


@pytest.mark.parametrize("field", [
    KillingField.screw(C1), KillingField.plane_rotation(C1), KillingField.rotation(C1, (0, 0, 1)),
    KillingField.rotation(E3, (1, 2, -1)), KillingField.translation(E3, (0, 1, 1)),
])
def test_divergence_free(field, rng):
    for p in rng.uniform(-2, 2, (20, 3)):
        assert abs(divergence_fd(field, p)) < 1e-6


def test_density_examples():
    z = LogDensity.zero()
    v, g = eval_log_density(z, 1.5 - 2j)
    assert v == 0 and np.all(g == 0)
    mu = LogDensity.orbit_length(1.0)
    assert eval_log_density(mu, 0j)[0] == pytest.approx(math.log(2 * math.pi), abs=1e-15)
    assert eval_log_density(mu, 1j)[0] == pytest.approx(math.log(2 * math.pi * math.sqrt(2)), abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(coord, coord, st.floats(0.3, 3))
def test_density_gradient_matches_fd(x, y, R):
    mu = LogDensity.orbit_length(R)
    p = np.array([x, y])
    _, g = eval_log_density(mu, p)
    h = 1e-6
    fd = [(mu.value(p + h * e) - mu.value(p - h * e)) / (2 * h) for e in np.eye(2)]
    assert np.allclose(g, fd, atol=1e-6)
