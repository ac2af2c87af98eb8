import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twistline.classical import ClassicalState, classical_orbit, guiding_center, orbit_invariants, trajectory
from twistline.constants import ELECTRON, PROTON, field_scales
from twistline.errors import DomainError

vel = st.tuples(st.floats(-0.3, 0.3), st.floats(-0.3, 0.3), st.floats(-0.3, 0.3)).filter(
    lambda v: math.hypot(v[0], v[1]) > 1e-6)
pos = st.tuples(st.floats(-1e-3, 1e-3), st.floats(-1e-3, 1e-3), st.floats(-1e-3, 1e-3))


@settings(max_examples=50)
@given(pos, vel, st.sampled_from([ELECTRON, PROTON]), st.floats(0.01, 10.0), st.floats(0.0, 5.0))
def test_orbit_conserves_speed_and_radius(p, v, sp, H, frac):
    init = ClassicalState(p, v)
    t = frac * field_scales(sp, H).T_c
    s = classical_orbit(init, sp, H, t)
    assert math.hypot(*s.velocity[:2]) == pytest.approx(math.hypot(*v[:2]), rel=1e-12)
    g = guiding_center(init, sp, H)
    rc = abs(orbit_invariants(init, sp, H).rho_c)
    assert math.hypot(s.position[0] - g[0], s.position[1] - g[1]) == pytest.approx(rc, rel=1e-9, abs=1e-15)


@settings(max_examples=30)
@given(pos, vel, st.floats(0.1, 5.0))
def test_orbit_is_periodic(p, v, H):
    init = ClassicalState(p, v)
    Tc = field_scales(ELECTRON, H).T_c
    s = classical_orbit(init, ELECTRON, H, Tc)
    scale = 1e-3 + abs(orbit_invariants(init, ELECTRON, H).rho_c)
    for a, b in zip(s.position[:2], p[:2]):
        assert abs(a - b) <= 1e-9 * scale


def test_velocity_is_derivative_of_position():
    init = ClassicalState((0.0, 0.0, 0.0), (0.01, 0.0, 0.05))
    Tc = field_scales(PROTON, 1.0).T_c
    h = Tc * 1e-6
    a = classical_orbit(init, PROTON, 1.0, 0.3 * Tc - h).position
    b = classical_orbit(init, PROTON, 1.0, 0.3 * Tc + h).position
    v = classical_orbit(init, PROTON, 1.0, 0.3 * Tc).velocity
    fd = [(y - x) / (2 * h) / 299792458.0 for x, y in zip(a, b)]
    np.testing.assert_allclose(fd, v, rtol=1e-6, atol=1e-12)


def test_rotation_sense_follows_charge():
    init = ClassicalState((0, 0, 0), (0.01, 0, 0))
    for sp in (ELECTRON, PROTON):
        t = 0.1 * field_scales(sp, 1.0).T_c
        vy = classical_orbit(init, sp, 1.0, t).velocity[1]
        # positive charges gyrate clockwise about +z
        assert math.copysign(1, vy) == -sp.charge_sign


def test_invariants_relations():
    init = ClassicalState((0, 0, 0), (0.02, 0.01, 0.0))
    inv = orbit_invariants(init, ELECTRON, 2.0)
    assert inv.L_z_int == -2 * inv.I
    assert inv.L_z_can_int == 0.5 * inv.L_z_int
    # pi rho_c^2 H = 2 pi hbar |I| / |e|
    assert inv.flux == pytest.approx(2 * math.pi * 1.054571817e-34 * abs(inv.I) / 1.602176634e-19, rel=1e-9)


def test_trajectory_shape_and_validation():
    init = ClassicalState((0, 0, 0), (0.01, 0, 0.1))
    assert trajectory(init, ELECTRON, 1.0, [0.0, 1e-12, 2e-12]).shape == (3, 3)
    with pytest.raises(DomainError):
        ClassicalState((0, 0, 0), (0.8, 0.8, 0))
    with pytest.raises(DomainError):
        ClassicalState((0, 0), (0, 0, 0))
