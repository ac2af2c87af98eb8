import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twistline import oracle
from twistline.constants import C_LIGHT, ELECTRON, PROTON, cyclotron_wavenumber, electric_gradient, field_scales
from twistline.elements import (Classification, Element, ElementKind, Matching, canonical_uperp2, classify,
                                crossed_averaged_moments, crossed_centroid, crossed_field_rms, crossed_rms,
                                centroid_decomposition, electrostatic_rms, face_transition, fringe_field,
                                kinetic_angular_momentum, landau_props, lens_report, lens_report_solenoid,
                                match_landau, rho2_stationary, solenoid_angular, solenoid_rms)
from twistline.errors import DomainError
from twistline.packets import Family, PacketSpec, moments_transverse

LAM = ELECTRON.compton_wavelength
M_IN = moments_transverse(PacketSpec(Family.STANDARD_LG, 20e-9, n=1, ell=2), 1e-12)


def _lk(m, sp, H):
    return sp.compton_wavelength * m.ell - 0.5 * cyclotron_wavenumber(sp, H) * m.rho2


fields = st.tuples(st.floats(0.05, 5.0), st.floats(-5e8, 5e8))


@settings(max_examples=60)
@given(fields, st.floats(0.0, 3.0), st.sampled_from([ELECTRON, PROTON]))
def test_in_field_invariant(hf, frac, sp):
    # R U2 - C^2 - Lk^2 is conserved by the moment equations
    H, Ep = hf
    m_in = moments_transverse(PacketSpec(Family.ELEGANT_LG, 20e-9, n=1, ell=-1, species=sp), 0.0)
    m0 = face_transition(m_in, sp, 0.0, H)
    t = frac * field_scales(sp, H).T_c
    try:
        m = crossed_rms(m_in, sp, H, Ep, t)
    except DomainError:
        return
    inv = lambda x: x.rho2 * x.uperp2 - x.rho_u**2 - _lk(x, sp, H) ** 2
    scale = m.rho2 * m.uperp2 + m0.rho2 * m0.uperp2
    assert abs(inv(m) - inv(m0)) <= 1e-9 * scale


@settings(max_examples=15, deadline=None)
@given(fields)
def test_crossed_matches_rk4(hf):
    H, Ep = hf
    sp = ELECTRON
    kap = oracle.cyclotron_wavenumber(sp.mass, sp.charge_number, H)
    k = oracle.electric_gradient(sp.mass, sp.charge_number, Ep)
    om2 = kap * kap - 4.0 * k
    rate = math.sqrt(abs(om2)) or abs(kap)
    tau = 2.0 / rate
    m0 = face_transition(M_IN, sp, 0.0, H)
    _, ys = oracle.ode_moments(oracle.OdeRun("crossed", tau, steps=4000, kappa=kap, k=k),
                               [m0.rho2, m0.rho_u, m0.uperp2, _lk(m0, sp, H)])
    m = crossed_field_rms(m0, sp, H, Ep, tau / C_LIGHT)
    assert m.rho2 == pytest.approx(ys[-1, 0], rel=1e-8)
    assert m.uperp2 == pytest.approx(ys[-1, 2], rel=1e-8)


@given(st.floats(0.01, 10.0), st.floats(-5.0, 5.0))
def test_canonical_face_round_trip(H, H2):
    a = face_transition(M_IN, ELECTRON, 0.0, H)
    assert canonical_uperp2(a, ELECTRON, H) == pytest.approx(M_IN.uperp2, rel=1e-12)
    b = face_transition(a, ELECTRON, H, H2)
    assert canonical_uperp2(b, ELECTRON, H2) == pytest.approx(M_IN.uperp2, rel=1e-12)
    back = face_transition(b, ELECTRON, H2, 0.0)
    assert back.uperp2 == pytest.approx(M_IN.uperp2, rel=1e-10)
    assert back.rho2 == M_IN.rho2 and back.ell == M_IN.ell


def test_face_kicks_centroid_velocity():
    m = M_IN.replace(centroid=(1e-9, -2e-9))
    out = face_transition(m, PROTON, 0.0, 1.0)
    dk = cyclotron_wavenumber(PROTON, 1.0)
    assert out.centroid_velocity == pytest.approx((0.5 * dk * -2e-9, -0.5 * dk * 1e-9))


def test_kinetic_matching_keeps_kinetic_moments_or_refuses():
    out = face_transition(M_IN, ELECTRON, 0.0, 0.1, Matching.KINETIC)
    assert out == M_IN
    wide = moments_transverse(PacketSpec(Family.STANDARD_LG, 20e-9, ell=3), 1e-10)
    with pytest.raises(DomainError):
        face_transition(wide, ELECTRON, 0.0, 1.0, "kinetic")


def test_solenoid_is_periodic_in_cyclotron_period():
    Tc = field_scales(ELECTRON, 2.0).T_c
    a = solenoid_rms(M_IN, ELECTRON, 2.0, 0.37 * Tc)
    b = solenoid_rms(M_IN, ELECTRON, 2.0, 1.37 * Tc)
    assert b.rho2 == pytest.approx(a.rho2, rel=1e-9)


def test_electrostatic_branches():
    # k > 0 defocuses (cosh growth), k < 0 oscillates
    t = 1e-11
    grow = electrostatic_rms(M_IN, ELECTRON, -3e8, t).rho2
    osc = electrostatic_rms(M_IN, ELECTRON, 3e8, t).rho2
    free = electrostatic_rms(M_IN, ELECTRON, 0.0, t).rho2
    assert grow > free > osc


def test_classification():
    assert classify(ELECTRON, 0.0, 0.0) is Classification.FREE
    assert classify(ELECTRON, 0.1, -1e9) is Classification.GLOBALLY_DEFOCUSING
    kap = cyclotron_wavenumber(ELECTRON, 1.0)
    Ep_frozen = kap * kap / 4.0 * ELECTRON.mass / ELECTRON.charge_number
    assert classify(ELECTRON, 1.0, Ep_frozen) is Classification.FROZEN
    assert classify(ELECTRON, 1.0, 0.0, 1.0, 0.5) is Classification.FOCUSING_SHORT_TIME
    assert classify(ELECTRON, 1.0, 0.0, 1.0, 2.0) is Classification.DEFOCUSING_SHORT_TIME


@pytest.mark.parametrize("sp", [ELECTRON, PROTON])
def test_landau_props(sp):
    lp = landau_props(sp, 1.0, 0, 0)
    sc = field_scales(sp, 1.0)
    assert lp.rho2_LG == pytest.approx(0.5 * sc.rho_H**2)
    assert lp.Lz_kin_LG == -sp.charge_sign
    assert rho2_stationary(sp, 1.0, lp.eps_perp, 0) == pytest.approx(lp.rho2_LG, rel=1e-12)
    with pytest.raises(DomainError):
        landau_props(sp, 1.0, -1, 0)


def test_stationary_radius_rejects_impossible_state():
    with pytest.raises(DomainError):
        rho2_stationary(ELECTRON, 1.0, 0.0, 5)


def test_match_landau():
    m = match_landau(PacketSpec(Family.STANDARD_LG, 10e-9, n=2, ell=1), ELECTRON, 1.0)
    assert m.M_in == 6.0 and m.M_in_quoted == 4.0
    assert m.n_H == pytest.approx(18.246, abs=1e-3)
    assert m.n_H_nearest == 18
    with pytest.raises(DomainError):
        match_landau(PacketSpec(Family.ELEGANT_LG, 10e-9), ELECTRON, 1.0)


def test_solenoid_angular_report():
    rep = solenoid_angular(M_IN, ELECTRON, 1.0, 1e-12)
    assert rep.Lz_kin == pytest.approx(M_IN.ell + rep.jump - 0.5 * cyclotron_wavenumber(ELECTRON, 1.0) *
                                       (solenoid_rms(M_IN, ELECTRON, 1.0, 1e-12).rho2 - M_IN.rho2) / LAM)
    assert rep.flux_quantum_count == pytest.approx(abs(rep.jump) * 0.5 * 2, rel=1e-12)


def test_lens_reports():
    sol = lens_report_solenoid(M_IN, ELECTRON, 1.0, dwell_time=1e-13)
    gen = lens_report(Element(ElementKind.SOLENOID, 1e-2, H=1.0), M_IN, ELECTRON)
    assert sol.mean_rho2 == pytest.approx(gen.mean_rho2, rel=1e-12)
    assert sol.classification is gen.classification
    assert sol.paraxial_ok is True
    matched = lens_report_solenoid(M_IN, ELECTRON, 1.0, matched=landau_props(ELECTRON, 1.0, 0, 0))
    assert matched.effective_M == pytest.approx(math.sqrt(2 * 1 * (1 + 0)))
    free = lens_report(Element(ElementKind.DRIFT, 1.0), M_IN, ELECTRON)
    assert free.classification is Classification.FREE
    bad = lens_report(Element(ElementKind.CROSSED_LENS, 1.0, H=0.1, E_rho_prime=-1e9), M_IN, ELECTRON)
    assert bad.classification is Classification.GLOBALLY_DEFOCUSING and math.isfinite(bad.t_d_thin)
    pen = lens_report(Element(ElementKind.PENNING_TRAP, 1.0, H=1.0, a=1e7), M_IN, ELECTRON)
    assert pen.period > field_scales(ELECTRON, 1.0).T_c


def test_centroid_decomposition_sums():
    m = M_IN.replace(centroid=(5e-9, 0.0))
    d = centroid_decomposition(m, ELECTRON, 1.0, 3e-12)
    assert d.Lz_kin == pytest.approx(d.Lz_cyclo + d.Lz_wavepacket, rel=1e-12)


@given(st.floats(0.1, 5.0), st.floats(-3e8, 1e8), st.floats(0.0, 5e-11))
def test_crossed_centroid_agrees_with_moment_propagation(H, Ep, t):
    sp = ELECTRON
    if electric_gradient(sp, Ep) * 4 >= cyclotron_wavenumber(sp, H) ** 2 * 0.99:
        return
    m0 = face_transition(M_IN.replace(centroid=(3e-9, 1e-9)), sp, 0.0, H)
    cs = crossed_centroid(m0.centroid, m0.centroid_velocity, sp, H, Ep, t)
    m = crossed_field_rms(m0, sp, H, Ep, t)
    np.testing.assert_allclose(cs.position, m.centroid, rtol=1e-7, atol=1e-16)


def test_averaged_moments_match_numerical_average():
    sp, H, Ep = ELECTRON, 1.0, -1e8
    m_in = M_IN.replace(centroid=(2e-9, 0.0), centroid_velocity=(0.0, 1e-5))
    avg = crossed_averaged_moments(m_in, sp, H, Ep)
    cs = crossed_centroid(*[face_transition(m_in, sp, 0.0, H).centroid,
                            face_transition(m_in, sp, 0.0, H).centroid_velocity], sp, H, Ep, 0.0)
    # the two centroid modes beat; average over many of their periods
    T = 2 * math.pi / abs(cs.omega1 - cs.omega2) * 200
    ts = np.linspace(0.0, T, 40001)
    r2 = np.mean([crossed_rms(m_in, sp, H, Ep, t).rho2 for t in ts[::40]])
    c2 = np.mean([sum(x * x for x in crossed_centroid(cs.position, cs.velocity, sp, H, Ep, t).position) for t in ts])
    assert avg.mean_rho2 == pytest.approx(r2, rel=2e-2)
    assert avg.mean_centroid2 == pytest.approx(c2, rel=2e-2)
    with pytest.raises(DomainError):
        crossed_averaged_moments(m_in, sp, 0.1, -1e9)


def test_fringe_field_smooth_profile():
    zs = np.linspace(-0.1, 0.1, 2001)
    a = 0.01
    Hs = np.tanh(zs / a)
    f = fringe_field(1e-3, 0.005, zs, Hs)
    sech2 = 1.0 / np.cosh(0.5) ** 2
    assert f.H_rho == pytest.approx(-0.5e-3 * sech2 / a, rel=1e-4)
    assert f.curvature_term == pytest.approx(-0.25e-6 * (-2 * np.tanh(0.5) * sech2 / a**2), rel=1e-3)
    assert not f.edge_flag


def test_fringe_field_hard_edge_and_errors():
    zs = np.linspace(0, 1, 11)
    Hs = np.where(zs < 0.45, 0.0, 1.0)
    f = fringe_field(1e-3, 0.45, zs, Hs)
    assert f.edge_flag and math.isnan(f.H_rho)
    with pytest.raises(DomainError):
        fringe_field(1e-3, 0.5, zs[:4], Hs[:4])
    with pytest.raises(DomainError):
        fringe_field(1e-3, 2.0, zs, Hs)


@pytest.mark.parametrize("kwargs", [
    dict(kind="drift", length=0.0), dict(kind="drift", length=1.0, H=1.0),
    dict(kind="solenoid", length=1.0, E_rho_prime=1.0), dict(kind="lens", length=1.0, H=1.0),
    dict(kind="crossed", length=1.0, a=1.0), dict(kind="penning", length=1.0, a=1.0, E_rho_prime=1.0),
])
def test_element_validation(kwargs):
    with pytest.raises(DomainError):
        Element(**kwargs)


def test_penning_gradient():
    assert Element("penning", 1.0, H=1.0, a=3.0).gradient == -6.0


def test_kinetic_am_formula():
    assert kinetic_angular_momentum(M_IN, ELECTRON, 0.0) == M_IN.ell
