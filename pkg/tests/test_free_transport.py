import math

import pytest
from hypothesis import assume, given, strategies as st

from twistline.constants import C_LIGHT, ELECTRON, PROTON
from twistline.errors import DomainError
from twistline.free_transport import (VczRegime, de_broglie_wavelength, diffraction_time, free_spread_1d,
                                      free_spread_transverse, rayleigh_length, twiss_from_moments, twiss_rotate, vcz)
from twistline.packets import Family, PacketSpec, moments_1d, moments_transverse

LG = PacketSpec(Family.STANDARD_LG, 3e-9, n=1, ell=2)


@given(st.floats(0.0, 1e-9), st.floats(0.0, 1e-9))
def test_free_spread_composes(t1, t2):
    m0 = moments_transverse(LG, 0.0)
    a = free_spread_transverse(free_spread_transverse(m0, t1), t2)
    b = free_spread_transverse(m0, t1 + t2)
    assert a.rho2 == pytest.approx(b.rho2, rel=1e-9)
    assert a.rho_u == pytest.approx(b.rho_u, rel=1e-9)
    assert a.time == pytest.approx(b.time, rel=1e-12, abs=1e-30)


@given(st.floats(0.0, 20.0))
def test_free_spread_agrees_with_packet_closed_form(f):
    t = f * LG.diffraction_time()
    a = free_spread_transverse(moments_transverse(LG, 0.0), t)
    b = moments_transverse(LG, t)
    assert a.rho2 == pytest.approx(b.rho2, rel=1e-12)
    hg = PacketSpec(Family.ELEGANT_HG, 2e-9, n=2)
    assert free_spread_1d(moments_1d(hg, 0.0), t).x2 == pytest.approx(moments_1d(hg, t).x2, rel=1e-12)


def test_centroid_drifts_linearly():
    m = moments_transverse(LG, 0.0).replace(centroid=(1e-9, 0.0), centroid_velocity=(0.0, 1e-4))
    out = free_spread_transverse(m, 1e-12)
    assert out.centroid == pytest.approx((1e-9, 1e-4 * C_LIGHT * 1e-12))
    assert out.emittance == pytest.approx(m.emittance, rel=1e-9)


@given(st.floats(0.0, 10.0))
def test_twiss_determinant_is_one(f):
    m = moments_transverse(LG, f * LG.diffraction_time())
    tw = twiss_from_moments(m)
    assert tw.determinant == pytest.approx(1.0, rel=1e-9)
    assert tw.emittance == pytest.approx(m.emittance, rel=1e-12)


def test_diffraction_time_and_rayleigh_length():
    m = moments_transverse(LG, 0.7 * LG.diffraction_time())
    # t_d from any time along the orbit equals the focal value
    assert diffraction_time(m) == pytest.approx(
        moments_transverse(LG, 0.0).rho2 / m.emittance / C_LIGHT, rel=1e-9)
    assert rayleigh_length(m, 0.5) == pytest.approx(0.5 * C_LIGHT * diffraction_time(m))


@given(st.floats(0.0, 1.5))
def test_twiss_rotation_preserves_determinant(delta):
    tw = twiss_from_moments(moments_transverse(LG, 0.0))
    out = twiss_rotate(tw, delta, time_unit=tw.beta)
    assert out.determinant == pytest.approx(1.0, rel=1e-9)
    assert out.emittance == tw.emittance


def test_twiss_rotation_needs_focus():
    tw = twiss_from_moments(moments_transverse(LG, LG.diffraction_time()))
    with pytest.raises(DomainError):
        twiss_rotate(tw, 0.1)


def test_de_broglie_wavelength():
    assert de_broglie_wavelength(ELECTRON, 100e3) == pytest.approx(1.2398e-11, rel=1e-4)
    assert de_broglie_wavelength(PROTON, 1e6) == pytest.approx(1.2398e-12, rel=1e-4)


@given(st.floats(1e-3, 10.0), st.floats(1e-12, 1e-10), st.floats(1e-10, 1e-6), st.floats(1.0, 20.0))
def test_vcz_far_field_round_trip(z, lam, src, M):
    fwd = vcz(z, lam, src, M, "detected-from-source")
    back = vcz(z, lam, fwd.detected_rms, M, "source-from-detected")
    assert back.source_rms == pytest.approx(src, rel=1e-12)
    assert fwd.source_rms * fwd.detected_rms == pytest.approx(z * lam * M / (2 * math.pi), rel=1e-12)


@given(st.floats(0.01, 0.8))
def test_vcz_fresnel_round_trip_on_far_field_branch(x):
    z, lam, M = 1.0, 1e-11, 2.0
    a = z * lam * M / (2 * math.pi)
    src = x * math.sqrt(a)
    fwd = vcz(z, lam, src, M, "detected-from-source", VczRegime.FRESNEL)
    assume(fwd.correction < 0.5)
    back = vcz(z, lam, fwd.detected_rms, M, "source-from-detected", VczRegime.FRESNEL)
    assert back.source_rms == pytest.approx(src, rel=1e-9)
    assert fwd.detected_rms > a / src


def test_vcz_far_field_flag_and_errors():
    r = vcz(1.0, 1e-11, 1e-5, 1.0, "source-from-detected")
    assert r.far_field_ok
    with pytest.raises(DomainError):
        vcz(1.0, 1e-11, 1e-5, 0.5)
    with pytest.raises(DomainError):
        vcz(-1.0, 1e-11, 1e-5)
    # a detected size smaller than the Fresnel minimum has no real source
    a = 1e-11 / (2 * math.pi)
    with pytest.raises(DomainError):
        vcz(1.0, 1e-11, 0.5 * math.sqrt(a), 1.0, "source-from-detected", "fresnel")
