import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twistline import oracle
from twistline.constants import ELECTRON, PROTON, cyclotron_wavenumber, electric_gradient
from twistline.errors import DomainError, VerificationError
from twistline.packets import Family, PacketSpec, wavefunction

LAM = ELECTRON.compton_wavelength


@pytest.mark.parametrize("sp", [ELECTRON, PROTON])
def test_oracle_constants_agree_with_main_modules(sp):
    assert oracle.compton_wavelength(sp.mass) == pytest.approx(sp.compton_wavelength, rel=1e-12)
    assert oracle.cyclotron_wavenumber(sp.mass, sp.charge_number, 2.0) == pytest.approx(
        cyclotron_wavenumber(sp, 2.0), rel=1e-12)
    assert oracle.electric_gradient(sp.mass, sp.charge_number, 3e8) == pytest.approx(
        electric_gradient(sp, 3e8), rel=1e-12)


def test_grid_spec():
    g = oracle.GridSpec(1.0, 64)
    assert g.spacing == pytest.approx(2.0 / 64)
    assert g.axis()[0] == -1.0 and g.refined().points == 128
    with pytest.raises(DomainError):
        oracle.GridSpec(1.0, 32)
    with pytest.raises(DomainError):
        oracle.GridSpec(0.0, 64)


def test_gaussian_grid_moments():
    s = 2e-9
    g = oracle.GridSpec.for_width(s)
    x = g.axis()
    psi = (math.pi * s * s) ** -0.25 * np.exp(-x * x / (2 * s * s))
    gm = oracle.grid_moments_1d(psi, g, LAM)
    assert gm.r2 == pytest.approx(0.5 * s * s, rel=1e-12)
    assert gm.u2 == pytest.approx(0.5 * LAM**2 / s**2, rel=1e-12)
    assert gm.edge_weight < 1e-20


def test_unnormalised_input_rejected():
    g = oracle.GridSpec(10e-9, 128)
    psi = wavefunction(PacketSpec(Family.STANDARD_HG, 1e-9), g.axis())
    with pytest.raises(VerificationError):
        oracle.grid_moments_1d(2 * psi, g, LAM)
    with pytest.raises(DomainError):
        oracle.grid_moments_1d(psi, g, LAM, method="spline")


@settings(max_examples=10, deadline=None)
@given(st.integers(-3, 3), st.floats(-3e-9, 3e-9), st.floats(-3e-9, 3e-9))
def test_plane_shift_moves_centroid(ell, cx, cy):
    spec = PacketSpec(Family.STANDARD_LG, 1e-9, ell=ell)
    g = oracle.GridSpec(12e-9, 128)
    X, Y = g.mesh()
    gm = oracle.grid_moments_2d(wavefunction(spec, X - cx, Y - cy), g, LAM)
    assert gm.mean == pytest.approx((cx, cy), abs=1e-14)
    assert gm.emittance == pytest.approx(LAM * (abs(ell) + 1), rel=1e-8)


def test_kinetic_moments_and_flux():
    spec = PacketSpec(Family.STANDARD_LG, 5e-9, ell=2)
    g = oracle.GridSpec(40e-9, 256)
    X, Y = g.mesh()
    psi = wavefunction(spec, X, Y)
    kap = cyclotron_wavenumber(ELECTRON, 1.0)
    can = oracle.grid_moments_2d(psi, g, LAM)
    kin = oracle.grid_kinetic_moments(psi, g, LAM, kap)
    assert kin.Lz == pytest.approx(can.Lz, abs=1e-10)
    assert kin.u2 == pytest.approx(can.u2 - kap * LAM * 2 + 0.25 * kap**2 * can.r2, rel=1e-9)
    assert oracle.flux_through_density(psi, g, 1.0) == pytest.approx(math.pi * can.r2, rel=1e-9)


def test_rk4_is_fourth_order():
    f = lambda t, y: -y
    errs = [abs(oracle.rk4(f, [1.0], 0.0, 1.0, n)[1][-1, 0] - math.exp(-1.0)) for n in (10, 20)]
    assert errs[0] / errs[1] == pytest.approx(16.0, rel=0.05)


def test_ode_run_validation():
    with pytest.raises(DomainError):
        oracle.OdeRun("quantum", 1.0, 100)
    with pytest.raises(DomainError):
        oracle.OdeRun("solenoid", 10.0, 10, kappa=10.0)


def test_free_ode_is_parabola():
    ts, ys = oracle.ode_moments(oracle.OdeRun("free", 2.0, 10, samples=2), [1.0, 0.5, 2.0, 0.0])
    assert ys[-1, 0] == pytest.approx(1.0 + 2 * 0.5 * 2 + 2.0 * 4)


def test_lorentz_orbit_step_limit():
    with pytest.raises(DomainError):
        oracle.lorentz_orbit((0, 0, 0), (0.01, 0, 0), ELECTRON.mass, -1, 1.0, 1e-10, 1e-12)


def test_schrodinger_residual_converges_and_detects_corruption():
    spec = PacketSpec(Family.STANDARD_LG, 2e-9, n=1, ell=1)
    amp = lambda x, y, t: wavefunction(spec, x, y, t)
    t = 0.5 * spec.diffraction_time()
    res = [oracle.schrodinger_residual(amp, oracle.GridSpec(16e-9, n), t, LAM) for n in (64, 128)]
    assert res[0] / res[1] == pytest.approx(4.0, rel=0.2)
    bad = oracle.schrodinger_residual(amp, oracle.GridSpec(16e-9, 128), t, LAM, corrupt_phase=1.0, width=2e-9)
    assert bad > 20 * res[1]
