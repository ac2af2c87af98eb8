"""Self-check suites comparing the analytic modules with the oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import oracle
from .classical import ClassicalState, classical_orbit
from .constants import C_LIGHT, ELECTRON, PROTON, field_scales
from .elements import (crossed_rms, electrostatic_rms, face_transition, kinetic_angular_momentum, rho2_stationary,
                       solenoid_rms, transverse_energy)
from .packets import Family, PacketSpec, moments_transverse, wavefunction

SUITES = ("packets", "elements", "classical")


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tolerance)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def packet_checks() -> list[CheckResult]:
    out = []
    s0 = 1e-9
    lam = ELECTRON.compton_wavelength
    cases = [(Family.GAUSSIAN, 0, 0), (Family.STANDARD_HG, 2, 0), (Family.ELEGANT_HG, 2, 0),
             (Family.STANDARD_LG, 1, 2), (Family.ELEGANT_LG, 2, -1)]
    for fam, n, ell in cases:
        spec = PacketSpec(fam, s0, n=n, ell=ell)
        td = spec.diffraction_time()
        for f in (0.0, 1.0, 3.0):
            g = oracle.GridSpec(12.0 * s0 * math.sqrt(1.0 + f * f), 256)
            X, Y = g.mesh()
            gm = oracle.grid_moments_2d(wavefunction(spec, X, Y, f * td), g, lam)
            cm = moments_transverse(spec, f * td)
            dev = max(_rel(gm.r2, cm.rho2), _rel(gm.u2, cm.uperp2),
                      abs(gm.ru - cm.rho_u) / math.sqrt(cm.rho2 * cm.uperp2), abs(gm.Lz - ell))
            out.append(CheckResult("packets", f"{fam.value} n={n} l={ell} t={f:g}td", dev, 1e-4))
    return out


def _ode_state(m, species, H):
    lam = species.compton_wavelength
    kap = oracle.cyclotron_wavenumber(species.mass, species.charge_number, H)
    return [m.rho2, m.rho_u, m.uperp2, lam * m.ell - 0.5 * kap * m.rho2]


def element_checks() -> list[CheckResult]:
    out = []
    sp = ELECTRON
    m_in = moments_transverse(PacketSpec(Family.STANDARD_LG, 20e-9, n=1, ell=2), 0.3 * (20e-9) ** 2 /
                              (sp.compton_wavelength * C_LIGHT))
    cases = [("solenoid", 1.0, 0.0), ("electrostatic", 0.0, 2e8), ("crossed+", 1.0, -1e8), ("crossed-", 0.1, -1e9)]
    for name, H, Ep in cases:
        kap = oracle.cyclotron_wavenumber(sp.mass, sp.charge_number, H)
        k = oracle.electric_gradient(sp.mass, sp.charge_number, Ep)
        om2 = kap * kap - 4.0 * k
        if (om2 < 0.0) != name.endswith("-") and name.startswith("crossed"):
            raise AssertionError(f"{name}: wrong Omega^2 branch")
        rate = math.sqrt(abs(om2))
        tau_end = 2.0 * (2.0 * math.pi / rate if om2 > 0 else 1.0 / rate)
        m_face = face_transition(m_in, sp, 0.0, H)
        run = oracle.OdeRun("crossed", tau_end, steps=8000, kappa=kap, k=k)
        _, ys = oracle.ode_moments(run, _ode_state(m_face, sp, H))
        t = tau_end / C_LIGHT
        if name == "solenoid":
            m = solenoid_rms(m_in, sp, H, t)
        elif name == "electrostatic":
            m = electrostatic_rms(m_in, sp, Ep, t)
        else:
            m = crossed_rms(m_in, sp, H, Ep, t)
        out.append(CheckResult("elements", f"{name} <rho^2> vs RK4", _rel(m.rho2, ys[-1, 0]), 1e-8))
    # period average against the stationary value
    H = 1.0
    sc = field_scales(sp, H)
    N = 4000
    avg = sum(solenoid_rms(m_in, sp, H, sc.T_c * i / N).rho2 for i in range(N)) / N
    m_face = face_transition(m_in, sp, 0.0, H)
    st = rho2_stationary(sp, H, transverse_energy(m_face, sp), m_in.ell)
    out.append(CheckResult("elements", "solenoid period average", _rel(avg, st), 1e-10))
    jump = kinetic_angular_momentum(m_in, sp, H) - m_in.ell
    out.append(CheckResult("elements", "kinetic AM jump", _rel(jump, -sp.charge_sign * 2.0 * m_in.rho2 /
                                                               sc.rho_H**2), 1e-12))
    return out


def classical_checks() -> list[CheckResult]:
    out = []
    for sp, H in ((ELECTRON, 1.0), (PROTON, 3.0)):
        init = ClassicalState((1e-6, -2e-6, 0.0), (0.01, 0.02, 0.1))
        Tc = field_scales(sp, H).T_c
        tr = oracle.lorentz_orbit(init.position, init.velocity, sp.mass, sp.charge_number, H, Tc, Tc / 2000)
        ref = classical_orbit(init, sp, H, Tc)
        scale = math.hypot(*init.position[:2]) + math.hypot(*init.velocity[:2]) * C_LIGHT * Tc
        dev = max(abs(a - b) for a, b in zip(tr.positions[-1], ref.position)) / scale
        out.append(CheckResult("classical", f"{sp.name} one-period orbit", dev, 1e-8))
    return out


def run_suite(suite: str = "all") -> list[CheckResult]:
    table = {"packets": packet_checks, "elements": element_checks, "classical": classical_checks}
    names = SUITES if suite == "all" else (suite,)
    results = []
    for n in names:
        results.extend(table[n]())
    return results
