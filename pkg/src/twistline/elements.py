"""Moment transport through axially symmetric, hard-edged linear elements.

Inside an element with uniform longitudinal field H and linear radial
electric field E_rho = E' rho the raw second moments obey (ct units)

    R'  = 2 C                      R  = <rho^2>
    C'  = U2 + k R + kappa Lk      C  = <rho . u>
    U2' = 2 k C                    U2 = <u^2>   (kinetic velocity)
    Lk  = lambda_c l - kappa R / 2 (kinetic angular momentum / m c)

with kappa, k from :mod:`twistline.constants`.  Eliminating C and U2 gives
R'' = S - Omega^2 R where Omega^2 = kappa^2 - 4 k and S = 2 (U2 - k R) + 2
kappa lambda_c l is constant.  Each element kind below has its own closed
form so that limits between them can be compared.

Faces
-----
The wavefunction is continuous across a hard edge, so the canonical
momentum is continuous while the kinetic velocity picks up
-(Delta kappa / 2) z x rho.  <rho^2> and <rho . u> are continuous, the
canonical OAM is unchanged and <u^2> changes by

    Delta U2 = -Delta kappa lambda_c l + (kappa_b^2 - kappa_a^2) R / 4.

``Matching.KINETIC`` instead keeps <u^2> continuous at the face, which
reproduces the textbook boundary conditions but is not a state of the
field region and can drive <rho^2> negative inside focusing lenses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import expm

from .constants import C_LIGHT, E_CHARGE, HBAR, ParticleSpecies, cyclotron_wavenumber, electric_gradient, field_scales
from .errors import DomainError
from .packets import Family, PacketSpec, TransverseMoments, emittance_transverse

FROZEN_THRESHOLD = 1e-6  # |Omega^2| below this times kappa^2 counts as frozen
_SERIES_LIMIT = 0.05  # |Omega^2 tau^2| below which power series are used


class ElementKind(str, Enum):
    DRIFT = "drift"
    SOLENOID = "solenoid"
    ELECTROSTATIC_LENS = "lens"
    CROSSED_LENS = "crossed"
    PENNING_TRAP = "penning"


class Matching(str, Enum):
    CANONICAL = "canonical"
    KINETIC = "kinetic"


class Classification(str, Enum):
    FREE = "Free"
    FOCUSING_SHORT_TIME = "FocusingShortTime"
    DEFOCUSING_SHORT_TIME = "DefocusingShortTime"
    GLOBALLY_DEFOCUSING = "GloballyDefocusing"
    FROZEN = "Frozen"


@dataclass(frozen=True)
class Element:
    """A hard-edged element.

    H is the signed axial field (T), ``E_rho_prime`` the radial gradient
    (V/m^2), ``a`` the Penning coefficient (V/m^2, E' = -2a), ``E_z`` an
    accelerating field (V/m) that only changes the longitudinal momentum.
    """

    kind: ElementKind
    length: float
    H: float = 0.0
    E_rho_prime: float = 0.0
    a: float = 0.0
    E_z: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ElementKind(self.kind))
        if not (self.length > 0.0) or not math.isfinite(self.length):
            raise DomainError("element length must be positive")
        k = self.kind
        if k is ElementKind.DRIFT and (self.H or self.E_rho_prime or self.a):
            raise DomainError("a drift carries no transverse fields")
        if k is ElementKind.SOLENOID and (self.E_rho_prime or self.a):
            raise DomainError("a solenoid has no radial electric field")
        if k is ElementKind.ELECTROSTATIC_LENS and (self.H or self.a):
            raise DomainError("an electrostatic lens has no magnetic field")
        if k is ElementKind.CROSSED_LENS and self.a:
            raise DomainError("use the penning kind for a trap coefficient")
        if k is ElementKind.PENNING_TRAP:
            if self.E_rho_prime and self.E_rho_prime != -2.0 * self.a:
                raise DomainError("a Penning trap requires E' = -2a")
            object.__setattr__(self, "E_rho_prime", -2.0 * self.a)

    @property
    def gradient(self) -> float:
        return self.E_rho_prime


@dataclass(frozen=True)
class LandauProps:
    n_H: int
    ell: int
    eps_perp: float  # eV
    rho2_LG: float  # m^2
    Lz_kin_LG: float  # hbar


@dataclass(frozen=True)
class LandauMatch:
    n_H: float  # continuous solution
    n_H_nearest: int
    M_in: float  # quality factor of the entering packet
    M_in_quoted: float  # n + |l| + 1
    n_H_quoted: float  # continuous solution using M_in_quoted
    regime: str


@dataclass(frozen=True)
class AngularReport:
    Lz_kin: float  # hbar
    jump: float  # hbar, kinetic AM change at the entrance face
    flux: float  # T m^2
    flux_quantum_count: float  # flux / (2 pi hbar / |Z| e)


@dataclass(frozen=True)
class LensReport:
    classification: Classification
    period: float  # s (inf when not oscillatory)
    t_d_thin: float  # s
    gouy_sign: int
    mean_rho2: float  # m^2
    mean_emittance: float  # m
    effective_M: float
    paraxial_ok: bool | None
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class CentroidDecomposition:
    Lz_kin: float
    Lz_cyclo: float
    Lz_wavepacket: float
    Lz_dia: float
    centroid: tuple[float, float]
    centroid_velocity: tuple[float, float]


@dataclass(frozen=True)
class CentroidSolution:
    position: tuple[float, float]
    velocity: tuple[float, float]
    delta1: float
    delta2: float
    phi1: float
    phi2: float
    omega1: float  # rad/s
    omega2: float  # rad/s


@dataclass(frozen=True)
class AveragedMoments:
    mean_rho2: float
    mean_centroid2: float
    mean_uperp2: float
    mean_centroid_u2: float
    Q11: float
    Q22: float
    epsilon: float
    M: float
    delta1: float
    delta2: float


@dataclass(frozen=True)
class FringeField:
    H_z: float
    H_rho: float
    curvature_term: float  # -(rho^2/4) H''
    edge_flag: bool


# -- faces --------------------------------------------------------------------

def face_transition(m: TransverseMoments, species: ParticleSpecies, H_from: float, H_to: float,
                    matching: Matching | str = Matching.CANONICAL) -> TransverseMoments:
    """Moments just after a hard edge where the axial field steps H_from -> H_to."""
    matching = Matching(matching)
    if H_from == H_to:
        return m
    if matching is Matching.KINETIC:
        # kinetic moments unchanged while l is conserved; only consistent while
        # the kinetic angular momentum still fits the velocity spread
        lk = species.compton_wavelength * m.ell - 0.5 * cyclotron_wavenumber(species, H_to) * m.rho2
        if lk * lk + m.rho_u**2 > m.rho2 * m.uperp2:
            raise DomainError("kinetic matching violates <L_kin>^2 + <rho.u>^2 <= <rho^2><u^2> at this face; "
                              "use canonical matching")
        return m
    lam = species.compton_wavelength
    ka = cyclotron_wavenumber(species, H_from)
    kb = cyclotron_wavenumber(species, H_to)
    dk = kb - ka
    u2 = m.uperp2 - dk * lam * m.ell + 0.25 * (kb * kb - ka * ka) * m.rho2
    cx, cy = m.centroid
    vx, vy = m.centroid_velocity
    return m.replace(uperp2=u2, centroid_velocity=(vx + 0.5 * dk * cy, vy - 0.5 * dk * cx))


def kinetic_angular_momentum(m: TransverseMoments, species: ParticleSpecies, H: float) -> float:
    """<L_z^kin> = l - kappa <rho^2> / (2 lambda_c) in hbar."""
    return m.ell - 0.5 * cyclotron_wavenumber(species, H) * m.rho2 / species.compton_wavelength


def canonical_uperp2(m: TransverseMoments, species: ParticleSpecies, H: float) -> float:
    """<(p_can/mc)^2>, the velocity moment that is continuous across faces."""
    lam = species.compton_wavelength
    kap = cyclotron_wavenumber(species, H)
    return m.uperp2 + kap * lam * m.ell - 0.25 * kap * kap * m.rho2


# -- closed forms -------------------------------------------------------------

def _trig_kernels(omega2: float, tau: float):
    """c = cos(W t), s = sin(W t)/W, d = (1 - cos W t)/W^2 for W^2 = omega2 of any sign."""
    x = omega2 * tau * tau
    if abs(x) < _SERIES_LIMIT:
        c = s = d = 0.0
        term = 1.0
        for n in range(12):
            c += term / math.factorial(2 * n)
            s += term / math.factorial(2 * n + 1)
            d += term / math.factorial(2 * n + 2)
            term *= -x
        return c, s * tau, d * tau * tau
    if omega2 > 0.0:
        w = math.sqrt(omega2)
        return math.cos(w * tau), math.sin(w * tau) / w, 2.0 * math.sin(0.5 * w * tau) ** 2 / omega2
    g = math.sqrt(-omega2)
    return math.cosh(g * tau), math.sinh(g * tau) / g, -2.0 * math.sinh(0.5 * g * tau) ** 2 / omega2


def _centroid_step(centroid, velocity, kap: float, k: float, tau: float):
    A = np.array([[0.0, 0.0, 1.0, 0.0],
                  [0.0, 0.0, 0.0, 1.0],
                  [k, 0.0, 0.0, kap],
                  [0.0, k, -kap, 0.0]])
    v = np.array([centroid[0], centroid[1], velocity[0], velocity[1]], dtype=float)
    if not v.any():
        return (0.0, 0.0), (0.0, 0.0)
    out = expm(A * tau) @ v
    return (float(out[0]), float(out[1])), (float(out[2]), float(out[3]))


def _advance(m: TransverseMoments, kap: float, k: float, tau: float, R, C, U2) -> TransverseMoments:
    c, v = _centroid_step(m.centroid, m.centroid_velocity, kap, k, tau)
    return TransverseMoments(rho2=R, rho_u=C, uperp2=U2, centroid=c, centroid_velocity=v, ell=m.ell,
                             time=m.time + tau / C_LIGHT)


def solenoid_field_rms(m: TransverseMoments, species: ParticleSpecies, H: float, t: float) -> TransverseMoments:
    """Evolve field-side moments inside a uniform solenoid for the time t."""
    kap = cyclotron_wavenumber(species, H)
    if kap == 0.0:
        raise DomainError("solenoid needs a non-zero field")
    # the kernel form stays accurate as kappa -> 0, unlike the plateau form
    return crossed_field_rms(m, species, H, 0.0, t)


def electrostatic_field_rms(m: TransverseMoments, species: ParticleSpecies, E_rho_prime: float,
                            t: float) -> TransverseMoments:
    """Evolve moments inside a pure electrostatic lens for the time t."""
    k = electric_gradient(species, E_rho_prime)
    tau = C_LIGHT * t
    if k == 0.0:
        R = m.rho2 + 2.0 * m.rho_u * tau + m.uperp2 * tau * tau
        return _advance(m, 0.0, 0.0, tau, R, m.rho_u + m.uperp2 * tau, m.uperp2)
    U = m.uperp2 - k * m.rho2
    if k < 0.0:
        w = 2.0 * math.sqrt(-k)
        plateau = 2.0 * U / (w * w)
        cs, sn = math.cos(w * tau), math.sin(w * tau)
        R = plateau + (m.rho2 - plateau) * cs + 2.0 * m.rho_u / w * sn
        C = -0.5 * w * (m.rho2 - plateau) * sn + m.rho_u * cs
    else:
        g = 2.0 * math.sqrt(k)
        shift = 2.0 * U / (g * g)
        ch, sh = math.cosh(g * tau), math.sinh(g * tau)
        R = -shift + (m.rho2 + shift) * ch + 2.0 * m.rho_u / g * sh
        C = 0.5 * g * (m.rho2 + shift) * sh + m.rho_u * ch
    return _advance(m, 0.0, k, tau, R, C, U + k * R)


def crossed_field_rms(m: TransverseMoments, species: ParticleSpecies, H: float, E_rho_prime: float,
                      t: float) -> TransverseMoments:
    """Evolve field-side moments in combined H and E' for the time t (all branches)."""
    kap = cyclotron_wavenumber(species, H)
    k = electric_gradient(species, E_rho_prime)
    tau = C_LIGHT * t
    U = m.uperp2 - k * m.rho2
    S = 2.0 * U + 2.0 * kap * species.compton_wavelength * m.ell
    om2 = kap * kap - 4.0 * k
    c, s, d = _trig_kernels(om2, tau)
    R = m.rho2 * c + 2.0 * m.rho_u * s + S * d
    C = 0.5 * (-om2 * m.rho2 * s + 2.0 * m.rho_u * c + S * s)
    return _advance(m, kap, k, tau, R, C, U + k * R)


def field_rms(m: TransverseMoments, species: ParticleSpecies, H: float, E_rho_prime: float,
              t: float) -> TransverseMoments:
    """Dispatch to the closed form appropriate to the field combination."""
    if H == 0.0:
        return electrostatic_field_rms(m, species, E_rho_prime, t)
    if E_rho_prime == 0.0:
        return solenoid_field_rms(m, species, H, t)
    return crossed_field_rms(m, species, H, E_rho_prime, t)


def _check_positive(m: TransverseMoments):
    if not (m.rho2 > 0.0):
        raise DomainError(f"<rho^2> = {m.rho2:g} m^2 is not positive; entry moments are inconsistent")
    return m


# -- public element operations -------------------------------------------------

def solenoid_rms(m_in: TransverseMoments, species: ParticleSpecies, H: float, t: float,
                 matching: Matching | str = Matching.CANONICAL) -> TransverseMoments:
    """Moments a time t after a free packet enters a solenoid of field H."""
    if not (H > 0.0):
        raise DomainError("solenoid field magnitude must be positive")
    m = face_transition(m_in, species, 0.0, H, matching)
    return _check_positive(solenoid_field_rms(m, species, H, t))


def electrostatic_rms(m_in: TransverseMoments, species: ParticleSpecies, E_rho_prime: float,
                      t: float) -> TransverseMoments:
    """Moments a time t after entering an electrostatic lens."""
    return _check_positive(electrostatic_field_rms(m_in, species, E_rho_prime, t))


def crossed_rms(m_in: TransverseMoments, species: ParticleSpecies, H: float, E_rho_prime: float, t: float,
                matching: Matching | str = Matching.CANONICAL) -> TransverseMoments:
    """Moments a time t after entering combined axial H and radial E' fields."""
    m = face_transition(m_in, species, 0.0, H, matching)
    return _check_positive(crossed_field_rms(m, species, H, E_rho_prime, t))


def omega_squared(species: ParticleSpecies, H: float, E_rho_prime: float) -> float:
    """Omega^2 = kappa^2 - 4k in 1/m^2 (multiply by c^2 for rad^2/s^2)."""
    kap = cyclotron_wavenumber(species, H)
    return kap * kap - 4.0 * electric_gradient(species, E_rho_prime)


def classify(species: ParticleSpecies, H: float, E_rho_prime: float, rho2_entry: float | None = None,
             plateau: float | None = None) -> Classification:
    kap = cyclotron_wavenumber(species, H)
    k = electric_gradient(species, E_rho_prime)
    if kap == 0.0 and k == 0.0:
        return Classification.FREE
    om2 = kap * kap - 4.0 * k
    if kap != 0.0 and abs(om2) < FROZEN_THRESHOLD * kap * kap:
        return Classification.FROZEN
    if om2 < 0.0:
        return Classification.GLOBALLY_DEFOCUSING
    if rho2_entry is not None and plateau is not None and plateau < rho2_entry:
        return Classification.FOCUSING_SHORT_TIME
    return Classification.DEFOCUSING_SHORT_TIME


def landau_props(species: ParticleSpecies, H: float, n_H: int, ell: int) -> LandauProps:
    """Transverse energy, mean-square radius and kinetic AM of a Landau state."""
    if int(n_H) != n_H or n_H < 0 or int(ell) != ell:
        raise DomainError("Landau quantum numbers must be integers with n_H >= 0")
    n_H, ell = int(n_H), int(ell)
    sc = field_scales(species, H)
    sgn = species.charge_sign
    eps = HBAR * abs(sc.omega_L) * (2 * n_H + abs(ell) - sgn * ell + 1) / E_CHARGE
    rho2 = 0.5 * sc.rho_H**2 * (2 * n_H + abs(ell) + 1)
    return LandauProps(n_H=n_H, ell=ell, eps_perp=eps, rho2_LG=rho2, Lz_kin_LG=ell - sgn * (2 * n_H + abs(ell) + 1))


def rho2_stationary(species: ParticleSpecies, H: float, eps_perp: float, ell: float) -> float:
    """<rho^2>_st = (eps_perp/omega_L + l hbar) / (m omega_L); eps_perp in eV."""
    sc = field_scales(species, H)
    wl = sc.omega_L
    mkg = species.mass_kg
    r2 = (eps_perp * E_CHARGE / wl + ell * HBAR) / (mkg * wl)
    if not (r2 > 0.0):
        raise DomainError(f"stationary <rho^2> = {r2:g} m^2 is not positive for eps_perp={eps_perp:g} eV, l={ell}")
    return r2


def transverse_energy(m_field: TransverseMoments, species: ParticleSpecies) -> float:
    """eps_perp = m <u^2> / 2 in eV for field-side moments."""
    return 0.5 * species.mass * m_field.uperp2


def match_landau(spec_in: PacketSpec, species: ParticleSpecies, H: float) -> LandauMatch:
    """Principal quantum number n_H matched to an entering standard LG packet.

    Equates the Landau transverse energy with the kinetic energy of the
    packet, sqrt((2 n_H + |l| - sgn(e) l + 1) / M_in) = rho_H / (2 sigma).
    """
    if spec_in.family is not Family.STANDARD_LG:
        raise DomainError("match_landau expects a standard LG packet")
    sc = field_scales(species, H)
    r2 = (sc.rho_H / (2.0 * spec_in.sigma0)) ** 2
    ell, sgn = spec_in.ell, species.charge_sign
    M_in = emittance_transverse(spec_in).M
    M_q = float(spec_in.n + abs(ell) + 1)
    n_H = 0.5 * (M_in * r2 - abs(ell) + sgn * ell - 1.0)
    n_Hq = 0.5 * (M_q * r2 - abs(ell) + sgn * ell - 1.0)
    regime = "sigma_perp < rho_H (n_H > n)" if spec_in.sigma0 < sc.rho_H else "sigma_perp > rho_H (n_H < n)"
    if n_H < -1e-12:
        raise DomainError(f"no Landau state matches this entry (continuous n_H = {n_H:.6g}); regime {regime}")
    return LandauMatch(n_H=n_H, n_H_nearest=int(round(max(n_H, 0.0))), M_in=M_in, M_in_quoted=M_q,
                       n_H_quoted=n_Hq, regime=regime)


def solenoid_angular(m_in: TransverseMoments, species: ParticleSpecies, H: float, t: float,
                     matching: Matching | str = Matching.CANONICAL) -> AngularReport:
    """Kinetic AM inside a solenoid, its jump at the entrance and the packet flux."""
    m = solenoid_rms(m_in, species, H, t, matching)
    kin = kinetic_angular_momentum(m, species, H)
    jump = -0.5 * cyclotron_wavenumber(species, H) * m_in.rho2 / species.compton_wavelength
    flux = math.pi * H * m_in.rho2
    count = flux * abs(species.charge_number) * E_CHARGE / (2.0 * math.pi * HBAR)
    return AngularReport(Lz_kin=kin, jump=jump, flux=flux, flux_quantum_count=count)


def _t_d_thin(period: float, r0: float, plateau: float) -> float:
    gap = abs(plateau - r0)
    if gap == 0.0:
        return math.inf
    return period / (math.pi * math.sqrt(2.0)) * math.sqrt(r0 / gap)


def lens_report_solenoid(m_in: TransverseMoments, species: ParticleSpecies, H: float,
                         matched: LandauProps | None = None, dwell_time: float | None = None,
                         gamma: float = 1.0, matching: Matching | str = Matching.CANONICAL) -> LensReport:
    """Thin/thick lens summary of a solenoid entered by ``m_in``.

    ``dwell_time`` is the laboratory time of flight; the lens is paraxial
    (thin) when it is below a tenth of the dilated period gamma T_c.
    """
    sc = field_scales(species, H)
    m = face_transition(m_in, species, 0.0, H, matching)
    kap = cyclotron_wavenumber(species, H)
    st = 2.0 * (m.uperp2 + kap * species.compton_wavelength * m.ell) / (kap * kap)
    cls = Classification.FOCUSING_SHORT_TIME if st < m.rho2 else Classification.DEFOCUSING_SHORT_TIME
    lam = species.compton_wavelength
    if matched is not None:
        s = species.charge_sign
        a = 2 * matched.n_H + abs(matched.ell) + 1
        eps = lam * math.sqrt(2.0 * a * (a - s * matched.ell))
    else:
        eps = math.sqrt(max(st, 0.0) * m.uperp2)
    notes = []
    if any(m_in.centroid) or any(m_in.centroid_velocity):
        notes.append("off-axis entry: transverse kick broadens the OAM spectrum of a beam")
    para = None
    if dwell_time is not None:
        para = dwell_time < 0.1 * gamma * sc.T_c
        notes.append(f"dwell/T_c = {dwell_time / (gamma * sc.T_c):.3g}")
    return LensReport(classification=cls, period=sc.T_c, t_d_thin=_t_d_thin(sc.T_c, m.rho2, st),
                      gouy_sign=1 if cls is Classification.DEFOCUSING_SHORT_TIME else -1, mean_rho2=st,
                      mean_emittance=eps, effective_M=eps / lam, paraxial_ok=para, notes=tuple(notes))


def lens_report(element: Element, m_in: TransverseMoments, species: ParticleSpecies,
                dwell_time: float | None = None, gamma: float = 1.0,
                matching: Matching | str = Matching.CANONICAL) -> LensReport:
    """Lens summary for any element kind (drifts report as free)."""
    H, Ep = element.H, element.gradient
    m = face_transition(m_in, species, 0.0, H, matching)
    kap = cyclotron_wavenumber(species, H)
    k = electric_gradient(species, Ep)
    lam = species.compton_wavelength
    om2 = kap * kap - 4.0 * k
    U = m.uperp2 - k * m.rho2
    S = 2.0 * U + 2.0 * kap * lam * m.ell
    notes = []
    plateau = period = eps = math.nan
    if om2 > 0.0:
        plateau = S / om2
        period = 2.0 * math.pi / (math.sqrt(om2) * C_LIGHT)
        eps = math.sqrt(max(plateau * (U + k * plateau), 0.0))
    cls = classify(species, H, Ep, m.rho2, plateau if om2 > 0.0 else None)
    if cls is Classification.FREE:
        return LensReport(cls, math.inf, math.inf, 1, math.nan, m_in.emittance, m_in.emittance / lam, True, ())
    if cls in (Classification.FROZEN, Classification.GLOBALLY_DEFOCUSING):
        gouy = 1
        if cls is Classification.GLOBALLY_DEFOCUSING:
            notes.append("Omega^2 < 0: <rho^2> grows without bound")
        else:
            notes.append("oscillations frozen: the lens spreads the packet like free flight")
        td = math.inf
        if om2 < 0.0:
            # e-folding analogue of the thin-lens diffraction time
            td = 1.0 / (math.sqrt(-om2) * C_LIGHT)
    else:
        gouy = -1 if cls is Classification.FOCUSING_SHORT_TIME else 1
        td = _t_d_thin(period, m.rho2, plateau)
    if not math.isfinite(period):
        period = math.inf
    para = None
    if dwell_time is not None and math.isfinite(period):
        para = dwell_time < 0.1 * gamma * period
    if any(m_in.centroid) or any(m_in.centroid_velocity):
        notes.append("off-axis entry: transverse kick broadens the OAM spectrum of a beam")
    return LensReport(classification=cls, period=period, t_d_thin=td, gouy_sign=gouy, mean_rho2=plateau,
                      mean_emittance=eps, effective_M=eps / lam, paraxial_ok=para, notes=tuple(notes))


def centroid_decomposition(m_in: TransverseMoments, species: ParticleSpecies, H: float, t: float,
                           entry: bool = True, matching: Matching | str = Matching.CANONICAL) -> CentroidDecomposition:
    """Split the kinetic AM into centroid (cyclotron) and wave-packet parts.

    With ``entry`` true, ``m_in`` is the free-side state at the entrance
    face; otherwise it is already a field-side state.
    """
    m = face_transition(m_in, species, 0.0, H, matching) if entry else m_in
    m = solenoid_field_rms(m, species, H, t)
    lam = species.compton_wavelength
    kap = cyclotron_wavenumber(species, H)
    c2 = m.centroid[0] ** 2 + m.centroid[1] ** 2
    cyclo = -0.5 * kap * c2 / lam
    dia = -0.5 * kap * (m.rho2 - c2) / lam
    wp = m.ell + dia
    return CentroidDecomposition(Lz_kin=kinetic_angular_momentum(m, species, H), Lz_cyclo=cyclo,
                                 Lz_wavepacket=wp, Lz_dia=dia, centroid=m.centroid,
                                 centroid_velocity=m.centroid_velocity)


def crossed_centroid(position, velocity, species: ParticleSpecies, H: float, E_rho_prime: float,
                     t: float) -> CentroidSolution:
    """Two-frequency centroid motion in a focusing crossed-field lens.

    ``position`` (m) and ``velocity`` (c units) are field-side initial
    values.  Frequencies are (-omega_c +/- Omega)/2.
    """
    kap = cyclotron_wavenumber(species, H)
    om2 = omega_squared(species, H, E_rho_prime)
    if not (om2 > 0.0):
        raise DomainError("centroid solution is only available for the focusing branch Omega^2 > 0")
    Om = math.sqrt(om2)
    w1, w2 = 0.5 * (-kap + Om), 0.5 * (-kap - Om)
    z0 = complex(position[0], position[1])
    v0 = complex(velocity[0], velocity[1])
    A1 = (-1j * v0 - w2 * z0) / (w1 - w2)
    A2 = z0 - A1
    tau = C_LIGHT * t
    e1, e2 = np.exp(1j * w1 * tau), np.exp(1j * w2 * tau)
    z = A1 * e1 + A2 * e2
    v = 1j * (w1 * A1 * e1 + w2 * A2 * e2)
    return CentroidSolution(position=(z.real, z.imag), velocity=(v.real, v.imag), delta1=abs(A1), delta2=abs(A2),
                            phi1=float(np.angle(A1)), phi2=float(np.angle(A2)), omega1=w1 * C_LIGHT,
                            omega2=w2 * C_LIGHT)


def crossed_averaged_moments(m_in: TransverseMoments, species: ParticleSpecies, H: float, E_rho_prime: float,
                             matching: Matching | str = Matching.CANONICAL) -> AveragedMoments:
    """Period-averaged central moment matrix in a focusing crossed lens.

    The centroid initial condition is taken from ``m_in`` (after the entrance
    kick); its two circular modes contribute delta1^2 + delta2^2 to the
    mean squared offset.
    """
    m = face_transition(m_in, species, 0.0, H, matching)
    kap = cyclotron_wavenumber(species, H)
    k = electric_gradient(species, E_rho_prime)
    om2 = kap * kap - 4.0 * k
    if not (om2 > 0.0):
        raise DomainError("period averages exist only for Omega^2 > 0")
    Om = math.sqrt(om2)
    U = m.uperp2 - k * m.rho2
    S = 2.0 * U + 2.0 * kap * species.compton_wavelength * m.ell
    plateau = S / om2
    mean_u2 = U + k * plateau
    cs = crossed_centroid(m.centroid, m.centroid_velocity, species, H, E_rho_prime, 0.0)
    d1, d2 = cs.delta1, cs.delta2
    mean_c2 = d1 * d1 + d2 * d2
    mean_cu2 = 0.25 * (d1 * d1 * (kap - Om) ** 2 + d2 * d2 * (kap + Om) ** 2)
    q11, q22 = plateau - mean_c2, mean_u2 - mean_cu2
    eps = math.sqrt(max(q11 * q22, 0.0))
    return AveragedMoments(mean_rho2=plateau, mean_centroid2=mean_c2, mean_uperp2=mean_u2,
                           mean_centroid_u2=mean_cu2, Q11=q11, Q22=q22, epsilon=eps,
                           M=eps / species.compton_wavelength, delta1=d1, delta2=d2)


def fringe_field(rho: float, z: float, z_samples, H_samples, jump_fraction: float = 0.25) -> FringeField:
    """Paraxial off-axis field of an axially symmetric solenoid profile.

    H_rho = -(rho/2) H'(z) and H_z = H(z) - (rho^2/4) H''(z), with the
    derivatives taken by second-order finite differences of the samples.
    A step larger than ``jump_fraction`` of the peak field between
    neighbouring samples marks a hard edge; there the result is NaN.
    """
    zs = np.asarray(z_samples, dtype=float)
    Hs = np.asarray(H_samples, dtype=float)
    if zs.ndim != 1 or zs.size != Hs.size:
        raise DomainError("profile samples must be two equal-length 1D arrays")
    if zs.size < 5:
        raise DomainError("profile too sparse for a second derivative (need >= 5 samples)")
    if np.any(np.diff(zs) <= 0.0):
        raise DomainError("profile positions must increase")
    if z < zs[0] or z > zs[-1]:
        raise DomainError("z outside the sampled profile")
    peak = float(np.max(np.abs(Hs))) or 1.0
    steps = np.abs(np.diff(Hs)) > jump_fraction * peak
    if steps.any():
        idx = np.nonzero(steps)[0]
        near = np.any((z >= zs[idx] - 1e-15) & (z <= zs[idx + 1] + 1e-15))
        if near:
            Hz = float(np.interp(z, zs, Hs))
            return FringeField(H_z=Hz, H_rho=math.nan, curvature_term=math.nan, edge_flag=True)
    d1 = np.gradient(Hs, zs, edge_order=2)
    d2 = np.gradient(d1, zs, edge_order=2)
    H0 = float(np.interp(z, zs, Hs))
    h1 = float(np.interp(z, zs, d1))
    h2 = float(np.interp(z, zs, d2))
    curv = -0.25 * rho * rho * h2
    return FringeField(H_z=H0 + curv, H_rho=-0.5 * rho * h1, curvature_term=curv, edge_flag=bool(steps.any()))
