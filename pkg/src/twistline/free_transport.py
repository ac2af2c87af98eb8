"""Free-flight moment propagation, Courant-Snyder bookkeeping and the
generalised van Cittert-Zernike relation between source and detector sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import C_LIGHT, ParticleSpecies
from .errors import DomainError
from .packets import Moments1D, TransverseMoments


@dataclass(frozen=True)
class TwissParams:
    """Courant-Snyder parameters with a time-like beta.

    beta in s, gamma in 1/s, alpha dimensionless, emittance in m
    (position times velocity in units of c).
    """

    alpha: float
    beta: float
    gamma: float
    emittance: float

    @property
    def determinant(self) -> float:
        return self.beta * self.gamma - self.alpha**2


class VczDirection(str, Enum):
    SOURCE_FROM_DETECTED = "source-from-detected"
    DETECTED_FROM_SOURCE = "detected-from-source"


class VczRegime(str, Enum):
    FAR_FIELD = "far-field"
    FRESNEL = "fresnel"


@dataclass(frozen=True)
class VczResult:
    source_rms: float
    detected_rms: float
    distance: float
    de_broglie: float
    M: float
    regime: VczRegime
    rayleigh_length: float  # 2 pi <rho^2>(0) / (M lambda_dB)
    correction: float  # relative Fresnel correction to the far-field size
    far_field_ok: bool  # distance >= 10 z_R
    coherence_length: float  # sqrt(2) * detected rms
    effective_source_radius: float  # sqrt(2) * source rms
    ambiguous: bool = False


def free_spread_1d(m0: Moments1D, t: float) -> Moments1D:
    """Propagate one-axis moments freely for the time ``t`` (s)."""
    tau = C_LIGHT * t
    return Moments1D(
        mean_x=m0.mean_x + m0.mean_u * tau,
        mean_u=m0.mean_u,
        x2=m0.x2 + 2.0 * m0.xu * tau + m0.u2 * tau * tau,
        u2=m0.u2,
        xu=m0.xu + m0.u2 * tau,
        time=m0.time + t,
    )


def free_spread_transverse(m0: TransverseMoments, t: float) -> TransverseMoments:
    """Propagate transverse moments freely for the time ``t`` (s)."""
    tau = C_LIGHT * t
    cx, cy = m0.centroid
    vx, vy = m0.centroid_velocity
    return TransverseMoments(
        rho2=m0.rho2 + 2.0 * m0.rho_u * tau + m0.uperp2 * tau * tau,
        rho_u=m0.rho_u + m0.uperp2 * tau,
        uperp2=m0.uperp2,
        centroid=(cx + vx * tau, cy + vy * tau),
        centroid_velocity=(vx, vy),
        ell=m0.ell,
        time=m0.time + t,
    )


def diffraction_time(m: TransverseMoments) -> float:
    """t_d = <rho^2>(focus) / epsilon in s, for the central moments of ``m``."""
    eps = m.emittance
    if eps <= 0.0:
        raise DomainError("zero emittance has no diffraction time")
    # the focus lies where the central correlation vanishes
    r_focus = m.central_rho2 - m.central_rho_u**2 / m.central_uperp2
    return r_focus / eps / C_LIGHT


def rayleigh_length(m: TransverseMoments, beta: float) -> float:
    """z_R = <u> t_d with <u> = beta (c units)."""
    return beta * C_LIGHT * diffraction_time(m)


def _central(m):
    if isinstance(m, Moments1D):
        return m.var_x, m.cov, m.var_u
    return m.central_rho2, m.central_rho_u, m.central_uperp2


def twiss_from_moments(m: Moments1D | TransverseMoments) -> TwissParams:
    """Courant-Snyder parameters from a one-axis or transverse moment set."""
    x2, xu, u2 = _central(m)
    eps2 = x2 * u2 - xu * xu
    if not (eps2 > 0.0):
        raise DomainError("degenerate (zero) emittance")
    eps = math.sqrt(eps2)
    return TwissParams(alpha=-xu / eps, beta=x2 / eps / C_LIGHT, gamma=u2 / eps * C_LIGHT, emittance=eps)


def twiss_rotate(tw: TwissParams, delta: float, time_unit: float = 1.0) -> TwissParams:
    """Rotate a focused ellipse by the slope angle ``delta``.

    The trigonometric map mixes beta and 1/beta, so both are first made
    dimensionless with ``time_unit`` (s) and the result is scaled back.
    """
    if abs(tw.alpha) > 1e-12:
        raise DomainError("rotation is defined for a focused ellipse (alpha = 0)")
    b0 = tw.beta / time_unit
    g0 = tw.gamma * time_unit
    c, s = math.cos(delta), math.sin(delta)
    M = np.array([[0.0, -s * c, s * c],
                  [0.0, c * c, s * s],
                  [0.0, s * s, c * c]])
    a, b, g = M @ np.array([0.0, b0, g0])
    return TwissParams(alpha=float(a), beta=float(b) * time_unit, gamma=float(g) / time_unit, emittance=tw.emittance)


def de_broglie_wavelength(species: ParticleSpecies, momentum_ev: float) -> float:
    """lambda_dB = 2 pi hbar / p for p in eV/c."""
    return 2.0 * math.pi * species.compton_wavelength * species.mass / momentum_ev


def vcz(distance: float, de_broglie: float, known_rms: float, M: float = 1.0,
        direction: VczDirection | str = VczDirection.SOURCE_FROM_DETECTED,
        regime: VczRegime | str = VczRegime.FAR_FIELD) -> VczResult:
    """Relate source and detected rms sizes over ``distance``.

    With a = z lambda_dB M / (2 pi), the far-field law is
    src * det = a, and the Fresnel form keeps the first correction,
    det = (a/src) (1 + (src^2/a)^2 / 2).  Inverting the Fresnel form is a
    quartic in the source size; the root on the far-field branch
    (src^2 < a sqrt(2/3), where det(src) decreases) is returned and
    ``ambiguous`` is set when the other branch is also below the
    Rayleigh bound src^2 < a.
    """
    direction = VczDirection(direction)
    regime = VczRegime(regime)
    if min(distance, de_broglie, known_rms) <= 0.0:
        raise DomainError("distance, wavelength and rms must be positive")
    if M < 1.0:
        raise DomainError("quality factor must be >= 1")
    a = distance * de_broglie * M / (2.0 * math.pi)
    ambiguous = False
    if direction is VczDirection.DETECTED_FROM_SOURCE:
        src = known_rms
        det = a / src
        if regime is VczRegime.FRESNEL:
            det *= 1.0 + 0.5 * (src * src / a) ** 2
    else:
        det = known_rms
        src = a / det
        if regime is VczRegime.FRESNEL:
            src, ambiguous = _fresnel_source(a, det)
    z_r = 2.0 * math.pi * src * src / (M * de_broglie)
    corr = 0.5 * (src * src / a) ** 2
    return VczResult(source_rms=src, detected_rms=det, distance=distance, de_broglie=de_broglie, M=M,
                     regime=regime, rayleigh_length=z_r, correction=corr, far_field_ok=distance >= 10.0 * z_r,
                     coherence_length=math.sqrt(2.0) * det, effective_source_radius=math.sqrt(2.0) * src,
                     ambiguous=ambiguous)


def _fresnel_source(a: float, det: float) -> tuple[float, bool]:
    # s^4 - 2 a det s + 2 a^2 = 0, scaled by s = sqrt(a) x
    r = det / math.sqrt(a)
    roots = np.roots([1.0, 0.0, 0.0, -2.0 * r, 2.0])
    real = sorted(float(z.real) for z in roots if abs(z.imag) <= 1e-9 * max(1.0, abs(z)) and z.real > 0.0)
    if not real:
        raise DomainError("Fresnel relation has no positive real source size for this detected size")
    x = real[0]
    for _ in range(3):  # Newton polish
        f = x**4 - 2.0 * r * x + 2.0
        x -= f / (4.0 * x**3 - 2.0 * r)
    ambiguous = len(real) > 1 and real[1] ** 2 < 1.0
    return x * math.sqrt(a), ambiguous
