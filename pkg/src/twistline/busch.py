"""Orbital angular momentum acquired by particles born (or re-charged) inside
a solenoid field.

A packet created with zero kinetic angular momentum in an axial field H
carries canonical OAM

    l = Z e H <rho^2> / (2 hbar),

the number of flux quanta through its own area.  A stripping foil that
changes the charge number from Z_in to Z_out leaves the kinetic momentum
untouched, so the canonical OAM steps by (Z_out - Z_in) e H <rho^2> / (2 hbar).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .constants import E_CHARGE, ELECTRON, HBAR, HBAR_C_EV_M, K_BOLTZMANN_EV, ParticleSpecies
from .errors import DomainError

# Numeric coefficient of the commonly quoted estimate l ~ 1.5e-3 H[T] <rho^2>[nm^2].
QUOTED_COEFF = 1.5e-3
FOIL_STRAGGLING = 0.19e-3  # rad, typical angular straggling in a stripping foil


class SourceKind(str, Enum):
    CATHODE = "cathode"
    STRIPPING_FOIL = "foil"


class CoherenceModel(str, Enum):
    MAXWELLIAN = "maxwellian"
    FERMI_SCALED = "fermi-scaled"


@dataclass(frozen=True)
class SourceScenario:
    """Birth conditions of a packet.

    ``H`` is signed along +z (T), ``rms_radius`` is sqrt(<rho^2>) at the
    source or foil plane (m).  For a cathode the charge number comes from
    ``species`` and ``Z_in`` is zero.  ``energy_width`` (eV) is only needed
    for the instantaneity check.
    """

    kind: SourceKind
    H: float
    rms_radius: float
    species: ParticleSpecies = ELECTRON
    Z_in: int = 0
    Z_out: int | None = None
    temperature: float | None = None
    energy_width: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SourceKind(self.kind))
        if not (self.rms_radius > 0.0) or not math.isfinite(self.rms_radius):
            raise DomainError("rms radius must be positive")
        if not math.isfinite(self.H):
            raise DomainError("field must be finite")
        if self.kind is SourceKind.CATHODE:
            self.species.require_charged()
            if self.Z_out is None:
                object.__setattr__(self, "Z_out", self.species.charge_number)
        else:
            if self.Z_out is None:
                raise DomainError("a stripping foil needs Z_out")
            if self.Z_out == self.Z_in:
                raise DomainError("Z_out equals Z_in: the foil does not change the charge")

    @property
    def delta_Z(self) -> int:
        return self.Z_out - self.Z_in


@dataclass(frozen=True)
class OamPrediction:
    ell_exact: float
    ell_quoted: float
    ratio: float  # ell_exact / ell_quoted (nan when both vanish)
    flux: float  # T m^2, pi H <rho^2>
    flux_quanta: float  # flux over 2 pi hbar / (|dZ| e)
    delta_Z: int
    instantaneous_ok: bool | None
    notes: tuple[str, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class InstantaneityCheck:
    threshold: float  # eV, hbar |omega_c|
    ratio: float
    ok: bool


@dataclass(frozen=True)
class CoherenceReference:
    temperature: float  # K
    rms: float  # m
    mass: float | None = None  # eV; defaults to the species being scaled


@dataclass(frozen=True)
class Broadening:
    opening_angle: float  # rad
    delta_ell: float
    exceeds_straggling: bool


def ell_coefficient(charge_change: int = 1) -> float:
    """e dZ / (2 hbar) in 1/(T m^2)."""
    return charge_change * E_CHARGE / (2.0 * HBAR)


def _prediction(s: SourceScenario, dz: int) -> OamPrediction:
    r2 = s.rms_radius**2
    exact = ell_coefficient(dz) * s.H * r2
    numeric = QUOTED_COEFF * dz * s.H * (r2 / 1e-18)
    ratio = exact / numeric if numeric != 0.0 else math.nan
    flux = math.pi * s.H * r2
    quanta = flux * abs(dz) * E_CHARGE / (2.0 * math.pi * HBAR)
    inst = instantaneity_check(s).ok if s.energy_width is not None else None
    notes = (
        f"exact coefficient {ell_coefficient(1) * 1e-18:.4g} /(nm^2 T) per unit charge; "
        f"quoted {QUOTED_COEFF:g}; ratio {ell_coefficient(1) * 1e-18 / QUOTED_COEFF:.4f}",
    )
    return OamPrediction(ell_exact=exact, ell_quoted=numeric, ratio=ratio, flux=flux, flux_quanta=quanta,
                         delta_Z=dz, instantaneous_ok=inst, notes=notes)


def cathode_oam(s: SourceScenario) -> OamPrediction:
    """OAM of a packet emitted with zero kinetic AM inside the field."""
    if s.kind is not SourceKind.CATHODE:
        raise DomainError("cathode_oam needs a cathode scenario")
    return _prediction(s, s.species.charge_number)


def foil_oam(s: SourceScenario) -> OamPrediction:
    """OAM step when a foil in the field changes the charge Z_in -> Z_out."""
    if s.kind is not SourceKind.STRIPPING_FOIL:
        raise DomainError("foil_oam needs a stripping-foil scenario")
    return _prediction(s, s.delta_Z)


def field_for_unit_oam(rms_radius: float, species: ParticleSpecies = ELECTRON, quoted: bool = False) -> float:
    """|H| giving |l| = 1 for the given rms radius (exact or quoted coefficient)."""
    if quoted:
        return 1.0 / (QUOTED_COEFF * abs(species.charge_number) * (rms_radius / 1e-9) ** 2)
    return 1.0 / (ell_coefficient(abs(species.charge_number)) * rms_radius**2)


def instantaneity_check(s: SourceScenario) -> InstantaneityCheck:
    """Compare the energy width with hbar omega_c = |Z| m H / H_c.

    Emission counts as instantaneous on the cyclotron scale when the width
    exceeds the threshold by more than a factor 10.
    """
    if s.energy_width is None:
        raise DomainError("instantaneity check needs the source energy width")
    z = s.Z_out if s.kind is SourceKind.STRIPPING_FOIL else s.species.charge_number
    threshold = abs(z) * s.species.mass * abs(s.H) / s.species.critical_field
    ratio = s.energy_width / threshold if threshold > 0.0 else math.inf
    return InstantaneityCheck(threshold=threshold, ratio=ratio, ok=ratio > 10.0)


def coherence_model(species: ParticleSpecies, T: float, model: CoherenceModel | str = CoherenceModel.MAXWELLIAN,
                    reference: CoherenceReference | None = None) -> float:
    """Source rms radius from a thermal momentum spread.

    Maxwellian: sqrt(<rho^2>) = hbar / sqrt(m k_B T).  Fermi-scaled: the rms
    is taken proportional to 1/(m T) and anchored at ``reference``.
    """
    model = CoherenceModel(model)
    if not (T > 0.0):
        raise DomainError("temperature must be positive")
    if model is CoherenceModel.MAXWELLIAN:
        return HBAR_C_EV_M / math.sqrt(species.mass * K_BOLTZMANN_EV * T)
    if reference is None:
        raise DomainError("the Fermi-scaled model needs a reference (T_ref, rms_ref)")
    m_ref = reference.mass if reference.mass is not None else species.mass
    return reference.rms * (reference.temperature / T) * (m_ref / species.mass)


def rayleigh_plan(rms: float, M: float, beta: float, species: ParticleSpecies = ELECTRON) -> float:
    """z_R = beta <rho^2> / (M lambda_c) in m."""
    if min(rms, beta) <= 0.0:
        raise DomainError("rms and beta must be positive")
    if M < 1.0:
        raise DomainError("quality factor must be >= 1")
    return beta * rms * rms / (M * species.compton_wavelength)


def oam_broadening(ell: float, beta: float, lambda_ratio: float, straggling: float,
                   foil_straggling: float = FOIL_STRAGGLING) -> Broadening:
    """Opening angle of a vortex beam and the OAM spread caused by straggling.

    With M = |l| + 1 the opening angle is 0.41 sqrt(<rho^2>)/z_R =
    0.41 M (lambda_c/rms)/beta and a random tilt of ``straggling`` mixes
    about M straggling/alpha neighbouring OAM values.
    """
    if not (beta > 0.0):
        raise DomainError("beta must be positive")
    M = abs(ell) + 1.0
    alpha = 0.41 * M * lambda_ratio / beta
    d_ell = M * straggling / alpha if alpha > 0.0 else math.inf
    return Broadening(opening_angle=alpha, delta_ell=d_ell, exceeds_straggling=alpha > foil_straggling)
