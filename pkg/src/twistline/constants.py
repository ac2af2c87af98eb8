"""Particle species and the field/frequency scales derived from them.

Public quantities are SI (m, s, T) with masses and energies in eV.  The
dynamics modules work in "ct units": time is carried as the length c*t and
velocities as fractions of c, which keeps every quantity between the
Compton scale and the laboratory scale well inside double precision.

Two combinations appear everywhere::

    kappa = Z e H / (m c)      signed cyclotron wavenumber, 1/m
    k     = Z e E' / (m c^2)   signed electric gradient, 1/m^2

so that the transverse equation of motion reads u' = k rho + kappa u x z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Final

from scipy import constants as _sc

from .errors import DomainError

C_LIGHT: Final[float] = _sc.c  # m/s
HBAR: Final[float] = _sc.hbar  # J s
E_CHARGE: Final[float] = _sc.e  # C
K_BOLTZMANN_EV: Final[float] = _sc.physical_constants["Boltzmann constant in eV/K"][0]
HBAR_C_EV_M: Final[float] = HBAR * C_LIGHT / E_CHARGE  # eV m

ELECTRON_MASS_EV: Final[float] = _sc.physical_constants["electron mass energy equivalent in MeV"][0] * 1e6
PROTON_MASS_EV: Final[float] = _sc.physical_constants["proton mass energy equivalent in MeV"][0] * 1e6
# H- = proton + two electrons, bound by 13.598 eV (H atom) + 0.754 eV (affinity)
HMINUS_MASS_EV: Final[float] = PROTON_MASS_EV + 2.0 * ELECTRON_MASS_EV - 13.598 - 0.754


@dataclass(frozen=True)
class ParticleSpecies:
    """A massive charged (or neutral) particle.

    Parameters
    ----------
    name : str
        Identifier used in reports and lattice files.
    mass : float
        Rest energy m c^2 in eV.
    charge_number : int
        Signed charge in units of the elementary charge (electron = -1).
    """

    name: str
    mass: float
    charge_number: int

    def __post_init__(self):
        if not (self.mass > 0.0) or not math.isfinite(self.mass):
            raise DomainError(f"species mass must be positive, got {self.mass!r}")
        if int(self.charge_number) != self.charge_number:
            raise DomainError("charge_number must be an integer")

    @property
    def charge_sign(self) -> int:
        return (self.charge_number > 0) - (self.charge_number < 0)

    @property
    def compton_wavelength(self) -> float:
        """Reduced Compton wavelength hbar/(m c) in m."""
        return HBAR_C_EV_M / self.mass

    @property
    def critical_field(self) -> float:
        """H_c = m^2 c^2 / (|e| hbar) in T (unit charge, independent of Z)."""
        return self.mass**2 * E_CHARGE / (HBAR * C_LIGHT**2)

    @property
    def compton_time(self) -> float:
        """t_c = lambda_c / c in s."""
        return self.compton_wavelength / C_LIGHT

    @property
    def mass_kg(self) -> float:
        return self.mass * E_CHARGE / C_LIGHT**2

    def require_charged(self):
        if self.charge_number == 0:
            raise DomainError(f"species {self.name!r} is neutral and cannot be transported in fields")

    def with_charge(self, charge_number: int) -> "ParticleSpecies":
        return ParticleSpecies(self.name, self.mass, int(charge_number))


ELECTRON: Final = ParticleSpecies("electron", ELECTRON_MASS_EV, -1)
PROTON: Final = ParticleSpecies("proton", PROTON_MASS_EV, +1)
HMINUS: Final = ParticleSpecies("hminus", HMINUS_MASS_EV, -1)

BUILTIN_SPECIES: Final[dict[str, ParticleSpecies]] = {
    "electron": ELECTRON,
    "proton": PROTON,
    "hminus": HMINUS,
}
_ALIASES = {"e": "electron", "e-": "electron", "p": "proton", "h-": "hminus", "hydrogen-anion": "hminus"}


def species_constants(name: str | None = None, mass: float | None = None,
                      charge_number: int | None = None) -> ParticleSpecies:
    """Look up a built-in species or build a generic one.

    Either ``name`` alone selects a built-in, or ``mass`` (eV) and
    ``charge_number`` define a generic species (``name`` then only labels it).
    """
    if mass is None and charge_number is None:
        if name is None:
            raise DomainError("either a species name or (mass, charge_number) is required")
        key = _ALIASES.get(name.lower(), name.lower())
        try:
            return BUILTIN_SPECIES[key]
        except KeyError:
            raise DomainError(f"unknown species {name!r}; known: {', '.join(sorted(BUILTIN_SPECIES))}") from None
    if mass is None or charge_number is None:
        raise DomainError("a generic species needs both mass and charge_number")
    return ParticleSpecies(name or "generic", float(mass), int(charge_number))


@dataclass(frozen=True)
class FieldScales:
    """Cyclotron scales of a species in a uniform field of magnitude H.

    omega_c and omega_L are signed with the charge; T_c and rho_H are
    magnitudes.
    """

    omega_c: float  # rad/s
    omega_L: float  # rad/s
    T_c: float  # s
    rho_H: float  # m


def field_scales(species: ParticleSpecies, H: float) -> FieldScales:
    """Cyclotron frequency, Larmor frequency, period and magnetic length."""
    if not (H > 0.0):
        raise DomainError(f"field magnitude must be positive, got {H!r}")
    species.require_charged()
    omega_c = species.charge_number * H / species.critical_field / species.compton_time
    T_c = 2.0 * math.pi / abs(omega_c)
    rho_H = 2.0 * species.compton_wavelength * math.sqrt(species.critical_field / (abs(species.charge_number) * H))
    return FieldScales(omega_c=omega_c, omega_L=0.5 * omega_c, T_c=T_c, rho_H=rho_H)


def cyclotron_wavenumber(species: ParticleSpecies, H: float) -> float:
    """Signed kappa = Z e H/(m c) in 1/m; H may carry a sign."""
    return species.charge_number * H * C_LIGHT / species.mass


def electric_gradient(species: ParticleSpecies, E_rho_prime: float) -> float:
    """Signed k = Z e E'/(m c^2) in 1/m^2 for E' in V/m^2."""
    return species.charge_number * E_rho_prime / species.mass
