"""Exact helical orbits of a point charge in a uniform magnetic field.

The field points along +z with magnitude H > 0.  Writing the transverse
velocity as u_perp (c units) and omega_c = Z e H / m (signed), the orbit is

    r(t) = r0 + (rho_c sin(w t + a), rho_c cos(w t + a), u_z t)
    u(t) = (u_perp cos(w t + a), -u_perp sin(w t + a), u_z)

with rho_c = u_perp c / omega_c carrying the charge sign.  This module is a
closed-form benchmark only; numerical integration lives in ``oracle``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT, HBAR, E_CHARGE, ParticleSpecies, field_scales
from .errors import DomainError


@dataclass(frozen=True)
class ClassicalState:
    """Position (m), velocity (fraction of c) and time (s) of a point charge."""

    position: tuple[float, float, float]
    velocity: tuple[float, float, float]
    time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(float(v) for v in self.position))
        object.__setattr__(self, "velocity", tuple(float(v) for v in self.velocity))
        if len(self.position) != 3 or len(self.velocity) != 3:
            raise DomainError("position and velocity must have three components")
        if math.hypot(*self.velocity) >= 1.0:
            raise DomainError("speed must be below c")


@dataclass(frozen=True)
class OrbitInvariants:
    """Invariants of a cyclotron orbit; angular momenta in units of hbar.

    ``I`` carries the sign of the charge (I = p_perp^2 / (2 Z e H)).
    """

    I: float
    flux: float  # T m^2, through the circle of radius |rho_c|
    L_z_int: float
    L_z_can_int: float
    rho_c: float  # m, signed like the charge


def _orbit_parameters(init: ClassicalState, species: ParticleSpecies, H: float):
    sc = field_scales(species, H)
    vx, vy, vz = init.velocity
    u_perp = math.hypot(vx, vy)
    phase0 = math.atan2(-vy, vx)
    rho_c = u_perp * C_LIGHT / sc.omega_c
    x0 = init.position[0] - rho_c * math.sin(phase0)
    y0 = init.position[1] - rho_c * math.cos(phase0)
    return sc.omega_c, u_perp, phase0, rho_c, (x0, y0)


def classical_orbit(init: ClassicalState, species: ParticleSpecies, H: float, t: float) -> ClassicalState:
    """Advance ``init`` by the time ``t`` along the exact helix."""
    w, u_perp, a, rho_c, (x0, y0) = _orbit_parameters(init, species, H)
    ph = w * t + a
    _, _, vz = init.velocity
    pos = (x0 + rho_c * math.sin(ph), y0 + rho_c * math.cos(ph), init.position[2] + vz * C_LIGHT * t)
    vel = (u_perp * math.cos(ph), -u_perp * math.sin(ph), vz)
    return ClassicalState(pos, vel, init.time + t)


def guiding_center(init: ClassicalState, species: ParticleSpecies, H: float) -> tuple[float, float]:
    """Transverse centre r0 of the orbit circle."""
    return _orbit_parameters(init, species, H)[4]


def orbit_invariants(init: ClassicalState, species: ParticleSpecies, H: float) -> OrbitInvariants:
    """Adiabatic invariant, flux and intrinsic angular momenta of the orbit."""
    w, u_perp, _, rho_c, _ = _orbit_parameters(init, species, H)
    p_perp = species.mass_kg * u_perp * C_LIGHT
    q = species.charge_number * E_CHARGE
    I = p_perp**2 / (2.0 * q * H) / HBAR
    flux = math.pi * rho_c**2 * H
    L_int = -2.0 * I
    return OrbitInvariants(I=I, flux=flux, L_z_int=L_int, L_z_can_int=0.5 * L_int, rho_c=rho_c)


def trajectory(init: ClassicalState, species: ParticleSpecies, H: float, times) -> np.ndarray:
    """Positions at each of ``times`` as an (N, 3) array."""
    return np.array([classical_orbit(init, species, H, float(t)).position for t in np.atleast_1d(times)])
