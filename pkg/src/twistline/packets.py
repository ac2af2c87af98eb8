"""Catalogue of analytic free wave packets and their closed-form moments.

Families
--------
gaussian       fundamental mode
hg-standard    orthogonal Hermite-Gaussian, order n per axis
hg-elegant     Fourier transform of (p - <p>)^n times a Gaussian
lg-standard    orthogonal Laguerre-Gaussian (n, l)
lg-elegant     Fourier transform of p^(2n+|l|) e^(i l phi) times a Gaussian

All packets have their focus at t = 0.  ``sigma0`` is the focal width
sigma(0) = 1/sigma_p and the diffraction time is t_d = m sigma0^2 / hbar.
Moments are "raw" (not centred) and use velocities in units of c, so the
normalised emittance comes out in metres and is bounded below by
lambda_c / 2 (one axis) or lambda_c (transverse plane).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

from .constants import C_LIGHT, ELECTRON, ParticleSpecies
from .errors import DomainError


class Family(str, Enum):
    GAUSSIAN = "gaussian"
    STANDARD_HG = "hg-standard"
    ELEGANT_HG = "hg-elegant"
    STANDARD_LG = "lg-standard"
    ELEGANT_LG = "lg-elegant"

    @property
    def is_lg(self) -> bool:
        return self in (Family.STANDARD_LG, Family.ELEGANT_LG)


@dataclass(frozen=True)
class PacketSpec:
    """An analytic packet.

    Parameters
    ----------
    family : Family or str
    sigma0 : float
        Focal width sigma_x(0) (or sigma_perp(0) for LG) in m.
    n, ell : int
        Radial/axis order and OAM (LG only).
    j, k : int
        HG orders along y and z.
    momentum : float
        Mean momentum along z in eV/c.
    species : ParticleSpecies
    sigma0_y : float, optional
        Focal width along y for HG packets; defaults to ``sigma0``.
    zeta : float
        Squeezing parameter carried as metadata (0 = coherent state).
    """

    family: Family
    sigma0: float
    n: int = 0
    ell: int = 0
    j: int = 0
    k: int = 0
    momentum: float = 0.0
    species: ParticleSpecies = ELECTRON
    sigma0_y: float | None = None
    zeta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        for name in ("n", "j", "k", "ell"):
            v = getattr(self, name)
            if int(v) != v:
                raise DomainError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if min(self.n, self.j, self.k) < 0:
            raise DomainError("quantum numbers n, j, k must be non-negative")
        lam = self.species.compton_wavelength
        for w in (self.sigma0, self.sigma_y):
            if not (w > 0.0) or not math.isfinite(w):
                raise DomainError("sigma0 must be positive and finite")
            if w < lam:
                raise DomainError(f"sigma0 = {w:g} m is below the Compton wavelength {lam:g} m")
        if self.family is Family.GAUSSIAN and (self.n or self.j or self.k):
            raise DomainError("the Gaussian family has no excitation orders; use hg-standard")
        if not self.family.is_lg and self.ell != 0:
            raise DomainError("ell is only meaningful for Laguerre-Gaussian packets")
        if self.momentum < 0.0:
            raise DomainError("mean momentum must be non-negative")

    @property
    def sigma_y(self) -> float:
        return self.sigma0 if self.sigma0_y is None else self.sigma0_y

    @property
    def mean_u(self) -> float:
        """Mean longitudinal velocity p/(m c) (proper velocity, c units)."""
        return self.momentum / self.species.mass

    def diffraction_time(self, axis: str = "x") -> float:
        """t_d = sigma0^2 / (lambda_c c) in s for the given axis."""
        s = self.sigma_y if axis == "y" else self.sigma0
        return s * s / (self.species.compton_wavelength * C_LIGHT)


@dataclass(frozen=True)
class Moments1D:
    """Raw one-axis moments; x in m, u in units of c, time in s."""

    mean_x: float
    mean_u: float
    x2: float
    u2: float
    xu: float
    time: float = 0.0

    @property
    def var_x(self) -> float:
        return self.x2 - self.mean_x**2

    @property
    def var_u(self) -> float:
        return self.u2 - self.mean_u**2

    @property
    def cov(self) -> float:
        return self.xu - self.mean_x * self.mean_u

    @property
    def emittance(self) -> float:
        return math.sqrt(max(self.var_x * self.var_u - self.cov**2, 0.0))


@dataclass(frozen=True)
class TransverseMoments:
    """Raw transverse moments about the z axis.

    rho2 = <rho^2>, rho_u = <rho . u_perp>, uperp2 = <u_perp^2> use the
    kinetic velocity.  ``ell`` is the canonical OAM in units of hbar.
    """

    rho2: float
    rho_u: float
    uperp2: float
    centroid: tuple[float, float] = (0.0, 0.0)
    centroid_velocity: tuple[float, float] = (0.0, 0.0)
    ell: float = 0.0
    time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "centroid", tuple(float(v) for v in self.centroid))
        object.__setattr__(self, "centroid_velocity", tuple(float(v) for v in self.centroid_velocity))

    @property
    def central_rho2(self) -> float:
        return self.rho2 - (self.centroid[0] ** 2 + self.centroid[1] ** 2)

    @property
    def central_uperp2(self) -> float:
        v = self.centroid_velocity
        return self.uperp2 - (v[0] ** 2 + v[1] ** 2)

    @property
    def central_rho_u(self) -> float:
        c, v = self.centroid, self.centroid_velocity
        return self.rho_u - (c[0] * v[0] + c[1] * v[1])

    @property
    def emittance(self) -> float:
        d = self.central_rho2 * self.central_uperp2 - self.central_rho_u**2
        return math.sqrt(max(d, 0.0))

    def replace(self, **changes) -> "TransverseMoments":
        vals = dict(rho2=self.rho2, rho_u=self.rho_u, uperp2=self.uperp2, centroid=self.centroid,
                    centroid_velocity=self.centroid_velocity, ell=self.ell, time=self.time)
        vals.update(changes)
        return TransverseMoments(**vals)


@dataclass(frozen=True)
class Emittance:
    """Normalised emittance (m) and quality factors.

    For one axis M = 2 epsilon / lambda_c; in the transverse plane
    M = epsilon / lambda_c.  ``M_quoted`` is the closed-form value
    n + |l| + 1 often quoted for standard LG packets; it coincides with M
    only for n = 0 and is kept so that the two can be compared.
    """

    epsilon: float
    M: float
    M_quoted: float | None = None


@dataclass(frozen=True)
class GouyPhase:
    prefactor: float
    phase: float  # prefactor * arctan(t/t_d)
    unit_phase: float  # arctan(t/t_d) = integral dt / beta-hat for orthogonal modes
    wavefunction_phase: float  # the phase that multiplies the amplitude


# -- closed forms in dimensionless variables ---------------------------------

def _axis_coeffs(family: Family, n: int, T: float):
    """(x2/sigma0^2, u2 sigma0^2/lambda^2, xu/lambda) of one centred axis."""
    h = n + 0.5
    a = h * (1.0 + T * T)
    if family is Family.ELEGANT_HG and n > 0:
        a -= n * (n - 1) / (n - 0.5)
    return a, h, h * T


def _lg_coeffs(family: Family, n: int, ell: int, T: float):
    """(rho2/sigma0^2, u2 sigma0^2/lambda^2, rho_u/lambda) of an LG packet."""
    order = 2 * n + abs(ell)
    b = order + 1.0
    if family is Family.STANDARD_LG:
        a = b * (1.0 + T * T)
    else:
        a0 = 1.0 + (ell * ell / order if order else 0.0)
        a = a0 + b * T * T
    return a, b, b * T


def _axis_params(spec: PacketSpec, axis: str):
    if axis == "x":
        return spec.n, spec.sigma0
    if axis == "y":
        return spec.j, spec.sigma_y
    if axis == "z":
        return spec.k, spec.sigma0
    raise DomainError(f"unknown axis {axis!r}")


def moments_1d(spec: PacketSpec, t: float, axis: str = "x") -> Moments1D:
    """Closed-form moments along one axis at time ``t`` (s).

    Along ``z`` the packet moves with <u> = p/(m c); the transverse axes
    have zero mean.
    """
    if spec.family.is_lg:
        raise DomainError("Laguerre-Gaussian packets have no one-axis factorisation")
    n, s0 = _axis_params(spec, axis)
    lam = spec.species.compton_wavelength
    tau = C_LIGHT * t
    T = tau * lam / (s0 * s0)
    a, b, c = _axis_coeffs(spec.family, n, T)
    u0 = spec.mean_u if axis == "z" else 0.0
    x0 = u0 * tau
    return Moments1D(mean_x=x0, mean_u=u0, x2=a * s0 * s0 + x0 * x0, u2=b * lam * lam / (s0 * s0) + u0 * u0,
                     xu=c * lam + x0 * u0, time=t)


def moments_transverse(spec: PacketSpec, t: float) -> TransverseMoments:
    """Closed-form transverse moments at time ``t`` (s)."""
    lam = spec.species.compton_wavelength
    tau = C_LIGHT * t
    if spec.family.is_lg:
        s0 = spec.sigma0
        a, b, c = _lg_coeffs(spec.family, spec.n, spec.ell, tau * lam / (s0 * s0))
        return TransverseMoments(rho2=a * s0 * s0, rho_u=c * lam, uperp2=b * lam * lam / (s0 * s0),
                                 ell=float(spec.ell), time=t)
    mx = moments_1d(spec, t, "x")
    my = moments_1d(spec, t, "y")
    return TransverseMoments(rho2=mx.x2 + my.x2, rho_u=mx.xu + my.xu, uperp2=mx.u2 + my.u2, ell=0.0, time=t)


def emittance_1d(spec: PacketSpec, axis: str = "x") -> Emittance:
    """Time-invariant one-axis emittance and M = 2 epsilon/lambda_c."""
    if spec.family.is_lg:
        raise DomainError("Laguerre-Gaussian packets have no one-axis factorisation")
    n, _ = _axis_params(spec, axis)
    a, b, _ = _axis_coeffs(spec.family, n, 0.0)
    e = math.sqrt(a * b)
    return Emittance(epsilon=e * spec.species.compton_wavelength, M=2.0 * e)


def emittance_transverse(spec: PacketSpec) -> Emittance:
    """Time-invariant transverse emittance and M = epsilon/lambda_c."""
    lam = spec.species.compton_wavelength
    if spec.family.is_lg:
        a, b, _ = _lg_coeffs(spec.family, spec.n, spec.ell, 0.0)
        e = math.sqrt(a * b)
        quoted = float(spec.n + abs(spec.ell) + 1) if spec.family is Family.STANDARD_LG else None
        return Emittance(epsilon=e * lam, M=e, M_quoted=quoted)
    m = moments_transverse(spec, 0.0)
    e = math.sqrt(m.rho2 * m.uperp2 - m.rho_u**2) / lam
    return Emittance(epsilon=e * lam, M=e)


def gouy_prefactor(spec: PacketSpec) -> float:
    n, ell = spec.n, abs(spec.ell)
    return {
        Family.GAUSSIAN: 1.0,
        Family.STANDARD_HG: 2.0 * n + 1.0,
        Family.ELEGANT_HG: n + 1.0,
        Family.STANDARD_LG: 2.0 * n + ell + 1.0,
        Family.ELEGANT_LG: n + ell + 1.0,
    }[spec.family]


def gouy_phase(spec: PacketSpec, t: float) -> GouyPhase:
    """Gouy phase of the packet (x axis for HG families)."""
    unit = math.atan(t / spec.diffraction_time("x"))
    pref = gouy_prefactor(spec)
    # one-axis amplitudes carry half the prefactor, LG amplitudes the full one
    wf = pref * unit if spec.family.is_lg else 0.5 * pref * unit
    return GouyPhase(prefactor=pref, phase=pref * unit, unit_phase=unit, wavefunction_phase=wf)


def packet_entropy(spec: PacketSpec, t: float) -> float:
    """S = ln(sqrt(var x) sqrt(var p) / hbar).

    One-axis families use the x axis; LG packets use the transverse
    product sqrt(<rho^2><p_perp^2>) / hbar.
    """
    lam = spec.species.compton_wavelength
    if spec.family.is_lg:
        m = moments_transverse(spec, t)
        prod = m.central_rho2 * m.central_uperp2
    else:
        m1 = moments_1d(spec, t, "x")
        prod = m1.var_x * m1.var_u
    if prod <= 0.0:
        raise DomainError("central moments must be positive")
    return 0.5 * math.log(prod) - math.log(lam)


# -- wavefunctions ------------------------------------------------------------

def hermite(n: int, z):
    """Physicists' Hermite polynomial by upward recurrence (complex-safe)."""
    z = np.asarray(z)
    h0 = np.ones_like(z, dtype=np.result_type(z, float))
    if n == 0:
        return h0
    h1 = 2.0 * z
    for m in range(1, n):
        h0, h1 = h1, 2.0 * z * h1 - 2.0 * m * h0
    return h1


def laguerre(n: int, alpha: float, x):
    """Generalised Laguerre polynomial by upward recurrence (complex-safe)."""
    x = np.asarray(x)
    l0 = np.ones_like(x, dtype=np.result_type(x, float))
    if n == 0:
        return l0
    l1 = 1.0 + alpha - x
    for m in range(1, n):
        l0, l1 = l1, ((2 * m + 1 + alpha - x) * l1 - (m + alpha) * l0) / (m + 1)
    return l1


def _elegant_hg_norm(n: int, s0: float) -> float:
    # int H_n(y/sqrt2)^2 e^{-y^2} dy is a polynomial moment: exact with n+1 nodes
    y, w = np.polynomial.hermite.hermgauss(n + 1)
    integral = float(np.sum(w * hermite(n, y / math.sqrt(2.0)) ** 2))
    return 1.0 / math.sqrt(s0 * integral)


def _elegant_lg_norm(n: int, ell: int, s0: float) -> float:
    s, w = special.roots_genlaguerre(n + 1, abs(ell))
    integral = float(np.sum(w * laguerre(n, abs(ell), 0.5 * s) ** 2))
    return 1.0 / math.sqrt(math.pi * s0 * s0 * integral)


def _axis_wave(family: Family, n: int, s0: float, lam: float, xi, tau):
    T = tau * lam / (s0 * s0)
    if family is Family.ELEGANT_HG:
        q = 1.0 + 1j * T
        N = _elegant_hg_norm(n, s0)
        return N * q ** (-(n + 1) / 2.0) * hermite(n, xi / (s0 * np.sqrt(2.0 * q))) * np.exp(-xi * xi / (2.0 * s0 * s0 * q))
    st2 = s0 * s0 * (1.0 + T * T)
    N = 1.0 / math.sqrt(math.sqrt(math.pi) * 2.0**n * math.factorial(n) * s0)
    amp = N * (1.0 + T * T) ** -0.25 * hermite(n, xi / math.sqrt(st2))
    phase = -0.5 * (2 * n + 1) * math.atan(T)
    return amp * np.exp(1j * phase - xi * xi * (1.0 - 1j * T) / (2.0 * st2))


def wavefunction(spec: PacketSpec, x, y=None, t: float = 0.0, axis: str = "x"):
    """Complex amplitude samples of the exact free solution.

    With ``y`` omitted the one-axis amplitude along ``axis`` is returned
    (normalised over x in 1/sqrt(m)); otherwise the transverse amplitude on
    the (x, y) points (normalised over the plane, 1/m).  Along ``z`` the
    plane-wave factor of the mean momentum is included.
    """
    lam = spec.species.compton_wavelength
    tau = C_LIGHT * t
    x = np.asarray(x, dtype=float)
    if y is None:
        if spec.family.is_lg:
            raise DomainError("Laguerre-Gaussian packets need both x and y")
        n, s0 = _axis_params(spec, axis)
        if axis == "z":
            u0 = spec.mean_u
            k0 = u0 / lam
            xi = x - u0 * tau
            return _axis_wave(spec.family, n, s0, lam, xi, tau) * np.exp(1j * (k0 * x - 0.5 * lam * k0 * k0 * tau))
        return _axis_wave(spec.family, n, s0, lam, x, tau)
    y = np.asarray(y, dtype=float)
    if not spec.family.is_lg:
        fam = Family.STANDARD_HG if spec.family is Family.GAUSSIAN else spec.family
        return (_axis_wave(fam, spec.n, spec.sigma0, lam, x, tau) *
                _axis_wave(fam, spec.j, spec.sigma_y, lam, y, tau))
    s0, n, ell = spec.sigma0, spec.n, spec.ell
    al = abs(ell)
    T = tau * lam / (s0 * s0)
    r2 = x * x + y * y
    # (x + i sgn(l) y)^|l| = rho^|l| e^{i l phi}
    vortex = (x + 1j * np.sign(ell) * y) ** al if al else np.ones_like(r2, dtype=complex)
    if spec.family is Family.STANDARD_LG:
        st2 = s0 * s0 * (1.0 + T * T)
        N = math.sqrt(math.factorial(n) / (math.pi * math.factorial(n + al))) / s0
        amp = N * vortex / st2 ** (al / 2.0) * (s0 / math.sqrt(st2)) * laguerre(n, al, r2 / st2)
        phase = -(2 * n + al + 1) * math.atan(T)
        return amp * np.exp(1j * phase - r2 * (1.0 - 1j * T) / (2.0 * st2))
    q = 1.0 + 1j * T
    N = _elegant_lg_norm(n, ell, s0)
    return (N * q ** (-(n + al + 1)) * vortex / s0**al * laguerre(n, al, r2 / (2.0 * s0 * s0 * q)) *
            np.exp(-r2 / (2.0 * s0 * s0 * q)))


def catalog(max_n: int = 10, max_ell: int = 10, sigma0: float = 1e-9, species: ParticleSpecies = ELECTRON):
    """Iterate over every packet spec up to the given orders."""
    for fam in Family:
        for n in range(max_n + 1):
            if fam is Family.GAUSSIAN and n:
                break
            if fam.is_lg:
                for ell in range(-max_ell, max_ell + 1):
                    yield PacketSpec(fam, sigma0, n=n, ell=ell, species=species)
            else:
                yield PacketSpec(fam, sigma0, n=n, j=n % 3, species=species)
