"""Independent numerical checks.

Nothing here evaluates a closed-form moment: moments come from sampled
amplitudes on a grid, second-moment dynamics from fixed-step RK4
integration of the Heisenberg equations, and orbits from integrating the
Lorentz force.  Physical constants are taken straight from
``scipy.constants`` so that edits to :mod:`twistline.constants` cannot leak
into the reference values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import constants as sc

from .errors import DomainError, VerificationError

MIN_POINTS = 64
NORM_TOL = 1e-6


def compton_wavelength(mass_ev: float) -> float:
    """hbar / (m c) in m for a rest energy in eV."""
    return sc.hbar * sc.c / (mass_ev * sc.e)


def cyclotron_wavenumber(mass_ev: float, charge_number: int, H: float) -> float:
    """q H / (m c) in 1/m (signed)."""
    m_kg = mass_ev * sc.e / sc.c**2
    return charge_number * sc.e * H / (m_kg * sc.c)


def electric_gradient(mass_ev: float, charge_number: int, E_rho_prime: float) -> float:
    """q E' / (m c^2) in 1/m^2 (signed)."""
    return charge_number * E_rho_prime / mass_ev


# -- grids --------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid of ``points`` samples on [c - extent, c + extent)."""

    extent: float
    points: int
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.points < MIN_POINTS:
            raise DomainError(f"grid needs at least {MIN_POINTS} points per axis")
        if not (self.extent > 0.0):
            raise DomainError("grid extent must be positive")

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / self.points

    def axis(self, k: int = 0) -> np.ndarray:
        return self.center[k] - self.extent + self.spacing * np.arange(self.points)

    def mesh(self):
        return np.meshgrid(self.axis(0), self.axis(1), indexing="ij")

    def refined(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.extent, self.points * factor, self.center)

    @classmethod
    def for_width(cls, width: float, M: float = 1.0, points: int = 256) -> "GridSpec":
        """A grid covering a packet of rms width ``width`` and quality factor M."""
        return cls(extent=(8.0 + 2.0 * math.sqrt(M)) * width, points=points)


@dataclass(frozen=True)
class GridMoments:
    """Quadrature moments; 2D fields use rho, 1D fields use x."""

    norm: float
    mean: tuple[float, ...]
    mean_u: tuple[float, ...]
    r2: float
    ru: float
    u2: float
    Lz: float
    edge_weight: float  # probability in the outermost grid cells (truncation estimate)

    @property
    def emittance(self) -> float:
        c2 = sum(v * v for v in self.mean)
        v2 = sum(v * v for v in self.mean_u)
        cv = sum(a * b for a, b in zip(self.mean, self.mean_u))
        return math.sqrt(max((self.r2 - c2) * (self.u2 - v2) - (self.ru - cv) ** 2, 0.0))


def _derivative(psi: np.ndarray, h: float, axis: int, method: str) -> np.ndarray:
    if method == "fft":
        n = psi.shape[axis]
        k = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
        shape = [1] * psi.ndim
        shape[axis] = n
        return np.fft.ifft(1j * k.reshape(shape) * np.fft.fft(psi, axis=axis), axis=axis)
    if method == "fd2":
        return (np.roll(psi, -1, axis=axis) - np.roll(psi, 1, axis=axis)) / (2.0 * h)
    raise DomainError(f"unknown derivative method {method!r}")


def _edge_weight(p: np.ndarray) -> float:
    if p.ndim == 1:
        return float(p[0] + p[-1])
    return float(p[0, :].sum() + p[-1, :].sum() + p[1:-1, 0].sum() + p[1:-1, -1].sum())


def grid_moments_1d(psi, grid: GridSpec, lam: float, method: str = "fft", norm_tol: float = NORM_TOL) -> GridMoments:
    """Moments of a sampled 1D amplitude; velocities u = lam (-i d/dx)."""
    psi = np.asarray(psi, dtype=complex)
    h = grid.spacing
    x = grid.axis(0)
    p = np.abs(psi) ** 2
    norm = float(p.sum() * h)
    if abs(norm - 1.0) > norm_tol:
        raise VerificationError(f"grid normalisation {norm:.9g} deviates from 1")
    d = _derivative(psi, h, 0, method)
    j = np.imag(np.conj(psi) * d)  # probability current / lam
    mx = float((x * p).sum() * h)
    mu = float(lam * j.sum() * h)
    return GridMoments(norm=norm, mean=(mx,), mean_u=(mu,), r2=float((x * x * p).sum() * h),
                       ru=float(lam * (x * j).sum() * h), u2=float(lam * lam * (np.abs(d) ** 2).sum() * h),
                       Lz=0.0, edge_weight=_edge_weight(p) * h)


def grid_moments_2d(psi, grid: GridSpec, lam: float, method: str = "fft", kappa: float = 0.0,
                    norm_tol: float = NORM_TOL) -> GridMoments:
    """Transverse moments of a sampled amplitude psi[ix, iy].

    With ``kappa`` nonzero the velocity is the kinetic one in a field of
    cyclotron wavenumber kappa, u = lam (-i grad) - (kappa/2) z x rho.
    ``Lz`` is always the canonical value <-i (x d_y - y d_x)>.
    """
    psi = np.asarray(psi, dtype=complex)
    h = grid.spacing
    X, Y = grid.mesh()
    w = h * h
    p = np.abs(psi) ** 2
    norm = float(p.sum() * w)
    if abs(norm - 1.0) > norm_tol:
        raise VerificationError(f"grid normalisation {norm:.9g} deviates from 1")
    dx = _derivative(psi, h, 0, method)
    dy = _derivative(psi, h, 1, method)
    ux = lam * (-1j) * dx + 0.5 * kappa * Y * psi
    uy = lam * (-1j) * dy - 0.5 * kappa * X * psi
    cpsi = np.conj(psi)
    mux = float(np.real(cpsi * ux).sum() * w)
    muy = float(np.real(cpsi * uy).sum() * w)
    ru = float(np.real(cpsi * (X * ux + Y * uy)).sum() * w)
    u2 = float((np.abs(ux) ** 2 + np.abs(uy) ** 2).sum() * w)
    Lz = float(np.real(cpsi * (-1j) * (X * dy - Y * dx)).sum() * w)
    return GridMoments(norm=norm, mean=(float((X * p).sum() * w), float((Y * p).sum() * w)), mean_u=(mux, muy),
                       r2=float(((X * X + Y * Y) * p).sum() * w), ru=ru, u2=u2, Lz=Lz,
                       edge_weight=_edge_weight(p) * w)


def grid_kinetic_moments(psi, grid: GridSpec, lam: float, kappa: float, method: str = "fft") -> GridMoments:
    """Kinetic-velocity moments of a sampled state just inside a field region."""
    return grid_moments_2d(psi, grid, lam, method=method, kappa=kappa)


def flux_through_density(psi, grid: GridSpec, H: float) -> float:
    """pi H <rho^2> evaluated as the |psi|^2-weighted area integral of H."""
    X, Y = grid.mesh()
    w = grid.spacing**2
    return float(math.pi * H * ((X * X + Y * Y) * np.abs(psi) ** 2).sum() * w)


# -- ODE integration ----------------------------------------------------------

def rk4(f: Callable[[float, np.ndarray], np.ndarray], y0, t0: float, t1: float, steps: int,
        samples: int | None = None):
    """Classical fixed-step fourth-order Runge-Kutta.

    Returns (times, states) with ``samples`` + 1 equally spaced outputs
    (default: only the end points).
    """
    if steps < 1:
        raise DomainError("need at least one step")
    samples = samples or 1
    if steps % samples:
        steps += samples - steps % samples
    every = steps // samples
    h = (t1 - t0) / steps
    y = np.array(y0, dtype=float)
    t = t0
    ts, ys = [t], [y.copy()]
    for i in range(1, steps + 1):
        k1 = f(t, y)
        k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t0 + i * h
        if i % every == 0:
            ts.append(t)
            ys.append(y.copy())
    return np.array(ts), np.array(ys)


SYSTEMS = ("free1d", "free", "solenoid", "electrostatic", "crossed", "centroid")


@dataclass(frozen=True)
class OdeRun:
    """One integration of a moment (or centroid) system in ct units.

    State vectors
    -------------
    free1d          (<x^2>, <x u>, <u^2>)
    free, solenoid,
    electrostatic,
    crossed         (<rho^2>, <rho.u>, <u^2>, <L_kin>/(m c)) with kinetic u
    centroid        (x, y, u_x, u_y)
    """

    system: str
    tau_end: float  # m (c t)
    steps: int
    kappa: float = 0.0  # 1/m
    k: float = 0.0  # 1/m^2
    samples: int = 1

    def __post_init__(self):
        if self.system not in SYSTEMS:
            raise DomainError(f"unknown system {self.system!r}; choose from {SYSTEMS}")
        rate = max(abs(self.kappa), math.sqrt(abs(self.kappa**2 - 4.0 * self.k)), 2.0 * math.sqrt(abs(self.k)))
        if rate > 0.0:
            period = 2.0 * math.pi / rate
            if abs(self.tau_end) / self.steps > period / 200.0:
                raise DomainError("step exceeds period/200; increase the number of steps")

    def rhs(self):
        kap, k = self.kappa, self.k
        if self.system == "free1d":
            return lambda t, y: np.array([2.0 * y[1], y[2], 0.0])
        if self.system == "centroid":
            return lambda t, y: np.array([y[2], y[3], k * y[0] + kap * y[3], k * y[1] - kap * y[2]])

        def f(t, y):
            R, C, U2, Lk = y
            return np.array([2.0 * C, U2 + k * R + kap * Lk, 2.0 * k * C, -kap * C])
        return f


def ode_moments(run: OdeRun, y0):
    """Integrate ``run`` from the state ``y0``; returns (tau, states)."""
    return rk4(run.rhs(), y0, 0.0, run.tau_end, run.steps, run.samples)


# -- orbits -------------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray  # s
    positions: np.ndarray  # (N, 3) m
    velocities: np.ndarray  # (N, 3) c units


def lorentz_orbit(position, velocity, mass_ev: float, charge_number: int, H: float, t_span: float,
                  step: float, samples: int | None = None) -> Trajectory:
    """Integrate du/dt = (q/m) u x B along B = H z_hat with RK4."""
    m_kg = mass_ev * sc.e / sc.c**2
    wc = charge_number * sc.e * H / m_kg
    if wc != 0.0 and step > 2.0 * math.pi / abs(wc) / 500.0:
        raise DomainError("step must not exceed T_c / 500")
    steps = max(1, int(math.ceil(t_span / step)))

    def f(t, y):
        return np.array([y[3] * sc.c, y[4] * sc.c, y[5] * sc.c, wc * y[4], -wc * y[3], 0.0])

    ts, ys = rk4(f, list(position) + list(velocity), 0.0, t_span, steps, samples)
    return Trajectory(times=ts, positions=ys[:, :3], velocities=ys[:, 3:])


# -- Schroedinger residual ----------------------------------------------------

def schrodinger_residual(amplitude: Callable[[np.ndarray, np.ndarray | None, float], np.ndarray], grid: GridSpec,
                         t: float, lam: float, ndim: int = 2, time_step: float | None = None,
                         corrupt_phase: float = 0.0, width: float | None = None) -> float:
    """Relative residual of i d_tau psi + (lam/2) lap psi on interior points.

    ``amplitude(x, y, t)`` samples the candidate solution (``y`` is None in
    1D).  Central differences are used in space and time; the time step
    defaults to 0.1 dx^2/lam so that both errors scale as dx^2.
    ``corrupt_phase`` multiplies the samples by exp(i c (x/width)^2) with
    time-independent c, which is not a free solution (a negative control).
    """
    h = grid.spacing
    dtau = time_step if time_step is not None else 0.1 * h * h / lam
    dt = dtau / sc.c
    x = grid.axis(0)
    w = width or grid.extent / 8.0
    if ndim == 1:
        coords = (x, None)
        chirp = np.exp(1j * corrupt_phase * (x / w) ** 2)
    else:
        X, Y = grid.mesh()
        coords = (X, Y)
        chirp = np.exp(1j * corrupt_phase * ((X * X + Y * Y) / (w * w)))

    def sample(tt):
        return amplitude(coords[0], coords[1], tt) * chirp

    p0, pp, pm = sample(t), sample(t + dt), sample(t - dt)
    dpsi = (pp - pm) / (2.0 * dtau)
    lap = sum(np.roll(p0, 1, axis=a) + np.roll(p0, -1, axis=a) - 2.0 * p0 for a in range(ndim)) / (h * h)
    res = 1j * dpsi + 0.5 * lam * lap
    inner = (slice(1, -1),) * ndim
    scale = np.linalg.norm((0.5 * lam * lap)[inner])
    return float(np.linalg.norm(res[inner]) / scale)
