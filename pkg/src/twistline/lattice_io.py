"""Beamline description files and the moment transport pipeline.

Format
------
One item per line, ``keyword key=value ...``, ``#`` starts a comment::

    species electron
    packet lg-standard n=0 l=3 sigma=10nm p=100keV
    drift L=1mm
    solenoid H=1T L=5cm
    lens Eprime=-2e8V/m2 L=2cm
    drift L=1mm

Keywords: ``species`` (builtin name, or ``species NAME mass=.. Z=..``),
``packet FAMILY`` or ``cathode`` (the source), ``drift``, ``solenoid``,
``lens``, ``crossed``, ``penning``, ``foil`` and ``options``.  Every
dimensional value needs a unit suffix.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, fields, replace
from typing import Iterable, TextIO

from .busch import CoherenceModel, coherence_model
from .constants import BUILTIN_SPECIES, C_LIGHT, ParticleSpecies, electric_gradient, cyclotron_wavenumber
from .elements import (Classification, Element, ElementKind, Matching, canonical_uperp2, classify, face_transition,
                       field_rms, kinetic_angular_momentum)
from .errors import DomainError, TransportError, TwistlineError
from .free_transport import twiss_from_moments
from .packets import Family, PacketSpec, TransverseMoments, moments_transverse
from .units import UnitError, format_si, parse_int, parse_number, parse_quantity

MAX_SAMPLES = 100_000


@dataclass(frozen=True)
class CathodeSource:
    """A packet born at rest transversally (zero kinetic AM) in the field H.

    ``rms`` is sqrt(<rho^2>) at birth; when omitted it follows from the
    Maxwellian model at ``temperature``.  The velocity spread is set by the
    quality factor: <u^2> = (M lambda_c)^2 / <rho^2>.
    """

    H: float
    momentum: float  # eV/c
    rms: float | None = None
    M: float = 1.0
    temperature: float | None = None

    def radius(self, species: ParticleSpecies) -> float:
        if self.rms is not None:
            return self.rms
        return coherence_model(species, self.temperature, CoherenceModel.MAXWELLIAN)


@dataclass(frozen=True)
class Foil:
    """Zero-length stripping foil changing the charge number to ``Z_out``.

    ``H`` is the field at the foil; by default the field of the preceding
    element (the foil sits at its exit plane).
    """

    Z_out: int
    H: float | None = None


@dataclass(frozen=True)
class Lattice:
    species: ParticleSpecies
    source: PacketSpec | CathodeSource
    items: tuple = ()
    samples: int = 50
    lorentz_gamma: float | None = None
    matching: Matching = Matching.CANONICAL

    @property
    def elements(self) -> tuple[Element, ...]:
        return tuple(i for i in self.items if isinstance(i, Element))

    @property
    def momentum(self) -> float:
        return self.source.momentum


@dataclass(frozen=True)
class ParseError:
    line: int
    column: int
    token: str
    expected: tuple[str, ...]
    message: str

    def __str__(self):
        exp = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        return f"{self.line}:{self.column}: {self.message} [{self.token!r}]{exp}"


class LatticeParseError(TwistlineError, ValueError):
    """Raised by :func:`parse_lattice` with every error found in the text."""

    def __init__(self, errors: list[ParseError]):
        super().__init__("\n".join(str(e) for e in errors))
        self.errors = errors


@dataclass(frozen=True)
class TrajectoryRecord:
    element: int  # -1 for the source, then item index
    kind: str
    classification: str
    t: float  # proper time, s
    t_lab: float  # s
    z: float  # m
    rho2: float
    rho_u: float
    uperp2: float
    uperp2_can: float
    emittance: float
    M: float
    ell: float
    Lz_kin: float
    alpha: float
    beta: float
    gamma: float


COLUMNS = tuple(f.name for f in fields(TrajectoryRecord))


# -- parsing ------------------------------------------------------------------

_ELEMENT_KEYS = {
    "drift": ({"L": "length"}, ("L",)),
    "solenoid": ({"H": "field", "L": "length"}, ("H", "L")),
    "lens": ({"Eprime": "gradient", "L": "length"}, ("Eprime", "L")),
    "crossed": ({"H": "field", "Eprime": "gradient", "L": "length"}, ("H", "Eprime", "L")),
    "penning": ({"H": "field", "a": "gradient", "L": "length"}, ("H", "a", "L")),
}
_KEYWORDS = ("species", "packet", "cathode", "foil", "options") + tuple(_ELEMENT_KEYS)
_PACKET_KEYS = {"n": "int", "l": "int", "j": "int", "k": "int", "sigma": "length", "sigma_y": "length",
                "p": "momentum"}
_CATHODE_KEYS = {"H": "field", "rms": "length", "p": "momentum", "M": "number", "T": "temperature",
                 "model": "word"}
_SPECIES_KEYS = {"mass": "mass", "Z": "int"}
_FOIL_KEYS = {"zout": "int", "H": "field"}
_OPTION_KEYS = {"samples": "int", "gamma": "number", "matching": "word"}


def _tokens(line: str):
    """(column, text) for each whitespace-separated token (1-based columns)."""
    out, i = [], 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < len(line) and not line[j].isspace():
            j += 1
        out.append((i + 1, line[i:j]))
        i = j
    return out


class _Collector:
    def __init__(self):
        self.errors: list[ParseError] = []

    def add(self, line, col, token, message, expected=()):
        self.errors.append(ParseError(line, col, token, tuple(expected), message))


def _convert(kind: str, text: str):
    if kind == "int":
        return parse_int(text)
    if kind == "number":
        return parse_number(text)
    if kind == "word":
        return text
    return parse_quantity(text, kind)


def _keyvals(toks, allowed: dict, lineno: int, err: _Collector):
    vals, cols = {}, {}
    for col, tok in toks:
        if "=" not in tok:
            err.add(lineno, col, tok, "expected key=value", tuple(f"{k}=" for k in allowed))
            continue
        key, _, text = tok.partition("=")
        if key not in allowed:
            err.add(lineno, col, tok, f"unknown key {key!r}", tuple(allowed))
            continue
        if key in cols:
            err.add(lineno, col, tok, f"duplicate key {key!r}")
            continue
        cols[key] = col
        try:
            vals[key] = _convert(allowed[key], text)
        except UnitError as e:
            err.add(lineno, col + len(key) + 1, text, str(e), e.expected)
    return vals, cols


def _require(vals, needed, lineno, col, keyword, err: _Collector, seen=()) -> bool:
    """Report absent keys; keys present with a bad value were already reported."""
    ok = True
    for key in needed:
        if key not in vals:
            ok = False
            if key not in seen:
                err.add(lineno, col, keyword, f"{keyword}: missing required key {key!r}", (f"{key}=",))
    return ok


def parse_lattice(text: str) -> Lattice:
    """Parse lattice text, collecting every error before raising.

    Raises
    ------
    LatticeParseError
        With one :class:`ParseError` per problem found.
    """
    err = _Collector()
    species = None
    species_line = None
    source_raw = None  # (kind, vals, lineno, col)
    source_seen = False
    items_raw = []
    opts = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        col, kw = toks[0]
        rest = toks[1:]
        if kw not in _KEYWORDS:
            err.add(lineno, col, kw, f"unknown keyword {kw!r}", _KEYWORDS)
            continue
        if kw == "species":
            if species_line is not None:
                err.add(lineno, col, kw, f"species already declared on line {species_line}")
                continue
            species_line = lineno
            if not rest or "=" in rest[0][1]:
                err.add(lineno, col, kw, "species needs a name", tuple(BUILTIN_SPECIES))
                continue
            ncol, name = rest[0]
            vals, seen = _keyvals(rest[1:], _SPECIES_KEYS, lineno, err)
            if seen:
                if not _require(vals, ("mass", "Z"), lineno, col, kw, err, seen):
                    continue
                if not (vals["mass"] > 0.0):
                    err.add(lineno, col, kw, "species mass must be positive")
                    continue
                species = ParticleSpecies(name, vals["mass"], vals["Z"])
            elif name.lower() in BUILTIN_SPECIES:
                species = BUILTIN_SPECIES[name.lower()]
            else:
                err.add(lineno, ncol, name, f"unknown species {name!r}; give mass= and Z=", tuple(BUILTIN_SPECIES))
            continue
        if kw in ("packet", "cathode"):
            source_seen = True
            if source_raw is not None:
                err.add(lineno, col, kw, f"source already declared on line {source_raw[2]}")
                continue
            if kw == "packet":
                fam_vals = [f.value for f in Family]
                if not rest or rest[0][1] not in fam_vals:
                    tok = rest[0][1] if rest else kw
                    tcol = rest[0][0] if rest else col
                    msg = f"unknown packet family {tok!r}" if rest and "=" not in tok else "packet needs a family name"
                    err.add(lineno, tcol, tok, msg, fam_vals)
                    continue
                vals, seen = _keyvals(rest[1:], _PACKET_KEYS, lineno, err)
                if _require(vals, ("sigma", "p"), lineno, col, kw, err, seen):
                    source_raw = ("packet", (rest[0][1], vals), lineno, col)
            else:
                vals, seen = _keyvals(rest, _CATHODE_KEYS, lineno, err)
                ok = _require(vals, ("H", "p"), lineno, col, kw, err, seen)
                if "rms" not in seen and "T" not in seen:
                    err.add(lineno, col, kw, "cathode needs rms= or T=", ("rms=", "T="))
                    ok = False
                if vals.get("model", "maxwellian") != "maxwellian":
                    err.add(lineno, col, kw, "only the maxwellian model can be used without a reference",
                            ("maxwellian",))
                    ok = False
                if ok and ("rms" in vals or "T" in vals):
                    source_raw = ("cathode", vals, lineno, col)
            continue
        if kw == "options":
            vals, cols = _keyvals(rest, _OPTION_KEYS, lineno, err)
            if "matching" in vals and vals["matching"] not in [m.value for m in Matching]:
                err.add(lineno, cols["matching"], vals.pop("matching"), "unknown matching mode",
                        [m.value for m in Matching])
            opts.update(vals)
            continue
        if kw == "foil":
            vals, seen = _keyvals(rest, _FOIL_KEYS, lineno, err)
            if _require(vals, ("zout",), lineno, col, kw, err, seen):
                items_raw.append(("foil", vals, lineno, col))
            continue
        allowed, needed = _ELEMENT_KEYS[kw]
        vals, seen = _keyvals(rest, dict(allowed, Ez="efield"), lineno, err)
        if _require(vals, needed, lineno, col, kw, err, seen):
            items_raw.append((kw, vals, lineno, col))

    if species is None and species_line is None:
        err.add(1, 1, "", "missing species", ("species",))
    if not source_seen:
        err.add(1, 1, "", "missing source (packet or cathode)", ("packet", "cathode"))
    samples = opts.get("samples", 50)
    if not 2 <= samples <= MAX_SAMPLES:
        err.add(1, 1, str(samples), f"samples must be in [2, {MAX_SAMPLES}]")
    gamma = opts.get("gamma")
    if gamma is not None and gamma < 1.0:
        err.add(1, 1, str(gamma), "gamma must be >= 1")

    source = None
    if species is not None and source_raw is not None:
        kind, vals, lineno, col = source_raw
        try:
            if kind == "packet":
                fam, v = vals
                source = PacketSpec(Family(fam), sigma0=v["sigma"], n=v.get("n", 0), ell=v.get("l", 0),
                                    j=v.get("j", 0), k=v.get("k", 0), momentum=v["p"], species=species,
                                    sigma0_y=v.get("sigma_y"))
            else:
                species.require_charged()
                if vals.get("M", 1.0) < 1.0:
                    raise DomainError("cathode quality factor M must be >= 1")
                if "rms" in vals and not vals["rms"] > 0.0:
                    raise DomainError("cathode rms must be positive")
                source = CathodeSource(H=vals["H"], momentum=vals["p"], rms=vals.get("rms"), M=vals.get("M", 1.0),
                                       temperature=vals.get("T"))
                source.radius(species)
        except DomainError as e:
            err.add(lineno, col, kind, str(e))
    items = []
    z_cur = species.charge_number if species is not None else None
    for kind, vals, lineno, col in items_raw:
        try:
            if kind == "foil":
                if vals["zout"] == z_cur:
                    raise DomainError("foil does not change the charge state")
                z_cur = vals["zout"]
                items.append(Foil(Z_out=vals["zout"], H=vals.get("H")))
                continue
            ek = {"drift": ElementKind.DRIFT, "solenoid": ElementKind.SOLENOID,
                  "lens": ElementKind.ELECTROSTATIC_LENS, "crossed": ElementKind.CROSSED_LENS,
                  "penning": ElementKind.PENNING_TRAP}[kind]
            items.append(Element(ek, length=vals["L"], H=vals.get("H", 0.0), E_rho_prime=vals.get("Eprime", 0.0),
                                 a=vals.get("a", 0.0), E_z=vals.get("Ez", 0.0)))
        except DomainError as e:
            err.add(lineno, col, kind, str(e))
    if err.errors:
        raise LatticeParseError(sorted(err.errors, key=lambda e: (e.line, e.column)))
    return Lattice(species=species, source=source, items=tuple(items), samples=samples, lorentz_gamma=gamma,
                   matching=Matching(opts.get("matching", "canonical")))


# -- serialisation ------------------------------------------------------------

def serialize_lattice(lat: Lattice) -> str:
    """Text form of ``lat``; parsing it gives back an equal Lattice."""
    sp = lat.species
    lines = []
    if BUILTIN_SPECIES.get(sp.name) == sp:
        lines.append(f"species {sp.name}")
    else:
        lines.append(f"species {sp.name} mass={format_si(sp.mass, 'mass')} Z={sp.charge_number}")
    src = lat.source
    if isinstance(src, PacketSpec):
        parts = [f"packet {src.family.value}"]
        for key, attr in (("n", "n"), ("l", "ell"), ("j", "j"), ("k", "k")):
            if getattr(src, attr):
                parts.append(f"{key}={getattr(src, attr)}")
        parts.append(f"sigma={format_si(src.sigma0, 'length')}")
        if src.sigma0_y is not None:
            parts.append(f"sigma_y={format_si(src.sigma0_y, 'length')}")
        parts.append(f"p={format_si(src.momentum, 'momentum')}")
    else:
        parts = [f"cathode H={format_si(src.H, 'field')}", f"p={format_si(src.momentum, 'momentum')}"]
        if src.rms is not None:
            parts.append(f"rms={format_si(src.rms, 'length')}")
        if src.M != 1.0:
            parts.append(f"M={src.M!r}")
        if src.temperature is not None:
            parts.append(f"T={format_si(src.temperature, 'temperature')}")
    lines.append(" ".join(parts))
    for it in lat.items:
        if isinstance(it, Foil):
            lines.append(f"foil zout={it.Z_out}" + (f" H={format_si(it.H, 'field')}" if it.H is not None else ""))
            continue
        kw = {ElementKind.DRIFT: "drift", ElementKind.SOLENOID: "solenoid", ElementKind.ELECTROSTATIC_LENS: "lens",
              ElementKind.CROSSED_LENS: "crossed", ElementKind.PENNING_TRAP: "penning"}[it.kind]
        parts = [kw]
        if kw in ("solenoid", "crossed", "penning"):
            parts.append(f"H={format_si(it.H, 'field')}")
        if kw in ("lens", "crossed"):
            parts.append(f"Eprime={format_si(it.E_rho_prime, 'gradient')}")
        if kw == "penning":
            parts.append(f"a={format_si(it.a, 'gradient')}")
        parts.append(f"L={format_si(it.length, 'length')}")
        if it.E_z:
            parts.append(f"Ez={format_si(it.E_z, 'efield')}")
        lines.append(" ".join(parts))
    opts = [f"samples={lat.samples}"]
    if lat.lorentz_gamma is not None:
        opts.append(f"gamma={lat.lorentz_gamma!r}")
    if lat.matching is not Matching.CANONICAL:
        opts.append(f"matching={lat.matching.value}")
    lines.append("options " + " ".join(opts))
    return "\n".join(lines) + "\n"


# -- transport ----------------------------------------------------------------

def _source_state(lat: Lattice) -> tuple[TransverseMoments, float]:
    """Initial moments and the axial field at the source."""
    sp = lat.species
    src = lat.source
    if isinstance(src, PacketSpec):
        return moments_transverse(src, 0.0), 0.0
    r2 = src.radius(sp) ** 2
    lam = sp.compton_wavelength
    kap = cyclotron_wavenumber(sp, src.H)
    # zero kinetic AM at birth fixes the canonical OAM
    ell = 0.5 * kap * r2 / lam
    return TransverseMoments(rho2=r2, rho_u=0.0, uperp2=(src.M * lam) ** 2 / r2, ell=ell), src.H


class _Longitudinal:
    """Proper-time bookkeeping of the longitudinal motion (ct units)."""

    def __init__(self, species: ParticleSpecies, momentum: float):
        self.mass = species.mass
        self.Z = species.charge_number
        self.u = momentum / species.mass

    def dwell(self, L: float, Ez: float) -> float:
        """Proper time (as c tau, m) to cross length L."""
        if Ez == 0.0 or self.Z == 0:
            if self.u <= 0.0:
                raise DomainError("packet has no longitudinal momentum")
            return L / self.u
        g = self.Z * Ez / self.mass  # 1/m
        g0 = math.sqrt(1.0 + self.u**2)
        g1 = g0 + g * L
        if g1 < 1.0 or (g < 0.0 and g1 <= 1.0):
            raise DomainError("the accelerating field stops the packet inside the element")
        return (math.asinh(math.sqrt(g1 * g1 - 1.0)) - math.asinh(self.u)) / g

    def advance(self, tau: float, Ez: float) -> tuple[float, float]:
        """(lab ct, z) after proper ct time ``tau``; updates u."""
        u0 = self.u
        if Ez == 0.0 or self.Z == 0:
            return math.sqrt(1.0 + u0 * u0) * tau, u0 * tau
        g = self.Z * Ez / self.mass
        a0 = math.asinh(u0)
        u1 = math.sinh(a0 + g * tau)
        self.u = u1
        return (u1 - u0) / g, (math.sqrt(1.0 + u1 * u1) - math.sqrt(1.0 + u0 * u0)) / g

    def peek(self, tau: float, Ez: float) -> tuple[float, float]:
        saved = self.u
        out = self.advance(tau, Ez)
        self.u = saved
        return out


def _record(idx, kind, cls, m, t, t_lab, z, sp, H) -> TrajectoryRecord:
    lam = sp.compton_wavelength
    eps = m.emittance
    try:
        tw = twiss_from_moments(m)
        a, b, g = tw.alpha, tw.beta, tw.gamma
    except DomainError:
        a = b = g = math.nan
    return TrajectoryRecord(element=idx, kind=kind, classification=cls, t=t, t_lab=t_lab, z=z, rho2=m.rho2,
                            rho_u=m.rho_u, uperp2=m.uperp2, uperp2_can=canonical_uperp2(m, sp, H), emittance=eps,
                            M=eps / lam, ell=m.ell, Lz_kin=kinetic_angular_momentum(m, sp, H), alpha=a, beta=b,
                            gamma=g)


def _classification(sp, el: Element, m: TransverseMoments) -> Classification:
    kap = cyclotron_wavenumber(sp, el.H)
    k = electric_gradient(sp, el.gradient)
    om2 = kap * kap - 4.0 * k
    plateau = None
    if om2 > 0.0:
        plateau = (2.0 * (m.uperp2 - k * m.rho2) + 2.0 * kap * sp.compton_wavelength * m.ell) / om2
    return classify(sp, el.H, el.gradient, m.rho2, plateau)


def transport(lat: Lattice, samples: int | None = None) -> list[TrajectoryRecord]:
    """Fold the source moments through the lattice.

    Each element is sampled at ``samples`` equal slices of its proper dwell
    time, both faces included, so the exit record of one element and the
    entry record of the next describe the same plane.  Times in the records
    are proper times; ``t_lab`` uses the Lorentz factor from the options
    (or the instantaneous one).
    """
    n = samples or lat.samples
    if n < 2:
        raise DomainError("need at least two samples per element")
    sp = lat.species
    m, H_cur = _source_state(lat)
    lon = _Longitudinal(sp, lat.momentum)
    fixed_gamma = lat.lorentz_gamma
    t = t_lab = z = 0.0
    records = [_record(-1, "source", Classification.FREE.value if H_cur == 0.0 else "Source", m, 0.0, 0.0, 0.0, sp,
                       H_cur)]
    for idx, it in enumerate(lat.items):
        try:
            if isinstance(it, Foil):
                H_f = it.H if it.H is not None else H_cur
                new = sp.with_charge(it.Z_out)
                # kinetic moments continue, canonical OAM absorbs the change of kappa
                dk = cyclotron_wavenumber(new, H_f) - cyclotron_wavenumber(sp, H_f)
                m = m.replace(ell=m.ell + 0.5 * dk * m.rho2 / sp.compton_wavelength)
                sp = new
                lon.Z = sp.charge_number
                records.append(_record(idx, "foil", "Foil", m, t, t_lab, z, sp, H_cur))
                continue
            el = it
            m = face_transition(m, sp, H_cur, el.H, lat.matching)
            H_cur = el.H
            cls = _classification(sp, el, m).value
            tau_total = lon.dwell(el.length, el.E_z)
            start = m
            t0, tl0, z0 = t, t_lab, z
            for i in range(n):
                tau = tau_total * i / (n - 1)
                mi = start if i == 0 else field_rms(start, sp, el.H, el.gradient, tau / C_LIGHT)
                if not (mi.rho2 > 0.0):
                    raise DomainError(f"<rho^2> = {mi.rho2:g} m^2 became non-positive")
                dl, dz = lon.peek(tau, el.E_z)
                tl = fixed_gamma * tau if fixed_gamma is not None else dl
                records.append(_record(idx, el.kind.value, cls, mi.replace(time=t0 + tau / C_LIGHT), t0 + tau / C_LIGHT,
                                       tl0 + tl / C_LIGHT, z0 + dz, sp, H_cur))
            dl, dz = lon.advance(tau_total, el.E_z)
            m = field_rms(start, sp, el.H, el.gradient, tau_total / C_LIGHT)
            t = t0 + tau_total / C_LIGHT
            t_lab = tl0 + (fixed_gamma * tau_total if fixed_gamma is not None else dl) / C_LIGHT
            z = z0 + dz
            m = m.replace(time=t)
        except DomainError as e:
            raise TransportError(str(e), idx) from e
    return records


def phase_scan(lat: Lattice, index: int, lengths: Iterable[float]) -> list[float]:
    """Exit <rho^2> of the whole lattice as the length of item ``index`` varies."""
    out = []
    for L in lengths:
        items = list(lat.items)
        items[index] = replace(items[index], length=float(L))
        recs = transport(replace(lat, items=tuple(items)), samples=2)
        out.append(recs[-1].rho2)
    return out


# -- output -------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        return f"{v + 0.0:.12g}"  # + 0.0 turns -0.0 into 0.0
    return v


def write_csv(records: Iterable[TrajectoryRecord], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in records:
        w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])


def write_jsonl(records: Iterable[TrajectoryRecord], fh: TextIO) -> None:
    for r in records:
        d = {k: (float(f"{v + 0.0:.12g}") if isinstance(v, float) and math.isfinite(v) else
                 (None if isinstance(v, float) else v)) for k, v in asdict(r).items()}
        fh.write(json.dumps(d) + "\n")
