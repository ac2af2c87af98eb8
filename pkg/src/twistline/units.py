"""Unit-suffixed number parsing shared by the lattice reader and the CLI."""

from __future__ import annotations

import math
import re

# dimension -> {suffix: factor to SI (eV for energy, eV/c for momentum)}
UNITS: dict[str, dict[str, float]] = {
    "length": {"fm": 1e-15, "pm": 1e-12, "nm": 1e-9, "um": 1e-6, "µm": 1e-6, "μm": 1e-6,
               "mm": 1e-3, "cm": 1e-2, "m": 1.0, "km": 1e3},
    "field": {"T": 1.0, "mT": 1e-3, "uT": 1e-6, "kG": 0.1, "G": 1e-4},
    "gradient": {"V/m2": 1.0, "V/m^2": 1.0, "kV/m2": 1e3, "kV/m^2": 1e3, "MV/m2": 1e6, "MV/m^2": 1e6,
                 "GV/m2": 1e9, "GV/m^2": 1e9, "V/mm2": 1e6, "V/mm^2": 1e6},
    "efield": {"V/m": 1.0, "kV/m": 1e3, "MV/m": 1e6, "GV/m": 1e9, "V/mm": 1e3, "kV/mm": 1e6},
    "energy": {"meV": 1e-3, "eV": 1.0, "keV": 1e3, "MeV": 1e6, "GeV": 1e9},
    "momentum": {"eV": 1.0, "keV": 1e3, "MeV": 1e6, "GeV": 1e9,
                 "eV/c": 1.0, "keV/c": 1e3, "MeV/c": 1e6, "GeV/c": 1e9},
    "temperature": {"K": 1.0, "mK": 1e-3},
    "angle": {"rad": 1.0, "mrad": 1e-3, "urad": 1e-6, "deg": math.pi / 180.0},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9, "ps": 1e-12, "fs": 1e-15},
    "mass": {"eV": 1.0, "keV": 1e3, "MeV": 1e6, "GeV": 1e9},
}

_NUMBER = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(.*)$")


class UnitError(ValueError):
    """A quantity string could not be read; ``expected`` lists valid suffixes."""

    def __init__(self, message: str, expected: tuple[str, ...] = ()):
        super().__init__(message)
        self.expected = expected


def parse_quantity(text: str, dimension: str, require_unit: bool = True) -> float:
    """Convert ``"10nm"``, ``"-2e8V/m2"``, ``"1T"`` ... to a float in SI.

    A bare number is accepted only when ``require_unit`` is false, in which
    case it is taken to be already in SI.
    """
    table = UNITS[dimension]
    m = _NUMBER.match(text.strip())
    if not m:
        raise UnitError(f"not a number: {text!r}", tuple(table))
    value, suffix = float(m.group(1)), m.group(2).strip()
    if not math.isfinite(value):
        raise UnitError(f"non-finite value: {text!r}", tuple(table))
    if not suffix:
        if require_unit:
            raise UnitError(f"missing unit in {text!r}", tuple(table))
        return value
    try:
        return value * table[suffix]
    except KeyError:
        raise UnitError(f"unknown {dimension} unit {suffix!r} in {text!r}", tuple(table)) from None


def parse_int(text: str) -> int:
    """Parse a plain (optionally signed) integer."""
    t = text.strip()
    if not re.fullmatch(r"[+-]?\d+", t):
        raise UnitError(f"not an integer: {text!r}", ("<integer>",))
    return int(t)


def parse_number(text: str) -> float:
    """Parse a plain dimensionless float."""
    m = _NUMBER.match(text.strip())
    if not m or m.group(2).strip():
        raise UnitError(f"not a dimensionless number: {text!r}", ("<number>",))
    return float(m.group(1))


BASE_UNIT = {"length": "m", "field": "T", "gradient": "V/m2", "efield": "V/m", "energy": "eV",
             "momentum": "eV", "temperature": "K", "angle": "rad", "time": "s", "mass": "eV"}


def format_si(value: float, dimension: str) -> str:
    """Format an SI value with the base suffix so that parsing it is exact."""
    return f"{float(value)!r}{BASE_UNIT[dimension]}"
