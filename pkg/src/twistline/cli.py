"""Command line interface: ``twistline <subcommand> ...``.

Output is JSON (or CSV / JSON lines where a table is produced) with every
float written to 12 significant digits.  Exit codes: 0 success, 1 usage,
2 lattice parse error, 3 domain or transport error, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import enum
import json
import math
import sys

from . import busch, classical, elements, free_transport, lattice_io, packets, verify
from .constants import field_scales, species_constants
from .errors import TwistlineError, VerificationError
from .units import UnitError, parse_quantity

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_DOMAIN, EXIT_VERIFY = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _plain(obj):
    """Recursively turn results into JSON-ready values (12 significant digits)."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.12g}") if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _plain(obj.tolist())
    return str(obj)


def _emit(obj, out=None):
    out = out or sys.stdout
    out.write(json.dumps(_plain(obj), indent=2, sort_keys=False) + "\n")


def _q(dim):
    def conv(text):
        try:
            return parse_quantity(text, dim)
        except UnitError as e:
            raise argparse.ArgumentTypeError(str(e)) from None
    conv.__name__ = dim
    return conv


def _vec(dim):
    def conv(text):
        parts = text.split(",")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("expected three comma-separated components")
        if dim is None:
            return tuple(float(p) for p in parts)
        return tuple(_q(dim)(p) for p in parts)
    return conv


def _species(args):
    return species_constants(args.species, getattr(args, "mass", None), getattr(args, "charge", None))


def _add_species(p):
    p.add_argument("--species", default="electron", help="electron, proton, hminus or a custom name")
    p.add_argument("--mass", type=_q("mass"), help="rest energy for a custom species, e.g. 938MeV")
    p.add_argument("--charge", type=int, help="charge number for a custom species")


def _add_packet(p, required=True):
    p.add_argument("--family", required=required, choices=[f.value for f in packets.Family])
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--l", dest="ell", type=int, default=0)
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--sigma", type=_q("length"), required=required)
    p.add_argument("--sigma-y", type=_q("length"))
    p.add_argument("--p", dest="momentum", type=_q("momentum"), default=0.0)


def _packet(args, species):
    return packets.PacketSpec(args.family, args.sigma, n=args.n, ell=args.ell, j=args.j, k=args.k,
                              momentum=args.momentum, species=species, sigma0_y=args.sigma_y)


# -- subcommands --------------------------------------------------------------

def _cmd_packet_info(args):
    sp = _species(args)
    spec = _packet(args, sp)
    td = spec.diffraction_time()
    t = args.t if args.t is not None else args.t_td * td
    out = {"family": spec.family.value, "n": spec.n, "ell": spec.ell, "t": t, "t_d": td,
           "moments": packets.moments_transverse(spec, t), "emittance": packets.emittance_transverse(spec),
           "gouy": packets.gouy_phase(spec, t), "entropy": packets.packet_entropy(spec, t)}
    if not spec.family.is_lg:
        out["moments_x"] = packets.moments_1d(spec, t, "x")
        out["emittance_x"] = packets.emittance_1d(spec, "x")
    _emit(out)


def _cmd_classical(args):
    sp = _species(args)
    init = classical.ClassicalState(args.pos, args.vel)
    state = classical.classical_orbit(init, sp, args.H, args.t)
    _emit({"state": state, "guiding_center": classical.guiding_center(init, sp, args.H),
           "invariants": classical.orbit_invariants(init, sp, args.H), "scales": field_scales(sp, args.H)})


def _cmd_element_report(args):
    sp = _species(args)
    spec = _packet(args, sp)
    m_in = packets.moments_transverse(spec, args.t_entry)
    el = elements.Element(args.kind, length=args.L, H=args.H, E_rho_prime=args.Eprime, a=args.a)
    u = spec.mean_u
    dwell = None
    t_exit = None
    if u > 0.0:
        t_exit = args.L / (u * elements.C_LIGHT)
        dwell = t_exit * math.sqrt(1.0 + u * u)
    matching = elements.Matching(args.matching)
    out = {"element": el}
    if el.kind is elements.ElementKind.SOLENOID and el.H > 0.0:
        matched = None
        if args.landau is not None:
            matched = elements.landau_props(sp, el.H, *args.landau)
            out["landau"] = matched
        out["report"] = elements.lens_report_solenoid(m_in, sp, el.H, matched, dwell, math.sqrt(1 + u * u), matching)
        if t_exit is not None:
            out["angular"] = elements.solenoid_angular(m_in, sp, el.H, t_exit, matching)
        if spec.family is packets.Family.STANDARD_LG:
            out["landau_match"] = elements.match_landau(spec, sp, el.H)
    else:
        out["report"] = elements.lens_report(el, m_in, sp, dwell, math.sqrt(1 + u * u), matching)
    if t_exit is not None:
        m = elements.face_transition(m_in, sp, 0.0, el.H, matching)
        if el.kind is not elements.ElementKind.DRIFT:
            m = elements.field_rms(m, sp, el.H, el.gradient, t_exit)
        else:
            m = free_transport.free_spread_transverse(m, t_exit)
        out["exit_moments"] = m
        out["exit_time"] = t_exit
    _emit(out)


def _cmd_busch(args):
    sp = _species(args)
    if args.what == "cathode":
        s = busch.SourceScenario("cathode", args.H, args.rms, species=sp, energy_width=args.energy_width)
        _emit(busch.cathode_oam(s))
    elif args.what == "foil":
        s = busch.SourceScenario("foil", args.H, args.rms, species=sp, Z_in=args.zin, Z_out=args.zout,
                                 energy_width=args.energy_width)
        _emit(busch.foil_oam(s))
    elif args.what == "coherence":
        ref = None
        if args.ref_T is not None and args.ref_rms is not None:
            ref = busch.CoherenceReference(args.ref_T, args.ref_rms, args.ref_mass)
        _emit({"rms_radius": busch.coherence_model(sp, args.T, args.model, ref)})
    elif args.what == "rayleigh":
        _emit({"z_R": busch.rayleigh_plan(args.rms, args.M, args.beta, sp)})
    else:
        _emit(busch.oam_broadening(args.ell, args.beta, args.lambda_ratio, args.straggling))


def _cmd_vcz(args):
    lam = args.lambda_db
    if lam is None:
        if args.momentum is None:
            raise argparse.ArgumentTypeError("give --lambda-db or --p")
        lam = free_transport.de_broglie_wavelength(_species(args), args.momentum)
    if (args.detected_rms is None) == (args.source_rms is None):
        raise argparse.ArgumentTypeError("give exactly one of --detected-rms and --source-rms")
    if args.detected_rms is not None:
        res = free_transport.vcz(args.z, lam, args.detected_rms, args.M, "source-from-detected", args.regime)
    else:
        res = free_transport.vcz(args.z, lam, args.source_rms, args.M, "detected-from-source", args.regime)
    _emit(res)


def _cmd_transport(args):
    with open(args.lattice, encoding="utf-8") as fh:
        text = fh.read()
    lat = lattice_io.parse_lattice(text)
    if args.matching is not None:
        lat = dataclasses.replace(lat, matching=elements.Matching(args.matching))
    recs = lattice_io.transport(lat, args.samples)
    fmt = args.format or "csv"
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        if fmt == "csv":
            lattice_io.write_csv(recs, out)
        else:
            lattice_io.write_jsonl(recs, out)
    finally:
        if args.out:
            out.close()


def _cmd_verify(args):
    results = verify.run_suite(args.suite)
    fmt = args.format or "json"
    rows = [{"suite": r.suite, "check": r.name, "deviation": r.deviation, "tolerance": r.tolerance,
             "passed": r.passed} for r in results]
    if fmt == "csv":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["suite", "check", "deviation", "tolerance", "passed"])
        for r in rows:
            w.writerow([r["suite"], r["check"], f"{r['deviation']:.12g}", f"{r['tolerance']:.12g}", r["passed"]])
    else:
        worst = max((r.deviation / r.tolerance for r in results), default=0.0)
        _emit({"checks": rows, "all_passed": all(r.passed for r in results), "worst_ratio": worst})
    if not all(r.passed for r in results):
        raise VerificationError("verification failed")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="twistline", description="Moment transport of quantum wave packets in axial fields.")
    p.add_argument("--quiet", action="store_true", help="suppress diagnostics on stderr")
    p.add_argument("--format", choices=["json", "csv", "jsonl"], help="output format where applicable")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("packet-info", help="closed-form moments of an analytic packet")
    _add_species(s)
    _add_packet(s)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--t", type=_q("time"))
    g.add_argument("--t-td", type=float, default=0.0, help="time in units of the diffraction time")
    s.set_defaults(func=_cmd_packet_info)

    s = sub.add_parser("classical", help="exact cyclotron orbit of a point charge")
    _add_species(s)
    s.add_argument("--H", type=_q("field"), required=True)
    s.add_argument("--pos", type=_vec("length"), default=(0.0, 0.0, 0.0), help="x,y,z with units, e.g. 1um,0m,0m")
    s.add_argument("--vel", type=_vec(None), required=True, help="vx,vy,vz in units of c")
    s.add_argument("--t", type=_q("time"), required=True)
    s.set_defaults(func=_cmd_classical)

    s = sub.add_parser("element-report", help="lens classification and exit moments of one element")
    _add_species(s)
    _add_packet(s)
    s.add_argument("--kind", required=True, choices=[k.value for k in elements.ElementKind])
    s.add_argument("--H", type=_q("field"), default=0.0)
    s.add_argument("--Eprime", type=_q("gradient"), default=0.0)
    s.add_argument("--a", type=_q("gradient"), default=0.0)
    s.add_argument("--L", type=_q("length"), required=True)
    s.add_argument("--t-entry", type=_q("time"), default=0.0, help="packet age at the entrance face")
    s.add_argument("--landau", type=int, nargs=2, metavar=("N_H", "L"), help="matched Landau state")
    s.add_argument("--matching", choices=[m.value for m in elements.Matching], default="canonical")
    s.set_defaults(func=_cmd_element_report)

    s = sub.add_parser("busch", help="OAM from magnetized sources and foils")
    bsub = s.add_subparsers(dest="what", required=True)
    b = bsub.add_parser("cathode")
    _add_species(b)
    b.add_argument("--H", type=_q("field"), required=True)
    b.add_argument("--rms", type=_q("length"), required=True)
    b.add_argument("--energy-width", type=_q("energy"))
    b.set_defaults(func=_cmd_busch)
    b = bsub.add_parser("foil")
    _add_species(b)
    b.add_argument("--zin", type=int, required=True)
    b.add_argument("--zout", type=int, required=True)
    b.add_argument("--H", type=_q("field"), required=True)
    b.add_argument("--rms", type=_q("length"), required=True)
    b.add_argument("--energy-width", type=_q("energy"))
    b.set_defaults(func=_cmd_busch)
    b = bsub.add_parser("coherence")
    _add_species(b)
    b.add_argument("--T", type=_q("temperature"), required=True)
    b.add_argument("--model", choices=[m.value for m in busch.CoherenceModel], default="maxwellian")
    b.add_argument("--ref-T", type=_q("temperature"))
    b.add_argument("--ref-rms", type=_q("length"))
    b.add_argument("--ref-mass", type=_q("mass"))
    b.set_defaults(func=_cmd_busch)
    b = bsub.add_parser("rayleigh")
    _add_species(b)
    b.add_argument("--rms", type=_q("length"), required=True)
    b.add_argument("--M", type=float, default=1.0)
    b.add_argument("--beta", type=float, required=True)
    b.set_defaults(func=_cmd_busch)
    b = bsub.add_parser("broadening")
    _add_species(b)
    b.add_argument("--ell", type=float, required=True)
    b.add_argument("--beta", type=float, required=True)
    b.add_argument("--lambda-ratio", type=float, required=True)
    b.add_argument("--straggling", type=_q("angle"), required=True)
    b.set_defaults(func=_cmd_busch)

    s = sub.add_parser("vcz", help="source/detected rms sizes over a distance")
    _add_species(s)
    s.add_argument("--z", type=_q("length"), required=True)
    s.add_argument("--lambda-db", type=_q("length"))
    s.add_argument("--p", dest="momentum", type=_q("momentum"))
    s.add_argument("--detected-rms", type=_q("length"))
    s.add_argument("--source-rms", type=_q("length"))
    s.add_argument("--M", type=float, default=1.0)
    s.add_argument("--regime", choices=[r.value for r in free_transport.VczRegime], default="far-field")
    s.set_defaults(func=_cmd_vcz)

    s = sub.add_parser("transport", help="transport a lattice file and print the sampled trajectory")
    s.add_argument("--lattice", required=True)
    s.add_argument("--samples", type=int)
    s.add_argument("--out")
    s.add_argument("--matching", choices=[m.value for m in elements.Matching])
    s.add_argument("--format", choices=["csv", "jsonl"], default=argparse.SUPPRESS)
    s.set_defaults(func=_cmd_transport)

    s = sub.add_parser("verify", help="cross-check analytic results against the numeric oracle")
    s.add_argument("--suite", choices=("all",) + verify.SUITES, default="all")
    s.add_argument("--format", choices=["json", "csv"], default=argparse.SUPPRESS)
    s.set_defaults(func=_cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    def note(msg):
        if not args.quiet:
            print(f"twistline: {msg}", file=sys.stderr)

    try:
        args.func(args)
    except lattice_io.LatticeParseError as e:
        note(f"parse error\n{e}")
        return EXIT_PARSE
    except VerificationError as e:
        note(str(e))
        return EXIT_VERIFY
    except argparse.ArgumentTypeError as e:
        parser.print_usage(sys.stderr)
        note(str(e))
        return EXIT_USAGE
    except (TwistlineError, ValueError) as e:
        note(str(e))
        return EXIT_DOMAIN
    except OSError as e:
        note(str(e))
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
