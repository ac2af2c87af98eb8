import json
import subprocess
import sys
from pathlib import Path

import pytest

from twistline import cli, verify

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = str(FIXTURES / "golden.tl")


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_packet_info(capsys):
    code, out, _ = run(capsys, "packet-info", "--family", "lg-standard", "--n", "1", "--l", "2", "--sigma", "10nm")
    assert code == 0
    d = json.loads(out)
    assert d["emittance"]["M"] == 5.0 and d["emittance"]["M_quoted"] == 4.0


def test_busch_cathode(capsys):
    code, out, _ = run(capsys, "busch", "cathode", "--species", "electron", "--H", "1T", "--rms", "10nm")
    assert code == 0
    d = json.loads(out)
    assert d["ell_exact"] == pytest.approx(-0.0759633723939, rel=1e-11)
    assert d["ell_quoted"] == pytest.approx(-0.15)


@pytest.mark.parametrize("argv", [
    ("busch", "coherence", "--T", "295K"),
    ("busch", "rayleigh", "--rms", "1nm", "--beta", "0.5"),
    ("busch", "broadening", "--ell", "1", "--beta", "0.5", "--lambda-ratio", "1e-3", "--straggling", "0.19mrad"),
    ("busch", "foil", "--species", "hminus", "--zin", "-1", "--zout", "1", "--H", "1T", "--rms", "5nm"),
    ("vcz", "--z", "1m", "--p", "100keV", "--detected-rms", "10um"),
    ("vcz", "--z", "1m", "--lambda-db", "5pm", "--source-rms", "1nm", "--regime", "fresnel"),
    ("classical", "--H", "1T", "--vel", "0.01,0,0.1", "--t", "1ps"),
    ("element-report", "--kind", "solenoid", "--H", "1T", "--L", "1cm", "--family", "gaussian", "--sigma", "10nm",
     "--p", "100keV"),
    ("element-report", "--kind", "crossed", "--H", "1T", "--Eprime=-1e8V/m2", "--L", "1cm", "--family",
     "lg-elegant", "--l", "1", "--sigma", "10nm", "--p", "100keV"),
])
def test_subcommands_succeed_with_json(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    json.loads(out)


def test_transport_csv_and_jsonl(capsys, tmp_path):
    code, out, _ = run(capsys, "transport", "--lattice", GOLDEN, "--samples", "3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("element,kind,classification")
    assert len(lines) == 1 + 1 + 4 * 3
    dest = tmp_path / "out.jsonl"
    code, out, _ = run(capsys, "transport", "--lattice", GOLDEN, "--format", "jsonl", "--out", str(dest))
    assert code == 0 and out == ""
    assert all(json.loads(line)["ell"] == 3.0 for line in dest.read_text().splitlines())


def test_output_is_byte_identical_between_runs(capsys):
    first = run(capsys, "transport", "--lattice", GOLDEN)[1]
    second = run(capsys, "transport", "--lattice", GOLDEN)[1]
    assert first == second


@pytest.mark.parametrize("argv", [
    ("packet-info", "--family", "lg-standard", "--sigma", "10nm", "--bogus"),
    ("packet-info", "--family", "lg-standard", "--sigma", "10"),
    ("busch", "cathode", "--H", "1nm", "--rms", "1nm"),
    (),
    ("transport", "--lattice", "/nonexistent/file.tl"),
])
def test_usage_errors_exit_1(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_parse_error_exits_2(capsys):
    code, _, err = run(capsys, "transport", "--lattice", str(FIXTURES / "malformed" / "03_unknown_keyword.tl"))
    assert code == 2
    assert "3:1:" in err


@pytest.mark.parametrize("argv", [
    ("packet-info", "--family", "gaussian", "--n", "1", "--sigma", "10nm"),
    ("vcz", "--z", "1m", "--lambda-db", "5pm", "--detected-rms", "1nm", "--M", "0.5"),
    ("busch", "coherence", "--T", "295K", "--model", "fermi-scaled"),
])
def test_domain_errors_exit_3(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 3 and out == "" and err


def test_transport_error_exits_3(capsys, tmp_path):
    lat = tmp_path / "k.tl"
    lat.write_text("species electron\npacket lg-standard l=3 sigma=20nm p=50keV\ndrift L=1m\n"
                   "solenoid H=1T L=1cm\noptions matching=kinetic\n")
    code, _, err = run(capsys, "transport", "--lattice", str(lat))
    assert code == 3 and "element 1" in err


def test_verify_exit_codes(capsys, monkeypatch):
    code, out, _ = run(capsys, "verify", "--suite", "classical")
    assert code == 0 and json.loads(out)["all_passed"]
    bad = [verify.CheckResult("classical", "forced", 1.0, 1e-3)]
    monkeypatch.setattr(verify, "run_suite", lambda suite: bad)
    code, out, _ = run(capsys, "verify", "--format", "csv")
    assert code == 4
    assert out.splitlines()[1].endswith("False")


def test_quiet_suppresses_diagnostics(capsys):
    code, _, err = run(capsys, "--quiet", "packet-info", "--family", "gaussian", "--n", "1", "--sigma", "10nm")
    assert code == 3 and err == ""


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "twistline", "busch", "rayleigh", "--rms", "1nm", "--beta", "1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)
