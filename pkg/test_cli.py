#!/usr/bin/env python3
"""
Tests for the command-line surface

This script tests:
1. Command registration and argument parsing
2. JSON artifacts and exit codes of run()
3. Error documents for domain and configuration errors
4. CSV output
5. Per-annulus diagnostic sections
"""

import contextlib
import io
import json
import sys
from pathlib import Path

import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

import config
from modules.commands import CommandRegistry
from runner import build_parser, config_from_args, execute, run
from utils.errors import ConfigError
from utils.io import RunConfig

COMMANDS = {
    "classify", "critical", "annuli", "trace", "abelian", "reduce", "melnikov", "zeros",
    "pf-verify", "riccati-verify", "hopf", "homoclinic-constants", "homoclinic-design", "distributions",
}


def _run(command, **fields):
    stream = io.StringIO()
    code = run(command, RunConfig(**fields).validate(), stream)
    return code, stream.getvalue()


def test_registry():
    """Every subcommand is discovered once"""
    names = CommandRegistry.names()
    assert set(names) == COMMANDS
    assert len(names) == len(COMMANDS)
    assert CommandRegistry.get("nope") is None
    for command in CommandRegistry.all():
        assert command.description


def test_parser_builds_run_config():
    """Flags land on the RunConfig; unset flags keep the defaults"""
    args = build_parser().parse_args(["zeros", "-a", "3", "-b", "-3", "-c", "1", "--pert", "p.txt", "-g", "48"])
    cfg = config_from_args(args)
    assert (cfg.a, cfg.b, cfg.c) == (3.0, -3.0, 1.0)
    assert cfg.pert == "p.txt"
    assert cfg.grid == 48
    assert cfg.n_min == config.N_MIN_DEFAULT
    assert cfg.output == "json"

    args = build_parser().parse_args(["distributions", "--target", "0", "0", "2", "2", "1"])
    assert config_from_args(args).target == [0, 0, 2, 2, 1]

    args = build_parser().parse_args(["--lang", "zh", "trace", "--level", "0.1"])
    assert args.lang == "zh"
    assert config_from_args(args).h == 0.1


def test_classify_json():
    code, out = _run("classify", a=3.0, b=-3.0, c=1.0)
    assert code == 0
    document = json.loads(out)
    assert document["schema"] == config.SCHEMA_VERSION
    assert list(document)[:2] == ["schema", "command"]
    assert document["command"] == "classify"
    assert document["region"] == "D6+"


def test_output_is_deterministic():
    """Two runs with the same configuration give identical bytes"""
    first = _run("annuli", a=1.0, b=0.0, c=0.5)
    second = _run("annuli", a=1.0, b=0.0, c=0.5)
    assert first == second
    assert first[0] == 0


def test_domain_error_document():
    """c = 0 exits 1 with an error object on standard output"""
    code, out = _run("classify", a=1.0, b=1.0, c=0.0)
    assert code == 1
    document = json.loads(out)
    assert document["command"] == "classify"
    assert document["error"]["kind"] == "domain"
    assert document["error"]["message"]


def test_unknown_command():
    code, out = _run("integrate")
    assert code == 1
    assert json.loads(out)["error"]["kind"] == "config"
    with pytest.raises(ConfigError):
        execute("integrate", RunConfig())


def test_missing_options():
    """Commands that need a perturbation file or a level say so"""
    code, out = _run("zeros", a=3.0, b=-3.0, c=1.0)
    assert code == 1
    assert "--pert" in json.loads(out)["error"]["option"]

    code, out = _run("trace", a=3.0, b=-3.0, c=1.0)
    assert code == 1
    assert json.loads(out)["error"]["option"] == "--level"


def test_zero_perturbation_has_no_zeros(tmp_path):
    pert = tmp_path / "zero.txt"
    pert.write_text("# nothing to see\nb_01 = 0\n", encoding="utf-8")
    code, out = _run("zeros", a=-1.0, b=-2.0, c=1.0, pert=str(pert), grid=config.ZERO_GRID_MIN)
    assert code == 0
    document = json.loads(out)
    assert document["zeros"] == []
    assert document["region"] == "l2+"
    assert all(r["respected"] for r in document["reports"])


def test_zeros_sections_per_annulus(tmp_path):
    """Diagnostics open one section per scanned annulus on stderr"""
    pert = tmp_path / "area.txt"
    pert.write_text("b_01 = 1\n", encoding="utf-8")
    diagnostics = io.StringIO()
    with contextlib.redirect_stderr(diagnostics):
        code, out = _run("zeros", a=-1.0, b=-2.0, c=1.0, pert=str(pert), grid=config.ZERO_GRID_MIN)
    assert code == 0
    reports = json.loads(out)["reports"]
    sections = [line for line in diagnostics.getvalue().splitlines() if ">>> " in line]
    assert len(sections) == len(reports)
    assert ">>> Annulus 0: h in (" in sections[0]


def test_missing_perturbation_file(tmp_path):
    code, out = _run("zeros", a=3.0, b=-3.0, c=1.0, pert=str(tmp_path / "absent.txt"))
    assert code == 1
    assert json.loads(out)["error"]["kind"] == "config"


def test_critical_csv():
    code, out = _run("critical", a=3.0, b=-3.0, c=1.0, output="csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,y,kind,level"
    assert sum(1 for line in lines[1:] if ",center," in line) == 4


def test_reduce_command():
    """Reductions report the generator coefficients and their bounds"""
    code, out = _run("reduce", a=3.0, b=-3.0, c=1.0, i=0, j=5)
    assert code == 0
    document = json.loads(out)
    assert document["within_bounds"] is True
    assert "closure" not in document


def test_hopf_coefficients_from_file(tmp_path):
    pert = tmp_path / "alpha.txt"
    pert.write_text("alpha0 = 0.1\nalpha1 = 0.2\n", encoding="utf-8")
    code, out = _run("hopf", pert=str(pert))
    assert code == 0
    document = json.loads(out)
    assert document["center"] == "first"
    assert len(document["coefficients"]) == 4
    assert "flags" not in document


def test_hopf_rejects_table_files(tmp_path):
    pert = tmp_path / "table.txt"
    pert.write_text("b_0_1 = 1\n", encoding="utf-8")
    code, out = _run("hopf", pert=str(pert))
    assert code == 1
    assert json.loads(out)["error"]["kind"] == "config"


def main():
    print("=" * 60)
    print("Abelian Integral Toolkit - CLI Tests")
    print("=" * 60)

    import tempfile
    test_registry()
    test_parser_builds_run_config()
    test_classify_json()
    test_output_is_deterministic()
    test_domain_error_document()
    test_unknown_command()
    test_missing_options()
    with tempfile.TemporaryDirectory() as tmp:
        test_zero_perturbation_has_no_zeros(Path(tmp))
        test_zeros_sections_per_annulus(Path(tmp))
        test_missing_perturbation_file(Path(tmp))
        test_hopf_coefficients_from_file(Path(tmp))
        test_hopf_rejects_table_files(Path(tmp))
    test_critical_csv()
    test_reduce_command()

    print("\n" + "=" * 60)
    print("Tests complete")
    print("=" * 60)


if __name__ == "__main__":
    main()
