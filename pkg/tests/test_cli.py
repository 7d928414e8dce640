"""Command-line interface: configuration layering, exit codes, reports and determinism."""

import json
from pathlib import Path

import numpy as np
import pytest

from so14lab.cli import families
from so14lab.cli.config import ConfigError, build_config, env_overrides
from so14lab.cli.main import main
from so14lab.cli.report import SchemaError, validate_report
from so14lab.cli.suites import TOLERANCES
from so14lab.spectral import DiscretizationError


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    import os

    for name in list(os.environ):
        if name.startswith("SO14LAB_"):
            monkeypatch.delenv(name)


def run(tmp_path, *argv, out="out"):
    return main([*argv, "--out", str(tmp_path / out), "--no-plots"])


# --- configuration -------------------------------------------------------------

def test_defaults_validate():
    cfg = build_config(None, environ={}, known_tolerances=TOLERANCES)
    assert cfg.R == 10.0
    assert cfg.masses == [0.5, 0.5]
    assert cfg.potential() is None


def test_yaml_reads_exponent_floats(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("grid:\n  r_min: 1e-3\n  r_max: 5e2\npotential:\n  kind: coulomb\n  alpha: 2e-1\n")
    cfg = build_config(p, environ={})
    assert cfg.grid["r_min"] == 1e-3 and isinstance(cfg.grid["r_min"], float)
    assert cfg.potential().alpha == pytest.approx(0.2)


def test_precedence_file_env_flags(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("grid: {n: 100}\nR: 20.0\nseed: 5\n")
    env = {"SO14LAB_GRID__N": "200", "SO14LAB_SEED": "6"}
    cfg = build_config(p, environ=env, flags={"grid.n": 300, "seed": None})
    assert cfg.grid["n"] == 300
    assert cfg.seed == 6
    assert cfg.R == 20.0


def test_env_sequences_and_unrelated_names():
    over = env_overrides({"SO14LAB_MASSES": "[0.3, 0.7]", "HOME": "/root"})
    assert over == {"masses": [0.3, 0.7]}


@pytest.mark.parametrize("text,path", [
    ("grid: {m: 3}\n", "grid.m"),
    ("grid: {n: -4}\n", "grid.n"),
    ("masses: [0.5]\n", "masses"),
    ("potential: {kind: cubic}\n", "potential.kind"),
    ("tolerances: {casimir: {casimir: 1.0}}\n", "tolerances.casimir.casimir"),
    ("tolerances: {nosuch: {x: 1.0}}\n", "tolerances.nosuch"),
])
def test_config_errors_name_the_field(tmp_path, text, path):
    p = tmp_path / "c.yaml"
    p.write_text(text)
    with pytest.raises(ConfigError, match=path.replace(".", r"\.")):
        build_config(p, environ={}, known_tolerances=TOLERANCES)


def test_loosening_needs_explicit_permission(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("tolerances: {casimir: {casimir: 1.0e-3}}\n")
    with pytest.raises(ConfigError):
        build_config(p, environ={}, known_tolerances=TOLERANCES)
    cfg = build_config(p, environ={}, flags={"allow_loose_tolerances": True},
                       known_tolerances=TOLERANCES)
    assert cfg.tolerance("casimir", "casimir", 1e-5) == 1e-3


# --- exit codes ------------------------------------------------------------------

def test_verify_pass_writes_a_valid_report(tmp_path, capsys):
    assert run(tmp_path, "verify", "casimir") == 0
    data = json.loads((tmp_path / "out" / "report_casimir.json").read_text())
    assert validate_report(data) is data
    assert data["pass"] and data["summary"]["failed"] == 0
    assert data["environment"]["config"]["R"] == 10.0
    assert "cases pass" in capsys.readouterr().out


def test_schema_rejects_tampered_reports(tmp_path):
    run(tmp_path, "verify", "casimir")
    data = json.loads((tmp_path / "out" / "report_casimir.json").read_text())
    data["cases"][0]["pass"] = False
    with pytest.raises(SchemaError):
        validate_report(data)
    del data["cases"]
    with pytest.raises(SchemaError):
        validate_report(data)


def test_verify_fail_exit_code(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("tolerances: {casimir: {casimir: 1.0e-30}}\n")
    assert run(tmp_path, "verify", "casimir", "--config", str(p)) == 1
    data = json.loads((tmp_path / "out" / "report_casimir.json").read_text())
    assert not data["pass"] and data["summary"]["failed"] > 0


def test_usage_exit_codes(tmp_path, capsys):
    p = tmp_path / "c.yaml"
    p.write_text("nonsense: 1\n")
    assert run(tmp_path, "verify", "casimir", "--config", str(p)) == 2
    assert "nonsense" in capsys.readouterr().err
    assert run(tmp_path, "verify", "casimir", "--config", str(tmp_path / "missing.yaml")) == 2
    # a linear-grid family cannot be compared with a log-grid family
    assert run(tmp_path, "compare", "galilean", "m0") == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "no_such_suite"])
    assert exc.value.code == 2


def test_loose_tolerance_flag(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("tolerances: {casimir: {casimir: 1.0e-3}}\n")
    assert run(tmp_path, "verify", "casimir", "--config", str(p)) == 2
    assert run(tmp_path, "verify", "casimir", "--config", str(p), "--allow-loose-tolerances") == 0


def test_environment_override_reaches_the_report(tmp_path, monkeypatch):
    monkeypatch.setenv("SO14LAB_GRID__N", "64")
    assert run(tmp_path, "spectrum", "--form", "m0", "--lambda", "0.0") == 0
    data = json.loads((tmp_path / "out" / "spectrum_m0.json").read_text())
    assert data["grid"]["n"] == 64 and len(data["eigenvalues"]) == 64


def test_numeric_error_exit_code(tmp_path, monkeypatch):
    def broken(*args, **kwargs):
        raise DiscretizationError("matrix is not Hermitian")

    monkeypatch.setattr(families, "build", broken)
    assert run(tmp_path, "spectrum", "--form", "m0") == 3


# --- spectrum and compare --------------------------------------------------------

def test_spectrum_outputs(tmp_path):
    assert main(["spectrum", "--form", "m0", "--lambda", "0.5", "--out",
                 str(tmp_path)]) == 0
    data = json.loads((tmp_path / "spectrum_m0.json").read_text())
    ev = np.array(data["eigenvalues"])
    assert np.all(np.diff(ev) >= 0)
    sp = data["spacing"]
    assert sp["centre_max_deviation"] <= 0.01 * sp["centre_mean"]
    assert (tmp_path / "eigenfunction_m0_0.csv").exists()
    assert (tmp_path / "eigenfunction_m0_0.png").read_bytes()[:4] == b"\x89PNG"


def test_compare_m0_and_mnr(tmp_path):
    assert run(tmp_path, "compare", "m0", "m_nr", "--sizes", "64", "128") == 0
    data = json.loads((tmp_path / "out" / "compare_m0_vs_m_nr.json").read_text())
    for row in data["refinement"]:
        assert row["max_abs"] <= 1e-12
        assert row["counting_distance"] == 0.0
        assert row["conjugation_residual"] <= 1e-14


def test_compare_family_with_itself(tmp_path):
    assert run(tmp_path, "compare", "m_nr_coordinate", "m_nr_coordinate") == 0
    row = json.loads((tmp_path / "out" / "compare_m_nr_coordinate_vs_m_nr_coordinate.json")
                     .read_text())["refinement"][0]
    assert row["max_abs"] == 0.0 and row["counting_distance"] == 0.0
    assert row["conjugation_residual"] == 0.0


def test_compare_rejects_tiny_grids(tmp_path):
    assert run(tmp_path, "compare", "m0", "m_nr", "--sizes", "8") == 2


# --- determinism -------------------------------------------------------------------

def _tree(root: Path) -> dict:
    return {p.relative_to(root).as_posix(): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file()}


def test_reports_are_byte_identical(tmp_path):
    # the same command twice; the output path is part of the echoed config
    argv = ["verify", "algebra", "--jobs", "3", "--format", "csv", "--out", str(tmp_path / "o")]
    assert main(argv) == 0
    first = _tree(tmp_path / "o")
    assert main(argv) == 0
    second = _tree(tmp_path / "o")
    assert first.keys() == second.keys() and first == second
    assert not any(name.startswith(".tmp-") for name in first)


def test_seed_changes_packets(tmp_path):
    run(tmp_path, "verify", "algebra", "--seed", "1", out="s1")
    run(tmp_path, "verify", "algebra", "--seed", "2", out="s2")
    r1 = json.loads((tmp_path / "s1" / "report_algebra.json").read_text())
    r2 = json.loads((tmp_path / "s2" / "report_algebra.json").read_text())
    assert [c["residual"] for c in r1["cases"]] != [c["residual"] for c in r2["cases"]]
