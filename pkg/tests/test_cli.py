"""End-to-end command line behaviour: exit codes, artifacts, determinism."""

import json
import os

import pytest

from delsarte import cli
from delsarte.config import ConfigError, load_config, parse_config


def run_toml(tmp_path, body, name="run.toml"):
    path = tmp_path / name
    path.write_text(body)
    return str(path)


Z6_TURAN = """
schema = 1

[structure]
kind = "cyclic"
order = 6

[region]
flavour = "turan"
omega_plus = [-1, 0, 1]
"""

CIRCLE = """
schema = 1

[structure]
kind = "circle"
truncation = 12
grid_size = 103

[region]
flavour = "delsarte"
arc_plus = 0.15
"""


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------


def test_config_requires_schema_version():
    with pytest.raises(ConfigError, match="schema"):
        parse_config({"structure": {}, "region": {}})


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="unknown key 'colour'"):
        parse_config({
            "schema": 1,
            "structure": {"kind": "cyclic", "order": 5, "colour": "red"},
            "region": {"omega_plus": [0]},
        })
    with pytest.raises(ConfigError, match="top level"):
        parse_config({"schema": 1, "structure": {}, "region": {}, "extra": 1})


def test_config_flavour_forcing_conflicts():
    base = {"schema": 1, "structure": {"kind": "cyclic", "order": 6}}
    with pytest.raises(ConfigError, match="turan"):
        parse_config({**base, "region": {
            "flavour": "turan", "omega_plus": [0], "omega_minus": [0, 1, 5],
        }})
    with pytest.raises(ConfigError, match="delsarte"):
        parse_config({**base, "region": {
            "flavour": "delsarte", "omega_plus": [0], "omega_minus": [0],
        }})
    with pytest.raises(ConfigError, match="two_sided"):
        parse_config({**base, "region": {
            "flavour": "two_sided", "omega_plus": [0],
        }})
    # omega_minus = "all" is the no-constraint spelling, compatible with delsarte
    cfg = parse_config({**base, "region": {
        "flavour": "delsarte", "omega_plus": [0], "omega_minus": "all",
    }})
    assert cfg.region["flavour"] == "delsarte"


def test_config_rejects_exact_arithmetic_on_continuous_kinds():
    with pytest.raises(ConfigError, match="float"):
        parse_config({
            "schema": 1,
            "structure": {"kind": "circle", "truncation": 8, "arith": "exact"},
            "region": {"arc_plus": 0.2},
        })


def test_config_rejects_region_keys_for_wrong_kind():
    with pytest.raises(ConfigError, match="arc_plus"):
        parse_config({
            "schema": 1,
            "structure": {"kind": "cyclic", "order": 5},
            "region": {"omega_plus": [0], "arc_plus": 0.2},
        })
    with pytest.raises(ConfigError, match="omega_plus"):
        parse_config({
            "schema": 1,
            "structure": {"kind": "sphere", "dimension": 2, "truncation": 8},
            "region": {"omega_plus": [0], "cap_plus_degrees": 30},
        })


def test_config_section_hashes_distinguish_instances(tmp_path):
    a = load_config(run_toml(tmp_path, Z6_TURAN, "a.toml"))
    b = load_config(run_toml(tmp_path, Z6_TURAN.replace("order = 6", "order = 8"),
                             "b.toml"))
    assert a.hashes["structure"] != b.hashes["structure"]
    assert a.hashes["region"] == b.hashes["region"]


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def test_solve_turan_z6(tmp_path, capsys):
    cfg = run_toml(tmp_path, Z6_TURAN)
    out = tmp_path / "out"
    assert cli.main(["solve", "--config", cfg, "--out-dir", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["gap"] == "0"
    assert report["extremal_value"] == "1/3"
    assert report["certificate_valid"] is True
    assert (out / "certificate.txt").exists()
    assert (out / "solution.png").exists()
    csv_lines = (out / "solution.csv").read_text().splitlines()
    assert csv_lines[0] == "point,value"
    assert len(csv_lines) == 7
    assert "1/3" in capsys.readouterr().out


def test_solve_missing_config_exits_1(tmp_path):
    assert cli.main(["solve", "--config", str(tmp_path / "nope.toml")]) == 1


def test_solve_asymmetric_region_exits_2_naming_element(tmp_path, capsys):
    cfg = run_toml(tmp_path, """
schema = 1
[structure]
kind = "cyclic"
order = 6
[region]
omega_plus = [0, 1]
""")
    assert cli.main(["solve", "--config", cfg, "--out-dir", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().out
    assert "1" in err and "5" in err


def test_solve_unknown_key_exits_2(tmp_path):
    cfg = run_toml(tmp_path, Z6_TURAN + "\n[sigma]\nbogus = 1\n")
    assert cli.main(["solve", "--config", cfg, "--out-dir", str(tmp_path / "o")]) == 2


def test_solve_relaxed_is_primal_only(tmp_path):
    cfg = run_toml(tmp_path, Z6_TURAN.replace('"turan"', '"delsarte"'))
    out = tmp_path / "out"
    rc = cli.main(["solve", "--config", cfg, "--out-dir", str(out),
                   "--epsilon", "1/4"])
    assert rc == 0
    report = json.loads((out / "report.json").read_text())
    # exact scaling law: u(1/4) = (3/4) * u(0) = (3/4) * 2
    assert report["u"] == "3/2"
    assert not (out / "certificate.txt").exists()


def test_solve_reports_are_byte_deterministic(tmp_path):
    cfg = run_toml(tmp_path, Z6_TURAN)
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["solve", "--config", cfg, "--out-dir", str(a)]) == 0
    assert cli.main(["solve", "--config", cfg, "--out-dir", str(b)]) == 0
    for name in ("report.json", "certificate.txt", "solution.csv", "solution.png"):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_solve_dump_tableau_writes_trace(tmp_path):
    cfg = run_toml(tmp_path, Z6_TURAN)
    out = tmp_path / "out"
    assert cli.main(["solve", "--config", cfg, "--out-dir", str(out),
                     "--dump-tableau"]) == 0
    assert (out / "lp-trace.txt").read_text().strip()


def test_solve_circle_writes_float_report(tmp_path):
    cfg = run_toml(tmp_path, CIRCLE)
    out = tmp_path / "out"
    assert cli.main(["solve", "--config", cfg, "--out-dir", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["arithmetic"] == "float"
    assert abs(float(report["gap"])) < 1e-8
    assert report["certificate_coverage"] == "truncated-only"
    assert cli.main(["solve", "--config", cfg, "--out-dir", str(out),
                     "--arith", "exact"]) == 2


# ---------------------------------------------------------------------------
# certify / verify
# ---------------------------------------------------------------------------


def test_verify_round_trip(tmp_path, capsys):
    cfg = run_toml(tmp_path, Z6_TURAN)
    out = tmp_path / "out"
    cli.main(["solve", "--config", cfg, "--out-dir", str(out)])
    capsys.readouterr()
    rc = cli.main(["verify", "--config", cfg,
                   "--certificate", str(out / "certificate.txt")])
    assert rc == 0
    assert "VALID" in capsys.readouterr().out


def test_verify_tampered_magnitude_exits_4(tmp_path, capsys):
    cfg = run_toml(tmp_path, Z6_TURAN)
    out = tmp_path / "out"
    cli.main(["solve", "--config", cfg, "--out-dir", str(out)])
    cert = out / "certificate.txt"
    cert.write_text(cert.read_text().replace("atom 2 - 2/3", "atom 2 - 1/3"))
    capsys.readouterr()
    rc = cli.main(["verify", "--config", cfg, "--certificate", str(cert)])
    assert rc == 4
    assert "INVALID" in capsys.readouterr().out


def test_verify_truncated_file_exits_2(tmp_path):
    cfg = run_toml(tmp_path, Z6_TURAN)
    out = tmp_path / "out"
    cli.main(["solve", "--config", cfg, "--out-dir", str(out)])
    cert = out / "certificate.txt"
    cert.write_text("\n".join(cert.read_text().splitlines()[:3]) + "\n")
    assert cli.main(["verify", "--config", cfg, "--certificate", str(cert)]) == 2


def test_verify_hash_mismatch_exits_4(tmp_path, capsys):
    cfg = run_toml(tmp_path, Z6_TURAN)
    other = run_toml(tmp_path, Z6_TURAN.replace("order = 6", "order = 8"),
                     "other.toml")
    out = tmp_path / "out"
    cli.main(["solve", "--config", cfg, "--out-dir", str(out)])
    capsys.readouterr()
    rc = cli.main(["verify", "--config", other,
                   "--certificate", str(out / "certificate.txt")])
    assert rc == 4
    assert "different instance" in capsys.readouterr().out


def test_certify_exact_instance_is_valid(tmp_path, capsys):
    cfg = run_toml(tmp_path, Z6_TURAN)
    out = tmp_path / "out"
    assert cli.main(["certify", "--config", cfg, "--out-dir", str(out)]) == 0
    assert "extremal constant <= 1/3" in capsys.readouterr().out


def test_certify_circle_reports_unproven_tail(tmp_path, capsys):
    # a dual atom must sit at the antipode for the tail to close; the solver's
    # truncated certificate never does, and certify says so via its exit code
    cfg = run_toml(tmp_path, CIRCLE)
    out = tmp_path / "out"
    assert cli.main(["certify", "--config", cfg, "--out-dir", str(out)]) == 4
    assert "no bound certified" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# fuzz
# ---------------------------------------------------------------------------


def test_fuzz_exhaustive_small_orders(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["fuzz", "--orders", "2-4", "--out-dir", str(out)]) == 0
    summary = json.loads((out / "fuzz.json").read_text())
    assert summary["instances"] == 48
    assert summary["all_gaps_zero"] is True


def test_fuzz_rejects_bad_orders(tmp_path):
    assert cli.main(["fuzz", "--orders", "1", "--out-dir", str(tmp_path)]) == 2


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

Z12_SWEEP = """
schema = 1

[structure]
kind = "cyclic"
order = 12

[region]
flavour = "turan"
omega_plus = [0]

[sweep]
parameter = "interval_radius"
values = [0, 1, 2, 3, 4, 5]
"""


def test_sweep_turan_intervals_monotone(tmp_path):
    cfg = run_toml(tmp_path, Z12_SWEEP)
    out = tmp_path / "out"
    assert cli.main(["sweep", "--config", cfg, "--out-dir", str(out)]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0].startswith("interval_radius,extremal_value")
    assert len(lines) == 7
    # divisibility cases are exact: (k+1)/12 for k = 0..3 and k = 5
    values = [line.split(",", 2)[1] for line in lines[1:]]
    assert values[0] == "1/12"
    assert values[1] == "1/6"
    assert values[3] == "1/3"
    assert values[5] == "1/2"
    assert (out / "sweep.png").exists()


def test_sweep_cache_gives_identical_bytes(tmp_path, capsys):
    cfg = run_toml(tmp_path, Z12_SWEEP)
    out = tmp_path / "out"
    cli.main(["sweep", "--config", cfg, "--out-dir", str(out)])
    first = {name: (out / name).read_bytes() for name in ("sweep.csv", "sweep.png")}
    capsys.readouterr()
    cli.main(["sweep", "--config", cfg, "--out-dir", str(out)])
    assert "6 cached" in capsys.readouterr().out
    for name, blob in first.items():
        assert (out / name).read_bytes() == blob, name


def test_sweep_cache_dir_override(tmp_path, monkeypatch):
    cache = tmp_path / "cache"
    monkeypatch.setenv("DELSARTE_CACHE_DIR", str(cache))
    cfg = run_toml(tmp_path, Z12_SWEEP)
    assert cli.main(["sweep", "--config", cfg,
                     "--out-dir", str(tmp_path / "out")]) == 0
    assert list(cache.glob("*.json"))


def test_sweep_records_failed_rows_and_continues(tmp_path):
    cfg = run_toml(tmp_path, Z12_SWEEP.replace(
        "values = [0, 1, 2, 3, 4, 5]", "values = [0, -3, 2]"
    ))
    out = tmp_path / "out"
    assert cli.main(["sweep", "--config", cfg, "--out-dir", str(out)]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert len(lines) == 4
    assert "error" in lines[2]
    assert lines[3].split(",", 2)[1] == "1/4"


def test_sweep_without_table_exits_2(tmp_path):
    cfg = run_toml(tmp_path, Z6_TURAN)
    assert cli.main(["sweep", "--config", cfg,
                     "--out-dir", str(tmp_path / "o")]) == 2


def test_sweep_sphere_caps_has_gap_column(tmp_path):
    cfg = run_toml(tmp_path, """
schema = 1
[structure]
kind = "sphere"
dimension = 2
truncation = 16
[region]
flavour = "delsarte"
cap_plus_degrees = 30.0
[sweep]
parameter = "cap_plus_degrees"
values = [30.0, 60.0, 90.0]
""")
    out = tmp_path / "out"
    assert cli.main(["sweep", "--config", cfg, "--out-dir", str(out)]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert len(lines) == 4
    for line in lines[1:]:
        gap = line.split(",")[3]
        assert abs(float(gap)) < 1e-8
