import json
from pathlib import Path

import jsonschema
import pytest

from bohm_radiance.cli import main
from bohm_radiance.config import (
    DEFAULT_CONFIG,
    config_schema,
    load_config,
    output_schema,
)
from bohm_radiance.errors import ConfigError
from bohm_radiance.runner import run
from bohm_radiance.wavefield import JONSSON_DEFAULTS


def write_config(tmp_path, payload) -> Path:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# loading and validation

def test_empty_config_yields_defaults(tmp_path):
    cfg = load_config(write_config(tmp_path, {}))
    assert cfg.constants_preset == "paper"
    assert cfg.mode == "reproduction"
    exp = cfg.experiment
    assert exp.slit_half_separation_cm == \
        JONSSON_DEFAULTS["slit_half_separation_cm"]
    assert exp.packet_width_cm == JONSSON_DEFAULTS["packet_width_cm"]
    assert exp.cross_section_x_cm == JONSSON_DEFAULTS["cross_section_x_cm"]
    assert len(cfg.valleys) == 4
    assert cfg.ensemble.n == DEFAULT_CONFIG["ensemble"]["n"]


def test_no_config_file_same_as_empty(tmp_path):
    a = load_config(None)
    b = load_config(write_config(tmp_path, {}))
    assert a.sha256() == b.sha256()


def test_documented_preset_selects_reproduction(tmp_path):
    cfg = load_config(write_config(
        tmp_path, {"constants": "paper", "mode": "reproduction"}))
    assert cfg.mode == "reproduction"
    assert [v.grad_q_ev_per_cm for v in cfg.valleys] == \
        [9.66, 3.06, 0.93, 0.8]


def test_relativistic_energy_rejected(tmp_path):
    path = write_config(tmp_path,
                        {"experiment": {"kinetic_energy_eV": 200000}})
    with pytest.raises(ConfigError, match="non-relativistic"):
        load_config(path)


def test_unknown_keys_rejected(tmp_path):
    with pytest.raises(ConfigError, match="schema"):
        load_config(write_config(tmp_path, {"grid": 12}))
    with pytest.raises(ConfigError, match="schema"):
        load_config(write_config(tmp_path,
                                 {"experiment": {"slit_width_cm": 1e-4}}))


def test_parse_error_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"constants": }', encoding="utf-8")
    with pytest.raises(ConfigError, match="line 1"):
        load_config(path)


def test_missing_file_is_config_error(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.json")


def test_valley_requires_exactly_one_of_dy_tau(tmp_path):
    bad = {"valleys": [{"grad_q_ev_per_cm": 1.0}]}
    with pytest.raises(ConfigError, match="exactly one"):
        load_config(write_config(tmp_path, bad))
    bad = {"valleys": [{"grad_q_ev_per_cm": 1.0, "dy_cm": 1e-5,
                        "tau_s": 1e-10}]}
    with pytest.raises(ConfigError, match="exactly one"):
        load_config(write_config(tmp_path, bad))


def test_forward_speed_consistency_enforced(tmp_path):
    bad = {"experiment": {"forward_speed_cm_s": 1.0e10}}
    with pytest.raises(ConfigError, match="inconsistent"):
        load_config(write_config(tmp_path, bad))


def test_config_schema_is_valid_against_metaschema():
    jsonschema.Draft202012Validator.check_schema(config_schema())
    jsonschema.Draft202012Validator.check_schema(output_schema())


# ---------------------------------------------------------------------------
# runner outputs

@pytest.fixture(scope="module")
def quick_overrides():
    return {
        "ensemble": {"n": 100, "seed": 11, "t_end_s": 5.0e-10},
        "scan": {"y_half_range_cm": 6.0e-4, "n_samples": 4097},
        "trajectories": {"y0_list_cm": [4.9e-5], "n_samples": 256},
    }


def run_subcommand(tmp_path, sub, extra=None, overrides=None):
    over = dict(overrides or {})
    over["output_dir"] = str(tmp_path / sub)
    if extra:
        over.update(extra)
    cfg = load_config(None, over)
    manifest = run(sub, cfg)
    return cfg, manifest


ALL_SUBCOMMANDS = ["quantum-potential", "valley-report", "spectrum",
                   "table1", "detectability", "compare",
                   "simulate-trajectories"]


@pytest.mark.parametrize("sub", ALL_SUBCOMMANDS)
def test_subcommand_outputs_validate(tmp_path, sub, quick_overrides):
    cfg, manifest = run_subcommand(tmp_path, sub, overrides=quick_overrides)
    assert manifest.status == "complete"
    out_dir = cfg.output_dir
    schema = output_schema()
    validator = jsonschema.Draft202012Validator(schema)
    json_files = sorted(out_dir.glob("*.json"))
    assert (out_dir / "manifest.json") in json_files
    for path in json_files:
        doc = json.loads(path.read_text(encoding="utf-8"))
        validator.validate(doc)
    # every listed file exists with the recorded checksum
    manifest_doc = json.loads((out_dir / "manifest.json").read_text())
    import hashlib
    for rec in manifest_doc["files"]:
        data = (out_dir / rec["path"]).read_bytes()
        assert hashlib.sha256(data).hexdigest() == rec["sha256"]
        assert len(data) == rec["bytes"]


def test_quantum_potential_csv_header(tmp_path, quick_overrides):
    cfg, _ = run_subcommand(tmp_path, "quantum-potential",
                            overrides=quick_overrides)
    first = (cfg.output_dir / "quantum_potential.csv").read_text().splitlines()[0]
    assert first == "y_cm,t_s,R,S_eVs,Q_eV,gradQ_eV_per_cm,flag"


def test_trajectory_csv_header(tmp_path, quick_overrides):
    cfg, _ = run_subcommand(tmp_path, "simulate-trajectories",
                            overrides=quick_overrides)
    first = (cfg.output_dir / "trajectory_001.csv").read_text().splitlines()[0]
    assert first == "t_s,y_cm,vy_cm_s,ay_field,ay_numeric"


def test_compare_copenhagen_column_zero(tmp_path, quick_overrides):
    cfg, _ = run_subcommand(tmp_path, "compare", overrides=quick_overrides)
    lines = (cfg.output_dir / "compare.csv").read_text().splitlines()
    assert lines[0].split(",")[1] == "copenhagen_power_w"
    for line in lines[1:]:
        assert line.split(",")[1] == "0.0"
    doc = json.loads((cfg.output_dir / "compare.json").read_text())
    assert all(row["copenhagen_power_w"] == 0.0 for row in doc["rows"])
    assert doc["ensemble_mean_power_w"] < 1e-40


def test_table1_row4_flagged(tmp_path, quick_overrides):
    cfg, _ = run_subcommand(tmp_path, "table1", overrides=quick_overrides)
    doc = json.loads((cfg.output_dir / "table1.json").read_text())
    flags = {row["valley"]: row["flag"] for row in doc["rows"]}
    assert flags[1] == "" and flags[2] == "" and flags[3] == ""
    assert "1.25e-20" in flags[4]


def test_deterministic_reruns(tmp_path, quick_overrides):
    import hashlib

    def digest_map(out_dir):
        out = {}
        for path in sorted(out_dir.iterdir()):
            if path.name == "manifest.json":
                continue
            out[path.name] = hashlib.sha256(path.read_bytes()).hexdigest()
        return out

    cfg_a, man_a = run_subcommand(tmp_path / "a", "table1",
                                  overrides=quick_overrides)
    cfg_b, man_b = run_subcommand(tmp_path / "b", "table1",
                                  overrides=quick_overrides)
    # identical data bytes, identical manifests modulo timestamp and paths
    assert digest_map(cfg_a.output_dir) == digest_map(cfg_b.output_dir)
    da, db = man_a.as_dict(), man_b.as_dict()
    da.pop("created_utc"), db.pop("created_utc")
    assert da["config_sha256"] != db["config_sha256"]  # out dirs differ
    da.pop("config_sha256"), db.pop("config_sha256")
    assert da == db


def test_same_config_same_hash(tmp_path, quick_overrides):
    over = dict(quick_overrides)
    over["output_dir"] = str(tmp_path / "same")
    a = load_config(None, over)
    b = load_config(None, over)
    assert a.sha256() == b.sha256()


def test_incomplete_manifest_on_failure(tmp_path):
    # a valley with zero gradient, zero entry speed, and a width cannot be
    # traversed: the spectrum handler fails and the manifest records it
    over = {
        "valleys": [{"grad_q_ev_per_cm": 0.0, "dy_cm": 1e-5,
                     "v0_cm_per_s": 0.0}],
        "output_dir": str(tmp_path / "broken"),
    }
    cfg = load_config(None, over)
    with pytest.raises(Exception):
        run("spectrum", cfg)
    doc = json.loads((cfg.output_dir / "manifest.json").read_text())
    assert doc["status"] == "incomplete"
    assert doc["notes"]


# ---------------------------------------------------------------------------
# CLI exit codes

def test_cli_success(tmp_path, capsys):
    code = main(["table1", "--out", str(tmp_path / "ok")])
    assert code == 0
    assert "manifest.json" in capsys.readouterr().out


def test_cli_config_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"constants": "bohr"}', encoding="utf-8")
    code = main(["table1", "--config", str(bad),
                 "--out", str(tmp_path / "x")])
    assert code == 2
    assert "config error" in capsys.readouterr().err


def test_cli_numerical_error(tmp_path, capsys):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({
        "valleys": [{"grad_q_ev_per_cm": 0.0, "dy_cm": 1e-5,
                     "v0_cm_per_s": 0.0}],
    }), encoding="utf-8")
    code = main(["spectrum", "--config", str(cfgfile),
                 "--out", str(tmp_path / "y")])
    assert code == 3
    assert "numerical failure" in capsys.readouterr().err


def test_cli_io_error(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("file, not a directory", encoding="utf-8")
    code = main(["table1", "--out", str(blocker / "sub")])
    assert code == 4
    assert "i/o error" in capsys.readouterr().err


def test_cli_flag_overrides(tmp_path):
    out = tmp_path / "modern"
    code = main(["table1", "--constants", "modern", "--out", str(out)])
    assert code == 0
    doc = json.loads((out / "table1.json").read_text())
    assert doc["constants"] == "modern"


def test_cli_y0_list_parsing(tmp_path):
    out = tmp_path / "trajs"
    code = main(["simulate-trajectories", "--out", str(out),
                 "--n", "100", "--seed", "3", "--t-end", "5e-10",
                 "--y0-list", "4.9e-5,5.1e-5"])
    assert code == 0
    assert (out / "trajectory_002.csv").exists()
    summary = json.loads((out / "ensemble_summary.json").read_text())
    assert summary["n"] == 100
    assert summary["seed"] == 3
