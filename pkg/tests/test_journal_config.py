import json
from fractions import Fraction

import numpy as np
import pytest

import config
import journal
from errors import DomainError
from reports import clean, round_float, to_csv, to_json, write_text


# --- journal ---

def test_logging_off_writes_nothing(monkeypatch, tmp_path):
    monkeypatch.setenv("TORUS_LOGS", "off")
    assert journal.stream("runs") is None
    journal.log_run("paper", {}, 0, 0.1)
    assert journal.read_entries("runs") == []


def test_runs_and_anchors_are_journaled(log_home):
    journal.log_run("cz", {"shear": True, "n": 2}, 0, 0.0123456789)
    journal.log_anchor("cz-tilted", "-1/2", "-1/2", True)
    journal.log_anchor("cz-tilted", None, "-1/2", False)
    journal.log_anchor("cz-minus", [-1, -1], [-1, -1], True)

    runs = journal.read_entries("runs")
    assert runs[-1]["command"] == "cz"
    assert runs[-1]["seconds"] == 0.012346
    assert "timestamp" in runs[-1]
    assert journal.failing_anchors() == ["cz-tilted"]
    assert (log_home / "anchors.jsonl").exists()


def test_catch_error_logs_and_reraises(log_home):
    @journal.catch_error
    def broken(x):
        raise DomainError(f"bad {x}")

    with pytest.raises(DomainError):
        broken(3)
    entry = journal.read_entries("errors")[-1]
    assert entry["command"] == "broken"
    assert entry["error_type"] == "DomainError"
    assert entry["type"] == "input_error"
    assert entry["settings"] == "3"


def test_handled_errors_keep_their_context(log_home):
    try:
        {}["missing"]
    except KeyError as e:
        journal.log_error(e, "anchor chi-limits")
    entry = journal.read_entries("errors")[-1]
    assert entry["type"] == "code_error"
    assert entry["context"] == "anchor chi-limits"
    assert "KeyError" in entry["traceback"]


def test_read_entries_skips_torn_lines(log_home):
    (log_home / "runs.jsonl").write_text('{"command": "flow"}\n{"comm\n')
    assert journal.read_entries("runs") == [{"command": "flow"}]


# --- configuration ---

def test_defaults_and_required_keys():
    cfg = config.resolve("cz", {})
    assert cfg.format == "json" and cfg.workers == 4
    with pytest.raises(DomainError):
        config.resolve("geodesics", {"n": 2})
    with pytest.raises(DomainError):
        config.resolve("homology", {"n": 0, "k": "1"})


def test_flags_override_files(tmp_path, monkeypatch):
    env_file = tmp_path / "env.json"
    env_file.write_text(json.dumps({"grid": 100, "samples": 32}))
    flag_file = tmp_path / "flags.json"
    flag_file.write_text(json.dumps({"grid": 200, "s-max": 3.0, "json": "out.json"}))
    monkeypatch.setenv("TORUS_CONFIG", str(env_file))

    cfg = config.resolve("flow", {"grid": None, "s_max": 5.0}, flag_file)
    assert cfg.grid == 200
    assert cfg.samples == 32
    assert cfg.s_max == 5.0
    assert cfg.json_path == "out.json"


def test_unknown_config_key(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"colour": "red"}))
    with pytest.raises(DomainError):
        config.load_config(path)


def test_bad_format_rejected():
    with pytest.raises(DomainError):
        config.resolve("paper", {"format": "xml"})


# --- reports ---

def test_clean_rounds_and_converts():
    value = clean({"a": np.float64(1 / 3), "b": np.arange(2), "c": Fraction(1, 2),
                   "d": float("nan"), "e": (np.bool_(True), -0.0)})
    assert value == {"a": 0.333333333333, "b": [0, 1], "c": 0.5, "d": "nan", "e": [True, 0.0]}
    assert round_float(2 * np.pi ** 2) == 19.7392088022


def test_json_and_csv_are_deterministic(tmp_path):
    report = {"z": 1.0, "a": [1.23456789012345, 2]}
    assert to_json(report) == to_json(dict(report))
    assert to_json(report).endswith("\n")
    assert list(json.loads(to_json(report))) == ["z", "a"]
    text = to_csv(["x", "torsion"], [(1, [2, 4]), (0.5, [])])
    assert text == "x,torsion\n1,2;4\n0.5,\n"
    write_text(tmp_path / "deep" / "out.csv", text)
    assert (tmp_path / "deep" / "out.csv").read_text() == text
