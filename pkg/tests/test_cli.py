import json
from pathlib import Path

import pytest

from pdarena.cli import main


@pytest.fixture()
def tiny_experiment(tmp_path):
    cfg = {
        "rounds": 2,
        "master_seed": 5,
        "mcts": {"iterations": 25, "t_sim": 30},
        "player": {"kind": "biased"},
        "pairings": [
            {"id": "mcts", "agent": {"kind": "mcts"}},
            {"id": "pda", "agent": {"kind": "pda"}},
        ],
        "comparisons": [
            {"a": "pda", "b": "mcts", "metric": "bal_end", "alternative": "GREATER",
             "methods": ["WILCOXON_SIGNED_RANK"]}
        ],
    }
    path = tmp_path / "exp.json"
    path.write_text(json.dumps(cfg))
    return path


def test_experiment_writes_identical_bytes_on_rerun(tiny_experiment, tmp_path, capsys):
    out1 = tmp_path / "r1"
    out2 = tmp_path / "r2"
    assert main(["experiment", "--config", str(tiny_experiment), "--out", str(out1)]) == 0
    assert main(["experiment", "--config", str(tiny_experiment), "--out", str(out2)]) == 0
    assert (out1 / "rounds.csv").read_bytes() == (out2 / "rounds.csv").read_bytes()
    assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()
    capsys.readouterr()


def test_experiment_seed_override_changes_rounds(tiny_experiment, tmp_path, capsys):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    main(["experiment", "--config", str(tiny_experiment), "--out", str(out1)])
    main(["experiment", "--config", str(tiny_experiment), "--out", str(out2),
          "--seed", "99"])
    assert (out1 / "rounds.csv").read_text() != (out2 / "rounds.csv").read_text()
    summary = json.loads((out2 / "summary.json").read_text())
    assert summary["master_seed"] == 99
    capsys.readouterr()


def test_missing_config_is_usage_error(tmp_path, capsys):
    code = main(["experiment", "--config", str(tmp_path / "absent.json"),
                 "--out", str(tmp_path / "o")])
    assert code == 2
    err = capsys.readouterr().err
    assert "absent.json" in err


def test_unknown_flag_is_usage_error(capsys):
    assert main(["experiment", "--nonsense"]) == 2
    capsys.readouterr()


def test_simulate_prints_one_line_result(capsys):
    code = main(["simulate", "--agent", "pda", "--player", "biased", "--seed", "7",
                 "--iterations", "25"])
    assert code == 0
    line = capsys.readouterr().out.strip()
    fields = dict(part.split("=") for part in line.split())
    assert fields["pairing"] == "pda"
    assert fields["seed"] == "7"
    assert 0.0 <= float(fields["bal_end"]) <= 1.0
    assert fields["winner"] in ("PLAYER", "AI", "DRAW")


def test_simulate_deterministic(capsys):
    main(["simulate", "--agent", "mcts", "--seed", "3", "--iterations", "25"])
    first = capsys.readouterr().out
    main(["simulate", "--agent", "mcts", "--seed", "3", "--iterations", "25"])
    second = capsys.readouterr().out
    assert first == second


def test_report_recomputes_summary(tiny_experiment, tmp_path, capsys):
    out = tmp_path / "res"
    main(["experiment", "--config", str(tiny_experiment), "--out", str(out)])
    original = (out / "summary.json").read_bytes()
    code = main(["report", "--rounds", str(out / "rounds.csv")])
    assert code == 0
    assert (out / "summary.json").read_bytes() == original
    capsys.readouterr()


def test_report_with_explicit_config(tiny_experiment, tmp_path, capsys):
    out = tmp_path / "res"
    main(["experiment", "--config", str(tiny_experiment), "--out", str(out)])
    redo = tmp_path / "redo"
    code = main(["report", "--rounds", str(out / "rounds.csv"),
                 "--config", str(tiny_experiment), "--out", str(redo)])
    assert code == 0
    a = json.loads((out / "summary.json").read_text())
    b = json.loads((redo / "summary.json").read_text())
    assert a["pairings"] == b["pairings"]
    assert a["comparisons"] == b["comparisons"]
    capsys.readouterr()


def test_report_missing_rounds_file(tmp_path, capsys):
    assert main(["report", "--rounds", str(tmp_path / "none.csv")]) == 2
    capsys.readouterr()


def test_env_var_supplies_default_config(tiny_experiment, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("PDARENA_CONFIG", str(tiny_experiment))
    out = tmp_path / "envrun"
    assert main(["experiment", "--out", str(out)]) == 0
    assert (out / "rounds.csv").exists()
    capsys.readouterr()
