"""End-to-end tests of the thin-client CLI against the in-process service."""

import json
import subprocess
import sys

import numpy as np
import pytest

from chaoscv.cli import main

FAST = [
    "--l-max", "1", "--m-max", "2", "--q-max", "2",
    "--n-starts", "2", "--max-iterations", "200",
]


def run_cli(args):
    return main([str(a) for a in args])


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


@pytest.fixture()
def logistic_csv(tmp_path):
    path = tmp_path / "logistic.csv"
    code = run_cli([
        "generate", "logistic", "--r", 4.0, "--x0", 0.3, "--n", 300,
        "--transient-skip", 50, "-o", path,
    ])
    assert code == 0
    return path


def test_generate_matches_hand_iteration(tmp_path, capsys):
    out = tmp_path / "tiny.csv"
    assert run_cli(["generate", "logistic", "--r", 4, "--x0", 0.3, "--n", 5, "-o", out]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "logistic"
    values = [float(v) for v in lines[1:]]
    expected = [0.3]
    for _ in range(4):
        expected.append(4.0 * expected[-1] * (1.0 - expected[-1]))
    np.testing.assert_allclose(values, expected)
    sidecar = read_json(tmp_path / "tiny.spec.json")
    assert sidecar["kind"] == "logistic"
    assert sidecar["parameters"]["x0"] == 0.3


def test_generate_deterministic(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    for out in (a, b):
        assert run_cli(["generate", "lorenz", "--n", 200, "--seed", 7, "-o", out]) == 0
    assert a.read_text() == b.read_text()


def test_generate_rejects_bad_initial_condition(tmp_path, capsys):
    code = run_cli(["generate", "logistic", "--x0", 1.5, "-o", tmp_path / "x.csv"])
    assert code == 1
    assert "initial condition" in capsys.readouterr().err


def test_analyze_and_rank_round_trip(tmp_path, logistic_csv, capsys):
    results = tmp_path / "results.json"
    code = run_cli(["analyze", logistic_csv, "-o", results, *FAST])
    assert code == 0
    captured = capsys.readouterr()
    assert "Symbol" in captured.out and "logistic" in captured.out
    document = read_json(results)
    assert set(document) == {"generated_at", "config", "results", "failures"}
    assert document["config"]["l_max"] == 1
    assert document["results"][0]["lambda_hat"] > 0
    assert document["failures"] == []

    selection = tmp_path / "selection.json"
    code = run_cli(["rank", results, "--criterion", "product", "-o", selection])
    assert code == 0
    body = read_json(selection)
    assert body["entries"][0]["signal_id"] == "logistic"
    assert "lambda*p" in capsys.readouterr().out


def test_analyze_continues_past_dead_sensor(tmp_path, logistic_csv, capsys):
    merged = tmp_path / "plant.csv"
    rows = logistic_csv.read_text().splitlines()
    merged.write_text(
        "\n".join(
            [f"{rows[0]},dead"] + [f"{row},4.2" for row in rows[1:]]
        ) + "\n",
        encoding="utf-8",
    )
    results = tmp_path / "results.json"
    code = run_cli(["analyze", merged, "-o", results, *FAST])
    assert code == 0
    err = capsys.readouterr().err
    assert "dead" in err and "degenerate signal" in err
    document = read_json(results)
    assert [f["signal_id"] for f in document["failures"]] == ["dead"]
    assert [r["signal_id"] for r in document["results"]] == ["logistic"]


def test_analyze_all_failed_exit_code(tmp_path, capsys):
    path = tmp_path / "dead.csv"
    path.write_text("dead\n" + "1.0\n" * 50, encoding="utf-8")
    code = run_cli(["analyze", path, "-o", tmp_path / "r.json", *FAST])
    assert code == 2


def test_analyze_missing_file_exit_code(tmp_path, capsys):
    assert run_cli(["analyze", tmp_path / "nope.csv"]) == 1


def test_analyze_config_file_with_flag_override(tmp_path, logistic_csv):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"l_max": 1, "m_max": 1, "q_max": 1, "n_starts": 1}))
    results = tmp_path / "results.json"
    code = run_cli([
        "analyze", logistic_csv, "-o", results, "--config", cfg, "--q-max", 2,
    ])
    assert code == 0
    document = read_json(results)
    assert document["config"]["m_max"] == 1  # from file
    assert document["config"]["q_max"] == 2  # flag wins


def test_analyze_deterministic_modulo_timestamp(tmp_path, logistic_csv):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for out in (a, b):
        assert run_cli(["analyze", logistic_csv, "-o", out, *FAST]) == 0
    da, db = read_json(a), read_json(b)
    da.pop("generated_at")
    db.pop("generated_at")
    assert json.dumps(da, sort_keys=True) == json.dumps(db, sort_keys=True)


def test_rank_benchmark_fixture(tmp_path, capsys):
    rows = [
        {"signal_id": "y39", "label": "CFFLD", "lambda_hat": 0.36928, "p_value": 1.0},
        {"signal_id": "y32", "label": "CDP", "lambda_hat": 0.24857, "p_value": 0.9084},
        {"signal_id": "y10", "label": "FP", "lambda_hat": 0.10293, "p_value": 1.0},
        {"signal_id": "y12", "label": "NS", "lambda_hat": -4.7226, "p_value": 0.0558},
    ]
    path = tmp_path / "fixture.json"
    path.write_text(json.dumps(rows), encoding="utf-8")
    out = tmp_path / "sel.json"

    assert run_cli(["rank", path, "--criterion", "product", "-o", out]) == 0
    body = read_json(out)
    assert [e["signal_id"] for e in body["entries"]] == ["y39", "y32", "y10"]
    assert body["filtered_out"] == [{"signal_id": "y12", "reason": "lambda <= 0"}]

    assert run_cli(["rank", path, "--criterion", "product", "--top-n", 2, "-o", out]) == 0
    assert [e["signal_id"] for e in read_json(out)["entries"]] == ["y39", "y32"]

    assert run_cli(["rank", path, "--criterion", "combined", "-o", out]) == 0
    assert [e["signal_id"] for e in read_json(out)["entries"]] == [
        "y39", "y32", "y10", "y12",
    ]


def test_rank_empty_results_warns_and_exits_zero(tmp_path, capsys):
    path = tmp_path / "empty.json"
    path.write_text(json.dumps({"results": []}), encoding="utf-8")
    assert run_cli(["rank", path, "-o", tmp_path / "sel.json"]) == 0
    assert "no results" in capsys.readouterr().err


def test_rank_malformed_file(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert run_cli(["rank", path]) == 1


def test_rank_unknown_criterion_usage_error(tmp_path, capsys):
    path = tmp_path / "fixture.json"
    path.write_text(json.dumps([{"signal_id": "a", "lambda_hat": 1.0, "p_value": 1.0}]))
    assert run_cli(["rank", path, "--criterion", "alphabetical"]) == 1


def test_serve_command_registered(capsys):
    assert run_cli(["serve", "--help"]) == 0
    assert "uvicorn" in capsys.readouterr().out


def test_open_client_selects_transport():
    import httpx

    from chaoscv.cli import _open_client

    with _open_client("http://example.invalid:9") as client:
        assert isinstance(client, httpx.Client)
        assert str(client.base_url).startswith("http://example.invalid")
    with _open_client(None) as client:
        assert client.get("/health").status_code == 200


def test_installed_entry_point_smoke(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "chaoscv.cli", "generate", "sine", "--n", "5",
         "-o", str(tmp_path / "s.csv")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "s.csv").exists()
