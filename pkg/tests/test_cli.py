"""Command-line surface: literals, subcommands, formats and exit codes."""

from __future__ import annotations

import csv
import io
import json

import pytest

from shrinker_lab.cli import main, parse_poly_string
from shrinker_lab.errors import ConfigError


def test_parse_poly_basic():
    assert parse_poly_string("w^2").terms == {(2,): 1.0}
    assert parse_poly_string("3").terms == {(0,): 3.0}
    assert parse_poly_string("2*z^3").terms == {(3,): 2.0}
    assert parse_poly_string("x^2 - 4").terms == {(2,): 1.0, (0,): -4.0}


def test_parse_poly_multivariate():
    u = parse_poly_string("z1^2 z2 - 0.5 z2^3", m=2)
    assert u.terms == {(2, 1): 1.0, (0, 3): -0.5}
    v = parse_poly_string("z1 + z2", m=2)
    assert v.terms == {(1, 0): 1.0, (0, 1): 1.0}


def test_parse_poly_json_literal():
    u = parse_poly_string('{"m": 2, "terms": [{"alpha": [1, 1], "re": 2.0, "im": -1.0}]}')
    assert u.terms == {(1, 1): 2.0 - 1.0j}


def test_parse_poly_errors():
    with pytest.raises(ConfigError):
        parse_poly_string("q^2")
    with pytest.raises(ConfigError):
        parse_poly_string("z1 + !")
    with pytest.raises(ConfigError):
        parse_poly_string("z3", m=2)


def test_spectrum_command(capsys):
    code = main(["spectrum", "--model", "gaussian", "--m", "1", "--lambda-max", "1"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    lines = [(l["eigenvalue"], l["multiplicity"]) for l in data["lines"]]
    assert lines == [(0.0, 1), (0.5, 2), (1.0, 3)]


def test_dimension_command(capsys):
    code = main(["dimension", "--model", "cylinder", "--d", "1"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["bound"] == 2 and data["dim_Od"] == 2 and data["pass"]


def test_frequency_csv(tmp_path):
    out = tmp_path / "profile.csv"
    code = main(
        [
            "frequency",
            "--model",
            "cylinder",
            "--poly",
            "w^2",
            "--rmin",
            "4.5",
            "--rmax",
            "40",
            "--n",
            "64",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 64
    mu = None
    for row in rows:
        assert set(row) == {"r", "I", "D", "U", "eta", "monotone_q"}
        assert 0.0 < float(row["U"]) <= 2.0 + 0.01 * (2.718281828 ** 7) * 2.0  # d + eps sqrt(mu)
    # determinism: a second run produces byte-identical output
    out2 = tmp_path / "profile2.csv"
    main(
        [
            "frequency",
            "--model",
            "cylinder",
            "--poly",
            "w^2",
            "--rmin",
            "4.5",
            "--rmax",
            "40",
            "--n",
            "64",
            "--out",
            str(out2),
        ]
    )
    assert out.read_text() == out2.read_text()


def test_frequency_json(capsys):
    code = main(
        [
            "frequency",
            "--model",
            "gaussian",
            "--m",
            "1",
            "--poly",
            "z^2",
            "--rmin",
            "5",
            "--rmax",
            "20",
            "--n",
            "4",
            "--format",
            "json",
        ]
    )
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["monotone"] is True
    assert len(data["rows"]) == 4
    assert all(abs(row["U"] - 2.0) < 1e-8 for row in data["rows"])


def test_heatflow_command(capsys):
    code = main(["heatflow", "--initial", "x^2", "--s", "1.0", "--n-grid", "400", "--n-steps", "100", "--extrapolate"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["coefficients"] == {"0.0": 2.0, "1.0": 1.0}
    assert data["l2_error_series_vs_oracle"] < 5e-3


def test_forms_command(capsys):
    code = main(["forms", "--model", "gaussian", "--m", "2", "--p", "1", "--mu", "2"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["count_bound"]["pass"]
    assert data["kernel_dim"] == 3
    assert data["reduction_ledger"]["dim_forms"] == 12


def test_missing_config_exits_2(capsys):
    code = main(["spectrum", "--config", "/nonexistent/config.json"])
    assert code == 2
    assert "config" in capsys.readouterr().err


def test_bad_poly_exits_2(capsys):
    code = main(["frequency", "--model", "cylinder", "--poly", "??", "--rmin", "4.5", "--rmax", "10", "--n", "4"])
    assert code == 2


def test_config_file_round_trip(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": {"kind": "gaussian", "m": 2}, "d": 2.0}))
    code = main(["dimension", "--config", str(cfg)])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["model"] == {"kind": "gaussian", "m": 2}
    assert data["dim_Od"] == 6


def test_forms_literal_analysis(capsys):
    syzygy = json.dumps(
        {
            "p": 1,
            "m": 2,
            "coeffs": [
                {"index": [1], "terms": [{"alpha": [0, 1], "re": 1.0, "im": 0.0}]},
                {"index": [2], "terms": [{"alpha": [1, 0], "re": -1.0, "im": 0.0}]},
            ],
        }
    )
    code = main(["forms", "--model", "gaussian", "--m", "2", "--form", syzygy])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["in_contraction_kernel"] is True
    assert data["kernel_integral"] < 0
    assert data["mu"] == 1


def test_forms_ricci_norm_flag(capsys):
    code = main(["forms", "--model", "cylinder", "--p", "1", "--mu", "2", "--ricci-norm", "tensor"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["ricci_norm"] == "tensor"
    assert data["count_bound"]["horizon"] > 2.0  # tensor norm enlarges the horizon


def test_frequency_json_reports_both_bounds(capsys):
    code = main(
        [
            "frequency",
            "--model",
            "gaussian",
            "--m",
            "1",
            "--poly",
            "z^2",
            "--rmin",
            "5",
            "--rmax",
            "20",
            "--n",
            "4",
            "--format",
            "json",
        ]
    )
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["u_max"] <= data["u_bound_sqrt"] <= data["u_bound_weak"]


def test_thread_cap_env(monkeypatch):
    from shrinker_lab.report import _max_workers

    monkeypatch.setenv("SHRINKER_LAB_THREADS", "1")
    assert _max_workers() == 1
    monkeypatch.setenv("SHRINKER_LAB_THREADS", "7")
    assert _max_workers() == 7
    monkeypatch.setenv("SHRINKER_LAB_THREADS", "junk")
    assert _max_workers() == 1
    monkeypatch.delenv("SHRINKER_LAB_THREADS")
    assert _max_workers() >= 1
