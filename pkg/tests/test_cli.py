# -*- coding: utf-8 -*-
##
# @file tests/test_cli.py
# @brief Command line runner, parameter casting and report files.
#

from __future__ import annotations

import json

import pytest

from hammerlab.cli import EXIT_OK, EXIT_USAGE, build_parser, main
from hammerlab.experiments import EXPERIMENTS, _cast, find_experiment, resolve_parameters
from hammerlab.report import render_markdown

SMALL_EQUILIBRIUM = ["--replicas", "24", "--rho", "1", "--width", "20", "--T", "20", "--head", "2"]


def _report(out_dir, name):
    return json.loads((out_dir / name / "report.json").read_text(encoding="utf-8"))


def test_worked_box_passes(out_dir):
    assert main(["worked-box", "--out", str(out_dir), "--csv"]) == EXIT_OK
    rep = _report(out_dir, "worked-box")
    assert rep["verdict"] == "pass"
    assert all(rep["checks"].values())
    assert rep["estimates"]["final_state"] == [[6.0, 7.0]]
    for name in ("events", "corners", "points", "final_measure"):
        assert (out_dir / "worked-box" / f"samples_{name}.csv").exists()
    assert (out_dir / "worked-box" / "report.html").exists()


def test_figure21_runs_the_worked_box(out_dir, tmp_path):
    assert main(["figure21", "--out", str(out_dir)]) == EXIT_OK
    rep = _report(out_dir, "worked-box")
    assert rep["config"]["experiment"] == "worked-box"
    assert rep["verdict"] == "pass"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "figure21", "seed": 4}), encoding="utf-8")
    assert main(["worked-box", "--out", str(out_dir), "--config", str(cfg)]) == EXIT_OK
    assert find_experiment("figure21") is EXPERIMENTS["worked-box"]
    with pytest.raises(ValueError):
        find_experiment("figure99")


def test_no_json_flag(out_dir):
    assert main(["worked-box", "--out", str(out_dir), "--no-json"]) == EXIT_OK
    assert not (out_dir / "worked-box" / "report.json").exists()


def test_report_bytes_do_not_depend_on_threads(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["equilibrium", "--out", str(a), "--seed", "3", "--threads", "1", *SMALL_EQUILIBRIUM])
    main(["equilibrium", "--out", str(b), "--seed", "3", "--threads", "2", *SMALL_EQUILIBRIUM])
    assert (a / "equilibrium" / "report.json").read_bytes() == (b / "equilibrium" / "report.json").read_bytes()


def test_bad_values_exit_with_usage(out_dir):
    assert main(["equilibrium", "--out", str(out_dir), "--rho", "abc"]) == EXIT_USAGE
    assert main(["worked-box", "--out", str(out_dir), "--replicas", "0"]) == EXIT_USAGE


def test_unknown_parameter_in_config_file(out_dir, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "worked-box", "parameters": {"bogus": 1}}), encoding="utf-8")
    assert main(["worked-box", "--out", str(out_dir), "--config", str(cfg)]) == EXIT_USAGE


def test_unknown_flag_is_rejected_by_the_parser():
    with pytest.raises(SystemExit) as e:
        main(["worked-box", "--bogus", "1"])
    assert e.value.code == 2


def test_every_experiment_has_a_subcommand():
    parser = build_parser()
    for name in EXPERIMENTS:
        assert parser.parse_args([name]).cmd == name


@pytest.mark.parametrize(
    "default, value, want",
    [
        ((1.0,), "1,2.5", (1.0, 2.5)),
        ((1.0,), [3, 4], (3.0, 4.0)),
        (True, "yes", True),
        (False, "0", False),
        (3, "7", 7),
        (0.5, "0.25", 0.25),
        ("poisson", "periodic", "periodic"),
    ],
)
def test_cast(default, value, want):
    assert _cast(default, value, "k") == want


def test_resolve_parameters_errors():
    with pytest.raises(ValueError):
        resolve_parameters("no-such-experiment", {})
    with pytest.raises(ValueError):
        resolve_parameters("worked-box", {"bogus": 1})
    with pytest.raises(ValueError):
        _cast(1, "x", "k")


def test_markdown_summary_lists_checks(out_dir):
    main(["worked-box", "--out", str(out_dir)])
    text = render_markdown(_report(out_dir, "worked-box"))
    assert text.startswith("# worked-box")
    assert "| exited | OK |" in text
