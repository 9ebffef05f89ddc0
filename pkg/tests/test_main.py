"""Tests for the ``noether`` command line."""

import io
import json
from functools import partial

import pytest
import yaml

import noether_verify.main as cli
from noether_verify.calculus.operators import adjoint_eta
from noether_verify.main import EXIT_FAILED, EXIT_OK, EXIT_USAGE, RunConfig, build_parser, main, resolve_color
from noether_verify.runner.properties import run_property
from noether_verify.utils.config import ENV_OVERRIDES, Config

LINE_BUNDLE = {"base_dim": 1, "families": [{"name": "y", "role": "dynamic-field"}]}


@pytest.fixture
def config_file(tmp_path, monkeypatch):
    for name in ENV_OVERRIDES:
        monkeypatch.delenv(name, raising=False)
    path = tmp_path / "config.yaml"
    path.write_text(
        yaml.safe_dump({"verify": {"oracle_points": 2, "workers": 2}, "output": {"color": False}}),
        encoding="utf-8",
    )
    return str(path)


def run(config_file, *argv):
    return main(["--config", config_file, *argv])


def test_el_prints_one_json_line(tmp_path, config_file, capsys):
    density = tmp_path / "density.json"
    density.write_text(json.dumps({"bundle": LINE_BUNDLE, "density": "1/2*y[;(0)]^2"}), encoding="utf-8")
    assert run(config_file, "el", str(density)) == EXIT_OK
    assert capsys.readouterr().out == '{"y": "-1*y[;(0,0)]"}\n'


def test_bad_selector_is_a_usage_error(config_file, capsys):
    assert run(config_file, "verify", "bf:4:1:1") == EXIT_USAGE
    assert capsys.readouterr().err.startswith("error: ")


def test_verify_text(config_file, capsys):
    assert run(config_file, "verify", "bf:3:1:1") == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "model bf:3:1:1"
    assert lines[-1].endswith(" 0 failed, 2 skipped")


def test_verify_json(config_file, capsys):
    assert run(config_file, "--format", "json", "verify", "bf:3:1:1") == EXIT_OK
    records = json.loads(capsys.readouterr().out)
    assert {r["model"] for r in records} == {"bf:3:1:1"}
    assert "fail" not in {r["status"] for r in records}


def test_eta_roundtrip(tmp_path, config_file, capsys, stueckelberg):
    document = tmp_path / "gauge.json"
    document.write_text(json.dumps(stueckelberg.gauge_symmetry.to_dict()), encoding="utf-8")
    assert run(config_file, "eta", str(document), "--roundtrip") == EXIT_OK
    out = capsys.readouterr().out.rstrip()
    assert out.endswith("\nroundtrip: ok")
    adjoint = json.loads(out[: -len("roundtrip: ok")])
    assert adjoint["role"] == "noether"
    assert sorted(adjoint["source"]) == ["y_bar", "z_bar"]


def test_dump_then_el(tmp_path, config_file, capsys):
    out_dir = tmp_path / "cs"
    assert run(config_file, "dump", "cs", "-o", str(out_dir)) == EXIT_OK
    printed = capsys.readouterr().out.splitlines()
    assert printed[0].endswith("bundle.json")
    assert run(config_file, "el", str(out_dir / "density.json"), "--fields", "a") == EXIT_OK
    el = json.loads(capsys.readouterr().out)
    assert len(el) == 9


def test_property_command(config_file, capsys):
    assert run(config_file, "property", "--suite", "leibniz", "--trials", "2", "--order", "1") == EXIT_OK
    assert capsys.readouterr().out.startswith("model property:leibniz\n")


def test_invalid_json_is_a_usage_error(tmp_path, config_file, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    assert run(config_file, "el", str(broken)) == EXIT_USAGE
    assert run(config_file, "el", str(tmp_path / "missing.json")) == EXIT_USAGE


def test_nonpositive_trials(config_file, capsys):
    assert run(config_file, "property", "--suite", "leibniz", "--trials", "0") == EXIT_USAGE
    assert "trials" in capsys.readouterr().err


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_run_config_defaults_from_config(config_file):
    args = build_parser().parse_args(["property", "--suite", "eta-oracle"])
    run_config = RunConfig.from_args(args, Config(config_file))
    assert run_config.trials == 100
    assert run_config.workers == 2
    assert run_config.color is False
    assert run_config.output_format == "text"


def test_bad_configuration_is_a_usage_error(tmp_path, config_file, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("verify:\n  workers: 0\n", encoding="utf-8")
    assert main(["--config", str(bad), "verify", "cs"]) == EXIT_USAGE
    assert capsys.readouterr().err.startswith("error: bad configuration")


def test_failing_property_exits_one(config_file, capsys, monkeypatch):
    doubled = partial(run_property, eta=lambda op: adjoint_eta(op).scale(2))
    monkeypatch.setattr(cli, "run_property", doubled)
    code = run(config_file, "property", "--suite", "eta-involution", "--trials", "3", "--seed", "0", "--order", "1")
    assert code == EXIT_FAILED
    out = capsys.readouterr().out
    assert "[FAIL] eta-involution" in out
    assert "failing seed: 0 (trial 0)" in out


def test_json_reports_differ_only_in_timing(config_file, capsys):
    outputs = []
    for _ in range(2):
        assert run(config_file, "--format", "json", "verify", "bf:3:1:1") == EXIT_OK
        outputs.append(capsys.readouterr().out)
    assert all('"millis":' in out for out in outputs)
    untimed = [[line for line in out.splitlines() if '"millis":' not in line] for out in outputs]
    assert untimed[0] == untimed[1]


class _Terminal(io.StringIO):
    def isatty(self):
        return True


@pytest.mark.parametrize("stream, expected", [(io.StringIO, False), (_Terminal, True)])
def test_auto_color_follows_terminal(monkeypatch, stream, expected):
    monkeypatch.setattr(cli.sys, "stdout", stream())
    assert resolve_color("auto") is expected
    assert resolve_color(True) is True
    assert resolve_color(False) is False


def test_piped_output_has_no_escape_codes(tmp_path, monkeypatch, capsys):
    for name in ENV_OVERRIDES:
        monkeypatch.delenv(name, raising=False)
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump({"verify": {"oracle_points": 0}}), encoding="utf-8")
    assert main(["--config", str(path), "verify", "bf:3:1:1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[PASS]" in out
    assert "\033[" not in out
