#!/usr/bin/env python3
"""
Tests for the command-line front end, its output formats and exit codes
"""

import io
import sys
import json
import math

import pytest

import cli
import verification
from errors import AccuracyError
from reporting import dumps, format_float, rows_to_csv
from settings import TOOL_NAME, VERSION

CASE2_PROBLEM = {"p": 0, "q": 0, "r": 2, "a": [1.0, 0.0],
                 "phi": {"variant": "Rational", "params": {"z0": [1.0, 0.0]}}}


def invoke(argv, config=None, tmp_path=None):
    if config is not None:
        path = tmp_path / "config.json"
        path.write_text(json.dumps(config))
        argv = argv + ["--config", str(path)]
    out = io.StringIO()
    status = cli.main(argv, stdout=out)
    return status, out.getvalue()


def test_classify_default_problem():
    status, text = invoke(["classify"])
    assert status == 0
    payload = json.loads(text)
    assert payload["tool"] == TOOL_NAME
    assert payload["version"] == VERSION
    assert payload["command"] == "classify"
    assert payload["config"]["problem"]["p"] == 2
    result = payload["result"]
    assert result["regime"] == "Summable1c"
    assert result["k"] == pytest.approx(1.0)
    assert result["stokes"] == pytest.approx([0.0])


def test_classify_case2(tmp_path):
    status, text = invoke(["classify"], {"problem": CASE2_PROBLEM, "z": 0.5}, tmp_path)
    assert status == 0
    result = json.loads(text)["result"]
    assert result["regime"] == "Summable2"
    assert result["stokes"] == pytest.approx([0.0, -2 * math.pi])


@pytest.mark.parametrize("config", [
    {"problem": CASE2_PROBLEM, "colour": "red"},
    {"problem": {"p": 2, "q": 0, "r": 0, "a": 0}},
    {"t_grid": {"modulus": [0.0, 1.0]}},
    {"t_grid": {"points": [[0.1, 0.0]], "count": 2}},
    {"suites": ["no_such_suite"]},
    {"line": "first"},
])
def test_invalid_configs_exit_1(config, tmp_path):
    status, text = invoke(["classify"], config, tmp_path)
    assert status == 1
    assert json.loads(text)["type"] == "ValidationError"


def test_unreadable_config(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    out = io.StringIO()
    assert cli.main(["classify", "--config", str(path)], stdout=out) == 1
    assert cli.main(["classify", "--config", str(tmp_path / "missing.json")], stdout=io.StringIO()) == 1


def test_bad_arguments_exit_1():
    status, text = invoke(["resum"])
    assert status == 1
    assert "ValidationError" in text
    assert invoke(["sum", "--format", "xml"])[0] == 1


def test_sum_on_a_stokes_line_is_refused(tmp_path):
    status, text = invoke(["sum"], {"direction": 0.0}, tmp_path)
    assert status == 1
    payload = json.loads(text)
    assert payload["type"] == "SingularRayError"
    assert "Stokes line" in payload["error"]
    assert payload["direction"] == pytest.approx(0.0)


def test_sum_default_direction(tmp_path):
    status, text = invoke(["sum"], {"t_grid": {"modulus": [0.1, 0.3], "count": 3}}, tmp_path)
    assert status == 0
    result = json.loads(text)["result"]
    assert result["direction"] == pytest.approx(math.pi)
    assert len(result["samples"]) == 3
    for sample in result["samples"]:
        assert abs(sample["value"][1]) < 1e-9
        assert sample["error"] < 1e-8


def test_sum_in_a_window(tmp_path):
    config = {"direction": 1.5, "theta": 1.6, "window": 0.5, "t_grid": {"points": [[0.0, 0.1]]}}
    status, text = invoke(["sum"], config, tmp_path)
    assert status == 0
    assert json.loads(text)["result"]["samples"][0]["error"] == "nan"


def test_sum_of_a_convergent_problem(tmp_path):
    config = {"problem": {"p": 1, "q": 0, "r": 0, "a": 2.0}, "t_grid": {"points": [[0.1, 0.0]]}}
    status, text = invoke(["sum"], config, tmp_path)
    assert status == 0
    sample = json.loads(text)["result"]["samples"][0]
    assert sample["value"] == pytest.approx([1.25, 0.0])


def test_sum_outside_the_disc_exits_1(tmp_path):
    config = {"problem": {"p": 1, "q": 0, "r": 0, "a": 2.0}, "t_grid": {"points": [[0.6, 0.0]]}}
    assert invoke(["sum"], config, tmp_path)[0] == 1


def test_jump_command(tmp_path):
    config = {"t_grid": {"modulus": [0.1, 0.2], "count": 2}}
    status, text = invoke(["jump", "--eps", "0.2"], config, tmp_path)
    assert status == 0
    payload = json.loads(text)
    assert payload["config"]["eps"] == pytest.approx(0.2)
    result = payload["result"]
    assert result["max_rel_disagreement"] <= 1e-4
    assert result["line"]["direction"] == pytest.approx(0.0)
    assert [sample["eps"] for sample in result["samples"]] == pytest.approx([0.2, 0.2])


def test_jump_unknown_line(tmp_path):
    assert invoke(["jump"], {"line": 3}, tmp_path)[0] == 1


def test_stokes_csv(tmp_path):
    status, text = invoke(["stokes", "--format", "csv"], {"problem": CASE2_PROBLEM, "z": 0.5}, tmp_path)
    assert status == 0
    comments = [line[2:] for line in text.split("\n") if line.startswith("# ")]
    lines = [line for line in text.strip().split("\n") if not line.startswith("#")]
    assert lines[0] == "kind,case,index,direction,k"
    assert len(lines) == 1 + 2 * 3
    header = json.loads("\n".join(comments))
    assert header["tool"] == TOOL_NAME and header["version"] == VERSION
    assert header["command"] == "stokes"
    assert header["config"]["problem"]["r"] == 2
    assert header["config"]["format"] == "csv"


def test_output_is_deterministic(tmp_path):
    config = {"t_grid": {"modulus": [0.1, 0.2], "count": 2}}
    first = invoke(["jump"], config, tmp_path)
    second = invoke(["jump"], config, tmp_path)
    assert first == second


def test_out_file(tmp_path):
    target = tmp_path / "result.json"
    status, text = invoke(["classify", "--out", str(target)])
    assert status == 0
    assert text == ""
    assert json.loads(target.read_text())["result"]["regime"] == "Summable1c"


def test_tol_override():
    status, text = invoke(["classify", "--tol", "1e-9"])
    assert json.loads(text)["config"]["quadrature"]["abs_tol"] == pytest.approx(1e-9)


def test_verify_selected_suites(tmp_path):
    config = {"suites": ["product_identity", "mittag_leffler", "pde_residual"]}
    status, text = invoke(["verify"], config, tmp_path)
    assert status == 0
    result = json.loads(text)["result"]
    assert result["passed"] is True
    assert [suite["suite"] for suite in result["suites"]] == config["suites"]
    assert all("seconds" not in suite for suite in result["suites"])


def test_verify_failure_exits_2(tmp_path, monkeypatch):
    monkeypatch.setitem(verification.SUITES, "product_identity", lambda config: (1.0, 0.5))

    def broken(config):
        raise AccuracyError("quadrature stalled")

    monkeypatch.setitem(verification.SUITES, "mittag_leffler", broken)
    status, text = invoke(["verify"], {"suites": ["product_identity", "mittag_leffler"]}, tmp_path)
    assert status == 2
    suites = json.loads(text)["result"]["suites"]
    assert [suite["passed"] for suite in suites] == [False, False]
    assert suites[1]["deviation"] == "inf"
    assert "AccuracyError" in suites[1]["detail"]


def test_format_float():
    assert format_float(0.1) == "1.000000000000e-01"
    assert format_float(math.nan) == '"nan"'
    assert format_float(-math.inf) == '"-inf"'


def test_dumps_keeps_key_order():
    text = dumps({"b": 1, "a": [1.5, None, True], "c": {"z": 2j}})
    assert list(json.loads(text)) == ["b", "a", "c"]
    assert json.loads(text)["c"]["z"] == [0.0, 2.0]


def test_rows_to_csv():
    assert rows_to_csv([]) == ""
    assert rows_to_csv([], {"tool": "t"}) == '# {\n#   "tool": "t"\n# }\n'
    text = rows_to_csv([{"x": 0.5, "label": "a"}, {"x": 2.0, "label": "b"}])
    assert text == "x,label\n5.000000000000e-01,a\n2.000000000000e+00,b\n"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
