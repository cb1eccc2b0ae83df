import io
import json
import os
import subprocess
import sys

import jsonschema
import pytest

from cli_cases import ROOT, cases, run_case
from stt.cli import run

SCHEMA = {
    "type": "object",
    "required": ["command", "inputs", "result", "diagnostics"],
    "additionalProperties": False,
    "properties": {
        "command": {"type": ["string", "null"]},
        "inputs": {"type": ["object", "null"]},
        "result": {},
        "diagnostics": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["severity", "kind", "message", "span"],
                "properties": {"severity": {"enum": ["error", "warning"]},
                               "kind": {"type": "string"},
                               "message": {"type": "string"}},
            },
        },
    },
}


def out_of(argv):
    buf = io.StringIO()
    code = run(argv, buf)
    return buf.getvalue(), code


def test_overload_below_union_arrow():
    assert out_of(["sub", "(Int->Int)&(Bool->Bool)", "(Int|Bool)->(Int|Bool)"]) == ("true\n", 0)


def test_false_answers_exit_zero_unless_strict():
    assert out_of(["sub", "Any -> Any", "Int -> Int"]) == ("false\n", 0)
    assert out_of(["sub", "Any -> Any", "Int -> Int", "--strict"])[1] == 1
    assert out_of(["--strict", "sub", "Any -> Any", "Int -> Int"])[1] == 1


def test_input_errors_exit_two():
    text, code = out_of(["sub", "Int ->", "Int"])
    assert code == 2 and text.startswith("error[ParseError]")
    assert out_of([])[1] == 2
    assert out_of(["proj", "x", "Int"])[1] == 2


@pytest.mark.parametrize("name, argv", cases(), ids=[c[0] for c in cases()])
def test_json_validates_and_agrees_with_human_output(name, argv):
    text, code = run_case(argv, True)
    doc = json.loads(text)
    jsonschema.validate(doc, SCHEMA)
    human, hcode = run_case(argv, False)
    assert hcode == code
    result = doc["result"]
    if isinstance(result, dict) and "verdict" in result and code == 0:
        first = human.splitlines()[0]
        if argv[0] == "eval":
            assert (first == result["value"]) == result["verdict"]
            return
        negative = {"false", "none", "ill-typed", "non-exhaustive", "stuck", "diverged",
                    "no annotation found"}
        assert (first not in negative) == bool(result["verdict"]), first


def test_seed_flag_and_environment(monkeypatch):
    path = os.path.join(ROOT, "tests/corpus/core/choice_int.cd")
    seen = {out_of(["eval", path, "--seed", str(s)])[0] for s in range(10)}
    assert seen == {"1\n", "2\n"}
    monkeypatch.setenv("STT_SEED", "1")
    assert out_of(["eval", path]) == out_of(["eval", path, "--seed", "1"])
    monkeypatch.setenv("STT_SEED", "nope")
    assert out_of(["eval", path])[1] == 2


def test_batch_runs_each_line(tmp_path):
    batch = tmp_path / "cmds.txt"
    batch.write_text("# comment\nsub Int Any\n\nempty 'Int & Bool'\nsub Any Int\n")
    text, code = out_of(["--batch", str(batch)])
    assert text.splitlines() == ["true", "true", "false"] and code == 0
    text, code = out_of(["--batch", str(batch), "--strict"])
    assert code == 1
    text, code = out_of(["--batch", str(batch), "--json"])
    assert [json.loads(line)["result"]["verdict"] for line in text.splitlines()] == \
        [True, True, False]


def test_dnf_lists_summands():
    text, _ = out_of(["apply", "--dnf", "(Int -> (Int, Int) | Bool)", "Int"])
    assert text.splitlines() == ["Bool", "(Int, Int)"]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "stt.cli", "sub", "Int", "Any"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "true\n"
