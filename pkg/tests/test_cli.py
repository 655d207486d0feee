from __future__ import annotations

import io
import json
from fractions import Fraction

import pytest

from nlgf.cli import main


def run(capsys, monkeypatch, argv, stdin=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_build_and_value(capsys, monkeypatch):
    code, game, _ = run(capsys, monkeypatch, ["game", "build", "reject"])
    assert code == 0
    code, out, _ = run(capsys, monkeypatch, ["game", "value"], game)
    assert code == 0 and json.loads(out)["value"] == "1/3"
    _, anch, _ = run(capsys, monkeypatch, ["game", "transform", "--op", "anchor"], game)
    _, out, _ = run(capsys, monkeypatch, ["game", "value"], anch)
    assert json.loads(out)["value"] == "5/6"


def test_sample(capsys, monkeypatch):
    _, game, _ = run(capsys, monkeypatch, ["game", "build", "magic-square"])
    code, out, _ = run(capsys, monkeypatch, ["game", "sample", "--n", "0"], game)
    assert code == 0 and out == ""
    _, a, _ = run(capsys, monkeypatch, ["game", "sample", "--n", "20", "--seed", "5"], game)
    _, b, _ = run(capsys, monkeypatch, ["game", "sample", "--n", "20", "--seed", "5"], game)
    lines = a.strip().splitlines()
    assert a == b and len(lines) == 20
    assert [json.loads(l)["i"] for l in lines] == list(range(20))


def test_enumerate(capsys, monkeypatch):
    _, game, _ = run(capsys, monkeypatch, ["game", "build", "reject"])
    code, out, _ = run(capsys, monkeypatch, ["game", "enumerate"], game)
    doc = json.loads(out)
    assert code == 0 and len(doc["pairs"]) == 4
    assert sum(Fraction(p) for *_, p in doc["pairs"]) == 1


def test_strategy_roundtrip(capsys, monkeypatch):
    _, strat, _ = run(capsys, monkeypatch, ["strategy", "build", "magic-square"])
    code, out, _ = run(capsys, monkeypatch, ["strategy", "eval"], strat)
    assert code == 0 and abs(json.loads(out)["value"] - 1) <= 1e-9
    code, out, _ = run(capsys, monkeypatch, ["strategy", "check-oracularizable"], strat)
    assert code == 0
    code, _, err = run(capsys, monkeypatch, ["strategy", "eval", "--game", "reject"], strat)
    assert code == 1 and json.loads(err)["exit_code"] == 1


def test_error_codes(capsys, monkeypatch):
    assert run(capsys, monkeypatch, ["suite", "run", "--suite", "nope"])[0] == 2
    code, _, err = run(capsys, monkeypatch, ["game", "value"], "{not json")
    assert code == 2 and json.loads(err)["error"] == "UsageError"
    _, game, _ = run(capsys, monkeypatch, ["game", "build", "pauli-basis", "--param", "n=1"])
    _, det, _ = run(capsys, monkeypatch, ["game", "transform", "--op", "detype"], game)
    assert run(capsys, monkeypatch, ["game", "enumerate"], det)[0] == 3
    assert run(capsys, monkeypatch, ["game", "build", "reject", "--threads", "0"])[0] == 2


def test_suite_field(capsys, monkeypatch):
    code, out, _ = run(capsys, monkeypatch, ["suite", "run", "--suite", "field", "--format", "json"])
    assert code == 0
    rows = json.loads(out)
    assert all(r["passed"] for r in (rows["checks"] if isinstance(rows, dict) else rows))
    _, again, _ = run(capsys, monkeypatch, ["suite", "run", "--suite", "field", "--format", "json"])
    assert again == out


def test_out_file(capsys, monkeypatch, tmp_path):
    target = tmp_path / "g.json"
    code, out, _ = run(capsys, monkeypatch, ["game", "build", "accept", "--out", str(target)])
    assert code == 0 and out == ""
    assert json.loads(target.read_text())
