import json

from rouquier.cli import main


def test_build_writes_json(tmp_path, capsys):
    out = tmp_path / "c.json"
    assert main(["build", "--word", "s s t t s s", "--emit", "both", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "cube: 64 summands" in text and "reduced: 23 summands" in text
    data = json.loads(out.read_text())
    assert data["realization"] == "A2" and {"cube", "reduced"} <= set(data)


def test_build_negative_and_mixed(capsys):
    assert main(["build", "--word", "s s s", "--negative", "--emit", "reduced"]) == 0
    assert "reduced: 4 summands" in capsys.readouterr().out
    assert main(["build", "--word", "s s t^-1", "--emit", "reduced"]) == 0
    assert "reduced: 6 summands" in capsys.readouterr().out


def test_export_dot(tmp_path, capsys):
    dot = tmp_path / "c.dot"
    assert main(["export-dot", "--word", "s s s", "--emit", "cube", "--dot", str(dot)]) == 0
    assert "8 nodes, 12 edges" in capsys.readouterr().err
    text = dot.read_text()
    assert text.startswith("digraph") and text.count("->") == 12
    assert main(["export-dot", "--word", "s s t t s s", "--realization", "B2"]) == 0
    captured = capsys.readouterr()
    assert "23 nodes, 46 edges" in captured.err and captured.out.count("->") == 46


def test_verify_report(tmp_path, capsys):
    out = tmp_path / "r.jsonl"
    assert main(["verify", "--word", "t s s t", "--out", str(out)]) == 0
    recs = [json.loads(line) for line in out.read_text().splitlines()]
    suites = {r["suite"] for r in recs}
    assert suites == {"relations", "dsq", "chainmap", "pipeline", "euler"}
    assert {r["status"] for r in recs} == {"pass", "unsupported"}
    assert [r["check"] for r in recs if r["status"] == "unsupported"] == ["two-colour relations"]
    assert "0 failed" in capsys.readouterr().err


def test_verify_unsupported_on_infinite_group(capsys):
    assert main(["verify", "--realization", "universal2", "--suite", "euler", "--word", "s t"]) == 0
    rec = json.loads(capsys.readouterr().out.splitlines()[0])
    assert rec["status"] == "unsupported"


def test_reduce(tmp_path, capsys):
    out = tmp_path / "red.json"
    assert main(["reduce", "--word", "s s s", "--out", str(out)]) == 0
    assert "survivor: 4" in capsys.readouterr().out
    assert json.loads(out.read_text())["certificate"]["steps"] > 0
    assert main(["reduce", "--word", "s^-1"]) == 2


def test_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"name": "x", "generators": ["s"]}')
    assert main(["build", "--realization", str(bad), "--word", "s"]) == 2
    assert main(["build", "--realization", "nope", "--word", "s"]) == 2
    assert main(["build", "--word", "q"]) == 2
    assert main(["build", "--word", "s s s s s", "--max-cells", "16"]) == 2
    assert main(["frobnicate"]) == 2
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps({
        "name": "broken", "generators": ["s"], "coxeter_matrix": [[1]], "rank": 1,
        "roots": [["0"]], "coroots": [["1"]], "deltas": [["1"]]}))
    assert main(["build", "--realization", str(broken), "--word", "s"]) == 2
    assert "error" in capsys.readouterr().err
