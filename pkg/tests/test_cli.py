import csv
import io
import json
import xml.etree.ElementTree as ET

import pytest

from iietlab.cli import run


def test_analyze(rule_file, capsys):
    assert run(["analyze", rule_file("pd")]) == 0
    out = capsys.readouterr().out
    assert "lambda = 2" in out
    assert "T_A = {A1, B1, B2}" in out
    assert "dual substitution choices: 6" in out


def test_iet_csv(rule_file, tmp_path):
    out = tmp_path / "f.csv"
    assert run(["iet", rule_file("pd"), "--level", "3", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 3 * 2 + 2
    assert rows[0]["address"] == "A1"


def test_iet_power_merge(rule_file, capsys):
    assert run(["iet", rule_file("pd"), "--level", "6", "--power", "4", "--merge", "1e-9"]) == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("left,length,translation")


def test_eval(rule_file, capsys):
    assert run(["eval", rule_file("pd"), "--x", "0.1", "--power", "2"]) == 0
    last = capsys.readouterr().out.strip().splitlines()[-1]
    assert float(last) == pytest.approx(0.1 + 2 / 3 - 1 / 3, abs=1e-12)


def test_flowview_svg_and_csv(rule_file, tmp_path):
    svg = tmp_path / "v.svg"
    assert run(["flowview", rule_file("pd"), "--level", "2", "--window", "6", "--out", str(svg)]) == 0
    ET.parse(svg)
    out = tmp_path / "v.csv"
    assert run(["flowview", rule_file("fib"), "--level", "2", "--natural", "--format", "csv", "--out", str(out)]) == 0
    assert out.read_text().startswith("address,y,height")


def test_ietgraph(rule_file, tmp_path):
    svg = tmp_path / "g.svg"
    assert run(["ietgraph", rule_file("pd"), "--level", "5", "--power", "2", "--out", str(svg)]) == 0
    ET.parse(svg)


def test_spectral(rule_file, capsys):
    assert run(["spectral", rule_file("pd"), "--level", "10", "--powers", "0,1"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert float(rows[0]["value"]) == pytest.approx(1 / 3, abs=1e-12)
    assert float(rows[1]["error_bound"]) == pytest.approx(2 / 1024)


def test_coincidence(rule_file, capsys):
    assert run(["coincidence", rule_file("pd")]) == 0
    assert capsys.readouterr().out.strip() == "coincidence at N=1, j=1 (letter A)"
    assert run(["coincidence", rule_file("tm")]) == 0
    assert capsys.readouterr().out.strip() == "no coincidence"
    assert run(["coincidence", rule_file("fib")]) == 4


def test_convergence(rule_file, tmp_path):
    out = tmp_path / "c.csv"
    assert run(["convergence", rule_file("pd"), "--samples", "10", "--exps", "2..4", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 1 + 30


def test_selfsim(rule_file, capsys):
    assert run(["selfsim", rule_file("A -> BBA\nB -> BA\n"), "--level", "18", "--grid", "1000"]) == 0
    assert "passing sign: -" in capsys.readouterr().out


def test_duals(rule_file, capsys):
    assert run(["duals", rule_file("fib"), "--enumerate", "--fib2-search"]) == 0
    out = capsys.readouterr().out
    assert "dual substitution choices: 2" in out
    assert "minimum merged piece count:" in out


def test_config_file(rule_file, tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"initial_order": ["B", "A"]}))
    assert run(["analyze", rule_file("pd"), "--config", str(cfg)]) == 0
    assert "initial order: B A" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv_tail, text, code",
    [
        (["analyze"], "A -> AC\n", 2),
        (["analyze"], "A -> AB\nA -> B\n", 2),
        (["analyze"], "0 -> 0010\n1 -> 1\n", 4),
        (["iet", "--level", "12", "--power", "4096", "--max-pieces", "50"], "A -> AB\nB -> AA\n", 5),
        (["flowview", "--level", "12", "--max-addresses", "100"], "A -> AB\nB -> AA\n", 5),
        (["eval", "--x", "0.99999999999", "--max-depth", "4"], "A -> AB\nB -> AA\n", 4),
        (["selfsim"], "A -> AB\nB -> AA\n", 4),
    ],
)
def test_exit_codes(rule_file, capsys, argv_tail, text, code):
    path = rule_file(text)
    assert run([argv_tail[0], path] + argv_tail[1:]) == code
    err = capsys.readouterr().err
    assert err.startswith("error: ") and len(err.strip().splitlines()) == 1


def test_assume_minimal_flag(rule_file):
    assert run(["analyze", rule_file("chacon"), "--assume-minimal"]) == 0


def test_bad_config_file(rule_file, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text("{not json")
    assert run(["analyze", rule_file("pd"), "--config", str(cfg)]) == 2


def test_missing_rule_file(tmp_path):
    assert run(["analyze", str(tmp_path / "nope.txt")]) == 2


def test_precision_env(rule_file, monkeypatch):
    monkeypatch.setenv("IIETLAB_PRECISION", "binary128")
    assert run(["analyze", rule_file("pd")]) == 2


def test_outputs_are_deterministic(rule_file, tmp_path):
    path = rule_file("trib")
    for name in ("a", "b"):
        assert run(["flowview", path, "--level", "3", "--out", str(tmp_path / f"{name}.svg")]) == 0
        assert run(["iet", path, "--level", "7", "--out", str(tmp_path / f"{name}.csv")]) == 0
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
