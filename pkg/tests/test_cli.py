import json
from pathlib import Path

import pytest

from absint.cli import run
from absint.ts import serialize_ts
from helpers import CORPUS_DIR

F91_SOURCE = """var x;
fun f91(x) = if x > 100 then x - 10 else f91(f91(x + 11));
x := f91(x);
"""


@pytest.fixture
def f91_file(tmp_path):
    path = tmp_path / "f91.mil"
    path.write_text(F91_SOURCE)
    return str(path)


def test_no_arguments_usage(capsys):
    assert run([]) == 3
    assert "usage" in capsys.readouterr().err


def test_unknown_file():
    assert run(["analyze", "/nonexistent.mil"]) == 3


def test_syntax_error_exit_3(tmp_path):
    bad = tmp_path / "bad.mil"
    bad.write_text("var x; x := ;")
    assert run(["analyze", str(bad)]) == 3


def test_analyze_f91_text_report(f91_file, capsys):
    assert run(["analyze", f91_file, "--domain", "interval"]) == 0
    out = capsys.readouterr().out
    assert "f91: [-inf..+inf] -> [91..+inf]" in out


def test_analyze_sign_domain(f91_file, capsys):
    assert run(["analyze", f91_file, "--domain", "sign"]) == 0


def test_analyze_json_schema(f91_file, tmp_path):
    report = tmp_path / "r.json"
    assert run(["analyze", f91_file, "--report", str(report)]) == 0
    payload = json.loads(report.read_text())
    assert payload["schema_version"] == 1
    assert payload["post_fixpoint_ok"] is True


def test_check_exit_codes(tmp_path):
    ok = str(CORPUS_DIR / "cegar_a_safe.mil")
    bad = str(CORPUS_DIR / "cegar_b_buggy.mil")
    assert run(["check", ok, "--report", str(tmp_path / "a.json")]) == 0
    assert run(["check", bad, "--report", str(tmp_path / "b.json")]) == 1
    assert run(["check", ok, "--budget", "1",
                "--report", str(tmp_path / "c.json")]) == 2


def test_check_with_predicate_file(tmp_path):
    preds = tmp_path / "p.preds"
    preds.write_text("# seed predicates\nx > 0\nx <= 0\n")
    ok = str(CORPUS_DIR / "cegar_a_safe.mil")
    assert run(["check", ok, "--preds", str(preds),
                "--report", str(tmp_path / "r.json")]) == 0


def test_check_bad_init_range(tmp_path):
    ok = str(CORPUS_DIR / "cegar_a_safe.mil")
    assert run(["check", ok, "--init-range", "zzz=0:1"]) == 3
    assert run(["check", ok, "--init-range", "x=5:1"]) == 3
    assert run(["check", ok, "--budget", "0"]) == 3


def test_refine_check(tmp_path, capsys):
    from absint.ts import TransitionSystem
    ts1 = TransitionSystem(frozenset("ab"), frozenset("a"),
                           frozenset({"go"}), frozenset({("a", "go", "b")}))
    ts2 = TransitionSystem(frozenset(["a", "m", "b"]), frozenset("a"),
                           frozenset({"go", "tau"}),
                           frozenset({("a", "tau", "m"), ("m", "go", "b")}))
    p1, p2 = tmp_path / "1.ts", tmp_path / "2.ts"
    p1.write_text(serialize_ts(ts1))
    p2.write_text(serialize_ts(ts2))
    assert run(["refine-check", str(p1), str(p2), "--new-actions", "tau"]) == 0
    capsys.readouterr()
    # overlapping action classes are rejected as an input problem
    assert run(["refine-check", str(p1), str(p2), "--new-actions", "go"]) == 1


def test_reports_byte_identical(tmp_path):
    ok = str(CORPUS_DIR / "cegar_d_loop.mil")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["check", ok, "--report", str(a)])
    run(["check", ok, "--report", str(b)])
    assert a.read_bytes() == b.read_bytes()
