import json

import pytest

from conftest import fixture_path

from sill.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_check_unit_cut(capsys):
    code, out = run(capsys, "check", fixture_path("unit_cut.sill"))
    assert code == 0
    assert out == "⊢ Main : w:1\n"


def test_check_corpus_all_pass(capsys):
    code, out = run(capsys, "check", fixture_path("corpus.sill"))
    assert code == 0
    assert out.count("⊢") == len(out.splitlines())


def test_check_hproc_prints_partition(capsys):
    code, out = run(capsys, "check", fixture_path("corpus.sill"), "--proc", "Pair")
    assert code == 0
    assert out == "⊢ Pair : x:1 | w:1\n"


def test_check_selflock_fails_with_selflock(capsys):
    code, out = run(capsys, "check", fixture_path("selflock.sill"))
    assert code == 1
    assert "SelfLock" in out and "x" in out


def test_check_counterexample_fails_with_hyper(capsys):
    code, out = run(capsys, "check", fixture_path("with_counterexample.sill"))
    assert code == 1
    assert "HyperContextForbidden" in out


def test_check_json_error_records(capsys):
    code, out = run(capsys, "check", fixture_path("selflock.sill"), "--json")
    assert code == 1
    rec = json.loads(out.splitlines()[0])
    assert rec["kind"] == "SelfLock" and rec["name"] == "x"
    assert set(rec) >= {"kind", "name", "loc", "expected", "actual"}


def test_check_show_derivation(capsys):
    code, out = run(capsys, "check", fixture_path("unit_cut.sill"), "--show-derivation")
    assert code == 0
    assert "Cut: ⊢" in out


def test_reduce_trace(capsys):
    code, out = run(capsys, "reduce", fixture_path("tensor_unit.sill"), "--proc", "Main", "--trace")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 4
    assert lines[0].startswith("step 1: β⊗⅋ on x ⇒ ")
    assert lines[3].startswith("canonical after 3 steps: w[].0")


def test_reduce_json(capsys):
    code, out = run(capsys, "reduce", fixture_path("tensor_unit.sill"), "--proc", "Main", "--json")
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert [r["rule"] for r in recs[:-1]] == ["β⊗⅋", "β1⊥", "β1⊥"]
    assert recs[-1]["status"] == "canonical"


def test_reduce_is_byte_stable(capsys):
    _, a = run(capsys, "reduce", fixture_path("tensor_unit.sill"), "--proc", "Main", "--trace")
    _, b = run(capsys, "reduce", fixture_path("tensor_unit.sill"), "--proc", "Main", "--trace")
    assert a == b


def test_reduce_fuel_exhaustion_exit_code(capsys):
    code, out = run(capsys, "reduce", fixture_path("tensor_unit.sill"), "--proc", "Main", "--fuel", "1")
    assert code == 1
    assert "fuel-exhausted" in out


def test_graph_text_and_dot(capsys):
    code, out = run(capsys, "graph", fixture_path("tensor_unit.sill"), "--proc", "Main")
    assert code == 0
    assert "4 nodes, 3 edges, 1 terminal" in out
    code, dot = run(capsys, "graph", fixture_path("tensor_unit.sill"), "--proc", "Main", "--dot")
    assert code == 0
    assert dot.startswith("digraph reduction {") and "doublecircle" in dot


def test_reduce_hproc(capsys):
    code, out = run(capsys, "reduce", fixture_path("corpus.sill"), "--proc", "HUnitCut", "--trace")
    assert code == 0
    assert "β1⊥ on x" in out and "canonical after 1 steps" in out


def test_graph_json(capsys):
    code, out = run(capsys, "graph", fixture_path("unit_cut.sill"), "--proc", "Main", "--json")
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    nodes = [r for r in recs if "node" in r]
    edges = [r for r in recs if "edge" in r]
    assert len(nodes) == 2 and len(edges) == 1
    assert edges[0]["rule"] == "β1⊥"


def test_translate(capsys):
    code, out = run(capsys, "translate", fixture_path("unit_cut.sill"), "--proc", "Main")
    assert code == 0
    assert out == "new x:1. (x[].0 | x().w[].0)\n"


def test_translate_rejects_hproc(capsys):
    code, out = run(capsys, "translate", fixture_path("selflock.sill"), "--proc", "Bad")
    assert code == 2


def test_disentangle(capsys):
    code, out = run(capsys, "disentangle", fixture_path("corpus.sill"), "--proc", "Pair")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "⊢ x[].0 : x:1"
    assert lines[1] == "⊢ w[].0 : w:1"
    assert lines[2] == "recombined: (x[].0 | w[].0)"


def test_internalize(capsys):
    code, out = run(capsys, "internalize", fixture_path("corpus.sill"), "--proc", "Pair")
    assert code == 0
    assert out.startswith("⊢ ") and ": z:1 * 1" in out


def test_internalize_inert(capsys):
    code, out = run(capsys, "internalize", fixture_path("corpus.sill"), "--proc", "Inertial")
    assert code == 0
    assert ": z:1" in out and "[].0" in out


def test_fuzz_single_suite(capsys):
    code, out = run(capsys, "fuzz", "--suite", "progress", "--seed", "42", "--count", "10")
    assert code == 0
    assert "suite progress: 10/10 passed" in out


def test_fuzz_json(capsys):
    code, out = run(capsys, "fuzz", "--suite", "termination", "--seed", "42", "--count", "5", "--json")
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert recs[-1]["passed"] == 5


def test_fuzz_reports_byte_identical(capsys):
    _, a = run(capsys, "fuzz", "--suite", "translate-typing", "--seed", "9", "--count", "8")
    _, b = run(capsys, "fuzz", "--suite", "translate-typing", "--seed", "9", "--count", "8")
    assert a == b


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.sill"
    bad.write_text("proc Broken : w:1 = new x:1 (x[].0 | )\n")
    code, out = run(capsys, "check", str(bad))
    assert code == 2
    assert "syntax error" in out


def test_missing_proc_exit_code(capsys):
    code, out = run(capsys, "check", fixture_path("unit_cut.sill"), "--proc", "Nope")
    assert code == 2


def test_missing_file_exit_code(capsys):
    code, out = run(capsys, "check", "no_such_file.sill")
    assert code == 2
