import pytest

from conftest import load_fixture

from sill import cp, hcp, surface
from sill import types as ty
from sill.surface import ParseError, parse_file, parse_term, parse_type, print_term
from sill.types import BOT, ONE, Par, Tensor


def test_parse_type_examples():
    assert parse_type("1 * bot") == Tensor(ONE, BOT)
    assert parse_type("~(1 * bot)") == Par(BOT, ONE)


def test_mixed_additive_level_rejected():
    with pytest.raises(ParseError):
        parse_type("1 + 1 & top")


def test_mixed_multiplicative_level_rejected():
    with pytest.raises(ParseError):
        parse_type("1 * bot par 1")
    assert parse_type("1 * (bot par 1)") == Tensor(ONE, Par(BOT, ONE))


def test_binary_operators_right_associative():
    assert parse_type("1 * bot * 1") == Tensor(ONE, Tensor(BOT, ONE))
    assert parse_type("(1 * bot) * 1") == Tensor(Tensor(ONE, BOT), ONE)


def test_parse_cp_cut():
    term = parse_term("new x:1 (x[].0 | x().w[].0)", "cp")
    assert isinstance(term, cp.Cut) and term.ty == ONE
    assert isinstance(term.left, cp.Halt) and isinstance(term.right, cp.Wait)


def test_cp_output_requires_pair_body():
    with pytest.raises(ParseError) as e:
        parse_term("x[y].P", "cp")
    assert "(P | Q)" in str(e.value)


def test_cp_rejects_bare_parallel_and_inert():
    with pytest.raises(ParseError):
        parse_term("(x[].0 | y[].0)", "cp")
    with pytest.raises(ParseError):
        parse_term("0", "cp")


def test_hcp_selflock_parses():
    term = parse_term("new x:bot. (x().x[].0 | 0)", "hcp")
    assert isinstance(term, hcp.New)


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as e:
        parse_file("proc Broken : w:1 = new x:1 (x[].0 | )\n")
    assert e.value.loc.line == 1
    assert e.value.loc.col > 30


def test_lexer_rejects_unknown_character():
    with pytest.raises(ParseError):
        parse_type("1 @ bot")


def test_duplicate_declaration_rejected():
    with pytest.raises(ParseError):
        parse_file("proc A : w:1 = w[].0\nproc A : v:1 = v[].0\n")


def test_duplicate_env_name_rejected():
    with pytest.raises(ParseError):
        parse_file("proc A : w:1, w:bot = w[].0\n")


def test_roundtrip_corpus():
    f = load_fixture("corpus.sill")
    for d in f.decls:
        printed = print_term(d.term)
        again = parse_term(printed, d.dialect)
        eq = cp.alpha_eq if d.dialect == "cp" else hcp.alpha_eq
        assert eq(d.term, again), d.name


def test_roundtrip_counterexample_fixture():
    f = load_fixture("with_counterexample.sill")
    d = f.decls[0]
    printed = print_term(d.term)
    assert hcp.alpha_eq(d.term, parse_term(printed, "hcp"))


def test_file_roundtrip():
    f = load_fixture("corpus.sill")
    printed = surface.print_file(f)
    again = parse_file(printed)
    assert [d.name for d in again.decls] == [d.name for d in f.decls]
    for d1, d2 in zip(f.decls, again.decls):
        assert d1.dialect == d2.dialect
        assert surface.print_env(d1.env) == surface.print_env(d2.env)
        eq = cp.alpha_eq if d1.dialect == "cp" else hcp.alpha_eq
        assert eq(d1.term, d2.term)


def test_printer_renames_captured_binders():
    # substitution can move a free name under a binder of the same spelling;
    # printing must not let the reparse capture it
    from sill.names import Name
    from sill.types import ONE

    w_free = Name("w", 7001)
    binder = Name("w", 7002)
    term = cp.Cut(binder, ONE, cp.Halt(binder), cp.Wait(binder, cp.Halt(w_free)))
    printed = print_term(term)
    again = parse_term(printed, "cp")
    assert cp.alpha_eq(term, again)
    assert "w1" in printed  # the binder got a fresh spelling, the free name kept its own


def test_comments_and_whitespace():
    f = parse_file("-- a comment\nproc A : w:1 = w[].0  -- trailing\n\n")
    assert f.decls[0].name == "A"


def test_print_env_and_partition():
    f = load_fixture("unit_cut.sill")
    d = f.decls[0]
    assert surface.print_env(d.env) == "w:1"
    assert surface.print_hyper_env([d.env, d.env]) == "w:1 | w:1"
    assert surface.print_hyper_env([]) == "·"
