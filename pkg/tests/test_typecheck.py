import pytest

from conftest import load_fixture

from sill import cp, hcp, surface
from sill import types as ty
from sill.names import Name
from sill.surface import parse_term, parse_type
from sill.typecheck import (Derivation, TypeCheckError, check_cp, check_hcp,
                            hyper_eq, revalidate)
from sill.types import BOT, ONE, TOP, Tensor, dual


def env_of(src: str) -> dict:
    f = surface.parse_file(f"proc T : {src} = t<->t_\n" if src else "proc T : = t<->t_\n")
    return f.decls[0].env


def check_src(term_src: str, env_src: str, dialect: str = "cp", **kw):
    decl_kw = "proc" if dialect == "cp" else "hproc"
    f = surface.parse_file(f"{decl_kw} T : {env_src} = {term_src}\n")
    d = f.decls[0]
    if dialect == "cp":
        return check_cp(d.term, d.env), None
    return check_hcp(d.term, d.env, **kw)


def err_of(term_src: str, env_src: str, dialect: str = "cp", **kw) -> TypeCheckError:
    with pytest.raises(TypeCheckError) as e:
        check_src(term_src, env_src, dialect, **kw)
    return e.value


# -- CP -----------------------------------------------------------------------


def test_ax_on_dual_endpoints():
    d, _ = check_src("x<->y", "x:bot, y:1")
    assert d.rule == "Ax" and revalidate(d)


def test_ax_rejects_non_dual():
    assert err_of("x<->y", "x:1, y:1").kind == "TypeMismatch"


def test_halt_leaf():
    d, _ = check_src("x[].0", "x:1")
    assert d.rule == "1" and not d.premises


def test_halt_with_leftover_is_unused_linear():
    e = err_of("x[].0", "x:1, z:1")
    assert e.kind == "UnusedLinear" and e.name.surface == "z"


def test_composite_send_recv_derivation():
    d, _ = check_src(
        "new x:1*1 (x[y].(y[].0 | x[].0) | x(y).y().x().w[].0)", "w:1")
    rules = set()

    def walk(n):
        rules.add(n.rule)
        for c in n.premises:
            walk(c)

    walk(d)
    assert {"Cut", "⊗", "⅋", "1", "⊥"} <= rules
    assert revalidate(d)


def test_absurd_consumes_remainder():
    d, _ = check_src("g?{}", "g:top, extra:1 * 1")
    assert d.rule == "⊤" and revalidate(d)


def test_split_conflict():
    # w occurs free in both branches of the cut
    w, x, v = Name("w", 8001), Name("x", 8002), Name("v", 8003)
    bad = cp.Cut(x, ONE, cp.Wait(w, cp.Halt(x)), cp.Wait(x, cp.Wait(w, cp.Halt(v))))
    with pytest.raises(TypeCheckError) as e:
        check_cp(bad, {w: BOT, v: ONE})
    assert e.value.kind == "SplitConflict"


def test_unknown_name():
    assert err_of("x[].0", "w:1").kind == "UnknownName"


def test_wrong_constructor_for_type():
    e = err_of("x().w[].0", "x:1, w:1")
    assert e.kind == "TypeMismatch" and e.actual == "1"


# -- HCP ----------------------------------------------------------------------


def test_hmix_partition():
    _, part = check_src("(x[].0 | w[].0)", "x:1, w:1", "hcp")
    assert [sorted(n.surface for n in e) for e in part] == [["x"], ["w"]]
    assert [list(e.values()) for e in part] == [[ONE], [ONE]]


def test_translated_cut_is_single_sequent():
    d, part = check_src("new x:bot. (x().w[].0 | x[].0)", "w:1", "hcp")
    assert len(part) == 1 and [n.surface for n in part[0]] == ["w"]
    assert revalidate(d)


def test_selflock_rejected():
    e = err_of("new x:bot. (x().x[].0 | 0)", "", "hcp")
    assert e.kind == "SelfLock" and e.name.surface == "x"


def test_selflock_guarded_parallel_rejected():
    # the other endpoint hides inside the waited-on continuation
    e = err_of("new x:bot. (x().(x[].0 | b[].0) | b_dummy<->b2)", "b:1, b_dummy:1, b2:bot", "hcp")
    assert e.kind == "SelfLock"


def test_hyper_context_forbidden_on_offer():
    f = load_fixture("with_counterexample.sill")
    d = f.decls[0]
    with pytest.raises(TypeCheckError) as e:
        check_hcp(d.term, d.env)
    assert e.value.kind == "HyperContextForbidden"


def test_counterexample_typechecks_under_liberal_offer():
    f = load_fixture("with_counterexample.sill")
    d = f.decls[0]
    deriv, part = check_hcp(d.term, d.env, allow_hyper_with=True)
    assert sorted(surface.print_env(e) for e in part) == ["w:1", "z:1"]


def test_selflock_typechecks_under_mutation():
    f = load_fixture("selflock.sill")
    d = f.decls[0]
    deriv, part = check_hcp(d.term, d.env, allow_self_lock=True)
    assert part is not None


def test_wait_needs_a_component():
    e = err_of("x().0", "x:bot", "hcp")
    assert e.kind == "TypeMismatch"


def test_link_under_restriction():
    d, part = check_src("new x:1. (x<->w | x().v[].0)", "w:bot, v:1", "hcp")
    assert revalidate(d)


def test_flex_flex_link_chain():
    # both link endpoints restricted; polarity resolved through the chain
    d, part = check_src(
        "new x:1. (new y:1. (x<->y | y().v[].0) | x[].0)", "v:1", "hcp")
    assert revalidate(d)
    assert [n.surface for n in part[0]] == ["v"]


def test_unconstrained_polarity_resolved_at_finalize():
    # a sibling constraint arrives after the restriction is resolved
    d, part = check_src(
        "new c35:bot. (new c36:bot. (c33<->c36 | c35<->c36) | c34().c35[].0)",
        "c33:1, c34:bot", "hcp")
    assert revalidate(d)


def test_unit_output_carries_parallel_continuation():
    # the unit rule concludes G | x:1, so the continuation runs alongside
    d, part = check_src("x[].w[].0", "x:1, w:1", "hcp")
    assert sorted(surface.print_env(e) for e in part) == ["w:1", "x:1"]
    assert revalidate(d)


def test_restriction_used_once_rejected():
    e = err_of("new x:1. (x[].0 | w[].0)", "w:1", "hcp")
    assert e.kind == "UnusedLinear" and e.name.surface == "x"


def test_name_reuse_two_components():
    e = err_of("(x[].0 | x[].0)", "x:1", "hcp")
    assert e.kind == "NameReuse"


def test_output_needs_independent_components():
    e = err_of("x[y].y().x[].0", "x:bot * 1", "hcp")
    assert e.kind == "SplitConflict"


def test_input_needs_shared_component():
    e = err_of("x(y).(y().v[].0 | x[].0)", "x:bot par 1, v:1", "hcp")
    assert e.kind == "SplitConflict"


# -- revalidate ---------------------------------------------------------------


def test_revalidate_detects_corruption():
    d, _ = check_src("new x:1 (x[].0 | x().w[].0)", "w:1")
    assert revalidate(d)
    corrupted = Derivation(d.rule, d.term, {Name("w", 1): BOT}, d.premises)
    assert not revalidate(corrupted)


def test_revalidate_hcp_corruption():
    (d, part) = check_src("(x[].0 | w[].0)", "x:1, w:1", "hcp")[0:2]
    bad = Derivation(d.rule, d.term, [part[0]], d.premises)
    assert not revalidate(bad)


def test_derivation_rendering():
    from sill.typecheck import derivation_json_lines, render_derivation

    d, _ = check_src("new x:1 (x[].0 | x().w[].0)", "w:1")
    text = render_derivation(d)
    assert "Cut" in text and "⊢" in text
    recs = derivation_json_lines(d)
    assert recs[0]["rule"] == "Cut" and recs[0]["children"] == 2
