from hypothesis import given
from hypothesis import strategies as st

from sill import cp, harness, hcp, surface
from sill.names import Name
from sill.translate import cp_to_hcp
from sill.types import ONE


def t(src, dialect="cp"):
    return surface.parse_term(src, dialect)


def test_free_names_link():
    term = t("x<->y")
    assert {n.surface for n in cp.free_names(term)} == {"x", "y"}


def test_free_names_cut_binds_both_branches():
    term = t("new x:1 (x[].0 | x().w[].0)")
    assert {n.surface for n in cp.free_names(term)} == {"w"}


def test_free_names_send_payload_bound():
    # the fresh payload name is bound in the payload only
    term = t("x[y].(y[].0 | x[].0)")
    assert {n.surface for n in cp.free_names(term)} == {"x"}


def test_substitute_subject():
    x, z, w = Name("x", 9001), Name("z", 9002), Name("w", 9003)
    term = cp.Wait(x, cp.Halt(z))
    out = cp.substitute(term, w, x)
    assert out == cp.Wait(w, cp.Halt(z))


def test_substitute_bound_name_is_identity():
    term = t("new x:1 (x[].0 | x().w[].0)")
    x = term.x
    w = Name("fresh_w", 9100)
    assert cp.substitute(term, w, x) == term


def test_substitute_renames_colliding_binder():
    # binder spelled and identified exactly as the incoming name: it must be
    # renamed first; reference answer substitutes on a pre-freshened term
    x, w = Name("x", 9201), Name("w", 9202)
    body = cp.Cut(w, ONE, cp.Halt(w), cp.Wait(w, cp.Halt(x)))
    got = cp.substitute(body, w, x)
    freshened = cp.Cut(Name("w", 9999), ONE, cp.Halt(Name("w", 9999)),
                       cp.Wait(Name("w", 9999), cp.Halt(x)))
    want = cp.substitute(freshened, w, x)
    assert cp.alpha_eq(got, want)


@given(st.integers(0, 60))
def test_substitute_noop_when_not_free(i):
    cfg = harness.GenConfig(seed=5, count=1)
    term, env, _ = harness.gen_cp(cfg, i)
    w, x = Name("w", 1), Name("nowhere", 2)
    assert x not in cp.free_names(term)
    assert cp.substitute(term, w, x) == term


def test_alpha_eq_is_equivalence_on_corpus():
    cfg = harness.GenConfig(seed=6, count=1)
    terms = [harness.gen_cp(cfg, i)[0] for i in range(10)]
    for a in terms:
        assert cp.alpha_eq(a, a)
    renamed = [cp.freshen_if_needed(a) for a in terms]
    for a, b in zip(terms, renamed):
        assert cp.alpha_eq(a, b) and cp.alpha_eq(b, a)


def test_alpha_key_identifies_alpha_classes():
    a = t("new x:1 (x[].0 | x().w[].0)")
    b = t("new q:1 (q[].0 | q().w[].0)")
    c = t("new x:1 (x[].0 | x().v[].0)")
    assert cp.alpha_key(a) == cp.alpha_key(b)
    assert cp.alpha_key(a) != cp.alpha_key(c)
    assert cp.alpha_eq(a, b) and not cp.alpha_eq(a, c)


def test_translation_clauses():
    assert hcp.alpha_eq(cp_to_hcp(t("x<->y")), t("x<->y", "hcp"))
    halt = t("x[].0")
    assert cp_to_hcp(halt) == hcp.OutUnit(halt.x, hcp.Inert())
    got = cp_to_hcp(t("new x:1 (x[].0 | x().w[].0)"))
    want = t("new x:1. (x[].0 | x().w[].0)", "hcp")
    assert hcp.alpha_eq(got, want)


def test_translation_preserves_free_names():
    cfg = harness.GenConfig(seed=7, count=1)
    for i in range(25):
        term, env, _ = harness.gen_cp(cfg, i)
        assert hcp.free_names(cp_to_hcp(term)) == cp.free_names(term)


def test_freshen_if_needed_keeps_clean_terms():
    term = t("new x:1 (x[].0 | x().w[].0)")
    assert cp.freshen_if_needed(term) is term


def test_freshen_if_needed_is_stable():
    x, w = Name("x", 9301), Name("w", 9302)
    dup = cp.Cut(x, ONE, cp.Halt(x), cp.Wait(x, cp.Cut(x, ONE, cp.Halt(x), cp.Wait(x, cp.Halt(w)))))
    once = cp.freshen_if_needed(dup)
    twice = cp.freshen_if_needed(dup)
    assert once == twice
    assert cp.alpha_eq(once, dup)
