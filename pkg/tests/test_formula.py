import pytest
from hypothesis import assume, given, strategies as st

from mlms.formula import (
    And,
    ArityMismatch,
    Atom,
    Box,
    BoxX,
    DiaX,
    Eq,
    EqualityNotSupported,
    Not,
    Or,
    binders,
    formula_size,
    free_vars,
    fresh_var,
    is_admissible,
    is_clean,
    is_pnf,
    modal_depth,
    reletter_clean,
    signature,
    sort_vars,
    substitute,
    to_pnf,
)
from mlms.kripke import mc
from mlms.syntax import parse_formula as p

from conftest import VARS, formulas, pointed


def test_size_and_depth_of_figure_formula():
    phi = p("K[x](P(x) | Q(x)) & D[y]~Q(y) & ~P(z)")
    # And(And(K[x] Or(P,Q), D[y] Not Q), Not P): 2 + 4 + 3 + 2
    assert formula_size(phi) == 11
    assert modal_depth(phi) == 1
    assert free_vars(phi) == {"z"}


def test_free_vars_respect_binders():
    assert free_vars(p("K[x] R(x, y)")) == {"y"}
    assert free_vars(p("K[x] P(x) & P(x)")) == {"x"}
    assert free_vars(p("x = y")) == {"x", "y"}


def test_signature_clash():
    with pytest.raises(ArityMismatch):
        signature(And(Atom("P", ("x",)), Atom("P", ("x", "y"))))


def test_fresh_names_sort_after_plain_names():
    assert sort_vars(["_v10", "z", "_v2", "a"]) == ["a", "z", "_v2", "_v10"]
    assert fresh_var({"_v0", "_v1"}) == "_v2"


def test_substitution_stops_at_binder():
    phi = p("P(x) & K[x] P(x)")
    assert substitute(phi, "x", "y") == p("P(y) & K[x] P(x)")


def test_admissibility():
    assert not is_admissible(p("K[y] R(x, y)"), "x", "y")
    assert is_admissible(p("K[y] R(z, y) & P(x)"), "x", "y")
    assert is_admissible(p("K[x] K[y] R(x, y)"), "x", "y")


def test_pnf_examples():
    assert to_pnf(p("~(K[x]P(x) -> D[y]Q(y))")) == p("K[x] P(x) & K[y] ~Q(y)")
    assert to_pnf(p("~K P(x)")) == DiaX("_v0", Not(Atom("P", ("x",))))
    with pytest.raises(EqualityNotSupported):
        to_pnf(p("x = y"))


def test_reletter_example():
    assert reletter_clean(p("K[x]P(x) & K[x]Q(x)")) == p("K[x] P(x) & K[_v0] Q(_v0)")
    assert reletter_clean(p("P(x) & K[x] P(x)")) == p("P(x) & K[_v0] P(_v0)")


@given(formulas(), st.sampled_from(VARS), st.sampled_from(VARS))
def test_substitution_has_no_effect_when_absent(phi, x, y):
    assume(x not in free_vars(phi))
    assert substitute(phi, x, y) == phi


@given(formulas(), st.sampled_from(VARS), st.sampled_from(VARS), pointed())
def test_substitution_lemma(phi, x, y, pw):
    assume(is_admissible(phi, x, y))
    m, w, s = pw
    shifted = {**s, x: s[y]}
    assert mc(m, w, s, substitute(phi, x, y)) == mc(m, w, shifted, phi)


@given(formulas(equality=False))
def test_pnf_shape(phi):
    q = to_pnf(phi)
    assert is_pnf(q)
    assert to_pnf(q) == q
    assert formula_size(q) <= 2 * formula_size(phi)
    assert free_vars(q) == free_vars(phi)


@given(formulas(equality=False), pointed())
def test_pnf_preserves_truth(phi, pw):
    m, w, s = pw
    assert mc(m, w, s, to_pnf(phi)) == mc(m, w, s, phi)


@given(formulas())
def test_reletter_is_clean_and_size_preserving(phi):
    c = reletter_clean(phi)
    assert is_clean(c)
    assert formula_size(c) == formula_size(phi)
    assert free_vars(c) == free_vars(phi)
    assert len(binders(c)) == len(binders(phi))


@given(formulas(), pointed())
def test_reletter_preserves_truth(phi, pw):
    m, w, s = pw
    assert mc(m, w, s, reletter_clean(phi)) == mc(m, w, s, phi)


@given(formulas())
def test_clean_formulas_are_fixed(phi):
    c = reletter_clean(phi)
    assert reletter_clean(c) == c


def test_nodes_are_hashable_values():
    a = BoxX("x", Or(Atom("P", ("x",)), Box(Eq("x", "y"))))
    b = BoxX("x", Or(Atom("P", ("x",)), Box(Eq("x", "y"))))
    assert a == b and hash(a) == hash(b)
    assert len({a, b}) == 1
