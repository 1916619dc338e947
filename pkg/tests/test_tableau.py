import time

import pytest
from hypothesis import given, settings

from mlms.formula import EqualityNotSupported, formula_size
from mlms.kripke import is_increasing, mc
from mlms.search import bounded_search
from mlms.syntax import parse_formula as p
from mlms.tableau import (
    LIVE_NODE_FACTOR,
    NotOpen,
    Sat,
    Unsat,
    decide_sat,
    extract_model,
    format_tableau,
    iter_worlds,
    prepare,
    tree_depth,
)

from conftest import formulas

FIGURE = "K[x](P(x) | Q(x)) & D[y]~Q(y) & ~P(z)"

FIGURE_TREE = """\
w: {□ˣ(Px ∨ Qx) ∧ ◇ʸ¬Qy ∧ ¬Pz}, {(z,z)}    (∧)×2
  w: {□ˣ(Px ∨ Qx), ◇ʸ¬Qy, ¬Pz}, {(z,z)}    (BR)
    wv^x_y: {Px ∨ Qx, ¬Qx}, {(x,x), (z,z)}    (∨)
      wv^x_y: {Px, ¬Qx}, {(x,x), (z,z)}
    wv^z_y: {Px ∨ Qx, ¬Qz}, {(x,x), (z,z)}    (∨)
      wv^z_y: {Qx, ¬Qz}, {(x,x), (z,z)}
"""


def test_figure_tableau():
    t0 = time.perf_counter()
    res = decide_sat(p(FIGURE), full_tableau=True)
    assert isinstance(res, Sat)
    assert format_tableau(res) == FIGURE_TREE
    assert time.perf_counter() - t0 < 1.0


def test_figure_countermodel():
    m, root, sigma = extract_model(decide_sat(p(FIGURE)))
    assert root == "w" and sigma == {"z": "z"}
    assert set(m.worlds) == {"w", "wv^x_y", "wv^z_y"}
    assert m.delta["w"] == {"x", "z"}
    assert m.extension("P", "wv^x_y") == {("x",)}
    assert m.extension("Q", "wv^z_y") == {("x",)}
    assert mc(m, root, sigma, p(FIGURE))


def test_left_first_gives_other_leaves():
    res = decide_sat(p(FIGURE), full_tableau=True, right_first=False)
    assert res
    leaves = format_tableau(res).splitlines()
    assert leaves[-1].strip() == "wv^z_y: {Px, ¬Qz}, {(x,x), (z,z)}"


@pytest.mark.parametrize(
    "text, sat",
    [
        ("K[x] P(x) & D[y] ~P(y)", False),
        ("K[x] P(x) & K[y] ~P(y)", True),
        ("P(x) & ~P(x)", False),
        ("K[x] (P(x) & ~P(x))", True),
        ("K[x] (P(x) & ~P(x)) & D[y] p", False),
        ("D[x] P(x) & D[y] ~P(y)", True),
        ("K p & D[x] ~p", False),
        ("K[x] K[y] R(x, y) & ~R(z, z)", True),
    ],
)
def test_verdicts(text, sat):
    res = decide_sat(p(text))
    assert bool(res) is sat
    assert isinstance(res, Sat if sat else Unsat)
    assert bool(bounded_search(p(text), 8, 4)) is sat


def test_reserved_root_variable():
    theta, root = prepare(p("K[x] P(x)"))
    assert root.sigma == {"z"}
    _, root = prepare(p("K[z] P(z)"))
    assert root.sigma == {"_v0"}
    _, root = prepare(p("P(y)"))
    assert root.sigma == {"y"}


def test_unsupported_and_closed_cases():
    with pytest.raises(EqualityNotSupported):
        decide_sat(p("x = y"))
    with pytest.raises(NotOpen):
        extract_model(decide_sat(p("P(x) & ~P(x)")))


def test_verdict_only_mode_keeps_no_tree():
    res = decide_sat(p(FIGURE), keep_model=False)
    assert res and res.tableau.root.kind == "verdict-only"


@given(formulas(equality=False, max_leaves=6))
@settings(max_examples=80)
def test_agrees_with_bounded_search(phi):
    assert bool(decide_sat(phi)) == bool(bounded_search(phi, 64, 7))


@given(formulas(equality=False, max_leaves=6))
@settings(max_examples=80)
def test_disjunct_order_does_not_change_verdict(phi):
    assert bool(decide_sat(phi)) == bool(decide_sat(phi, right_first=False))


@given(formulas(equality=False))
def test_extracted_model(phi):
    res = decide_sat(phi)
    if not res:
        return
    m, root, sigma = extract_model(res)
    assert is_increasing(m)
    assert all(m.delta[w] for w in m.worlds)
    assert tree_depth(res.tableau.root) <= 2 * formula_size(phi)
    assert mc(m, root, sigma, phi)


@given(formulas(equality=False, preds=(("P", 1), ("Q", 1), ("p", 0))))
def test_extracted_domain_bound_for_monadic_formulas(phi):
    res = decide_sat(phi)
    if res:
        m, _, _ = extract_model(res)
        assert len(m.domain) <= formula_size(phi)


@given(formulas(equality=False))
def test_live_nodes_linear(phi):
    for keep in (True, False):
        res = decide_sat(phi, keep_model=keep)
        assert res.tableau.stats.max_live <= LIVE_NODE_FACTOR * formula_size(phi)


@given(formulas(equality=False))
def test_world_labels_are_unique(phi):
    res = decide_sat(phi)
    if res:
        labels = [rec.last.label for rec in iter_worlds(res.tableau.root)]
        assert len(labels) == len(set(labels))
