import random
import time

import pytest
from hypothesis import given, settings, strategies as st

from mlms.bisim import (
    LengthMismatch,
    bisimilar,
    check_relation,
    game_bisimilar_bounded,
    piso,
    relation_failure,
)
from mlms.formula import Not
from mlms.gen import GenConfig, gen_formula, gen_pointed_pair
from mlms.kripke import KripkeModel, mc
from mlms.search import FrameClass
from mlms.syntax import parse_formula as p

from conftest import models

FIRST_Z = [
    (("w", ()), ("s", ())),
    (("v", ("a",)), ("t", ("c",))),
    (("u", ("b",)), ("t", ("c",))),
    (("v", ("b",)), ("r", ("c",))),
    (("u", ("a",)), ("r", ("c",))),
]

SECOND_Z = [
    (("w", ()), ("s", ())),
    (("u", ("a",)), ("t", ("c",))),
    (("v", ("b",)), ("t", ("c",))),
    (("u", ("b",)), ("t", ("c",))),
]


def test_example_relation(example_pair):
    m, w, n, s = example_pair
    t0 = time.perf_counter()
    assert check_relation(m, n, FIRST_Z)
    assert bisimilar(m, w, (), n, s, ())
    assert time.perf_counter() - t0 < 1.0


def test_second_relation(second_pair):
    m, w, n, s = second_pair
    assert check_relation(m, n, SECOND_Z)
    assert bisimilar(m, w, (), n, s, ())


def test_broken_relation_is_reported(example_pair):
    m, _, n, _ = example_pair
    # without (ua, rc) zig fails at the root for a
    z = FIRST_Z[:-1]
    assert not check_relation(m, n, z)
    assert relation_failure(m, n, z) == "zig fails at (w,[]) ~ (s,[]) for a"
    bad = FIRST_Z + [(("v", ("a",)), ("r", ("c",)))]
    assert "PISO" in relation_failure(m, n, bad)


def test_piso(example_pair):
    m, _, n, _ = example_pair
    assert piso(m, "v", ("a",), n, "t", ("c",))
    assert not piso(m, "v", ("a",), n, "r", ("c",))
    assert not piso(m, "w", ("a", "b"), n, "s", ("c", "c"))
    with pytest.raises(LengthMismatch):
        piso(m, "w", ("a",), n, "s", ())


def test_sequences_and_identity(example_pair):
    m, w, n, s = example_pair
    # M can pick an object other than a; N has only c
    one = bisimilar(m, w, ("a",), n, s, ("c",))
    assert not one and one.formula == p("K[y1] ~(y1 = x1)")
    assert mc(m, w, {"x1": "a"}, one.formula) and not mc(n, s, {"x1": "c"}, one.formula)
    res = bisimilar(m, w, ("a", "b"), n, s, ("c", "c"))
    assert not res
    assert res.formula == p("~(x1 = x2)")
    assert mc(m, w, {"x1": "a", "x2": "b"}, res.formula)
    assert not mc(n, s, {"x1": "c", "x2": "c"}, res.formula)


def test_distinguishing_formula_between_pairs(example_pair, second_pair):
    m, w, _, _ = example_pair
    _, _, n, s = second_pair
    res = bisimilar(m, w, (), n, s, ())
    assert not res
    assert mc(m, w, {}, res.formula) and not mc(n, s, {}, res.formula)


def test_dead_ends_and_domain_sizes():
    dead = KripkeModel.create(["w"], ["a", "b", "c"])
    tiny = KripkeModel.create(["s"], ["d"])
    assert bisimilar(dead, "w", (), tiny, "s", ())
    loop = KripkeModel.create(["s"], ["d"], [("s", "s")])
    res = bisimilar(dead, "w", (), loop, "s", ())
    assert not res
    assert mc(dead, "w", {}, res.formula) != mc(loop, "s", {}, res.formula)


@given(st.integers(0, 10**6), st.booleans())
@settings(max_examples=60)
def test_constructed_pairs_are_bisimilar(seed, s5):
    cfg = GenConfig(seed=seed, frame=FrameClass.S5 if s5 else FrameClass.ARBITRARY, closed=True, equality=True)
    rng = random.Random(seed)
    (m, w), (n, v) = gen_pointed_pair(cfg, rng)
    assert bisimilar(m, w, (), n, v, (), explain=False)
    for _ in range(10):
        phi = gen_formula(cfg, rng)
        assert mc(m, w, {}, phi) == mc(n, v, {}, phi)


@given(models(max_worlds=3, max_objects=2), models(max_worlds=3, max_objects=2), st.data())
@settings(max_examples=80)
def test_verdict_is_explained(m, n, data):
    w = data.draw(st.sampled_from(m.worlds))
    v = data.draw(st.sampled_from(n.worlds))
    k = data.draw(st.integers(0, 1))
    a = tuple(data.draw(st.sampled_from(m.domain)) for _ in range(k))
    b = tuple(data.draw(st.sampled_from(n.domain)) for _ in range(k))
    res = bisimilar(m, w, a, n, v, b)
    if res:
        # sound against the game on explicit sequences
        assert game_bisimilar_bounded(m, w, a, n, v, b, 2)
        assert res.start in res.relation
    else:
        xs = res.variables
        assert mc(m, w, dict(zip(xs, a)), res.formula)
        assert not mc(n, v, dict(zip(xs, b)), res.formula)


@given(models(max_worlds=3, max_objects=1), models(max_worlds=3, max_objects=1), st.data())
@settings(max_examples=80)
def test_matches_game_on_single_object_models(m, n, data):
    # with one object per model the explicit game stabilises within |W_M|*|W_N| rounds
    w = data.draw(st.sampled_from(m.worlds))
    v = data.draw(st.sampled_from(n.worlds))
    bound = len(m.worlds) * len(n.worlds) + 1
    assert bool(bisimilar(m, w, (), n, v, (), explain=False)) == game_bisimilar_bounded(m, w, (), n, v, (), bound)


@given(models(max_worlds=3, max_objects=2), st.data())
def test_reflexive(m, data):
    w = data.draw(st.sampled_from(m.worlds))
    a = (data.draw(st.sampled_from(m.domain)),)
    assert bisimilar(m, w, a, m, w, a)


@given(models(max_worlds=2, max_objects=2), models(max_worlds=2, max_objects=2), st.data())
def test_symmetric(m, n, data):
    w = data.draw(st.sampled_from(m.worlds))
    v = data.draw(st.sampled_from(n.worlds))
    assert bool(bisimilar(m, w, (), n, v, (), explain=False)) == bool(bisimilar(n, v, (), m, w, (), explain=False))


def test_negated_distinguishing_formula_flips(example_pair, second_pair):
    m, w, _, _ = example_pair
    _, _, n, s = second_pair
    phi = bisimilar(n, s, (), m, w, ()).formula
    assert mc(n, s, {}, phi) and mc(m, w, {}, Not(phi)) and not mc(m, w, {}, phi)
