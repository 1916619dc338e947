import pytest
from hypothesis import given, settings

from mlms.formula import Not
from mlms.kripke import is_increasing, is_s5, mc
from mlms.search import FrameClass, Found, NotFoundWithinBounds, bounded_search
from mlms.syntax import parse_formula as p

from conftest import formulas


def test_contradiction_has_no_model():
    res = bounded_search(p("P(x) & ~P(x)"), 3, 3)
    assert isinstance(res, NotFoundWithinBounds) and not res


def test_mention_some_needs_a_common_witness():
    res = bounded_search(p("K (P(x) | P(y)) & ~K[z] P(z)"), 3, 2)
    assert isinstance(res, Found)
    assert len(res.model.worlds) >= 2 and len(res.model.domain) == 2


def test_k_schema_countermodel_size():
    # K[x](P(x) -> Q(x)) -> (K[x] P(x) -> K[x] Q(x)) is not valid
    bad = Not(p("K[x](P(x) -> Q(x)) -> (K[x] P(x) -> K[x] Q(x))"))
    assert not bounded_search(bad, 1, 1, FrameClass.S5)
    found = bounded_search(bad, 1, 2, FrameClass.S5)
    assert found and is_s5(found.model)


def test_bad_arguments():
    with pytest.raises(ValueError):
        bounded_search(p("p"), 0, 1)
    with pytest.raises(ValueError):
        bounded_search(p("p"), 1, 1, engine="magic")


@given(formulas(max_leaves=4))
@settings(max_examples=40)
def test_engines_agree(phi):
    a = bounded_search(phi, 2, 2, engine="sat")
    b = bounded_search(phi, 2, 2, engine="enumerate")
    assert bool(a) == bool(b)


@given(formulas(max_leaves=4))
@settings(max_examples=40)
def test_engines_agree_on_s5(phi):
    a = bounded_search(phi, 2, 2, FrameClass.S5, engine="sat")
    b = bounded_search(phi, 2, 2, FrameClass.S5, engine="enumerate")
    assert bool(a) == bool(b)


@given(formulas())
def test_witnesses_are_models(phi):
    res = bounded_search(phi, 3, 3)
    if res:
        assert is_increasing(res.model)
        assert mc(res.model, res.world, res.sigma, phi)


@given(formulas())
def test_s5_witnesses(phi):
    res = bounded_search(phi, 3, 2, FrameClass.S5)
    if res:
        assert is_s5(res.model)
        assert mc(res.model, res.world, res.sigma, phi)
    # S5 models are increasing models, so a general model must exist too
    if res:
        assert bounded_search(phi, 3, 2)
