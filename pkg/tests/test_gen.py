import random

import pytest
from hypothesis import given, strategies as st

from mlms.formula import formula_size, free_vars, has_equality, modal_depth
from mlms.gen import (
    GenConfig,
    disjoint_union,
    duplicate_world,
    gen_formula,
    gen_formula_of_size,
    gen_model,
    rename,
    sat_workload,
)
from mlms.kripke import is_increasing, is_s5, mc
from mlms.search import FrameClass

from conftest import formulas

seeds = st.integers(0, 2**31)


@given(seeds)
def test_same_seed_same_output(seed):
    cfg = GenConfig(seed=seed)
    assert gen_formula(cfg) == gen_formula(cfg)
    assert gen_model(cfg) == gen_model(cfg)


@given(seeds, st.integers(1, 12))
def test_exact_size(seed, n):
    assert formula_size(gen_formula_of_size(GenConfig(seed=seed), n)) == n


@given(seeds, st.integers(1, 4))
def test_depth_and_closure(seed, depth):
    cfg = GenConfig(seed=seed, max_depth=depth, closed=True)
    phi = gen_formula(cfg)
    assert modal_depth(phi) <= depth
    assert not free_vars(phi)
    assert not has_equality(phi)


@given(seeds, st.sampled_from(list(FrameClass)))
def test_models_respect_frame(seed, frame):
    m = gen_model(GenConfig(seed=seed, frame=frame))
    assert is_increasing(m)
    if frame is FrameClass.S5:
        assert is_s5(m)


def test_bad_config():
    with pytest.raises(ValueError):
        GenConfig(var_pool=0)
    with pytest.raises(ValueError):
        GenConfig(var_pool=99)
    with pytest.raises(ValueError):
        gen_formula_of_size(GenConfig(), 0)


@given(seeds, formulas())
def test_structure_operations_preserve_truth(seed, phi):
    rng = random.Random(seed)
    m = gen_model(GenConfig(seed=seed), rng)
    w = rng.choice(m.worlds)
    s = {x: rng.choice(m.domain) for x in ("x", "y", "z")}
    truth = mc(m, w, s, phi)
    wmap = {v: f"r{v}" for v in m.worlds}
    omap = {a: f"o{a}" for a in m.domain}
    r = rename(m, wmap, omap)
    assert mc(r, wmap[w], {x: omap[a] for x, a in s.items()}, phi) == truth
    d = duplicate_world(m, w, "copy")
    assert mc(d, w, s, phi) == truth and mc(d, "copy", s, phi) == truth
    u = disjoint_union(m, m)
    assert mc(u, w, s, phi) == truth


def test_sat_workload():
    fs = sat_workload(200, 7, seed=3)
    assert len(fs) == 200
    assert all(formula_size(f) <= 7 and not has_equality(f) for f in fs)
    assert fs == sat_workload(200, 7, seed=3)
