import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from mlms.formula import And, Atom, Box, BoxX, DiaX, Eq, Implies, Not, Or
from mlms.gen import GenConfig, gen_model
from mlms.harness import gallery_pairs
from mlms.search import FrameClass

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

GALLERY = Path(__file__).resolve().parent.parent / "src" / "mlms" / "gallery"

VARS = ("x", "y", "z")


def formulas(equality=True, max_leaves=8, preds=(("P", 1), ("Q", 1), ("R", 2), ("p", 0))):
    var = st.sampled_from(VARS)

    def atom(pa):
        p, n = pa
        return st.tuples(*[var] * n).map(lambda args: Atom(p, args)) if n else st.just(Atom(p))

    leaves = st.one_of(*[atom(pa) for pa in preds])
    if equality:
        leaves = leaves | st.builds(Eq, var, var)

    def extend(sub):
        return st.one_of(
            st.builds(Not, sub),
            st.builds(And, sub, sub),
            st.builds(Or, sub, sub),
            st.builds(Implies, sub, sub),
            st.builds(Box, sub),
            st.builds(BoxX, var, sub),
            st.builds(DiaX, var, sub),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


@st.composite
def models(draw, frame=FrameClass.ARBITRARY, max_worlds=3, max_objects=3):
    seed = draw(st.integers(0, 2**32 - 1))
    cfg = GenConfig(seed=seed, max_worlds=max_worlds, max_objects=max_objects, frame=frame)
    return gen_model(cfg, random.Random(seed))


@st.composite
def pointed(draw, frame=FrameClass.ARBITRARY):
    """A model, a world and an assignment of x, y, z."""
    m = draw(models(frame))
    w = draw(st.sampled_from(m.worlds))
    sigma = {x: draw(st.sampled_from(m.domain)) for x in VARS}
    return m, w, sigma


@pytest.fixture(scope="session")
def example_pair():
    (m, w), (n, s) = gallery_pairs()[0]
    return m, w, n, s


@pytest.fixture(scope="session")
def second_pair():
    (m, w), (n, s) = gallery_pairs()[1]
    return m, w, n, s


# one line per acceptance criterion, repeated in the terminal summary

ACCEPTANCE_LINES: list[str] = []


def record(n: int, ok: bool, detail: str) -> str:
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
