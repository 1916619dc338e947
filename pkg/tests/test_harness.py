import json

import pytest

from mlms.harness import (
    CHECKS,
    SUITES,
    SuiteReport,
    Failure,
    check_invariance,
    dump_failures,
    make_cases,
    gallery_pairs,
    replay,
    run_suite,
)
from mlms.syntax import model_to_dict


@pytest.mark.parametrize("name", ["pnf", "translation", "s5-equivalences", "bisim-invariance"])
def test_small_suites_pass(name):
    rep = run_suite(name, cases=30, seed=5)
    assert rep.ok, rep.failures[:3]
    assert rep.passed == rep.cases > 0


def test_tableau_suite_oracle_and_memory_checks():
    rep = run_suite("tableau-vs-oracle", cases=40, seed=2)
    assert rep.stats["failed[tableau-oracle]"] == 0
    assert rep.stats["failed[live-nodes]"] == 0


def test_cases_are_seeded():
    for name in SUITES:
        if name == "proofs":
            continue
        assert make_cases(name, 5, 9) == make_cases(name, 5, 9)
    assert make_cases("pnf", 5, 1) != make_cases("pnf", 5, 2)


def test_workers_give_same_report():
    a = run_suite("translation", cases=24, seed=1)
    b = run_suite("translation", cases=24, seed=1, workers=2)
    assert (a.cases, a.passed, a.stats) == (b.cases, b.passed, b.stats)


def _separated_case():
    (m, w), _ = gallery_pairs()[0]
    _, (n, s) = gallery_pairs()[1]
    return {
        "model_a": model_to_dict(m),
        "world_a": w,
        "model_b": model_to_dict(n),
        "world_b": s,
        "formulas": ["D[x] P(x)"],
        "skip_bisim": True,
    }


def test_invariance_check_reports_separating_formula():
    assert check_invariance(_separated_case()) == "D[x] P(x) separates the points"


def test_dump_and_replay(tmp_path):
    case = _separated_case()
    msg = CHECKS["invariance"](case)
    rep = SuiteReport("bisim-invariance", cases=1, failures=[Failure(0, "invariance", msg, case)])
    paths = dump_failures(rep, tmp_path)
    assert len(paths) == 1
    data = json.loads(paths[0].read_text())
    assert data["check"] == "invariance" and data["detail"] == msg
    assert replay(paths[0]) == msg


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope")


def test_proof_suite_cases_cover_every_line():
    cases = make_cases("proofs", 0, 0)
    mutants = [c for c in cases if c["mode"] == "mutate"]
    assert len({c["script"] for c in cases}) == 20
    assert len(mutants) > 100
