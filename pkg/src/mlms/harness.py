"""Cross-checking suites that tie the modules together.

Every case is a JSON-serialisable dict and every property is a named check
taking such a dict, so a failing case can be written to disk and replayed
later with exactly the same inputs.
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .bisim import bisimilar
from .fol import fo_eval
from .formula import (
    BoxX,
    DiaX,
    Box,
    Not,
    Or,
    formula_size,
    free_vars,
    is_clean,
    is_pnf,
    reletter_clean,
    sort_vars,
    to_pnf,
)
from .gen import GenConfig, gen_formula, gen_model, gen_pointed_pair, sat_workload
from .kripke import BoxForall, BoxVec, MentionAll, is_increasing, mc, mc_derived
from .search import FrameClass, bounded_search
from .syntax import model_from_dict, model_to_dict, parse_formula, print_formula
from .tableau import decide_sat, extract_model, tree_depth, LIVE_NODE_FACTOR
from .translate import (
    free_sorts,
    lift_assignment,
    model_to_structure,
    model_to_structure1,
    to_2sfol,
    to_fol1,
)

SUITES = ("pnf", "bisim-invariance", "tableau-vs-oracle", "translation", "s5-equivalences", "proofs")

# oracle bounds for the tableau cross-check
ORACLE_WORLDS = 64
ORACLE_OBJECTS = 7


@dataclass
class Failure:
    index: int
    check: str
    detail: str
    case: dict


@dataclass
class SuiteReport:
    name: str
    cases: int = 0
    passed: int = 0
    failures: list[Failure] = field(default_factory=list)
    seconds: float = 0.0
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = "".join(f" {k}={v}" for k, v in sorted(self.stats.items()))
        return f"{self.name}: {status} {self.passed}/{self.cases} in {self.seconds:.1f}s{extra}"


def _m(case, key="model"):
    return model_from_dict(case[key])


def _f(case, key="formula"):
    return parse_formula(case[key])


def _assign(rng, m, phi, extra=()):
    return {x: rng.choice(m.domain) for x in sort_vars(set(free_vars(phi)) | set(extra))}


# checks: each returns None when the property holds, else a message


def check_pnf(case) -> str | None:
    phi, m, w, s = _f(case), _m(case), case["world"], case["sigma"]
    p = to_pnf(phi)
    if not is_pnf(p):
        return "result not in positive normal form"
    if to_pnf(p) != p:
        return "not idempotent"
    if formula_size(p) > 2 * formula_size(phi):
        return f"size {formula_size(p)} exceeds twice {formula_size(phi)}"
    if mc(m, w, s, phi) != mc(m, w, s, p):
        return "truth value changed"
    c = reletter_clean(phi)
    if not is_clean(c) or formula_size(c) != formula_size(phi) or free_vars(c) != free_vars(phi):
        return "relettering broke cleanness, size or free variables"
    if mc(m, w, s, c) != mc(m, w, s, phi):
        return "relettering changed the truth value"
    return None


def check_invariance(case) -> str | None:
    m, n = _m(case, "model_a"), _m(case, "model_b")
    w, v = case["world_a"], case["world_b"]
    if not case.get("skip_bisim") and not bisimilar(m, w, (), n, v, (), explain=False):
        return "pair built to be bisimilar is rejected by the checker"
    for text in case["formulas"]:
        phi = parse_formula(text)
        if mc(m, w, {}, phi) != mc(n, v, {}, phi):
            return f"{text} separates the points"
    return None


def check_tableau_oracle(case) -> str | None:
    phi = _f(case)
    verdict = bool(decide_sat(phi, keep_model=False))
    oracle = bool(bounded_search(phi, ORACLE_WORLDS, ORACLE_OBJECTS))
    if verdict != oracle:
        return f"tableau says {'Sat' if verdict else 'Unsat'}, bounded search says {'Sat' if oracle else 'Unsat'}"
    return None


def countermodel_problems(phi) -> list[str] | None:
    """Checks on the model extracted from an open tableau (None if Unsat)."""
    res = decide_sat(phi)
    if not res:
        return None
    m, root, sigma = extract_model(res)
    n = formula_size(phi)
    out = []
    if not is_increasing(m):
        out.append("domains not increasing")
    if any(not m.delta[w] for w in m.worlds):
        out.append("empty local domain")
    if tree_depth(res.tableau.root) > 2 * n:
        out.append(f"depth {tree_depth(res.tableau.root)} > 2*{n}")
    if len(m.domain) > n:
        out.append(f"|D| = {len(m.domain)} > {n}")
    if not mc(m, root, sigma, phi):
        out.append("formula false at the root")
    return out


def check_countermodel(case) -> str | None:
    probs = countermodel_problems(_f(case))
    return "; ".join(probs) if probs else None


def check_live_nodes(case) -> str | None:
    phi = _f(case)
    res = decide_sat(phi, keep_model=False)
    bound = LIVE_NODE_FACTOR * formula_size(phi)
    if res.tableau.stats.max_live > bound:
        return f"max live nodes {res.tableau.stats.max_live} > {bound}"
    return None


def check_translation(case) -> str | None:
    phi, m, w, s = _f(case), _m(case), case["world"], case["sigma"]
    expected = mc(m, w, s, phi)
    psi = to_2sfol(phi)
    alpha = {**s, "u": w}
    if fo_eval(model_to_structure(m), alpha, psi) != expected:
        return "two-sorted translation disagrees with mc"
    if fo_eval(model_to_structure(m), alpha, to_2sfol(phi, guarded=True)) != expected:
        return "guarded translation disagrees with mc"
    body, theta, chi = to_fol1(psi)
    s1 = model_to_structure1(m)
    sorts = free_sorts(psi)
    beta = lift_assignment(alpha, sorts)
    if not fo_eval(s1, {}, theta) or not fo_eval(s1, {}, chi):
        return "sort or increasing-domain axiom fails on the one-sorted structure"
    if fo_eval(s1, beta, body) != expected:
        return "one-sorted reduction disagrees with mc"
    return None


def check_s5(case) -> str | None:
    phi, m, w, s = _f(case), _m(case), case["world"], case["sigma"]
    x, xs = case["var"], tuple(case["vars"])
    env = dict(s)
    if mc_derived(m, w, env, MentionAll(x), phi) != mc(m, w, env, DiaX(x, Or(Box(phi), Box(Not(phi))))):
        return "mention-all equivalence fails"
    if mc_derived(m, w, env, BoxForall(x), phi) != mc(m, w, env, DiaX(x, Box(phi))):
        return "box-forall equivalence fails"
    nested = phi
    for y in reversed(xs):
        nested = BoxX(y, nested)
    if mc_derived(m, w, env, BoxVec(xs), phi) != mc(m, w, env, nested):
        return "vector equivalence fails"
    return None


@lru_cache(maxsize=None)
def _library():
    from .hilbert import bundled_lemmas, bundled_scripts

    return bundled_lemmas(), {s.name: s for s in bundled_scripts()}


def check_proof_case(case) -> str | None:
    from .hilbert import check_proof, soundness_spot_check
    from .script import ProofLine, ProofScript

    store, scripts = _library()
    script = scripts[case["script"]]
    if case["mode"] == "check":
        res = check_proof(script, store)
        return None if res.ok else str(res)
    i = case["line"] - 1
    if case["mode"] == "mutate":
        lines = list(script.lines)
        lines[i] = ProofLine(Not(lines[i].formula), lines[i].just)
        res = check_proof(ProofScript(script.name, lines, script.target, script.schematic), store)
        return "mutated script still checks" if res.ok else None
    res = soundness_spot_check(script.lines[i].formula, 3, 3)
    return None if res else f"S5 countermodel to line {case['line']}"


CHECKS = {
    "pnf": check_pnf,
    "invariance": check_invariance,
    "tableau-oracle": check_tableau_oracle,
    "countermodel": check_countermodel,
    "live-nodes": check_live_nodes,
    "translation": check_translation,
    "s5": check_s5,
    "proof": check_proof_case,
}

SUITE_CHECKS = {
    "pnf": ("pnf",),
    "bisim-invariance": ("invariance",),
    "tableau-vs-oracle": ("tableau-oracle", "countermodel", "live-nodes"),
    "translation": ("translation",),
    "s5-equivalences": ("s5",),
    "proofs": ("proof",),
}

DEFAULT_CASES = {
    "pnf": 1000,
    "bisim-invariance": 200,
    "tableau-vs-oracle": 500,
    "translation": 500,
    "s5-equivalences": 200,
    "proofs": 0,
}


# case generation


def _pointed_case(cfg, rng) -> tuple[dict, str]:
    m = gen_model(cfg, rng)
    w = rng.choice(m.worlds)
    phi = gen_formula(cfg, rng)
    return {"formula": print_formula(phi), "model": model_to_dict(m), "world": w, "sigma": _assign(rng, m, phi)}, w


def cases_pnf(n: int, seed: int) -> list[dict]:
    rng = random.Random(seed)
    cfg = GenConfig(seed=seed, max_depth=4)
    return [_pointed_case(cfg, rng)[0] for _ in range(n)]


def cases_translation(n: int, seed: int) -> list[dict]:
    rng = random.Random(seed)
    cfg = GenConfig(seed=seed, max_depth=4, equality=True)
    return [_pointed_case(cfg, rng)[0] for _ in range(n)]


def gallery_pairs():
    """The two pairs of bisimilar models from the worked examples."""
    from importlib import resources

    from .syntax import load_model

    base = resources.files("mlms") / "gallery"
    out = []
    for tag in ("a", "b"):
        m = load_model(base / f"pair_{tag}_M.json")
        n = load_model(base / f"pair_{tag}_N.json")
        out.append(((m, "w"), (n, "s")))
    return out


def cases_invariance(n: int, seed: int, formulas_per_pair: int = 25) -> list[dict]:
    rng = random.Random(seed)
    out = []
    pcfg = GenConfig(seed=seed, max_depth=4, closed=True, equality=True, signature={"P": 1}, modal_ratio=0.5)
    for (m, w), (nn, v) in gallery_pairs():
        fs = [print_formula(gen_formula(pcfg, rng)) for _ in range(4 * formulas_per_pair)]
        out.append({"model_a": model_to_dict(m), "world_a": w, "model_b": model_to_dict(nn), "world_b": v, "formulas": fs})
    cfg = GenConfig(seed=seed, max_depth=4, closed=True, equality=True)
    s5 = GenConfig(seed=seed, max_depth=4, closed=True, equality=True, frame=FrameClass.S5)
    for i in range(n):
        c = s5 if i % 4 == 3 else cfg
        (m, w), (nn, v) = gen_pointed_pair(c, rng)
        fs = [print_formula(gen_formula(c, rng)) for _ in range(formulas_per_pair)]
        out.append({"model_a": model_to_dict(m), "world_a": w, "model_b": model_to_dict(nn), "world_b": v, "formulas": fs})
    return out


def cases_tableau(n: int, seed: int) -> list[dict]:
    return [{"formula": print_formula(f)} for f in sat_workload(n, 7, seed)]


def cases_s5(n: int, seed: int) -> list[dict]:
    rng = random.Random(seed)
    cfg = GenConfig(seed=seed, max_depth=3, frame=FrameClass.S5)
    out = []
    for _ in range(n):
        m = gen_model(cfg, rng)
        w = rng.choice(m.worlds)
        phi = gen_formula(cfg, rng)
        x = rng.choice(("x", "y", "z"))
        xs = tuple(rng.sample(("x", "y", "z"), rng.randint(1, 3)))
        out.append(
            {
                "formula": print_formula(phi),
                "model": model_to_dict(m),
                "world": w,
                "sigma": _assign(rng, m, phi, ("x", "y", "z")),
                "var": x,
                "vars": list(xs),
            }
        )
    return out


def cases_proofs() -> list[dict]:
    from .hilbert import bundled_scripts, dependent_lines

    out = []
    for s in bundled_scripts():
        out.append({"script": s.name, "mode": "check"})
        dep = dependent_lines(s)
        for i in range(1, len(s.lines) + 1):
            out.append({"script": s.name, "mode": "mutate", "line": i})
            if i not in dep:
                out.append({"script": s.name, "mode": "sound", "line": i})
    return out


def make_cases(name: str, n: int, seed: int) -> list[dict]:
    if name == "pnf":
        return cases_pnf(n, seed)
    if name == "translation":
        return cases_translation(n, seed)
    if name == "bisim-invariance":
        return cases_invariance(n, seed)
    if name == "tableau-vs-oracle":
        return cases_tableau(n, seed)
    if name == "s5-equivalences":
        return cases_s5(n, seed)
    if name == "proofs":
        return cases_proofs()
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")


# running


def _run_case(item):
    idx, checks, case = item
    out = []
    for c in checks:
        try:
            msg = CHECKS[c](case)
        except Exception as e:  # a crash is a failure of that check
            msg = f"{type(e).__name__}: {e}"
        if msg:
            out.append((idx, c, msg))
    return out


def run_suite(
    name: str, cases: int | None = None, seed: int = 0, dump: str | Path | None = None, workers: int = 1
) -> SuiteReport:
    """Generate and check cases; failures are optionally dumped as JSON."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    t0 = time.perf_counter()
    n = DEFAULT_CASES[name] if cases is None else cases
    items = [(i, SUITE_CHECKS[name], c) for i, c in enumerate(make_cases(name, n, seed))]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_run_case, items, chunksize=max(1, len(items) // (4 * workers))))
    else:
        results = [_run_case(it) for it in items]
    report = SuiteReport(name, cases=len(items))
    bad = set()
    for res in results:
        for idx, check, msg in res:
            report.failures.append(Failure(idx, check, msg, items[idx][2]))
            bad.add(idx)
    report.passed = len(items) - len(bad)
    for check in SUITE_CHECKS[name]:
        report.stats[f"failed[{check}]"] = sum(1 for f in report.failures if f.check == check)
    report.seconds = time.perf_counter() - t0
    if dump and report.failures:
        dump_failures(report, dump)
    return report


def dump_failures(report: SuiteReport, directory) -> list[Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for f in report.failures:
        p = d / f"{report.name}-{f.index:05d}-{f.check}.json"
        p.write_text(json.dumps({"suite": report.name, "check": f.check, "detail": f.detail, "case": f.case}, indent=2))
        paths.append(p)
    return paths


def replay(path) -> str | None:
    """Re-run the check stored in a dump; returns its failure message."""
    data = json.loads(Path(path).read_text())
    return CHECKS[data["check"]](data["case"])
