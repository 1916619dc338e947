"""Proof checking for the S5 Hilbert systems of mention-some logic.

The trusted kernel is small: axiom schemata with their side conditions,
modus ponens, the monotonicity rule MONOMS, and lemma application.  A
lemma is applied by matching its conclusion (and hypotheses) against the
cited lines, where the lemma's schematic 0-ary letters may stand for any
formula and its variables may be renamed.  The lemma's proof is then
instantiated the same way and checked again, so side conditions such as
``x not free in phi`` are re-verified for every use.

Derived rules (NECK, NECMS, RKtoMS, RE, RMS) are script generators that
expand into primitive steps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .formula import (
    BINDERS,
    TOP,
    And,
    Atom,
    Box,
    BoxX,
    DiaX,
    Eq,
    Formula,
    Implies,
    Not,
    Or,
    all_vars,
    children,
    fresh_var,
    free_vars,
    is_admissible,
    rebuild,
    substitute,
    subformulas,
)
from .script import AXIOMS, Justification, ProofLine, ProofScript
from .search import Found, FrameClass, bounded_search
from .syntax import parse_proof, print_proof


class UnknownAxiom(ValueError):
    pass


class UnknownLemma(KeyError):
    pass


# axiom schemata


def iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


_BOOL = (Not, And, Or, Implies)


def is_tautology(phi: Formula) -> bool:
    """Truth-table check of the propositional skeleton.

    Maximal subformulas that are not Boolean combinations are letters.
    """
    letters: dict[Formula, int] = {}

    def collect(f):
        if isinstance(f, _BOOL):
            for c in children(f):
                collect(c)
        elif f not in letters:
            letters[f] = len(letters)

    collect(phi)

    def ev(f, row) -> bool:
        if isinstance(f, Not):
            return not ev(f.sub, row)
        if isinstance(f, And):
            return ev(f.left, row) and ev(f.right, row)
        if isinstance(f, Or):
            return ev(f.left, row) or ev(f.right, row)
        if isinstance(f, Implies):
            return (not ev(f.left, row)) or ev(f.right, row)
        return row[letters[f]]

    return all(ev(phi, row) for row in itertools.product((False, True), repeat=len(letters)))


def _kt(phi):
    return phi == Box(TOP)


def _distk(phi):
    if not (isinstance(phi, Implies) and isinstance(phi.left, Box) and isinstance(phi.left.sub, Implies)):
        return False
    a, b = phi.left.sub.left, phi.left.sub.right
    return phi.right == Implies(Box(a), Box(b))


def _t(phi):
    return isinstance(phi, Implies) and isinstance(phi.left, Box) and phi.left.sub == phi.right


def _4ms(phi):
    return isinstance(phi, Implies) and isinstance(phi.left, BoxX) and phi.right == Box(phi.left)


def _5ms(phi):
    if not (isinstance(phi, Implies) and isinstance(phi.left, Not) and isinstance(phi.left.sub, BoxX)):
        return False
    return phi.right == Box(phi.left)


def _ktoms(phi):
    if not (isinstance(phi, Implies) and isinstance(phi.left, Box) and isinstance(phi.right, BoxX)):
        return False
    psi, x, body = phi.left.sub, phi.right.var, phi.right.sub
    if x not in free_vars(body):
        return psi == body
    for y in {x} | free_vars(psi):
        if substitute(body, x, y) == psi and is_admissible(body, x, y):
            return True
    return False


def _mstok(phi):
    if not (isinstance(phi, Implies) and isinstance(phi.left, BoxX)):
        return False
    body = phi.left.sub
    return phi.right == Box(body) and phi.left.var not in free_vars(body)


def _mstomsk(phi):
    if not (isinstance(phi, Implies) and isinstance(phi.left, BoxX)):
        return False
    return phi.right == BoxX(phi.left.var, Box(phi.left.sub))


def _id(phi):
    return isinstance(phi, Eq) and phi.left == phi.right


def _replaced(x: str, y: str, src: Formula, tgt: Formula, bound: frozenset = frozenset()) -> bool:
    """``tgt`` is ``src`` with some free occurrences of ``x`` turned into
    free occurrences of ``y``."""

    def arg_ok(s, t):
        return s == t or (s == x and t == y and x not in bound and y not in bound)

    if type(src) is not type(tgt):
        return False
    if isinstance(src, Eq):
        return arg_ok(src.left, tgt.left) and arg_ok(src.right, tgt.right)
    if isinstance(src, Atom):
        return src.pred == tgt.pred and len(src.args) == len(tgt.args) and all(map(arg_ok, src.args, tgt.args))
    if isinstance(src, BINDERS):
        return src.var == tgt.var and _replaced(x, y, src.sub, tgt.sub, bound | {src.var})
    return all(_replaced(x, y, a, b, bound) for a, b in zip(children(src), children(tgt)))


def _subid(phi):
    if not (isinstance(phi, Implies) and isinstance(phi.left, Eq) and isinstance(phi.right, Implies)):
        return False
    x, y = phi.left.left, phi.left.right
    a, b = phi.right.left, phi.right.right
    return _replaced(x, y, a, b) or _replaced(x, y, b, a)


_SCHEMATA = {
    "TAUT": is_tautology,
    "DISTK": _distk,
    "T": _t,
    "4MS": _4ms,
    "5MS": _5ms,
    "KtoMS": _ktoms,
    "MStoK": _mstok,
    "MStoMSK": _mstomsk,
    "KT": _kt,
    "ID": _id,
    "SUBID": _subid,
}
assert set(_SCHEMATA) == set(AXIOMS)


def match_axiom(name: str, phi: Formula) -> bool:
    """Is ``phi`` an instance of axiom ``name`` (side conditions included)?"""
    try:
        return _SCHEMATA[name](phi)
    except KeyError:
        raise UnknownAxiom(name) from None


# checking


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    line: int | None = None
    reason: str = ""
    kind: str = "theorem"  # "theorem", "consequence" or "rule"

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "Ok" if self.ok else f"Error at line {self.line}: {self.reason}"


@dataclass
class LemmaStore:
    """Checked scripts by name; only scripts that check Ok are admitted."""

    lemmas: dict[str, ProofScript] = field(default_factory=dict)
    kinds: dict[str, str] = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    def add(self, script: ProofScript) -> CheckResult:
        res = check_proof(script, self)
        if res.ok:
            self.lemmas[script.name] = script
            self.kinds[script.name] = res.kind
        return res

    def __contains__(self, name) -> bool:
        return name in self.lemmas

    def get(self, name: str) -> ProofScript:
        try:
            return self.lemmas[name]
        except KeyError:
            raise UnknownLemma(name) from None


def rename_vars(phi: Formula, vmap: dict[str, str]) -> Formula:
    """Rename every variable occurrence, bound or free, simultaneously."""
    if not vmap:
        return phi
    g = vmap.get
    if isinstance(phi, Eq):
        return Eq(g(phi.left, phi.left), g(phi.right, phi.right))
    if isinstance(phi, Atom):
        return Atom(phi.pred, tuple(g(a, a) for a in phi.args))
    if isinstance(phi, BINDERS):
        return type(phi)(g(phi.var, phi.var), rename_vars(phi.sub, vmap))
    return rebuild(phi, [rename_vars(c, vmap) for c in children(phi)])


def plug(phi: Formula, fsub: dict[str, Formula]) -> Formula:
    """Replace schematic 0-ary letters by formulas."""
    if not fsub:
        return phi
    if isinstance(phi, Atom):
        return fsub.get(phi.pred, phi) if not phi.args else phi
    if isinstance(phi, Eq):
        return phi
    return rebuild(phi, [plug(c, fsub) for c in children(phi)])


def _match(pat: Formula, tgt: Formula, schematic, fsub: dict, vmap: dict) -> bool:
    def var(p, t):
        if vmap.setdefault(p, t) != t:
            return False
        return True

    if isinstance(pat, Atom) and not pat.args and pat.pred in schematic:
        return fsub.setdefault(pat.pred, tgt) == tgt
    if type(pat) is not type(tgt):
        return False
    if isinstance(pat, Eq):
        return var(pat.left, tgt.left) and var(pat.right, tgt.right)
    if isinstance(pat, Atom):
        return pat.pred == tgt.pred and len(pat.args) == len(tgt.args) and all(map(var, pat.args, tgt.args))
    if isinstance(pat, BINDERS) and not var(pat.var, tgt.var):
        return False
    return all(_match(a, b, schematic, fsub, vmap) for a, b in zip(children(pat), children(tgt)))


def _script_vars(script: ProofScript) -> set[str]:
    out = set()
    for ln in script.lines:
        out |= all_vars(ln.formula)
        if ln.just.var:
            out.add(ln.just.var)
    return out


def instantiate(script: ProofScript, fsub: dict[str, Formula], vmap: dict[str, str]) -> ProofScript:
    """The lemma proof with letters replaced and variables renamed.

    Variables of the proof that ``vmap`` does not cover get fresh names
    avoiding every variable of the instance.
    """
    vmap = dict(vmap)
    taken = set(vmap.values())
    for f in fsub.values():
        taken |= all_vars(f)
    for v in sorted(_script_vars(script) - set(vmap)):
        new = v if v not in taken else fresh_var(taken | _script_vars(script))
        vmap[v] = new
        taken.add(new)
    lines = []
    for ln in script.lines:
        j = ln.just
        if j.var is not None:
            j = Justification(j.kind, j.refs, vmap.get(j.var, j.var), j.name)
        lines.append(ProofLine(plug(rename_vars(ln.formula, vmap), fsub), j, ln.comment))
    return ProofScript(script.name, lines, None, (), [])


def _key(fsub, vmap):
    return tuple(sorted(fsub.items(), key=lambda kv: kv[0])), tuple(sorted(vmap.items()))


def _apply_lemma(store: LemmaStore, name: str, target: Formula, premises: list[Formula]) -> str | None:
    """None if ``target`` follows from ``premises`` by lemma ``name``."""
    lemma = store.get(name)
    hyps = lemma.hypotheses
    if len(hyps) != len(premises):
        return f"lemma {name} has {len(hyps)} hypotheses, {len(premises)} lines cited"
    fsub, vmap = {}, {}
    for pat, tgt in zip([lemma.conclusion, *hyps], [target, *premises]):
        if not _match(pat, tgt, set(lemma.schematic), fsub, vmap):
            return f"not an instance of lemma {name}"
    key = (name, _key(fsub, vmap))
    if key not in store._cache:
        inst = instantiate(lemma, fsub, vmap)
        res = check_proof(inst, store)
        store._cache[key] = None if res.ok else f"instance of lemma {name} fails: {res}"
        if res.ok and (inst.conclusion != target or inst.hypotheses != premises):
            store._cache[key] = f"instance of lemma {name} does not yield the cited formulas"
    return store._cache[key]


def check_proof(script: ProofScript, store: LemmaStore | None = None) -> CheckResult:
    """Check every line; report the first bad one.

    The result kind is ``theorem`` without hypotheses, ``consequence``
    when the conclusion follows from the hypotheses by modus ponens and
    consequence lemmas, and ``rule`` when a rule was applied to a line
    that depends on a hypothesis.
    """
    store = store if store is not None else LemmaStore()
    if not script.lines:
        return CheckResult(False, 0, "empty script")
    deps: list[bool] = []
    rule = False
    for n, ln in enumerate(script.lines, 1):
        phi, j = ln.formula, ln.just

        def fail(msg):
            return CheckResult(False, n, msg)

        for r in j.refs:
            if not 1 <= r < n:
                return fail(f"reference {r} does not point to an earlier line")
        if j.kind == "HYP":
            deps.append(True)
            continue
        if j.kind in _SCHEMATA:
            if not match_axiom(j.kind, phi):
                return fail(f"not an instance of {j.kind}")
            deps.append(False)
        elif j.kind == "MP":
            a, imp = (script.lines[r - 1].formula for r in j.refs)
            if not isinstance(imp, Implies) or imp.left != a or imp.right != phi:
                return fail(f"MP: line {j.refs[1]} is not line {j.refs[0]} -> this line")
            deps.append(deps[j.refs[0] - 1] or deps[j.refs[1] - 1])
        elif j.kind == "MONOMS":
            prem = script.lines[j.refs[0] - 1].formula
            want = Implies(BoxX(j.var, prem.left), BoxX(j.var, prem.right)) if isinstance(prem, Implies) else None
            if want is None or phi != want:
                return fail(f"MONOMS: expected K[{j.var}] of both sides of line {j.refs[0]}")
            d = deps[j.refs[0] - 1]
            rule = rule or d
            deps.append(d)
        elif j.kind == "LEMMA":
            if j.name not in store:
                return fail(f"unknown lemma {j.name}")
            err = _apply_lemma(store, j.name, phi, [script.lines[r - 1].formula for r in j.refs])
            if err:
                return fail(err)
            d = any(deps[r - 1] for r in j.refs)
            rule = rule or (d and store.kinds.get(j.name) == "rule")
            deps.append(d)
        else:
            return fail(f"unknown justification {j.kind}")
    if script.target is not None and script.target != script.conclusion:
        return CheckResult(False, len(script.lines), "last line differs from the target")
    kind = "rule" if rule else ("consequence" if script.hypotheses else "theorem")
    return CheckResult(True, kind=kind)


def dependent_lines(script: ProofScript) -> set[int]:
    """1-based numbers of lines that depend on a hypothesis."""
    out = set()
    for n, ln in enumerate(script.lines, 1):
        if ln.just.kind == "HYP" or any(r in out for r in ln.just.refs):
            out.add(n)
    return out


# bundled library

BUNDLED_ORDER = (
    "MSKtoMS",
    "MStotK",
    "MST",
    "NECMS",
    "NECK",
    "RKtoMS",
    "4",
    "5",
    "KIMP",
    "BarcanS5",
    "SYM",
    "TRANS",
    "KEQ",
    "KNEQ",
    "NECK_inst",
    "NECMS_inst",
    "RKtoMS_inst",
    "RMS_inst1",
    "RMS_inst2",
    "RE_inst",
)


def bundled_scripts() -> list[ProofScript]:
    base = resources.files("mlms") / "proofs"
    return [parse_proof((base / f"{name}.prf").read_text(), name) for name in BUNDLED_ORDER]


def bundled_lemmas() -> LemmaStore:
    """The checked library; raises if a bundled script fails."""
    store = LemmaStore()
    for s in bundled_scripts():
        res = store.add(s)
        if not res.ok:
            raise RuntimeError(f"bundled script {s.name}: {res}")
    return store


def load_lemma_dir(store: LemmaStore, path) -> list[tuple[str, CheckResult]]:
    """Add every ``*.prf`` in ``path``, retrying until no more can be added."""
    pending = [parse_proof(p.read_text(), p.stem) for p in sorted(Path(path).glob("*.prf"))]
    results = []
    while pending:
        left = []
        for s in pending:
            res = store.add(s)
            (results.append((s.name, res)) if res.ok else left.append((s, res)))
        if len(left) == len(pending):
            results.extend((s.name, r) for s, r in left)
            break
        pending = [s for s, _ in left]
    return results


# derived rules as generators


def _pick_var(avoid) -> str:
    for v in ("x", "y", "z", "u", "v", "w"):
        if v not in avoid:
            return v
    return fresh_var(avoid)


class _Builder:
    def __init__(self, script: ProofScript | None = None, name: str = "derived"):
        self.lines: list[ProofLine] = list(script.lines) if script else []
        self.name = name

    def add(self, phi: Formula, kind: str, refs=(), var=None, lemma=None, comment="") -> int:
        self.lines.append(ProofLine(phi, Justification(kind, tuple(refs), var, lemma), comment))
        return len(self.lines)

    def f(self, n: int) -> Formula:
        return self.lines[n - 1].formula

    def mp(self, a: int, imp: int) -> int:
        return self.add(self.f(imp).right, "MP", (a, imp))

    def taut_chain(self, premises: list[int], goal: Formula) -> int:
        """``goal`` from the premise lines by one tautology and modus ponens."""
        phi = goal
        for p in reversed(premises):
            phi = Implies(self.f(p), phi)
        n = self.add(phi, "TAUT")
        for p in premises:
            n = self.mp(p, n)
        return n

    def necms(self, n: int, x: str | None = None) -> int:
        phi = self.f(n)
        x = x or _pick_var(all_vars(phi))
        t = self.taut_chain([n], Implies(TOP, phi))
        mono = self.add(Implies(BoxX(x, TOP), BoxX(x, phi)), "MONOMS", (t,), x)
        kt = self.add(Box(TOP), "KT")
        k2 = self.add(Implies(Box(TOP), BoxX(x, TOP)), "KtoMS")
        mst = self.mp(kt, k2)
        return self.mp(mst, mono)

    def neck(self, n: int) -> int:
        phi = self.f(n)
        x = _pick_var(all_vars(phi))
        ms = self.necms(n, x)
        down = self.add(Implies(BoxX(x, phi), Box(phi)), "MStoK")
        return self.mp(ms, down)

    def k_mono(self, n: int) -> int:
        """From ``a -> b`` get ``K a -> K b``."""
        imp = self.f(n)
        nec = self.neck(n)
        dist = self.add(Implies(Box(imp), Implies(Box(imp.left), Box(imp.right))), "DISTK")
        return self.mp(nec, dist)

    def rktoms(self, n: int, x: str) -> int:
        """From ``K a -> b`` with ``x`` not free in ``b`` get ``K[x] a -> b``."""
        imp = self.f(n)
        a, b = imp.left.sub, imp.right
        mono = self.add(Implies(BoxX(x, Box(a)), BoxX(x, b)), "MONOMS", (n,), x)
        up = self.add(Implies(BoxX(x, a), BoxX(x, Box(a))), "MStoMSK")
        down = self.add(Implies(BoxX(x, b), Box(b)), "MStoK")
        t = self.add(Implies(Box(b), b), "T")
        return self.taut_chain([up, mono, down, t], Implies(BoxX(x, a), b))

    def script(self, name: str | None = None, target: Formula | None = None) -> ProofScript:
        return ProofScript(name or self.name, list(self.lines), target)


def neck_script(script: ProofScript, name: str = "NECK_inst") -> ProofScript:
    """From a proof of ``phi`` build a proof of ``K phi``."""
    b = _Builder(script)
    b.neck(len(b.lines))
    return b.script(name)


def necms_script(script: ProofScript, x: str | None = None, name: str = "NECMS_inst") -> ProofScript:
    """From a proof of ``phi`` build a proof of ``K[x] phi``."""
    b = _Builder(script)
    b.necms(len(b.lines), x)
    return b.script(name)


def rktoms_script(script: ProofScript, x: str, name: str = "RKtoMS_inst") -> ProofScript:
    """From a proof of ``K phi -> psi`` build a proof of ``K[x] phi -> psi``."""
    concl = script.conclusion
    if not (isinstance(concl, Implies) and isinstance(concl.left, Box)):
        raise ValueError("the conclusion must have the shape K phi -> psi")
    if x in free_vars(concl.right):
        raise ValueError(f"{x} is free in the consequent")
    b = _Builder(script)
    b.rktoms(len(b.lines), x)
    return b.script(name)


def rms_script(phi: Formula, x: str, y: str, name: str = "RMS_inst") -> ProofScript:
    """A proof of ``K[x] phi <-> K[y] phi[y/x]`` for ``y`` not in ``phi``."""
    if y in all_vars(phi):
        raise ValueError(f"{y} occurs in the formula")
    phi_y = substitute(phi, x, y)
    b = _Builder(name=name)
    k1 = b.add(Implies(Box(phi_y), BoxX(x, phi)), "KtoMS")
    rl = b.rktoms(k1, y)
    k2 = b.add(Implies(Box(phi), BoxX(y, phi_y)), "KtoMS")
    lr = b.rktoms(k2, x)
    b.taut_chain([lr, rl], iff(BoxX(x, phi), BoxX(y, phi_y)))
    return b.script(name)


HOLE = "_H"


def re_script(script: ProofScript, context: Formula, hole: str = HOLE, name: str = "RE_inst") -> ProofScript:
    """From a proof of ``a <-> b`` build a proof of ``C(a) <-> C(b)``.

    ``context`` contains the 0-ary letter ``hole`` exactly once.
    """
    concl = script.conclusion
    if not (isinstance(concl, And) and isinstance(concl.left, Implies) and concl == iff(concl.left.left, concl.left.right)):
        raise ValueError("the conclusion must be a biconditional")
    if sum(1 for f in subformulas(context) if f == Atom(hole)) != 1:
        raise ValueError("the hole must occur exactly once")
    b = _Builder(script)

    def has_hole(f):
        return any(g == Atom(hole) for g in subformulas(f))

    def go(ctx: Formula) -> int:
        if ctx == Atom(hole):
            return len(script.lines)
        if isinstance(ctx, Not):
            n = go(ctx.sub)
            a, c = b.f(n).left.left, b.f(n).left.right
            return b.taut_chain([n], iff(Not(a), Not(c)))
        if isinstance(ctx, (And, Or, Implies)):
            op = type(ctx)
            if has_hole(ctx.left):
                n = go(ctx.left)
                a, c = b.f(n).left.left, b.f(n).left.right
                goal = iff(op(a, ctx.right), op(c, ctx.right))
            else:
                n = go(ctx.right)
                a, c = b.f(n).left.left, b.f(n).left.right
                goal = iff(op(ctx.left, a), op(ctx.left, c))
            return b.taut_chain([n], goal)
        n = go(ctx.sub)
        a, c = b.f(n).left.left, b.f(n).left.right
        fw = b.taut_chain([n], Implies(a, c))
        bw = b.taut_chain([n], Implies(c, a))
        if isinstance(ctx, Box):
            f1, f2 = b.k_mono(fw), b.k_mono(bw)
            return b.taut_chain([f1, f2], iff(Box(a), Box(c)))
        if isinstance(ctx, BoxX):
            f1 = b.add(Implies(BoxX(ctx.var, a), BoxX(ctx.var, c)), "MONOMS", (fw,), ctx.var)
            f2 = b.add(Implies(BoxX(ctx.var, c), BoxX(ctx.var, a)), "MONOMS", (bw,), ctx.var)
            return b.taut_chain([f1, f2], iff(BoxX(ctx.var, a), BoxX(ctx.var, c)))
        raise ValueError(f"RE does not go under {type(ctx).__name__}")

    if isinstance(context, DiaX) or any(isinstance(f, (DiaX, Eq)) and has_hole(f) for f in subformulas(context)):
        raise ValueError("RE contexts use K, K[x] and the Boolean connectives")
    go(context)
    return b.script(name)


def generated_instances() -> dict[str, ProofScript]:
    """The derived-rule instances shipped in the library, rebuilt from their
    generators."""
    from .syntax import parse_formula as p

    t_line = ProofScript("t", [ProofLine(p("K P(x) -> P(x)"), Justification("T"))])
    kt_line = ProofScript("kt", [ProofLine(p("K[x] (P(x) -> Q(x)) -> K[x] K (P(x) -> Q(x))"), Justification("MStoMSK"))])
    rk_base = ProofScript("rk", [ProofLine(p("K Q(y) -> Q(y)"), Justification("T"))])
    dn = _Builder(name="dn")
    dn.add(iff(p("~~P(x)"), p("P(x)")), "TAUT")
    return {
        "NECK_inst": neck_script(t_line, "NECK_inst"),
        "NECMS_inst": necms_script(kt_line, "y", "NECMS_inst"),
        "RKtoMS_inst": rktoms_script(rk_base, "x", "RKtoMS_inst"),
        "RMS_inst1": rms_script(p("P(x)"), "x", "y", "RMS_inst1"),
        "RMS_inst2": rms_script(p("P(x) -> K Q(x)"), "x", "z", "RMS_inst2"),
        "RE_inst": re_script(dn.script(), p("K (K[y] (_H & Q(y)) -> P(z))"), name="RE_inst"),
    }


def render_instance(script: ProofScript) -> str:
    return print_proof(script)


# soundness spot check


@dataclass(frozen=True)
class NoCounterexampleWithinBounds:
    max_worlds: int
    max_objects: int

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Counterexample:
    found: Found

    def __bool__(self) -> bool:
        return False


def soundness_spot_check(phi: Formula, max_worlds: int = 3, max_objects: int = 3):
    """Look for an S5 model of ``~phi`` within the bounds."""
    res = bounded_search(Not(phi), max_worlds, max_objects, FrameClass.S5)
    if res:
        return Counterexample(res)
    return NoCounterexampleWithinBounds(max_worlds, max_objects)
