"""Translations into first-order languages and the prenex embedding.

* ``to_2sfol`` is the standard translation into two-sorted first-order
  logic over worlds and objects, alternating the two world variables.
* ``to_fol1`` relativizes a two-sorted formula to the sort predicates
  ``S1`` (objects) and ``S2`` (worlds).
* ``to_foml_text`` writes the quantified modal reading ``exists x. K``.
* ``embed_prenex_fol`` maps prenex first-order sentences into the modal
  language.
"""

from __future__ import annotations

from .fol import (
    FAnd,
    FAtom,
    FEq,
    FExists,
    FForall,
    FIff,
    FImp,
    FNot,
    FOFormula,
    FOr,
    FOStructure,
    FQUANT,
    conjuncts,
    fand,
    fo_free_vars,
    print_fo,
)
from .formula import (
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
)
from .kripke import KripkeModel

OBJ, WORLD = "obj", "world"


class NotPrenex(ValueError):
    pass


def q_name(pred: str) -> str:
    return f"Q_{pred}"


def world_vars(phi: Formula, u: str = "u") -> tuple[str, str]:
    """The two world variables used when translating ``phi``.

    They are ``u`` and ``v`` unless one of these names is already an
    object variable of ``phi``, in which case primes are added.
    """
    taken = all_vars(phi)
    other = "v" if u != "v" else "u"
    while u in taken or other in taken:
        u, other = u + "'", other + "'"
    return u, other


def to_2sfol(phi: Formula, u: str = "u", guarded: bool = False) -> FOFormula:
    """Two-sorted standard translation with ``u`` the free world variable.

    With ``guarded=True`` the successor clause of the mention-some operator
    additionally asserts ``E v x`` (the witness exists at the successor),
    which is equivalent over increasing-domain structures.
    """
    u, v = world_vars(phi, u)
    return _t(phi, u, v, guarded)


def _t(phi: Formula, u: str, v: str, guarded: bool) -> FOFormula:
    if isinstance(phi, Eq):
        return FEq(phi.left, phi.right)
    if isinstance(phi, Atom):
        return FAtom(q_name(phi.pred), (u, *phi.args))
    if isinstance(phi, Not):
        return FNot(_t(phi.sub, u, v, guarded))
    if isinstance(phi, (And, Or, Implies)):
        ctor = {And: FAnd, Or: FOr, Implies: FImp}[type(phi)]
        return ctor(_t(phi.left, u, v, guarded), _t(phi.right, u, v, guarded))
    body = _t(phi.sub, v, u, guarded)
    if isinstance(phi, Box):
        return FForall(v, WORLD, FImp(FAtom("R", (u, v)), body))
    x = phi.var
    if isinstance(phi, BoxX):
        if guarded:
            body = FAnd(FAtom("E", (v, x)), body)
        return FExists(x, OBJ, FAnd(FAtom("E", (u, x)), FForall(v, WORLD, FImp(FAtom("R", (u, v)), body))))
    if guarded:
        body = FAnd(FAtom("E", (v, x)), body)
    return FForall(x, OBJ, FImp(FAtom("E", (u, x)), FExists(v, WORLD, FAnd(FAtom("R", (u, v)), body))))


def model_to_structure(m: KripkeModel) -> FOStructure:
    """View a Kripke model as a two-sorted structure."""
    rel = {
        "R": frozenset(m.relation),
        "E": frozenset((w, a) for w in m.worlds for a in m.delta[w]),
    }
    sorts = {"R": (WORLD, WORLD), "E": (WORLD, OBJ)}
    for p, per in m.rho.items():
        rel[q_name(p)] = frozenset((w, *t) for w, ts in per.items() for t in ts)
        sorts[q_name(p)] = (WORLD,) + (OBJ,) * m.arity[p]
    return FOStructure({WORLD: frozenset(m.worlds), OBJ: frozenset(m.domain)}, rel, sorts)


def tag_world(w: str) -> tuple[str, str]:
    return (WORLD, w)


def tag_obj(a: str) -> tuple[str, str]:
    return (OBJ, a)


def model_to_structure1(m: KripkeModel) -> FOStructure:
    """One-sorted view: the universe is the tagged disjoint union of W and D."""
    two = model_to_structure(m)
    tag = {WORLD: tag_world, OBJ: tag_obj}
    rel = {}
    for p, ts in two.relations.items():
        srts = two.arg_sorts[p]
        rel[p] = frozenset(tuple(tag[s](x) for s, x in zip(srts, t)) for t in ts)
    rel["S1"] = frozenset((tag_obj(a),) for a in m.domain)
    rel["S2"] = frozenset((tag_world(w),) for w in m.worlds)
    universe = frozenset(map(tag_obj, m.domain)) | frozenset(map(tag_world, m.worlds))
    return FOStructure({None: universe}, rel)


def sort_axiom() -> FOFormula:
    x = "x"
    s1, s2 = FAtom("S1", (x,)), FAtom("S2", (x,))
    return FForall(x, None, FAnd(FOr(s1, s2), FNot(FAnd(s1, s2))))


def increasing_axiom() -> FOFormula:
    u, v, x = "u", "v", "x"
    guard = fand(
        FAtom("S2", (u,)), FAtom("S2", (v,)), FAtom("S1", (x,)), FAtom("E", (u, x)), FAtom("R", (u, v))
    )
    return FForall(u, None, FForall(v, None, FForall(x, None, FImp(guard, FAtom("E", (v, x))))))


def _guard(var: str, sort: str | None) -> FOFormula:
    return FAtom("S1" if sort == OBJ else "S2", (var,))


def _relativize(f: FOFormula) -> FOFormula:
    if isinstance(f, (FAtom, FEq)):
        return f
    if isinstance(f, FNot):
        return FNot(_relativize(f.sub))
    if isinstance(f, (FAnd, FOr, FImp, FIff)):
        return type(f)(_relativize(f.left), _relativize(f.right))
    body = _relativize(f.body)
    if f.sort is None:
        return type(f)(f.var, None, body)
    g = _guard(f.var, f.sort)
    if isinstance(f, FExists):
        return FExists(f.var, None, fand(g, *conjuncts(body)))
    if isinstance(body, FImp):
        return FForall(f.var, None, FImp(fand(g, *conjuncts(body.left)), body.right))
    return FForall(f.var, None, FImp(g, body))


def free_sorts(psi: FOFormula) -> dict[str, str]:
    """Sorts of the free variables of a two-sorted formula, read off atoms."""
    out: dict[str, str] = {}

    def go(f, bound):
        if isinstance(f, FAtom):
            srts = {"R": (WORLD, WORLD), "E": (WORLD, OBJ)}.get(f.pred)
            if srts is None and f.pred.startswith("Q_"):
                srts = (WORLD,) + (OBJ,) * (len(f.args) - 1)
            for a, s in zip(f.args, srts or ()):
                if a not in bound:
                    out.setdefault(a, s)
        elif isinstance(f, FEq):
            for a in (f.left, f.right):
                if a not in bound:
                    out.setdefault(a, OBJ)
        elif isinstance(f, FNot):
            go(f.sub, bound)
        elif isinstance(f, FQUANT):
            go(f.body, bound | {f.var})
        else:
            go(f.left, bound)
            go(f.right, bound)

    go(psi, frozenset())
    return out


def to_fol1(psi: FOFormula) -> tuple[FOFormula, FOFormula, FOFormula]:
    """One-sorted reduction.

    Returns ``(psi', theta, chi)``: the relativized formula (with sort
    guards for its free variables merged into the outermost existential, or
    conjoined in front), the sort-partition axiom and the increasing-domain
    axiom.
    """
    body = _relativize(psi)
    fs = free_sorts(psi)
    guards = [_guard(x, fs[x]) for x in sorted(fo_free_vars(psi), key=lambda x: (fs.get(x) != WORLD, x))]
    if guards:
        if isinstance(body, FExists):
            parts = conjuncts(body.body)
            body = FExists(body.var, None, fand(parts[0], *guards, *parts[1:]))
        else:
            body = fand(*guards, body)
    return body, sort_axiom(), increasing_axiom()


def lift_assignment(alpha: dict[str, str], sorts: dict[str, str]) -> dict:
    """Tag an assignment for use with ``model_to_structure1``."""
    return {x: (tag_world if sorts.get(x) == WORLD else tag_obj)(a) for x, a in alpha.items()}


# FOML text


def to_foml_text(phi: Formula) -> str:
    """Quantified modal rendering with ``exists x. K`` for each ``K[x]``."""
    return _foml(phi)


_FOML_PREC = {Implies: 2, Or: 3, And: 4}
_FOML_OPS = {Implies: "->", Or: "|", And: "&"}


def _foml(phi: Formula) -> str:
    if isinstance(phi, Atom):
        return f"{phi.pred}({','.join(phi.args)})" if phi.args else phi.pred
    if isinstance(phi, Eq):
        return f"{phi.left} = {phi.right}"
    if isinstance(phi, Not):
        return "~" + _foml_wrap(phi.sub, isinstance(phi.sub, Eq))
    if isinstance(phi, Box):
        return "K " + _foml_wrap(phi.sub)
    if isinstance(phi, BoxX):
        return f"exists {phi.var} . K " + _foml_wrap(phi.sub)
    if isinstance(phi, DiaX):
        return f"forall {phi.var} . <K> " + _foml_wrap(phi.sub)
    p = _FOML_PREC[type(phi)]
    lp, rp = (p + 1, p) if isinstance(phi, Implies) else (p, p + 1)
    left = _foml(phi.left) if _foml_prec(phi.left) >= lp else f"({_foml(phi.left)})"
    right = _foml(phi.right) if _foml_prec(phi.right) >= rp else f"({_foml(phi.right)})"
    return f"{left} {_FOML_OPS[type(phi)]} {right}"


def _foml_prec(phi: Formula) -> int:
    return _FOML_PREC.get(type(phi), 5)


def _foml_wrap(phi: Formula, force: bool = False) -> str:
    s = _foml(phi)
    return f"({s})" if force or _foml_prec(phi) < 5 else s


# TPTP


def _tptp(f: FOFormula, names: dict[str, str]) -> str:
    if isinstance(f, FAtom):
        p = f.pred.lower()
        return f"{p}({','.join(names[a] for a in f.args)})" if f.args else p
    if isinstance(f, FEq):
        return f"{names[f.left]} = {names[f.right]}"
    if isinstance(f, FNot):
        return f"~ ({_tptp(f.sub, names)})"
    if isinstance(f, FQUANT):
        inner = dict(names)
        inner[f.var] = _tptp_var(f.var)
        q = "?" if isinstance(f, FExists) else "!"
        return f"{q} [{inner[f.var]}] : ({_tptp(f.body, inner)})"
    op = {FAnd: "&", FOr: "|", FImp: "=>", FIff: "<=>"}[type(f)]
    return f"({_tptp(f.left, names)} {op} {_tptp(f.right, names)})"


def _tptp_var(x: str) -> str:
    return "V" + "".join(c if c.isalnum() else "_" for c in x)


def to_tptp(phi: Formula, name: str = "phi") -> str:
    """TPTP FOF problem asserting that ``phi`` is satisfiable in an
    increasing-domain model: the one-sorted translation, existentially
    closed, together with the sort and increasing-domain axioms."""
    psi, theta, chi = to_fol1(to_2sfol(phi))
    closed = psi
    for x in sorted(fo_free_vars(psi), reverse=True):
        closed = FExists(x, None, closed)
    return "\n".join(
        [
            f"fof(sorts, axiom, {_tptp(theta, {})}).",
            f"fof(increasing, axiom, {_tptp(chi, {})}).",
            f"fof({name}, axiom, {_tptp(closed, {})}).",
        ]
    ) + "\n"


# prenex embedding


def embed_prenex_fol(psi: FOFormula) -> Formula:
    """Replace each leading ``exists x`` by ``K[x]`` and each ``forall x`` by
    ``D[x] K``; the quantifier-free matrix is carried over unchanged."""
    prefix = []
    f = psi
    while isinstance(f, FQUANT):
        if f.sort not in (None, OBJ):
            raise NotPrenex(f"quantifier over sort {f.sort!r}; only object quantifiers can be embedded")
        prefix.append(f)
        f = f.body
    out = _matrix(f)
    for q in reversed(prefix):
        out = BoxX(q.var, out) if isinstance(q, FExists) else DiaX(q.var, Box(out))
    return out


def _matrix(f: FOFormula) -> Formula:
    if isinstance(f, FQUANT):
        raise NotPrenex("quantifier inside the matrix")
    if isinstance(f, FAtom):
        return Atom(f.pred, f.args)
    if isinstance(f, FEq):
        return Eq(f.left, f.right)
    if isinstance(f, FNot):
        return Not(_matrix(f.sub))
    if isinstance(f, FIff):
        a, b = _matrix(f.left), _matrix(f.right)
        return And(Implies(a, b), Implies(b, a))
    ctor = {FAnd: And, FOr: Or, FImp: Implies}[type(f)]
    return ctor(_matrix(f.left), _matrix(f.right))


def is_prenex(psi: FOFormula) -> bool:
    try:
        embed_prenex_fol(psi)
        return True
    except NotPrenex:
        return False


__all__ = [
    "NotPrenex",
    "to_2sfol",
    "to_fol1",
    "to_foml_text",
    "to_tptp",
    "embed_prenex_fol",
    "model_to_structure",
    "model_to_structure1",
    "lift_assignment",
    "sort_axiom",
    "increasing_axiom",
    "print_fo",
]
