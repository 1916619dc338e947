"""First-order formulas, finite structures and a Tarskian evaluator.

Quantified variables carry a sort: ``"obj"`` for objects, ``"world"`` for
worlds, or ``None`` in one-sorted formulas.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Union


class SortMismatch(ValueError):
    pass


class FOParseError(ValueError):
    pass


@dataclass(frozen=True)
class FEq:
    left: str
    right: str


@dataclass(frozen=True)
class FAtom:
    pred: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class FNot:
    sub: "FOFormula"


@dataclass(frozen=True)
class FAnd:
    left: "FOFormula"
    right: "FOFormula"


@dataclass(frozen=True)
class FOr:
    left: "FOFormula"
    right: "FOFormula"


@dataclass(frozen=True)
class FImp:
    left: "FOFormula"
    right: "FOFormula"


@dataclass(frozen=True)
class FIff:
    left: "FOFormula"
    right: "FOFormula"


@dataclass(frozen=True)
class FExists:
    var: str
    sort: str | None
    body: "FOFormula"


@dataclass(frozen=True)
class FForall:
    var: str
    sort: str | None
    body: "FOFormula"


FOFormula = Union[FEq, FAtom, FNot, FAnd, FOr, FImp, FIff, FExists, FForall]
FBINARY = (FAnd, FOr, FImp, FIff)
FQUANT = (FExists, FForall)


def fand(*parts: FOFormula) -> FOFormula:
    out = parts[0]
    for p in parts[1:]:
        out = FAnd(out, p)
    return out


def conjuncts(f: FOFormula) -> list[FOFormula]:
    if isinstance(f, FAnd):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def fo_free_vars(f: FOFormula) -> set[str]:
    if isinstance(f, FEq):
        return {f.left, f.right}
    if isinstance(f, FAtom):
        return set(f.args)
    if isinstance(f, FNot):
        return fo_free_vars(f.sub)
    if isinstance(f, FQUANT):
        return fo_free_vars(f.body) - {f.var}
    return fo_free_vars(f.left) | fo_free_vars(f.right)


@dataclass
class FOStructure:
    """A finite structure.

    ``carriers`` maps each sort (``None`` when one-sorted) to its elements.
    ``arg_sorts`` optionally fixes the sort of every argument place of a
    predicate; arguments are then checked during evaluation.
    """

    carriers: dict[str | None, frozenset]
    relations: dict[str, frozenset[tuple]] = field(default_factory=dict)
    arg_sorts: dict[str, tuple[str | None, ...]] = field(default_factory=dict)

    def carrier(self, sort):
        try:
            return self.carriers[sort]
        except KeyError:
            raise SortMismatch(f"structure has no carrier for sort {sort!r}") from None


def fo_eval(s: FOStructure, alpha: Mapping, f: FOFormula, sorts: Mapping[str, str | None] | None = None) -> bool:
    """Classical truth of ``f`` in ``s`` under ``alpha``.

    ``sorts`` optionally declares the sorts of free variables; their values
    are then checked against the carriers.
    """
    for x, srt in (sorts or {}).items():
        if x in alpha and alpha[x] not in s.carrier(srt):
            raise SortMismatch(f"{x} is assigned {alpha[x]!r}, which is not of sort {srt!r}")
    missing = fo_free_vars(f) - set(alpha)
    if missing:
        raise KeyError(f"unassigned variable(s) {sorted(missing)}")
    return _ev(s, dict(alpha), f)


def _ev(s: FOStructure, env: dict, f: FOFormula) -> bool:
    if isinstance(f, FAtom):
        vals = tuple(env[a] for a in f.args)
        want = s.arg_sorts.get(f.pred)
        if want is not None:
            if len(want) != len(vals):
                raise SortMismatch(f"{f.pred} expects {len(want)} arguments, got {len(vals)}")
            for a, v, srt in zip(f.args, vals, want):
                if v not in s.carriers.get(srt, ()):
                    raise SortMismatch(f"argument {a} of {f.pred} is not of sort {srt!r}")
        return vals in s.relations.get(f.pred, ())
    if isinstance(f, FEq):
        return env[f.left] == env[f.right]
    if isinstance(f, FNot):
        return not _ev(s, env, f.sub)
    if isinstance(f, FAnd):
        return _ev(s, env, f.left) and _ev(s, env, f.right)
    if isinstance(f, FOr):
        return _ev(s, env, f.left) or _ev(s, env, f.right)
    if isinstance(f, FImp):
        return (not _ev(s, env, f.left)) or _ev(s, env, f.right)
    if isinstance(f, FIff):
        return _ev(s, env, f.left) == _ev(s, env, f.right)
    dom = s.carrier(f.sort)
    old = env.get(f.var, _MISSING)
    try:
        if isinstance(f, FExists):
            for d in dom:
                env[f.var] = d
                if _ev(s, env, f.body):
                    return True
            return False
        for d in dom:
            env[f.var] = d
            if not _ev(s, env, f.body):
                return False
        return True
    finally:
        if old is _MISSING:
            env.pop(f.var, None)
        else:
            env[f.var] = old


_MISSING = object()


# printing

_SUBSCRIPTS = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")
_FPREC = {FIff: 1, FImp: 2, FOr: 3, FAnd: 4}


def _fprec(f) -> int:
    for cls, p in _FPREC.items():
        if isinstance(f, cls):
            return p
    return 5


def print_fo(f: FOFormula, style: str = "ascii") -> str:
    """Render a first-order formula.

    ``style="ascii"`` gives a parseable form (``exists x. (...)``,
    ``Q_P(v,x)``); ``style="compact"`` gives the textbook form with
    juxtaposed arguments and unicode connectives, e.g.
    ``∃x(S₁x ∧ Eux ∧ ∀v((S₂v ∧ Ruv) → Q_P v x))``.
    """
    return _Printer(style).show(f)


class _Printer:
    def __init__(self, style: str):
        if style not in ("ascii", "compact"):
            raise ValueError(f"unknown style {style!r}")
        self.compact = style == "compact"
        if self.compact:
            self.ops = {FAnd: "∧", FOr: "∨", FImp: "→", FIff: "↔"}
        else:
            self.ops = {FAnd: "&", FOr: "|", FImp: "->", FIff: "<->"}

    def atom(self, f: FAtom) -> str:
        if not self.compact:
            return f"{f.pred}({','.join(f.args)})" if f.args else f.pred
        pred = re.sub(r"^S(\d)$", lambda m: "S" + m.group(1).translate(_SUBSCRIPTS), f.pred)
        if len(f.pred) == 1 or re.fullmatch(r"S\d", f.pred):
            if all(len(a) == 1 for a in f.args):
                return pred + "".join(f.args)
        return " ".join([pred, *f.args])

    def show(self, f: FOFormula) -> str:
        if isinstance(f, FAtom):
            return self.atom(f)
        if isinstance(f, FEq):
            return f"{f.left} {'≈' if self.compact else '='} {f.right}"
        if isinstance(f, FNot):
            return ("¬" if self.compact else "~") + self.wrap(f.sub, 5)
        if isinstance(f, FQUANT):
            q = ("∃" if isinstance(f, FExists) else "∀") if self.compact else (
                "exists " if isinstance(f, FExists) else "forall "
            )
            srt = "" if f.sort is None or self.compact else f":{f.sort}"
            body = self.show(f.body)
            if self.compact:
                if isinstance(f.body, (FAtom, FEq, FNot) + FQUANT):
                    return f"{q}{f.var}{body}" if isinstance(f.body, FQUANT) else f"{q}{f.var}({body})"
                return f"{q}{f.var}({body})"
            return f"{q}{f.var}{srt}. ({body})"
        p = _FPREC[type(f)]
        t = type(f)
        if isinstance(f, FImp):
            left, right = self.wrap(f.left, p + 1, t), self.wrap(f.right, p, t)
        else:
            left, right = self.wrap(f.left, p, t), self.wrap(f.right, p + 1, t)
        return f"{left} {self.ops[t]} {right}"

    def wrap(self, f, need: int, parent=None) -> str:
        s = self.show(f)
        prec = 0 if isinstance(f, FQUANT) and not self.compact else _fprec(f)
        if self.compact and parent is not None and isinstance(f, FBINARY) and type(f) is not parent:
            # mixed connectives are always bracketed in the textbook form
            prec = 0
        return f"({s})" if prec < need else s


# parsing (ascii style)

_FTOK = re.compile(r"\s*(?:(<->|->|!=|[().,:~&|=])|([A-Za-z_][A-Za-z0-9_']*))")


def parse_fo(text: str) -> FOFormula:
    """Parse the ascii first-order syntax.

    Quantifiers are ``exists x. body`` / ``forall x y. body`` with an
    optional sort suffix ``x:obj``; the body extends as far right as
    possible.
    """
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _FTOK.match(text, pos)
        if not m or m.end() == pos:
            raise FOParseError(f"unexpected character {text[pos]!r} at {pos}")
        toks.append(m.group(1) or m.group(2))
        pos = m.end()
    toks.append("")
    i = 0

    def peek():
        return toks[i]

    def take(expected=None):
        nonlocal i
        t = toks[i]
        if expected is not None and t != expected:
            raise FOParseError(f"expected {expected!r}, found {t or 'end of input'!r}")
        i += 1
        return t

    def ident():
        t = take()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", t) or t in ("exists", "forall"):
            raise FOParseError(f"expected identifier, found {t or 'end of input'!r}")
        return t

    def iff():
        f = imp()
        while peek() == "<->":
            take()
            f = FIff(f, imp())
        return f

    def imp():
        f = disj()
        if peek() == "->":
            take()
            return FImp(f, imp())
        return f

    def disj():
        f = conj()
        while peek() == "|":
            take()
            f = FOr(f, conj())
        return f

    def conj():
        f = unary()
        while peek() == "&":
            take()
            f = FAnd(f, unary())
        return f

    def unary():
        t = peek()
        if t == "~":
            take()
            return FNot(unary())
        if t in ("exists", "forall"):
            take()
            binds = []
            while peek() != ".":
                v = ident()
                srt = None
                if peek() == ":":
                    take()
                    srt = ident()
                binds.append((v, srt))
            if not binds:
                raise FOParseError("quantifier without variables")
            take(".")
            body = iff()
            for v, srt in reversed(binds):
                body = (FExists if t == "exists" else FForall)(v, srt, body)
            return body
        if t == "(":
            take()
            f = iff()
            take(")")
            return f
        name = ident()
        if peek() == "=":
            take()
            return FEq(name, ident())
        if peek() == "!=":
            take()
            return FNot(FEq(name, ident()))
        if peek() == "(":
            take()
            args = [ident()]
            while peek() == ",":
                take()
                args.append(ident())
            take(")")
            return FAtom(name, tuple(args))
        return FAtom(name)

    f = iff()
    if peek() != "":
        raise FOParseError(f"unexpected {peek()!r}")
    return f
