"""Abstract syntax for the mention-some language with equality and plain K.

Formulas are immutable dataclasses.  Variables and predicate names are plain
strings.  ``BoxX(x, phi)`` is the mention-some modality (some object ``x`` is
known to satisfy ``phi``), ``DiaX`` its dual, and ``Box`` the ordinary
knowledge modality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union


class EqualityNotSupported(ValueError):
    """Raised when an equality atom reaches an equality-free procedure."""


class ArityMismatch(ValueError):
    """Raised when one predicate name is used with two different arities."""


@dataclass(frozen=True)
class Eq:
    left: str
    right: str

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True)
class Not:
    sub: "Formula"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True)
class Box:
    sub: "Formula"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True)
class BoxX:
    var: str
    sub: "Formula"

    def __str__(self) -> str:
        return _show(self)


@dataclass(frozen=True)
class DiaX:
    var: str
    sub: "Formula"

    def __str__(self) -> str:
        return _show(self)


Formula = Union[Eq, Atom, Not, And, Or, Implies, Box, BoxX, DiaX]
BINARY = (And, Or, Implies)
BINDERS = (BoxX, DiaX)

# top and bot are elaborated over a reserved 0-ary predicate
TOP_PRED = "_T"
TOP: Formula = Or(Atom(TOP_PRED), Not(Atom(TOP_PRED)))
BOT: Formula = And(Atom(TOP_PRED), Not(Atom(TOP_PRED)))

FRESH_PREFIX = "_v"
_FRESH_RE = re.compile(r"_v(\d+)$")


def _show(phi: Formula) -> str:
    from .syntax import print_formula

    return print_formula(phi)


def var_key(name: str) -> tuple:
    """Sort key realising the fixed enumeration of variables.

    Ordinary names come first in lexicographic order, then the reserved
    fresh names ``_v0, _v1, ...`` in numeric order.
    """
    m = _FRESH_RE.match(name)
    if m:
        return (1, int(m.group(1)), "")
    return (0, 0, name)


def sort_vars(names) -> list[str]:
    return sorted(names, key=var_key)


def fresh_var(avoid) -> str:
    i = 0
    while f"{FRESH_PREFIX}{i}" in avoid:
        i += 1
    return f"{FRESH_PREFIX}{i}"


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, (Eq, Atom)):
        return ()
    if isinstance(phi, (Not, Box, BoxX, DiaX)):
        return (phi.sub,)
    return (phi.left, phi.right)


def subformulas(phi: Formula) -> Iterator[Formula]:
    """Pre-order walk over every subformula occurrence."""
    stack = [phi]
    while stack:
        f = stack.pop()
        yield f
        stack.extend(reversed(children(f)))


def formula_size(phi: Formula) -> int:
    """Number of AST nodes."""
    return sum(1 for _ in subformulas(phi))


def modal_depth(phi: Formula) -> int:
    if isinstance(phi, (Eq, Atom)):
        return 0
    if isinstance(phi, Not):
        return modal_depth(phi.sub)
    if isinstance(phi, (Box, BoxX, DiaX)):
        return 1 + modal_depth(phi.sub)
    return max(modal_depth(phi.left), modal_depth(phi.right))


def free_vars(phi: Formula) -> set[str]:
    if isinstance(phi, Eq):
        return {phi.left, phi.right}
    if isinstance(phi, Atom):
        return set(phi.args)
    if isinstance(phi, BINDERS):
        return free_vars(phi.sub) - {phi.var}
    out: set[str] = set()
    for c in children(phi):
        out |= free_vars(c)
    return out


def all_vars(phi: Formula) -> set[str]:
    """Every variable name mentioned anywhere, binders included."""
    out: set[str] = set()
    for f in subformulas(phi):
        if isinstance(f, Eq):
            out.update((f.left, f.right))
        elif isinstance(f, Atom):
            out.update(f.args)
        elif isinstance(f, BINDERS):
            out.add(f.var)
    return out


def binders(phi: Formula) -> list[str]:
    """Variables bound by modality occurrences, in pre-order, with repeats."""
    return [f.var for f in subformulas(phi) if isinstance(f, BINDERS)]


def signature(phi: Formula, sig: dict[str, int] | None = None) -> dict[str, int]:
    """Map predicate names to arities, raising ArityMismatch on a clash."""
    sig = {} if sig is None else sig
    for f in subformulas(phi):
        if isinstance(f, Atom):
            n = sig.setdefault(f.pred, len(f.args))
            if n != len(f.args):
                raise ArityMismatch(f"predicate {f.pred} used with arities {n} and {len(f.args)}")
    return sig


def has_equality(phi: Formula) -> bool:
    return any(isinstance(f, Eq) for f in subformulas(phi))


def rebuild(phi: Formula, kids) -> Formula:
    """Same constructor as ``phi`` over new children."""
    if isinstance(phi, (Not, Box)):
        return type(phi)(kids[0])
    if isinstance(phi, BINDERS):
        return type(phi)(phi.var, kids[0])
    if isinstance(phi, BINARY):
        return type(phi)(kids[0], kids[1])
    return phi


def substitute(phi: Formula, x: str, y: str) -> Formula:
    """Replace every free occurrence of ``x`` by ``y`` (no capture check)."""
    if x == y:
        return phi
    if isinstance(phi, Eq):
        return Eq(y if phi.left == x else phi.left, y if phi.right == x else phi.right)
    if isinstance(phi, Atom):
        return Atom(phi.pred, tuple(y if a == x else a for a in phi.args))
    if isinstance(phi, BINDERS) and phi.var == x:
        return phi
    return rebuild(phi, [substitute(c, x, y) for c in children(phi)])


def is_admissible(phi: Formula, x: str, y: str) -> bool:
    """True iff no free occurrence of ``x`` in ``phi`` lies under a binder of ``y``."""

    def ok(f: Formula, under_y: bool) -> bool:
        if isinstance(f, Eq):
            return not (under_y and x in (f.left, f.right))
        if isinstance(f, Atom):
            return not (under_y and x in f.args)
        if isinstance(f, BINDERS):
            if f.var == x:
                return True
            return ok(f.sub, under_y or f.var == y)
        return all(ok(c, under_y) for c in children(f))

    return x == y or ok(phi, False)


def is_clean(phi: Formula) -> bool:
    bs = binders(phi)
    return len(bs) == len(set(bs)) and not (set(bs) & free_vars(phi))


def reletter_clean(phi: Formula) -> Formula:
    """Rename bound variables so that the result is clean.

    The first binder of each name keeps it unless that name also occurs
    free; every later clash gets the least unused fresh name.
    """
    free = free_vars(phi)
    taken = all_vars(phi)
    seen: set[str] = set()

    def go(f: Formula) -> Formula:
        if isinstance(f, BINDERS):
            var, sub = f.var, f.sub
            if var in free or var in seen:
                new = fresh_var(taken)
                taken.add(new)
                sub = substitute(sub, var, new)
                var = new
            seen.add(var)
            return type(f)(var, go(sub))
        return rebuild(f, [go(c) for c in children(f)])

    return go(phi)


def is_literal(phi: Formula) -> bool:
    return isinstance(phi, Atom) or (isinstance(phi, Not) and isinstance(phi.sub, Atom))


def is_pnf(phi: Formula) -> bool:
    if is_literal(phi):
        return True
    if isinstance(phi, (And, Or)):
        return is_pnf(phi.left) and is_pnf(phi.right)
    if isinstance(phi, BINDERS):
        return is_pnf(phi.sub)
    return False


def to_pnf(phi: Formula) -> Formula:
    """Push negations to the atoms.

    ``Box`` becomes ``BoxX`` over a fresh variable and implications are
    expanded.  Equality is rejected.
    """
    if has_equality(phi):
        raise EqualityNotSupported("positive normal form is defined for the equality-free fragment")
    taken = all_vars(phi)

    def fresh() -> str:
        v = fresh_var(taken)
        taken.add(v)
        return v

    def pos(f: Formula) -> Formula:
        if isinstance(f, Atom):
            return f
        if isinstance(f, Not):
            return neg(f.sub)
        if isinstance(f, And):
            return And(pos(f.left), pos(f.right))
        if isinstance(f, Or):
            return Or(pos(f.left), pos(f.right))
        if isinstance(f, Implies):
            return Or(neg(f.left), pos(f.right))
        if isinstance(f, Box):
            return BoxX(fresh(), pos(f.sub))
        return type(f)(f.var, pos(f.sub))

    def neg(f: Formula) -> Formula:
        if isinstance(f, Atom):
            return Not(f)
        if isinstance(f, Not):
            return pos(f.sub)
        if isinstance(f, And):
            return Or(neg(f.left), neg(f.right))
        if isinstance(f, Or):
            return And(neg(f.left), neg(f.right))
        if isinstance(f, Implies):
            return And(pos(f.left), neg(f.right))
        if isinstance(f, Box):
            return DiaX(fresh(), neg(f.sub))
        if isinstance(f, BoxX):
            return DiaX(f.var, neg(f.sub))
        return BoxX(f.var, neg(f.sub))

    return pos(phi)


def conj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return BOT
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out
