"""Increasing-domain Kripke models and the satisfaction relation."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping

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
    free_vars,
    signature,
    ArityMismatch,
)


class SchemaError(ValueError):
    """A model violates one of its structural invariants."""


class UnknownWorld(KeyError):
    pass


class UnassignedVariable(KeyError):
    pass


class NotS5Warning(UserWarning):
    pass


@dataclass(eq=False)
class KripkeModel:
    """A finite model ``<W, D, delta, R, rho>``.

    ``rho[P][w]`` is a frozenset of tuples; missing entries are empty.
    ``arity`` records the arity of every predicate the model interprets.
    """

    worlds: tuple[str, ...]
    domain: tuple[str, ...]
    delta: dict[str, frozenset[str]]
    relation: frozenset[tuple[str, str]]
    rho: dict[str, dict[str, frozenset[tuple[str, ...]]]]
    arity: dict[str, int]
    succ: dict[str, tuple[str, ...]] = field(init=False, repr=False)

    def __post_init__(self):
        succ: dict[str, list[str]] = {w: [] for w in self.worlds}
        for a, b in sorted(self.relation):
            if a in succ:
                succ[a].append(b)
        self.succ = {w: tuple(vs) for w, vs in succ.items()}

    @classmethod
    def create(
        cls,
        worlds,
        domain,
        relation=(),
        rho: Mapping | None = None,
        delta: Mapping | None = None,
        arity: Mapping | None = None,
        strict: bool = False,
    ) -> "KripkeModel":
        """Build and validate a model.

        ``delta`` defaults to the constant domain.  ``rho`` maps predicate
        names to ``{world: iterable of tuples}``.
        """
        worlds = tuple(worlds)
        domain = tuple(domain)
        if delta is None:
            delta = {w: domain for w in worlds}
        rho = rho or {}
        arities = dict(arity or {})
        norm_rho: dict[str, dict[str, frozenset]] = {}
        for p, per_world in rho.items():
            norm_rho[p] = {}
            for w, tuples in per_world.items():
                ts = frozenset(tuple(t) for t in tuples)
                for t in ts:
                    n = arities.setdefault(p, len(t))
                    if n != len(t):
                        raise SchemaError(f"arity: predicate {p} has tuples of length {n} and {len(t)}")
                norm_rho[p][w] = ts
            arities.setdefault(p, 1)
        m = cls(
            worlds=worlds,
            domain=domain,
            delta={w: frozenset(delta.get(w, ())) for w in worlds},
            relation=frozenset((a, b) for a, b in relation),
            rho=norm_rho,
            arity=arities,
        )
        m.validate(strict=strict)
        return m

    def validate(self, strict: bool = False) -> None:
        ws, ds = set(self.worlds), set(self.domain)
        if not ws:
            raise SchemaError("nonempty worlds: W must be nonempty")
        if not ds:
            raise SchemaError("nonempty domain: D must be nonempty")
        if len(ws) != len(self.worlds) or len(ds) != len(self.domain):
            raise SchemaError("duplicate world or object name")
        for w in self.worlds:
            if not self.delta[w]:
                raise SchemaError(f"nonempty local domain: delta({w}) is empty")
            if not self.delta[w] <= ds:
                raise SchemaError(f"unknown object in delta({w})")
        for a, b in self.relation:
            if a not in ws or b not in ws:
                raise SchemaError(f"unknown world in relation pair ({a}, {b})")
            if not self.delta[a] <= self.delta[b]:
                raise SchemaError(f"increasing domain: {a}R{b} but delta({a}) is not a subset of delta({b})")
        for p, per_world in self.rho.items():
            for w, ts in per_world.items():
                if w not in ws:
                    raise SchemaError(f"unknown world {w} in interpretation of {p}")
                for t in ts:
                    if len(t) != self.arity[p]:
                        raise SchemaError(f"arity: tuple {t} for {p} has the wrong length")
                    bad = set(t) - (self.delta[w] if strict else ds)
                    if bad:
                        where = f"delta({w})" if strict else "D"
                        raise SchemaError(f"strict: object(s) {sorted(bad)} of {p} at {w} not in {where}")

    def holds(self, pred: str, world: str, tup: tuple[str, ...]) -> bool:
        return tup in self.rho.get(pred, {}).get(world, ())

    def extension(self, pred: str, world: str) -> frozenset:
        return self.rho.get(pred, {}).get(world, frozenset())

    def __eq__(self, other) -> bool:
        if not isinstance(other, KripkeModel):
            return NotImplemented
        return (
            set(self.worlds) == set(other.worlds)
            and set(self.domain) == set(other.domain)
            and self.delta == other.delta
            and self.relation == other.relation
            and _nonempty(self.rho) == _nonempty(other.rho)
            and self.arity == other.arity
        )

    def __repr__(self) -> str:
        return f"KripkeModel(W={list(self.worlds)}, D={list(self.domain)}, R={sorted(self.relation)})"


def _nonempty(rho):
    out = {p: {w: ts for w, ts in m.items() if ts} for p, m in rho.items()}
    return {p: m for p, m in out.items() if m}


def is_increasing(m: KripkeModel) -> bool:
    return all(m.delta[a] <= m.delta[b] for a, b in m.relation)


def is_constant_domain(m: KripkeModel) -> bool:
    full = frozenset(m.domain)
    return all(m.delta[w] == full for w in m.worlds)


def is_equivalence(m: KripkeModel) -> bool:
    r = m.relation
    if any((w, w) not in r for w in m.worlds):
        return False
    if any((b, a) not in r for a, b in r):
        return False
    return all((a, c) in r for a, b in r for b2, c in r if b == b2)


def is_s5(m: KripkeModel) -> bool:
    return is_equivalence(m) and is_constant_domain(m)


def _check_query(m: KripkeModel, w: str, phi: Formula) -> None:
    if w not in m.succ:
        raise UnknownWorld(f"unknown world {w}")
    for p, n in signature(phi).items():
        if p in m.arity and m.arity[p] != n:
            raise ArityMismatch(f"predicate {p} has arity {m.arity[p]} in the model but {n} in the formula")


def _env(phi: Formula, sigma, default) -> dict[str, str]:
    env = dict(sigma or {})
    for x in free_vars(phi):
        if x not in env:
            if default is None:
                raise UnassignedVariable(f"free variable {x} has no value")
            env[x] = default
    return env


def mc(m: KripkeModel, w: str, sigma: Mapping[str, str] | None, phi: Formula, default: str | None = None) -> bool:
    """Decide ``M, w, sigma |= phi``.

    ``sigma`` only needs to cover the free variables of ``phi``; any other
    free variable takes ``default`` when given.
    """
    _check_query(m, w, phi)
    return evaluate(m, w, _env(phi, sigma, default), phi)


def evaluate(m: KripkeModel, w: str, env: dict, phi: Formula) -> bool:
    """Unchecked recursive evaluation; ``env`` must cover every free variable."""
    if isinstance(phi, Atom):
        return tuple(env[a] for a in phi.args) in m.rho.get(phi.pred, {}).get(w, ())
    if isinstance(phi, Eq):
        return env[phi.left] == env[phi.right]
    if isinstance(phi, Not):
        return not evaluate(m, w, env, phi.sub)
    if isinstance(phi, And):
        return evaluate(m, w, env, phi.left) and evaluate(m, w, env, phi.right)
    if isinstance(phi, Or):
        return evaluate(m, w, env, phi.left) or evaluate(m, w, env, phi.right)
    if isinstance(phi, Implies):
        return (not evaluate(m, w, env, phi.left)) or evaluate(m, w, env, phi.right)
    succ = m.succ[w]
    if isinstance(phi, Box):
        return all(evaluate(m, v, env, phi.sub) for v in succ)
    x = phi.var
    objs = sorted(m.delta[w])
    if isinstance(phi, BoxX):
        return any(all(evaluate(m, v, {**env, x: a}, phi.sub) for v in succ) for a in objs)
    if isinstance(phi, DiaX):
        return all(any(evaluate(m, v, {**env, x: a}, phi.sub) for v in succ) for a in objs)
    raise TypeError(f"not a formula: {phi!r}")


def satisfies_at_all(m: KripkeModel, phi: Formula, sigma=None) -> bool:
    """Truth at every world (with ``sigma`` fixed)."""
    return all(mc(m, w, sigma, phi) for w in m.worlds)


# derived S5 modalities


@dataclass(frozen=True)
class MentionAll:
    """For every object, ``Box phi`` or ``Box ~phi`` (knowing whether)."""

    var: str


@dataclass(frozen=True)
class BoxForall:
    var: str


@dataclass(frozen=True)
class BoxVec:
    vars: tuple[str, ...]


DerivedOp = MentionAll | BoxForall | BoxVec


def mc_derived(m: KripkeModel, w: str, sigma, op: DerivedOp, phi: Formula) -> bool:
    """Evaluate a derived modality by its own semantic clause.

    Objects range over the whole domain ``D``.  On non-S5 models the value
    is still computed but a ``NotS5Warning`` is issued.
    """
    if not is_s5(m):
        warnings.warn("derived modalities are only characterised over S5 models", NotS5Warning, stacklevel=2)
    bound = {op.var} if not isinstance(op, BoxVec) else set(op.vars)
    _check_query(m, w, phi)
    env = _env(phi, {k: v for k, v in (sigma or {}).items()}, None if not bound else m.domain[0])
    box, nbox = Box(phi), Box(Not(phi))
    if isinstance(op, MentionAll):
        return all(
            evaluate(m, w, {**env, op.var: d}, box) or evaluate(m, w, {**env, op.var: d}, nbox) for d in m.domain
        )
    if isinstance(op, BoxForall):
        return all(evaluate(m, w, {**env, op.var: d}, box) for d in m.domain)
    return _exists_vec(m, w, env, op.vars, box)


def _exists_vec(m, w, env, xs, box) -> bool:
    if not xs:
        return evaluate(m, w, env, box)
    return any(_exists_vec(m, w, {**env, xs[0]: d}, xs[1:], box) for d in m.domain)
