"""Checking ∃□-bisimilarity between finite pointed models.

A pair of object sequences ``a``, ``b`` matters only through the world pair
and the correspondence ``{(a_i, b_i)}`` it induces, so the fixpoint runs
over abstract states ``(w, v, f)`` with ``f`` a partial bijection.  This
quotient is an implementation device; :func:`game_bisimilar_bounded` works
on explicit sequences and serves as its oracle.

When two points are not bisimilar the removal record of the fixpoint is
turned into a formula true at the first point and false at the second.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .formula import BOT, TOP, And, Atom, BoxX, Eq, Formula, Not, Or, substitute
from .kripke import KripkeModel

Pairs = frozenset[tuple[str, str]]
State = tuple[str, str, Pairs]


class LengthMismatch(ValueError):
    pass


def _predicates(m: KripkeModel, n: KripkeModel) -> list[tuple[str, int]]:
    ar = dict(n.arity)
    for p, k in m.arity.items():
        if ar.setdefault(p, k) != k:
            raise ValueError(f"predicate {p} has different arities in the two models")
    return sorted(ar.items())




def _check_lengths(a, b) -> None:
    if len(a) != len(b):
        raise LengthMismatch(f"sequences of length {len(a)} and {len(b)}")


def _piso_failure(m, w, n, v, pairs: Sequence[tuple[str, str]], preds):
    """The first predicate tuple on which the two sides disagree, or None.

    Returns ``(pred, positions, holds_in_m)``.
    """
    k = len(pairs)
    for p, ar in preds:
        ext_m, ext_n = m.extension(p, w), n.extension(p, v)
        for pos in itertools.product(range(k), repeat=ar):
            left = tuple(pairs[i][0] for i in pos) in ext_m
            right = tuple(pairs[i][1] for i in pos) in ext_n
            if left != right:
                return p, pos, left
    return None


def piso(m: KripkeModel, w: str, a: Sequence[str], n: KripkeModel, v: str, b: Sequence[str]) -> bool:
    """Partial isomorphism between ``a`` at ``w`` and ``b`` at ``v``."""
    _check_lengths(a, b)
    if any(x not in m.domain for x in a) or any(y not in n.domain for y in b):
        raise ValueError("sequence entries must be objects of their model")
    for i, j in itertools.combinations(range(len(a)), 2):
        if (a[i] == a[j]) != (b[i] == b[j]):
            return False
    return _piso_failure(m, w, n, v, list(zip(a, b)), _predicates(m, n)) is None


# explicit relations


def _norm_relation(z) -> set:
    out = set()
    for (w, a), (v, b) in z:
        a, b = tuple(a), tuple(b)
        _check_lengths(a, b)
        out.add(((w, a), (v, b)))
    return out


def check_relation(m: KripkeModel, n: KripkeModel, z) -> bool:
    """Is ``z`` (pairs ``((w, a), (v, b))``) an ∃□-bisimulation?"""
    return relation_failure(m, n, z) is None


def relation_failure(m: KripkeModel, n: KripkeModel, z) -> str | None:
    """A message naming the first violated clause, or None."""
    z = _norm_relation(z)
    for (w, a), (v, b) in sorted(z):
        if not piso(m, w, a, n, v, b):
            return f"PISO fails at ({w},{list(a)}) ~ ({v},{list(b)})"
        for c in sorted(m.delta[w]):
            if not any(
                all(any(((w2, a + (c,)), (v2, b + (d,))) in z for w2 in m.succ[w]) for v2 in n.succ[v])
                for d in sorted(n.delta[v])
            ):
                return f"zig fails at ({w},{list(a)}) ~ ({v},{list(b)}) for {c}"
        for d in sorted(n.delta[v]):
            if not any(
                all(any(((w2, a + (c,)), (v2, b + (d,))) in z for v2 in n.succ[v]) for w2 in m.succ[w])
                for c in sorted(m.delta[w])
            ):
                return f"zag fails at ({w},{list(a)}) ~ ({v},{list(b)}) for {d}"
    return None


# the bounded game on explicit sequences


def game_bisimilar_bounded(m, w, a, n, v, b, k: int) -> bool:
    """No PISO, zig or zag violation within ``k`` extensions of the sequences."""
    if k < 0:
        raise ValueError("k must be non-negative")
    _check_lengths(a, b)

    @lru_cache(maxsize=None)
    def ok(w, a, v, b, k) -> bool:
        if not piso(m, w, a, n, v, b):
            return False
        if k == 0:
            return True
        zig = all(
            any(all(any(ok(w2, a + (c,), v2, b + (d,), k - 1) for w2 in m.succ[w]) for v2 in n.succ[v]) for d in n.delta[v])
            for c in m.delta[w]
        )
        return zig and all(
            any(all(any(ok(w2, a + (c,), v2, b + (d,), k - 1) for v2 in n.succ[v]) for w2 in m.succ[w]) for c in m.delta[w])
            for d in n.delta[v]
        )

    return ok(w, tuple(a), v, tuple(b), k)


# greatest fixpoint over abstract states


@dataclass(frozen=True)
class _Invalid:
    """An extension by ``(c, d)`` that breaks injectivity."""

    pair: tuple[str, str]
    clash: tuple[str, str]


@dataclass
class BisimResult:
    bisimilar: bool
    start: State | None
    relation: frozenset = frozenset()
    formula: Formula | None = None
    variables: tuple[str, ...] = ()
    states_explored: int = 0

    def __bool__(self) -> bool:
        return self.bisimilar

    def witness_lines(self) -> list[str]:
        """The surviving abstract states, one per line."""
        out = []
        for w, v, f in sorted(self.relation, key=lambda s: (s[0], s[1], sorted(s[2]))):
            corr = ", ".join(f"{c}->{d}" for c, d in sorted(f))
            out.append(f"{w} ~ {v} [{corr}]")
        return out


@dataclass
class _Game:
    m: KripkeModel
    n: KripkeModel
    preds: list
    states: dict = field(default_factory=dict)  # state -> list of extensions
    reason: dict = field(default_factory=dict)  # removed state -> evidence
    pair_ids: dict = field(default_factory=dict)
    counter: itertools.count = field(default_factory=lambda: itertools.count(1))
    memo: dict = field(default_factory=dict)

    def extend(self, s: State, c: str, d: str):
        w, v, f = s
        if (c, d) in f:
            return f
        for a, b in f:
            if a == c or b == d:
                return _Invalid((c, d), (a, b))
        return f | {(c, d)}

    def explore(self, start: State) -> None:
        todo = [start]
        while todo:
            s = todo.pop()
            if s in self.states:
                continue
            w, v, f = s
            fail = _piso_failure(self.m, w, self.n, v, sorted(f), self.preds)
            if fail is not None:
                self.states[s] = None
                p, pos, left = fail
                self.reason[s] = ("piso", p, tuple(sorted(f)[i] for i in pos), left)
                continue
            exts = {}
            for c in sorted(self.m.delta[w]):
                for d in sorted(self.n.delta[v]):
                    g = self.extend(s, c, d)
                    exts[c, d] = g
                    if not isinstance(g, _Invalid):
                        for w2 in self.m.succ[w]:
                            for v2 in self.n.succ[v]:
                                todo.append((w2, v2, g))
            self.states[s] = exts

    def alive(self, s: State, g, w2: str, v2: str) -> bool:
        return not isinstance(g, _Invalid) and (w2, v2, g) not in self.reason

    def zig(self, s: State):
        """None if zig holds at ``s``, else the evidence of its failure."""
        w, v, _ = s
        exts = self.states[s]
        for c in sorted(self.m.delta[w]):
            per_d = {}
            for d in sorted(self.n.delta[v]):
                g = exts[c, d]
                bad = next((v2 for v2 in self.n.succ[v] if not any(self.alive(s, g, w2, v2) for w2 in self.m.succ[w])), None)
                if bad is None:
                    break
                per_d[d] = (g, bad)
            else:
                return ("zig", c, per_d)
        return None

    def zag(self, s: State):
        w, v, _ = s
        exts = self.states[s]
        for d in sorted(self.n.delta[v]):
            per_c = {}
            for c in sorted(self.m.delta[w]):
                g = exts[c, d]
                bad = next((w2 for w2 in self.m.succ[w] if not any(self.alive(s, g, w2, v2) for v2 in self.n.succ[v])), None)
                if bad is None:
                    break
                per_c[c] = (g, bad)
            else:
                return ("zag", d, per_c)
        return None

    def refine(self) -> None:
        changed = True
        while changed:
            changed = False
            for s, exts in self.states.items():
                if exts is None or s in self.reason:
                    continue
                why = self.zig(s) or self.zag(s)
                if why is not None:
                    self.reason[s] = why
                    changed = True

    # distinguishing formulas; free variables name pairs of objects

    def pvar(self, pair) -> str:
        if pair not in self.pair_ids:
            self.pair_ids[pair] = f"_p{len(self.pair_ids)}"
        return self.pair_ids[pair]

    def fresh(self) -> str:
        return f"y{next(self.counter)}"

    def child_formula(self, g, w2: str, v2: str, pair) -> Formula:
        if isinstance(g, _Invalid):
            (c, d), (a, b) = g.pair, g.clash
            if a == c:
                return Eq(self.pvar(pair), self.pvar((a, b)))
            return Not(Eq(self.pvar(pair), self.pvar((a, b))))
        return self.formula((w2, v2, g))

    def formula(self, s: State) -> Formula:
        """True at the ``M`` side of ``s``, false at the ``N`` side."""
        if s in self.memo:
            return self.memo[s]
        w, v, f = s
        why = self.reason[s]
        if why[0] == "piso":
            _, p, pairs, left = why
            atom = Atom(p, tuple(self.pvar(q) for q in pairs))
            out = atom if left else Not(atom)
        elif why[0] == "zig":
            _, c, per_d = why
            x = self.fresh()
            parts = []
            for d, (g, v2) in per_d.items():
                alts = [self.child_formula(g, w2, v2, (c, d)) for w2 in self.m.succ[w]]
                parts.append(substitute(_disj(alts), self.pvar((c, d)), x))
            out = BoxX(x, _conj(parts))
        else:
            _, d, per_c = why
            x = self.fresh()
            parts = []
            for c, (g, w2) in per_c.items():
                alts = [Not(self.child_formula(g, w2, v2, (c, d))) for v2 in self.n.succ[v]]
                parts.append(substitute(_disj(alts), self.pvar((c, d)), x))
            out = Not(BoxX(x, _conj(parts)))
        self.memo[s] = out
        return out


def _dedupe(parts):
    out = []
    for p in parts:
        if p not in out:
            out.append(p)
    return out


def _conj(parts) -> Formula:
    parts = _dedupe(parts)
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def _disj(parts) -> Formula:
    parts = _dedupe(parts)
    if not parts:
        return BOT
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def position_vars(k: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(k))


def bisimilar(
    m: KripkeModel, w: str, a: Sequence[str], n: KripkeModel, v: str, b: Sequence[str], explain: bool = True
) -> BisimResult:
    """Decide ``M, w a ≈ N, v b``.

    On failure with ``explain`` the result carries a formula over the
    variables ``x1..xk`` (one per position) that holds at ``M, w`` under
    ``xi := a_i`` and fails at ``N, v`` under ``xi := b_i``.  It uses
    equality only when the failure is about identities of objects.
    """
    a, b = tuple(a), tuple(b)
    _check_lengths(a, b)
    for x in a:
        if x not in m.domain:
            raise ValueError(f"{x} is not an object of the first model")
    for y in b:
        if y not in n.domain:
            raise ValueError(f"{y} is not an object of the second model")
    if w not in m.succ or v not in n.succ:
        raise KeyError(f"unknown world {w if w not in m.succ else v}")
    xs = position_vars(len(a))
    for i, j in itertools.combinations(range(len(a)), 2):
        if (a[i] == a[j]) != (b[i] == b[j]):
            eq = Eq(xs[i], xs[j])
            return BisimResult(False, None, formula=eq if a[i] == a[j] else Not(eq), variables=xs)
    game = _Game(m, n, _predicates(m, n))
    start: State = (w, v, frozenset(zip(a, b)))
    game.explore(start)
    game.refine()
    alive = frozenset(s for s, e in game.states.items() if e is not None and s not in game.reason)
    if start in alive:
        return BisimResult(True, start, alive, None, xs, len(game.states))
    phi = None
    if explain:
        phi = game.formula(start)
        done = set()
        for i, pair in enumerate(zip(a, b)):
            if pair in game.pair_ids and pair not in done:
                phi = substitute(phi, game.pair_ids[pair], xs[i])
                done.add(pair)
    return BisimResult(False, start, alive, phi, xs, len(game.states))
