"""Bounded model search.

``bounded_search`` looks for a pointed model of a formula with at most
``max_worlds`` worlds and ``max_objects`` objects.  The default engine
encodes the question into propositional SAT; ``engine="enumerate"``
walks through every model explicitly and is only usable for tiny bounds,
mainly to cross-check the encoding.

Completeness within the bounds: in the arbitrary frame class a model with
fewer worlds or objects can always be padded (extra worlds unreachable,
extra objects outside every local domain), so one SAT call at the maximal
bounds decides existence.  In S5 the relation is taken to be universal
(the root's equivalence class is a generated submodel) and world copies
preserve truth, so for each object count one call at the maximal world
count is complete.
"""

from __future__ import annotations

import enum
import itertools
import string
from dataclasses import dataclass

from pysat.formula import IDPool
from pysat.solvers import Solver

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
    sort_vars,
)
from .kripke import KripkeModel, evaluate


class FrameClass(enum.Enum):
    ARBITRARY = "arbitrary"
    S5 = "s5"


@dataclass(frozen=True)
class Found:
    model: KripkeModel
    world: str
    sigma: dict

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class NotFoundWithinBounds:
    max_worlds: int
    max_objects: int

    def __bool__(self) -> bool:
        return False


SearchResult = Found | NotFoundWithinBounds


def object_names(k: int) -> list[str]:
    letters = string.ascii_lowercase
    return [letters[i] if i < 26 else f"a{i}" for i in range(k)]


def world_names(n: int) -> list[str]:
    return [f"w{i}" for i in range(n)]


# negation normal form with Box and Dia kept apart; independent of to_pnf


@dataclass(frozen=True)
class _Dia:
    sub: object


@dataclass(frozen=True)
class _Lit:
    atom: Atom | Eq
    positive: bool


def _nnf(phi: Formula, pos: bool = True):
    if isinstance(phi, (Atom, Eq)):
        return _Lit(phi, pos)
    if isinstance(phi, Not):
        return _nnf(phi.sub, not pos)
    if isinstance(phi, And):
        return (And if pos else Or)(_nnf(phi.left, pos), _nnf(phi.right, pos))
    if isinstance(phi, Or):
        return (Or if pos else And)(_nnf(phi.left, pos), _nnf(phi.right, pos))
    if isinstance(phi, Implies):
        return _nnf(Or(Not(phi.left), phi.right), pos)
    if isinstance(phi, Box):
        return Box(_nnf(phi.sub, True)) if pos else _Dia(_nnf(phi.sub, False))
    if isinstance(phi, BoxX):
        return BoxX(phi.var, _nnf(phi.sub, True)) if pos else DiaX(phi.var, _nnf(phi.sub, False))
    if isinstance(phi, DiaX):
        return DiaX(phi.var, _nnf(phi.sub, True)) if pos else BoxX(phi.var, _nnf(phi.sub, False))
    raise TypeError(phi)


def _nnf_free(f) -> frozenset:
    if isinstance(f, _Lit):
        return frozenset(free_vars(f.atom))
    if isinstance(f, (And, Or)):
        return _nnf_free(f.left) | _nnf_free(f.right)
    if isinstance(f, (Box, _Dia)):
        return _nnf_free(f.sub)
    return _nnf_free(f.sub) - {f.var}


class _Encoder:
    def __init__(self, nnf, n: int, k: int, sig: dict[str, int], s5: bool):
        self.n, self.k, self.sig, self.s5 = n, k, sig, s5
        self.pool = IDPool()
        self.clauses: list[list[int]] = []
        self.memo: dict = {}
        self.free_cache: dict = {}
        self.true = self.pool.id(("true",))
        self.clauses.append([self.true])
        self.frame()

    def v(self, *key) -> int:
        return self.pool.id(key)

    def r(self, i: int, j: int) -> int:
        return self.true if self.s5 else self.v("r", i, j)

    def e(self, i: int, a: int) -> int:
        return self.true if self.s5 else self.v("e", i, a)

    def frame(self) -> None:
        if self.s5:
            return
        n, cl = self.n, self.clauses
        for i in range(n):
            cl.append([self.e(i, a) for a in range(self.k)])
            for j in range(n):
                for a in range(self.k):
                    cl.append([-self.r(i, j), -self.e(i, a), self.e(j, a)])
        # Symmetry breaking.  Only the part generated by the root matters, and
        # it can be numbered breadth first: the used worlds form a prefix, each
        # used world other than the root has a smaller-numbered predecessor,
        # and the least predecessor index is monotone in the world number.
        used = [self.true] + [self.v("u", j) for j in range(1, n)]
        for j in range(1, n):
            cl.append([-used[j], used[j - 1]])
            for i in range(n):
                cl.append([used[j], -self.r(i, j)])
                cl.append([used[j], -self.r(j, i)])
        upto = {}
        for j in range(1, n):
            prev = None
            for i in range(j):
                q = self.v("q", j, i)
                upto[j, i] = q
                # q <-> prev | r(i, j)
                cl.append([-self.r(i, j), q])
                cl.append([-q, self.r(i, j)] + ([prev] if prev else []))
                if prev:
                    cl.append([-prev, q])
                prev = q
            cl.append([-used[j], prev])
        for j in range(1, n - 1):
            for i in range(j):
                cl.append([-upto[j + 1, i], upto[j, i]])

    def fv(self, f) -> tuple:
        key = id(f)
        if key not in self.free_cache:
            self.free_cache[key] = (f, tuple(sort_vars(_nnf_free(f))))
        return self.free_cache[key][1]

    def node(self, f, w: int, env: dict) -> int:
        """A literal that, when true, forces ``f`` at world ``w`` under ``env``."""
        if isinstance(f, _Lit):
            if isinstance(f.atom, Eq):
                holds = env[f.atom.left] == env[f.atom.right]
                return self.true if holds == f.positive else -self.true
            lit = self.v("p", f.atom.pred, w, tuple(env[a] for a in f.atom.args))
            return lit if f.positive else -lit
        key = (id(f), w, tuple(env[x] for x in self.fv(f)))
        if key in self.memo:
            return self.memo[key]
        t = self.pool.id(("t",) + key)
        self.memo[key] = t
        cl = self.clauses
        if isinstance(f, And):
            cl.append([-t, self.node(f.left, w, env)])
            cl.append([-t, self.node(f.right, w, env)])
        elif isinstance(f, Or):
            cl.append([-t, self.node(f.left, w, env), self.node(f.right, w, env)])
        elif isinstance(f, Box):
            for j in range(self.n):
                cl.append([-t, -self.r(w, j), self.node(f.sub, j, env)])
        elif isinstance(f, _Dia):
            cl.append([-t] + [self._reach(w, j, f.sub, env) for j in range(self.n)])
        elif isinstance(f, BoxX):
            picks = []
            for a in range(self.k):
                pick = self.pool.id(("pick",) + key + (a,))
                picks.append(pick)
                cl.append([-pick, self.e(w, a)])
                inner = {**env, f.var: a}
                for j in range(self.n):
                    cl.append([-pick, -self.r(w, j), self.node(f.sub, j, inner)])
            cl.append([-t] + picks)
        elif isinstance(f, DiaX):
            for a in range(self.k):
                inner = {**env, f.var: a}
                cl.append([-t, -self.e(w, a)] + [self._reach(w, j, f.sub, inner) for j in range(self.n)])
        else:
            raise TypeError(f)
        return t

    def _reach(self, w: int, j: int, sub, env: dict) -> int:
        key = ("reach", w, j, id(sub), tuple(env[x] for x in self.fv(sub)))
        if key in self.memo:
            return self.memo[key]
        c = self.pool.id(key)
        self.memo[key] = c
        self.clauses.append([-c, self.r(w, j)])
        self.clauses.append([-c, self.node(sub, j, env)])
        return c


def _rgs(m: int, k: int):
    """Restricted growth strings of length ``m`` over ``k`` values."""

    def go(prefix, top):
        if len(prefix) == m:
            yield tuple(prefix)
            return
        for a in range(min(top + 1, k)):
            yield from go(prefix + [a], max(top, a + 1))

    yield from go([], 0)


def _solve(phi: Formula, n: int, k: int, s5: bool):
    nnf = _nnf(phi)
    sig = signature(phi)
    fvs = sort_vars(free_vars(phi))
    for values in _rgs(len(fvs), k):
        env = dict(zip(fvs, values))
        enc = _Encoder(nnf, n, k, sig, s5)
        root = enc.node(nnf, 0, env)
        enc.clauses.append([root])
        for a in set(values):
            enc.clauses.append([enc.e(0, a)])
        with Solver(name="cadical153", bootstrap_with=enc.clauses) as solver:
            if solver.solve():
                return _decode(enc, set(solver.get_model()), env, sig)
    return None


def _decode(enc: _Encoder, true: set[int], env: dict, sig: dict[str, int]):
    n, k = enc.n, enc.k
    objs, worlds = object_names(k), world_names(n)

    def val(lit):
        return lit == enc.true or lit in true

    rel = {(i, j) for i in range(n) for j in range(n) if val(enc.r(i, j))}
    delta = {i: {a for a in range(k) if val(enc.e(i, a))} for i in range(n)}
    # keep the generated submodel of the root
    reach, todo = {0}, [0]
    while todo:
        i = todo.pop()
        for a, b in rel:
            if a == i and b not in reach:
                reach.add(b)
                todo.append(b)
    used = sorted(set().union(*(delta[i] for i in reach)) | set(env.values()))
    rho = {}
    for p, arity in sig.items():
        rho[p] = {}
        for i in sorted(reach):
            ts = [
                tuple(objs[a] for a in t)
                for t in itertools.product(used, repeat=arity)
                if enc.pool.obj2id.get(("p", p, i, t)) in true
            ]
            rho[p][worlds[i]] = ts
    wl = [worlds[i] for i in sorted(reach)]
    model = KripkeModel.create(
        wl,
        [objs[a] for a in used],
        [(worlds[a], worlds[b]) for a, b in sorted(rel) if a in reach],
        rho,
        {worlds[i]: [objs[a] for a in delta[i]] for i in reach},
        dict(sig),
    )
    return Found(model, worlds[0], {x: objs[a] for x, a in env.items()})


def _schedule(max_w: int, max_d: int):
    seen = set()
    for w, d in [(1, 1), (2, 2), (3, 2), (4, 3), (8, max_d)]:
        w, d = min(w, max_w), min(d, max_d)
        if (w, d) not in seen:
            seen.add((w, d))
            yield w, d
    if (max_w, max_d) not in seen:
        yield max_w, max_d


def bounded_search(
    phi: Formula,
    max_worlds: int,
    max_objects: int,
    frame: FrameClass = FrameClass.ARBITRARY,
    engine: str = "sat",
) -> SearchResult:
    """Search for ``M, w, sigma`` with ``M, w, sigma |= phi`` within the bounds.

    Every returned witness is re-checked with the model checker.
    """
    if max_worlds < 1 or max_objects < 1:
        raise ValueError("bounds must be at least 1")
    frame = FrameClass(frame)
    if engine == "enumerate":
        found = _enumerate(phi, max_worlds, max_objects, frame)
    elif engine == "sat":
        found = None
        if frame is FrameClass.S5:
            for n in range(1, max_worlds + 1):
                for k in range(1, max_objects + 1):
                    found = _solve(phi, n, k, s5=True)
                    if found:
                        break
                if found:
                    break
        else:
            for n, k in _schedule(max_worlds, max_objects):
                found = _solve(phi, n, k, s5=False)
                if found:
                    break
    else:
        raise ValueError(f"unknown engine {engine!r}")
    if not found:
        return NotFoundWithinBounds(max_worlds, max_objects)
    assert evaluate(found.model, found.world, dict(found.sigma), phi), "search witness failed the model check"
    return found


def _subsets(items):
    items = list(items)
    for mask in range(1 << len(items)):
        yield frozenset(x for i, x in enumerate(items) if mask >> i & 1)


def _enumerate(phi: Formula, max_w: int, max_d: int, frame: FrameClass):
    """Explicit enumeration: worlds, then objects, relation by bitmask, local
    domains, interpretations last."""
    sig = signature(phi)
    fvs = sort_vars(free_vars(phi))
    for n in range(1, max_w + 1):
        for k in range(1, max_d + 1):
            worlds, objs = world_names(n), object_names(k)
            pairs = [(a, b) for a in worlds for b in worlds]
            if frame is FrameClass.S5:
                rels = [frozenset(pairs)]
                deltas = [{w: frozenset(objs) for w in worlds}]
            else:
                rels = list(_subsets(pairs))
                nonempty = [s for s in _subsets(objs) if s]
                deltas = [dict(zip(worlds, ds)) for ds in itertools.product(nonempty, repeat=n)]
            cells = [(p, w, t) for p, ar in sorted(sig.items()) for w in worlds for t in itertools.product(objs, repeat=ar)]
            for rel in rels:
                for delta in deltas:
                    if any(not delta[a] <= delta[b] for a, b in rel):
                        continue
                    for rho_cells in _subsets(range(len(cells))):
                        rho: dict = {p: {w: set() for w in worlds} for p in sig}
                        for c in rho_cells:
                            p, w, t = cells[c]
                            rho[p][w].add(t)
                        m = KripkeModel.create(worlds, objs, rel, rho, delta, dict(sig))
                        for values in itertools.product(sorted(delta[worlds[0]]), repeat=len(fvs)):
                            env = dict(zip(fvs, values))
                            if evaluate(m, worlds[0], env, phi):
                                return Found(m, worlds[0], env)
    return None
