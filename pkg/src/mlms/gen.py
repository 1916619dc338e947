"""Seeded random generators for formulas, models and bisimilar pairs."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .formula import And, Atom, Box, BoxX, DiaX, Eq, Formula, Implies, Not, Or
from .kripke import KripkeModel
from .search import FrameClass

DEFAULT_SIGNATURE = {"p": 0, "P": 1, "Q": 1, "R": 2}
VARIABLES = ("x", "y", "z", "w", "s", "t", "x1", "y1")


@dataclass
class GenConfig:
    """Knobs for the random generators.

    ``modal_ratio`` is the share of internal formula nodes that are
    modalities; the rest are boolean connectives.
    """

    max_depth: int = 3
    signature: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_SIGNATURE))
    var_pool: int = 3
    max_worlds: int = 3
    max_objects: int = 3
    frame: FrameClass = FrameClass.ARBITRARY
    seed: int = 0
    modal_ratio: float = 0.4
    equality: bool = False
    closed: bool = False
    edge_prob: float = 0.4
    fact_prob: float = 0.5

    def __post_init__(self):
        if min(self.max_depth, self.var_pool, self.max_worlds, self.max_objects) < 1:
            raise ValueError("all bounds must be at least 1")
        if self.var_pool > len(VARIABLES):
            raise ValueError(f"var_pool is at most {len(VARIABLES)}")
        self.frame = FrameClass(self.frame)

    def rng(self) -> random.Random:
        return random.Random(self.seed)


class _FormulaGen:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg, self.rng = cfg, rng
        self.vars = VARIABLES[: cfg.var_pool]
        self.preds = sorted(cfg.signature.items())

    def leaf(self, scope: list[str]) -> Formula:
        rng, cfg = self.rng, self.cfg
        pool = scope if cfg.closed else self.vars
        if cfg.equality and pool and rng.random() < 0.15:
            return Eq(rng.choice(pool), rng.choice(pool))
        preds = [(p, n) for p, n in self.preds if pool or n == 0]
        if not preds:
            return Atom("p")
        p, n = rng.choice(preds)
        return Atom(p, tuple(rng.choice(pool) for _ in range(n)))

    def modal(self, scope, build) -> Formula:
        rng = self.rng
        kind = rng.choice(("K", "Kx", "Dx"))
        if kind == "K":
            return Box(build(scope))
        x = rng.choice(self.vars)
        inner = build(scope + [x])
        return BoxX(x, inner) if kind == "Kx" else DiaX(x, inner)

    def by_depth(self, depth: int, scope: list[str]) -> Formula:
        rng = self.rng
        if depth == 0 or rng.random() < 0.25:
            return self.leaf(scope)
        if rng.random() < self.cfg.modal_ratio:
            return self.modal(scope, lambda s: self.by_depth(depth - 1, s))
        op = rng.choice((Not, And, Or, Implies))
        if op is Not:
            return Not(self.by_depth(depth - 1, scope))
        return op(self.by_depth(depth - 1, scope), self.by_depth(depth - 1, scope))

    def by_size(self, size: int, scope: list[str]) -> Formula:
        rng = self.rng
        if size == 1:
            return self.leaf(scope)
        unary_only = size == 2
        if rng.random() < self.cfg.modal_ratio:
            return self.modal(scope, lambda s: self.by_size(size - 1, s))
        if unary_only or rng.random() < 0.25:
            return Not(self.by_size(size - 1, scope))
        left = rng.randint(1, size - 2)
        op = rng.choice((And, Or, Implies))
        return op(self.by_size(left, scope), self.by_size(size - 1 - left, scope))


def gen_formula(cfg: GenConfig, rng: random.Random | None = None) -> Formula:
    """A random formula of depth at most ``cfg.max_depth``."""
    return _FormulaGen(cfg, rng or cfg.rng()).by_depth(cfg.max_depth, [])


def gen_formula_of_size(cfg: GenConfig, size: int, rng: random.Random | None = None) -> Formula:
    """A random formula with exactly ``size`` AST nodes."""
    if size < 1:
        raise ValueError("size must be at least 1")
    return _FormulaGen(cfg, rng or cfg.rng()).by_size(size, [])


def gen_model(cfg: GenConfig, rng: random.Random | None = None) -> KripkeModel:
    rng = rng or cfg.rng()
    n = rng.randint(1, cfg.max_worlds)
    k = rng.randint(1, cfg.max_objects)
    worlds = [f"w{i}" for i in range(n)]
    objs = [f"d{i}" for i in range(k)]
    if cfg.frame is FrameClass.S5:
        block = {w: rng.randrange(n) for w in worlds}
        rel = [(a, b) for a in worlds for b in worlds if block[a] == block[b]]
        delta = {w: set(objs) for w in worlds}
    else:
        rel = [(a, b) for a in worlds for b in worlds if rng.random() < cfg.edge_prob]
        delta = {w: {o for o in objs if rng.random() < 0.6} or {rng.choice(objs)} for w in worlds}
        changed = True
        while changed:
            changed = False
            for a, b in rel:
                if not delta[a] <= delta[b]:
                    delta[b] |= delta[a]
                    changed = True
    rho = {}
    for p, ar in sorted(cfg.signature.items()):
        rho[p] = {}
        for w in worlds:
            tuples = _tuples(objs, ar)
            rho[p][w] = [t for t in tuples if rng.random() < cfg.fact_prob]
    return KripkeModel.create(worlds, objs, rel, rho, delta, dict(cfg.signature))


def _tuples(objs, n):
    if n == 0:
        return [()]
    return [(o,) + t for o in objs for t in _tuples(objs, n - 1)]


# bisimilar pairs by construction


def rename(m: KripkeModel, wmap: dict, omap: dict) -> KripkeModel:
    return KripkeModel.create(
        [wmap[w] for w in m.worlds],
        [omap[o] for o in m.domain],
        [(wmap[a], wmap[b]) for a, b in m.relation],
        {p: {wmap[w]: [tuple(omap[o] for o in t) for t in ts] for w, ts in per.items()} for p, per in m.rho.items()},
        {wmap[w]: [omap[o] for o in m.delta[w]] for w in m.worlds},
        dict(m.arity),
    )


def duplicate_world(m: KripkeModel, w: str, copy: str) -> KripkeModel:
    """Add ``copy`` as a twin of ``w``: same facts, same successors, and the
    same predecessors."""
    rel = set(m.relation)
    for a, b in m.relation:
        if a == w:
            rel.add((copy, b))
        if b == w:
            rel.add((a, copy))
        if a == b == w:
            rel.add((copy, copy))
    rho = {p: {**per, copy: per.get(w, frozenset())} for p, per in m.rho.items()}
    delta = {**m.delta, copy: m.delta[w]}
    return KripkeModel.create((*m.worlds, copy), m.domain, rel, rho, delta, dict(m.arity))


def disjoint_union(m: KripkeModel, other: KripkeModel, tag: str = "'") -> KripkeModel:
    """Add ``other`` beside ``m`` as an unreachable part (names are tagged)."""
    o = rename(other, {w: w + tag for w in other.worlds}, {d: d + tag for d in other.domain})
    rho = {p: dict(m.rho.get(p, {})) for p in set(m.rho) | set(o.rho)}
    for p, per in o.rho.items():
        rho[p].update(per)
    arity = {**o.arity, **m.arity}
    if any(o.arity.get(p, n) != n for p, n in m.arity.items()):
        raise ValueError("signatures disagree")
    return KripkeModel.create(
        m.worlds + o.worlds, m.domain + o.domain, m.relation | o.relation, rho, {**m.delta, **o.delta}, arity
    )


def gen_pointed_pair(cfg: GenConfig, rng: random.Random | None = None):
    """Two pointed models that are bisimilar by construction.

    ``N`` is obtained from ``M`` by a random mix of world duplication, a
    disjoint union with an unrelated model and renaming of worlds and
    objects.  Returns ``((M, w), (N, v))``.
    """
    rng = rng or cfg.rng()
    m = gen_model(cfg, rng)
    w = rng.choice(m.worlds)
    n, v = m, w
    for i in range(rng.randint(0, 2)):
        src = rng.choice(n.worlds)
        n = duplicate_world(n, src, f"{src}c{i}")
    if cfg.frame is FrameClass.ARBITRARY and rng.random() < 0.5:
        n = disjoint_union(n, gen_model(cfg, rng))
    wnames = list(n.worlds)
    rng.shuffle(wnames)
    wmap = {a: f"v{i}" for i, a in enumerate(wnames)}
    onames = list(n.domain)
    rng.shuffle(onames)
    omap = {a: f"e{i}" for i, a in enumerate(onames)}
    n = rename(n, wmap, omap)
    return (m, w), (n, wmap[v])


def sat_workload(n: int, max_size: int = 7, seed: int = 0) -> list[Formula]:
    """Equality-free formulas of size at most ``max_size`` for satisfiability
    cross-checks.

    Uniform random formulas over a rich signature are almost always
    satisfiable, so about half the cases use a single unary predicate and
    one variable, and some of those are contrasts ``a & ~b`` of two small
    random parts, which are unsatisfiable far more often.
    """
    rng = random.Random(seed)
    rich = GenConfig(seed=seed)
    lean = GenConfig(seed=seed, var_pool=1, signature={"P": 1}, modal_ratio=0.5)
    out: list[Formula] = []
    while len(out) < n:
        size = rng.randint(1, max_size)
        mode = rng.random()
        if mode < 0.5:
            out.append(gen_formula_of_size(rich if mode < 0.25 else GenConfig(seed=seed, var_pool=2), size, rng))
        elif size >= 4 and mode < 0.8:
            a = rng.randint(1, size - 3)
            out.append(And(gen_formula_of_size(lean, a, rng), Not(gen_formula_of_size(lean, size - 2 - a, rng))))
        else:
            out.append(gen_formula_of_size(lean, size, rng))
    return out
