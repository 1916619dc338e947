"""Tableau decision procedure for the equality-free fragment.

Nodes are triples ``(label, gamma, sigma)`` where ``sigma`` is the identity
on a finite set of variables, so it is stored as that set.  Within one world
the rules (and) and (or) decompose ``gamma`` until only literals and
modalities remain; then (BR) spawns one successor per pair of a diamond
and a variable of the extended assignment, or (END) drops the boxes when
there is no diamond.

The search is depth first.  The (or) choices of one world are independent
of those of its sibling worlds, so a world is open iff some choice sequence
leaves it without a complementary pair of literals and with every (BR)
child open.  Only the current branch is held in the working stack; for an
open tableau the last node of every world is kept as the result, which is
the data the countermodel is built from.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .formula import (
    And,
    Atom,
    BoxX,
    DiaX,
    Formula,
    Not,
    Or,
    all_vars,
    binders,
    fresh_var,
    formula_size,
    free_vars,
    has_equality,
    is_clean,
    is_literal,
    modal_depth,
    reletter_clean,
    sort_vars,
    substitute,
    subformulas,
    to_pnf,
    var_key,
    EqualityNotSupported,
)
from .kripke import KripkeModel
from .syntax import print_formula

ROOT = "w"
ROOT_VAR = "z"
# bound on the live-node counter, as a multiple of the input size
LIVE_NODE_FACTOR = 4


class InternalInvariantError(AssertionError):
    pass


class NotOpen(ValueError):
    pass


Label = tuple[tuple[str, str], ...]


def label_text(label: Label) -> str:
    return ROOT + "".join(f"v^{y}_{yi}" for y, yi in label)


@dataclass(frozen=True)
class Node:
    label: Label
    gamma: tuple[Formula, ...]
    sigma: frozenset[str]

    def text(self, style: str = "ascii") -> str:
        gam = ", ".join(print_formula(f, style) for f in self.gamma)
        sig = ", ".join(f"({x},{x})" for x in sort_vars(self.sigma))
        return f"{label_text(self.label)}: {{{gam}}}, {{{sig}}}"


@dataclass
class WorldRecord:
    """The last node ``t_w`` of a world in an open tableau.

    ``domain`` is ``Dom(t_w)``: the extended assignment at a branching node,
    the node's own assignment otherwise.  ``steps`` holds the earlier nodes
    of the world with the rule applied to each (only in full mode).
    """

    last: Node
    kind: str  # "branch", "end" or "leaf"
    domain: frozenset[str]
    children: list["WorldRecord"] = field(default_factory=list)
    steps: list[tuple[Node, str]] = field(default_factory=list)
    end_node: Node | None = None


@dataclass
class Stats:
    live: int = 0
    max_live: int = 0
    nodes: int = 0
    closed_choices: int = 0

    def push(self, k: int = 1) -> None:
        self.live += k
        self.nodes += k
        if self.live > self.max_live:
            self.max_live = self.live

    def pop(self, k: int = 1) -> None:
        self.live -= k


@dataclass
class Tableau:
    phi: Formula
    theta: Formula
    root_sigma: frozenset[str]
    root: WorldRecord | None
    stats: Stats
    full: bool

    @property
    def is_open(self) -> bool:
        return self.root is not None


@dataclass(frozen=True)
class Sat:
    tableau: Tableau

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Unsat:
    tableau: Tableau

    def __bool__(self) -> bool:
        return False


def prepare(phi: Formula) -> tuple[Formula, Node]:
    """Clean positive normal form and the root node.

    The root assignment is the identity on the free variables of the
    normal form.  A closed formula gets the reserved variable ``z`` (or a
    fresh name when ``z`` occurs in it) so that local domains are never
    empty.
    """
    if has_equality(phi):
        raise EqualityNotSupported("the tableau handles the equality-free fragment only")
    theta = reletter_clean(to_pnf(reletter_clean(phi)))
    sigma = set(free_vars(theta))
    if not sigma:
        taken = all_vars(theta)
        sigma.add(ROOT_VAR if ROOT_VAR not in taken else fresh_var(taken))
    return theta, Node((), (theta,), frozenset(sigma))


def _complement(lit: Formula) -> Formula:
    return lit.sub if isinstance(lit, Not) else Not(lit)


def _contradictory(gamma) -> bool:
    lits = {f for f in gamma if is_literal(f)}
    return any(_complement(f) in lits for f in lits if isinstance(f, Atom))


def _insert(gamma: tuple, i: int, parts) -> tuple:
    """Replace ``gamma[i]`` by ``parts``, dropping duplicates (a set)."""
    out = list(gamma[:i])
    for f in list(parts) + list(gamma[i + 1 :]):
        if f not in out:
            out.append(f)
    return tuple(out)


def check_claims(node: Node) -> None:
    """Structural invariants of nodes reachable from a clean root."""
    gamma, sigma = node.gamma, node.sigma
    bs = [b for f in gamma for b in binders(f)]
    if len(bs) != len(set(bs)):
        raise InternalInvariantError(f"a variable is bound twice in {node.text()}")
    if set(bs) & sigma:
        raise InternalInvariantError(f"an assigned variable is bound in {node.text()}")
    fv = set().union(*(free_vars(f) for f in gamma)) if gamma else set()
    if not fv <= sigma:
        raise InternalInvariantError(f"free variables {sorted(fv - sigma)} not assigned in {node.text()}")
    boxes = [f for f in gamma if isinstance(f, BoxX)]
    dias = [f for f in gamma if isinstance(f, DiaX)]
    for b in boxes:
        for c in boxes:
            if b is not c and c.var in free_vars(b.sub):
                raise InternalInvariantError(f"K[{c.var}] variable free under K[{b.var}] in {node.text()}")
        for d in dias:
            if d.var in free_vars(b.sub) or b.var in free_vars(d.sub):
                raise InternalInvariantError(f"K[{b.var}] and D[{d.var}] share variables in {node.text()}")


class _Search:
    def __init__(self, full: bool, right_first: bool, check: bool, keep: bool):
        self.full, self.right_first, self.check, self.keep = full, right_first, check, keep
        self.stats = Stats()

    def world(self, node: Node) -> WorldRecord | None:
        self.stats.push()
        try:
            return self._local(node, [])
        finally:
            self.stats.pop()

    def _local(self, node: Node, steps: list) -> WorldRecord | None:
        """Decompose ``node`` within its world, backtracking over (or)."""
        if self.check:
            check_claims(node)
        if _contradictory(node.gamma):
            self.stats.closed_choices += 1
            return None
        gamma = node.gamma
        for i, f in enumerate(gamma):
            if isinstance(f, And):
                nxt = Node(node.label, _insert(gamma, i, (f.left, f.right)), node.sigma)
                return self._step(nxt, steps, node, "(∧)")
        for i, f in enumerate(gamma):
            if isinstance(f, Or):
                options = (f.right, f.left) if self.right_first else (f.left, f.right)
                for opt in options:
                    nxt = Node(node.label, _insert(gamma, i, (opt,)), node.sigma)
                    rec = self._step(nxt, steps, node, "(∨)")
                    if rec is not None:
                        return rec
                return None
        return self._modal(node, steps)

    def _step(self, nxt: Node, steps: list, node: Node, rule: str) -> WorldRecord | None:
        self.stats.push()
        steps.append((node, rule))
        try:
            return self._local(nxt, steps)
        finally:
            steps.pop()
            self.stats.pop()

    def _modal(self, node: Node, steps: list) -> WorldRecord | None:
        boxes = [f for f in node.gamma if isinstance(f, BoxX)]
        dias = [f for f in node.gamma if isinstance(f, DiaX)]
        lits = tuple(f for f in node.gamma if is_literal(f))
        trail = list(steps) if self.full else []
        if dias:
            sigma2 = node.sigma | {b.var for b in boxes}
            kids = []
            for i, d in enumerate(dias):
                for y in sorted(sigma2, key=var_key):
                    child_gamma = _insert(tuple(b.sub for b in boxes), len(boxes), (substitute(d.sub, d.var, y),))
                    child = Node(node.label + ((y, d.var),), child_gamma, sigma2)
                    rec = self.world(child)
                    if rec is None:
                        return None
                    if self.keep:
                        kids.append(rec)
            return WorldRecord(node, "branch", sigma2, kids, trail + [(node, "(BR)")] if self.full else [])
        if boxes:
            end = Node(node.label, lits, node.sigma)
            self.stats.push()
            self.stats.pop()
            return WorldRecord(end, "end", node.sigma, [], trail + [(node, "(END)")] if self.full else [], end)
        return WorldRecord(node, "leaf", node.sigma, [], trail)


def decide_sat(
    phi: Formula,
    full_tableau: bool = False,
    right_first: bool = True,
    check_invariants: bool = True,
    keep_model: bool = True,
) -> Sat | Unsat:
    """Decide satisfiability over increasing-domain models.

    ``keep_model=False`` keeps nothing beyond the current branch (the
    verdict only).  ``full_tableau=True`` also records every intermediate
    node of the open tableau for printing.  ``right_first`` tries the right
    disjunct of an (or) before the left one.
    """
    theta, root = prepare(phi)
    search = _Search(full_tableau, right_first, check_invariants, keep_model or full_tableau)
    rec = search.world(root)
    bound = LIVE_NODE_FACTOR * formula_size(phi)
    if search.stats.max_live > bound:
        raise InternalInvariantError(f"live nodes {search.stats.max_live} exceed {bound}")
    tab = Tableau(phi, theta, root.sigma, rec if (keep_model or full_tableau) else None, search.stats, full_tableau)
    if rec is None:
        return Unsat(tab)
    if not (keep_model or full_tableau):
        tab.root = WorldRecord(root, "verdict-only", root.sigma)
    return Sat(tab)


def iter_worlds(rec: WorldRecord):
    yield rec
    for c in rec.children:
        yield from iter_worlds(c)


def extract_model(t: Tableau | Sat | Unsat) -> tuple[KripkeModel, str, dict[str, str]]:
    """The countermodel read off an open tableau.

    Worlds are labels; ``wRv`` iff ``v`` extends ``w`` by one step;
    ``delta(w) = Dom(t_w)``; a tuple is in ``rho(P, w)`` iff the atom occurs
    in ``t_w``.  Objects are the variables themselves.
    """
    if isinstance(t, (Sat, Unsat)):
        t = t.tableau
    if t.root is None or t.root.kind == "verdict-only":
        raise NotOpen("no open tableau with recorded last nodes")
    worlds, rel, delta, rho = [], [], {}, {}
    sig: dict[str, int] = {}
    for f in subformulas(t.theta):
        if isinstance(f, Atom):
            sig[f.pred] = len(f.args)
    for rec in iter_worlds(t.root):
        name = label_text(rec.last.label)
        worlds.append(name)
        delta[name] = sorted(rec.domain, key=var_key)
        for c in rec.children:
            rel.append((name, label_text(c.last.label)))
        for f in rec.last.gamma:
            if isinstance(f, Atom):
                rho.setdefault(f.pred, {}).setdefault(name, []).append(f.args)
    domain = sorted(set().union(*(set(d) for d in delta.values())), key=var_key)
    model = KripkeModel.create(worlds, domain, rel, rho, delta, sig)
    return model, ROOT, {x: x for x in t.root_sigma}


def tree_depth(rec: WorldRecord) -> int:
    return 1 + max((tree_depth(c) for c in rec.children), default=0) if rec.children else 0


# printing


def format_tableau(t: Tableau | Sat | Unsat, style: str = "unicode") -> str:
    """Indented text rendering of the open tableau.

    Runs of the same rule are merged, e.g. ``(∧)×2``.  Without full mode
    only the last node of each world is shown.
    """
    if isinstance(t, (Sat, Unsat)):
        t = t.tableau
    if t.root is None:
        root = Node((), (t.theta,), t.root_sigma).text(style)
        return f"closed: every tableau from {root} contains a complementary pair\n"
    lines: list[str] = []
    _fmt(t.root, 0, lines, style)
    return "\n".join(lines) + "\n"


def _fmt(rec: WorldRecord, depth: int, lines: list[str], style: str) -> None:
    steps = _merge(rec.steps)
    ind = depth
    shown_last = False
    for node, rule in steps:
        lines.append("  " * ind + f"{node.text(style)}    {rule}")
        ind += 1
        if node == rec.last:
            shown_last = True
    if rec.kind == "end":
        lines.append("  " * ind + rec.end_node.text(style))
    elif not shown_last:
        tag = "    (BR)" if rec.kind == "branch" and not steps else ""
        lines.append("  " * ind + rec.last.text(style) + tag)
        ind += 1
    for c in rec.children:
        _fmt(c, ind, lines, style)


def _merge(steps):
    out = []
    for node, rule in steps:
        if out and out[-1][1].split("×")[0] == rule and rule == "(∧)":
            prev_node, prev_rule = out[-1]
            count = int(prev_rule.split("×")[1]) + 1 if "×" in prev_rule else 2
            out[-1] = (prev_node, f"{rule}×{count}")
        else:
            out.append((node, rule))
    return out


__all__ = [
    "prepare",
    "decide_sat",
    "extract_model",
    "format_tableau",
    "check_claims",
    "Sat",
    "Unsat",
    "Tableau",
    "NotOpen",
    "InternalInvariantError",
    "modal_depth",
    "is_clean",
]
