"""Concrete syntax: formulas, model files and proof scripts.

Formula grammar (loosest binding first)::

    iff   := imp ('<->' imp)*            left associative, a <-> b is
                                         read as (a -> b) & (b -> a)
    imp   := or ('->' imp)?              right associative
    or    := and ('|' and)*
    and   := unary ('&' unary)*
    unary := '~' unary | 'K' '[' id ']' unary | 'K' unary
           | 'D' '[' id ']' unary | '<K>' unary | primary
    primary := '(' iff ')' | 'top' | 'bot' | id '=' id | id '!=' id
             | id '(' id (',' id)* ')' | id
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .formula import (
    BOT,
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
)
from .kripke import KripkeModel, SchemaError, is_constant_domain, is_s5
from .script import AXIOMS, Justification, ProofLine, ProofScript

__all__ = [
    "ParseError",
    "SchemaError",
    "SourceSpan",
    "parse_formula",
    "print_formula",
    "parse_model",
    "dump_model",
    "load_model",
    "parse_proof",
    "print_proof",
]


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets into the input text."""

    start: int
    end: int


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan, text: str = ""):
        super().__init__(f"{message} at {span.start}-{span.end}")
        self.message = message
        self.span = span
        self.text = text


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<sym><->|->|<K>|!=|[()\[\],~&|=])|(?P<id>[A-Za-z_][A-Za-z0-9_']*))"
)
KEYWORDS = {"K", "D", "top", "bot"}


@dataclass(frozen=True)
class _Tok:
    kind: str  # "sym", "id" or "eof"
    text: str
    start: int
    end: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    encoded_upto = {}

    def boff(i: int) -> int:
        if i not in encoded_upto:
            encoded_upto[i] = len(text[:i].encode("utf-8"))
        return encoded_upto[i]

    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            toks.append(_Tok("eof", "", boff(pos), boff(pos)))
            return toks
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(boff(pos), boff(pos + 1)), text)
        kind = "sym" if m.group("sym") else "id"
        tok = m.group(kind)
        start = m.start(kind)
        toks.append(_Tok(kind, tok, boff(start), boff(m.end())))
        pos = m.end()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, expected: str):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"expected {expected}, found {found}", SourceSpan(t.start, t.end), self.text)

    def accept(self, sym: str) -> bool:
        if self.tok.kind == "sym" and self.tok.text == sym:
            self.i += 1
            return True
        return False

    def expect(self, sym: str) -> None:
        if not self.accept(sym):
            self.error(repr(sym))

    def ident(self) -> str:
        t = self.tok
        if t.kind != "id" or t.text in KEYWORDS:
            self.error("an identifier")
        self.i += 1
        return t.text

    def parse(self) -> Formula:
        phi = self.iff()
        if self.tok.kind != "eof":
            self.error("an operator or end of input")
        return phi

    def iff(self) -> Formula:
        phi = self.imp()
        while self.accept("<->"):
            rhs = self.imp()
            phi = And(Implies(phi, rhs), Implies(rhs, phi))
        return phi

    def imp(self) -> Formula:
        phi = self.disj()
        if self.accept("->"):
            return Implies(phi, self.imp())
        return phi

    def disj(self) -> Formula:
        phi = self.conj()
        while self.accept("|"):
            phi = Or(phi, self.conj())
        return phi

    def conj(self) -> Formula:
        phi = self.unary()
        while self.accept("&"):
            phi = And(phi, self.unary())
        return phi

    def unary(self) -> Formula:
        t = self.tok
        if self.accept("~"):
            return Not(self.unary())
        if self.accept("<K>"):
            return Not(Box(Not(self.unary())))
        if t.kind == "id" and t.text in ("K", "D"):
            self.i += 1
            if self.accept("["):
                x = self.ident()
                self.expect("]")
                sub = self.unary()
                return BoxX(x, sub) if t.text == "K" else DiaX(x, sub)
            if t.text == "D":
                self.error("'[' after D")
            return Box(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        t = self.tok
        if self.accept("("):
            phi = self.iff()
            self.expect(")")
            return phi
        if t.kind == "id" and t.text == "top":
            self.i += 1
            return TOP
        if t.kind == "id" and t.text == "bot":
            self.i += 1
            return BOT
        name = self.ident()
        if self.accept("="):
            return Eq(name, self.ident())
        if self.accept("!="):
            return Not(Eq(name, self.ident()))
        if self.accept("("):
            args = [self.ident()]
            while self.accept(","):
                args.append(self.ident())
            self.expect(")")
            return Atom(name, tuple(args))
        return Atom(name)


def parse_formula(text: str) -> Formula:
    return _Parser(text).parse()


# printing

_PREC = {Implies: 2, Or: 3, And: 4}
_UNARY = 5
_ATOM = 6
_OPS = {Implies: "->", Or: "|", And: "&"}


def _prec(phi: Formula) -> int:
    if phi == TOP or phi == BOT:
        return _ATOM
    for cls, p in _PREC.items():
        if isinstance(phi, cls):
            return p
    if isinstance(phi, (Not, Box, BoxX, DiaX)):
        return _UNARY
    return _ATOM


_UNICODE_OPS = {Implies: "→", Or: "∨", And: "∧"}
_SUPER = dict(zip("abcdefghijklmnoprstuvwxyz", "ᵃᵇᶜᵈᵉᶠᵍʰⁱʲᵏˡᵐⁿᵒᵖʳˢᵗᵘᵛʷˣʸᶻ"))


def _sup(var: str) -> str:
    if all(c in _SUPER for c in var):
        return "".join(_SUPER[c] for c in var)
    return "^" + var


def print_formula(phi: Formula, style: str = "ascii") -> str:
    """Render ``phi``.

    The ``ascii`` style parses back to the same formula.  The ``unicode``
    style is for display only: ``□ˣ(Px ∨ Qx)``, ``◇ʸ¬Qy``.
    """
    uni = style == "unicode"
    if phi == TOP:
        return "⊤" if uni else "top"
    if phi == BOT:
        return "⊥" if uni else "bot"
    if isinstance(phi, Atom):
        if not phi.args:
            return phi.pred
        if uni and all(len(a) == 1 for a in phi.args):
            return phi.pred + "".join(phi.args)
        return f"{phi.pred}({','.join(phi.args)})"
    if isinstance(phi, Eq):
        return f"{phi.left} {'≈' if uni else '='} {phi.right}"
    if isinstance(phi, Not):
        return ("¬" if uni else "~") + _wrap(phi.sub, _UNARY, style, force=isinstance(phi.sub, Eq))
    if isinstance(phi, Box):
        return ("□" if uni else "K ") + _wrap(phi.sub, _UNARY, style)
    if isinstance(phi, (BoxX, DiaX)):
        if uni:
            head = ("□" if isinstance(phi, BoxX) else "◇") + _sup(phi.var)
        else:
            head = f"{'K' if isinstance(phi, BoxX) else 'D'}[{phi.var}] "
        return head + _wrap(phi.sub, _UNARY, style)
    p = _PREC[type(phi)]
    if isinstance(phi, Implies):
        left, right = _wrap(phi.left, p + 1, style), _wrap(phi.right, p, style)
    else:
        left, right = _wrap(phi.left, p, style), _wrap(phi.right, p + 1, style)
    op = (_UNICODE_OPS if uni else _OPS)[type(phi)]
    return f"{left} {op} {right}"


def _wrap(phi: Formula, need: int, style: str = "ascii", force: bool = False) -> str:
    s = print_formula(phi, style)
    return f"({s})" if force or _prec(phi) < need else s


# model files


def parse_model(text: str, strict: bool = False) -> KripkeModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"json: {e}") from e
    return model_from_dict(data, strict=strict)


def load_model(path, strict: bool = False) -> KripkeModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), strict=strict)


def _strs(value, what: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise SchemaError(f"schema: {what} must be a list of strings")
    return value


def model_from_dict(data, strict: bool = False) -> KripkeModel:
    if not isinstance(data, dict):
        raise SchemaError("schema: a model file is a JSON object")
    unknown = set(data) - {"worlds", "domain", "delta", "relation", "rho", "arity", "s5", "constant_domain"}
    if unknown:
        raise SchemaError(f"schema: unknown field(s) {sorted(unknown)}")
    worlds = _strs(data.get("worlds"), "worlds")
    domain = _strs(data.get("domain"), "domain")
    delta = data.get("delta")
    if delta is not None:
        if not isinstance(delta, dict):
            raise SchemaError("schema: delta must map worlds to object lists")
        missing = set(worlds) - set(delta)
        if missing:
            raise SchemaError(f"nonempty local domain: delta is missing world(s) {sorted(missing)}")
        if set(delta) - set(worlds):
            raise SchemaError(f"schema: delta mentions unknown world(s) {sorted(set(delta) - set(worlds))}")
        delta = {w: _strs(v, f"delta[{w}]") for w, v in delta.items()}
    relation = data.get("relation", [])
    if not isinstance(relation, list) or not all(
        isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p) for p in relation
    ):
        raise SchemaError("schema: relation must be a list of [world, world] pairs")
    rho_raw = data.get("rho", {})
    if not isinstance(rho_raw, dict):
        raise SchemaError("schema: rho must map predicates to {world: tuples}")
    rho = {}
    for p, per_world in rho_raw.items():
        if not isinstance(per_world, dict):
            raise SchemaError(f"schema: rho[{p}] must map worlds to tuple lists")
        rho[p] = {}
        for w, tuples in per_world.items():
            if not isinstance(tuples, list):
                raise SchemaError(f"schema: rho[{p}][{w}] must be a list")
            ts = []
            for t in tuples:
                if isinstance(t, str):
                    ts.append((t,))
                elif isinstance(t, list) and all(isinstance(a, str) for a in t):
                    ts.append(tuple(t))
                else:
                    raise SchemaError(f"schema: bad tuple {t!r} in rho[{p}][{w}]")
            rho[p][w] = ts
    arity = data.get("arity")
    if arity is not None and (
        not isinstance(arity, dict) or not all(isinstance(n, int) and n >= 0 for n in arity.values())
    ):
        raise SchemaError("arity: arity must map predicates to non-negative integers")
    m = KripkeModel.create(worlds, domain, [tuple(p) for p in relation], rho, delta, arity, strict=strict)
    if data.get("s5") and not is_s5(m):
        raise SchemaError("s5: the s5 flag is set but R is not an equivalence or the domain is not constant")
    if data.get("constant_domain") and not is_constant_domain(m):
        raise SchemaError("constant domain: the constant_domain flag is set but delta varies")
    return m


def model_to_dict(m: KripkeModel) -> dict:
    rho = {}
    for p in sorted(m.rho):
        per = {w: sorted(list(t) for t in ts) for w, ts in sorted(m.rho[p].items()) if ts}
        if per:
            rho[p] = per
    return {
        "worlds": list(m.worlds),
        "domain": list(m.domain),
        "delta": {w: sorted(m.delta[w]) for w in m.worlds},
        "relation": [list(p) for p in sorted(m.relation)],
        "rho": rho,
        "arity": dict(sorted(m.arity.items())),
    }


def dump_model(m: KripkeModel, indent: int | None = 2) -> str:
    return json.dumps(model_to_dict(m), indent=indent)


# proof scripts

_LINE_RE = re.compile(r"^\s*(\d+)\.\s*(.*?)\s*;\s*(.*?)\s*$")


def parse_justification(text: str, lineno: int = 0) -> Justification:
    parts = text.split()
    if not parts:
        raise ParseError("missing justification", SourceSpan(0, 0), text)
    head, rest = parts[0], parts[1:]

    def nums(items):
        try:
            return tuple(int(r) for r in items)
        except ValueError:
            raise ParseError(f"line {lineno}: bad line reference in {text!r}", SourceSpan(0, len(text)), text)

    if head in AXIOMS or head == "HYP":
        if rest:
            raise ParseError(f"line {lineno}: {head} takes no arguments", SourceSpan(0, len(text)), text)
        return Justification(head)
    if head == "MP":
        if len(rest) != 2:
            raise ParseError(f"line {lineno}: MP needs two line numbers", SourceSpan(0, len(text)), text)
        return Justification("MP", nums(rest))
    if head == "MONOMS":
        if len(rest) != 2:
            raise ParseError(f"line {lineno}: MONOMS needs a line number and a variable", SourceSpan(0, len(text)), text)
        return Justification("MONOMS", nums(rest[:1]), var=rest[1])
    if head == "LEMMA":
        if not rest:
            raise ParseError(f"line {lineno}: LEMMA needs a name", SourceSpan(0, len(text)), text)
        return Justification("LEMMA", nums(rest[1:]), name=rest[0])
    raise ParseError(f"line {lineno}: unknown justification {head!r}", SourceSpan(0, len(head)), text)


def parse_proof(text: str, name: str = "proof") -> ProofScript:
    """Parse the line-oriented proof format.

    Header lines ``lemma NAME``, ``schematic A B ...`` and ``target FORMULA``
    may precede the numbered lines ``n. FORMULA ; JUSTIFICATION``.  ``#``
    starts a comment; a comment after a proof line is kept with the line.
    """
    script = ProofScript(name)
    offset = 0
    for raw in text.splitlines(keepends=True):
        line_start = offset
        offset += len(raw.encode("utf-8"))
        body, _, comment = raw.rstrip("\n").partition("#")
        comment = comment.strip()
        stripped = body.strip()
        if not stripped:
            if comment and not script.lines:
                script.notes.append(comment)
            continue
        word = stripped.split(None, 1)
        if word[0] == "lemma":
            script.name = word[1].strip() if len(word) > 1 else name
            continue
        if word[0] == "schematic":
            script.schematic = tuple(word[1].split()) if len(word) > 1 else ()
            continue
        if word[0] == "target":
            script.target = _sub_parse(word[1] if len(word) > 1 else "", line_start, raw)
            continue
        m = _LINE_RE.match(stripped)
        if not m:
            raise ParseError(
                "expected 'n. formula ; justification'", SourceSpan(line_start, line_start + len(raw.encode())), text
            )
        n = int(m.group(1))
        if n != len(script.lines) + 1:
            raise ParseError(f"line number {n} out of sequence", SourceSpan(line_start, line_start + len(raw)), text)
        phi = _sub_parse(m.group(2), line_start, raw)
        just = parse_justification(m.group(3), n)
        script.lines.append(ProofLine(phi, just, comment))
    return script


def _sub_parse(text: str, base: int, raw: str) -> Formula:
    try:
        return parse_formula(text)
    except ParseError as e:
        col = len(raw[: raw.find(text)].encode()) if text and text in raw else 0
        span = SourceSpan(base + col + e.span.start, base + col + e.span.end)
        raise ParseError(e.message, span, raw) from None


def print_proof(script: ProofScript) -> str:
    out = [f"# {n}" for n in script.notes]
    out.append(f"lemma {script.name}")
    if script.schematic:
        out.append("schematic " + " ".join(script.schematic))
    if script.target is not None:
        out.append(f"target {print_formula(script.target)}")
    for i, ln in enumerate(script.lines, 1):
        s = f"{i}. {print_formula(ln.formula)} ; {ln.just}"
        out.append(f"{s}  # {ln.comment}" if ln.comment else s)
    return "\n".join(out) + "\n"
