"""Proof-script data types shared by the parser and the Hilbert checker."""

from __future__ import annotations

from dataclasses import dataclass, field

from .formula import Formula

AXIOMS = ("TAUT", "DISTK", "T", "4MS", "5MS", "KtoMS", "MStoK", "MStoMSK", "KT", "ID", "SUBID")


@dataclass(frozen=True)
class Justification:
    """How a line is obtained.

    ``kind`` is an axiom name, ``"MP"``, ``"MONOMS"``, ``"LEMMA"`` or
    ``"HYP"`` (a hypothesis of a derived-rule lemma).  ``refs`` are 1-based
    line numbers.  For MONOMS ``var`` is the bound variable, for LEMMA
    ``name`` is the lemma name.
    """

    kind: str
    refs: tuple[int, ...] = ()
    var: str | None = None
    name: str | None = None

    def __str__(self) -> str:
        if self.kind == "MP":
            return f"MP {self.refs[0]} {self.refs[1]}"
        if self.kind == "MONOMS":
            return f"MONOMS {self.refs[0]} {self.var}"
        if self.kind == "LEMMA":
            return " ".join(["LEMMA", self.name, *map(str, self.refs)])
        return self.kind


@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    just: Justification
    comment: str = ""


@dataclass
class ProofScript:
    name: str
    lines: list[ProofLine] = field(default_factory=list)
    target: Formula | None = None
    schematic: tuple[str, ...] = ()
    notes: list[str] = field(default_factory=list)

    @property
    def conclusion(self) -> Formula:
        return self.lines[-1].formula

    @property
    def hypotheses(self) -> list[Formula]:
        return [ln.formula for ln in self.lines if ln.just.kind == "HYP"]
