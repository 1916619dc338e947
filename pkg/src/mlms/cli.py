"""Command-line interface.

Exit status: 0 for a positive answer (Sat, true, Ok), 1 for a negative
one, 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .formula import (
    EqualityNotSupported,
    ArityMismatch,
    formula_size,
    free_vars,
    modal_depth,
    reletter_clean,
    sort_vars,
    to_pnf,
)
from .kripke import SchemaError, mc
from .syntax import ParseError, dump_model, load_model, parse_formula, print_formula

OK, NEG, ERR = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, record: dict, text: str) -> None:
    if args.json:
        print(json.dumps(record, sort_keys=True))
    else:
        print(text)


def _formula(text: str):
    return parse_formula(text)


def _assignment(items) -> dict[str, str]:
    out = {}
    for item in items or ():
        var, sep, obj = item.partition("=")
        if not sep or not var or not obj:
            raise UsageError(f"bad assignment {item!r}, expected VAR=OBJECT")
        out[var.strip()] = obj.strip()
    return out


def _seq(text: str | None) -> tuple[str, ...]:
    if not text:
        return ()
    return tuple(s.strip() for s in text.split(",") if s.strip())


# subcommands


def cmd_parse(args) -> int:
    phi = _formula(args.formula)
    rec = {
        "formula": print_formula(phi),
        "size": formula_size(phi),
        "modal_depth": modal_depth(phi),
        "free_vars": sort_vars(free_vars(phi)),
    }
    _emit(args, rec, repr(phi))
    return OK


def cmd_print(args) -> int:
    phi = _formula(args.formula)
    out = print_formula(phi, args.style)
    _emit(args, {"formula": out}, out)
    return OK


def cmd_pnf(args) -> int:
    out = print_formula(to_pnf(_formula(args.formula)), args.style)
    _emit(args, {"pnf": out}, out)
    return OK


def cmd_reletter(args) -> int:
    out = print_formula(reletter_clean(_formula(args.formula)), args.style)
    _emit(args, {"formula": out}, out)
    return OK


def cmd_sat(args) -> int:
    from .tableau import decide_sat, extract_model, format_tableau

    phi = _formula(args.formula)
    full = args.tableau_out is not None
    res = decide_sat(phi, full_tableau=full, right_first=not args.left_first)
    stats = res.tableau.stats
    rec = {"status": "SAT" if res else "UNSAT", "max_live_nodes": stats.max_live, "nodes": stats.nodes}
    if full:
        Path(args.tableau_out).write_text(format_tableau(res))
    if res and args.model_out:
        m, root, sigma = extract_model(res)
        Path(args.model_out).write_text(dump_model(m) + "\n")
        rec.update(root=root, assignment=sigma)
    _emit(args, rec, rec["status"])
    return OK if res else NEG


def cmd_mc(args) -> int:
    m = load_model(args.model, strict=args.strict)
    phi = _formula(args.formula)
    val = mc(m, args.world, _assignment(args.assign), phi, default=args.default)
    _emit(args, {"value": val}, "true" if val else "false")
    return OK if val else NEG


def cmd_bisim(args) -> int:
    from .bisim import bisimilar

    m, n = load_model(args.model_a), load_model(args.model_b)
    res = bisimilar(m, args.world_a, _seq(args.seq_a), n, args.world_b, _seq(args.seq_b))
    rec = {"bisimilar": res.bisimilar, "states": res.states_explored}
    lines = ["true" if res else "false"]
    if args.witness:
        if res:
            rec["relation"] = res.witness_lines()
            lines += rec["relation"]
        else:
            rec["formula"] = print_formula(res.formula)
            rec["variables"] = list(res.variables)
            lines.append(f"distinguishing formula: {rec['formula']}")
    _emit(args, rec, "\n".join(lines))
    return OK if res else NEG


def cmd_translate(args) -> int:
    from .fol import print_fo
    from .translate import to_2sfol, to_fol1, to_foml_text, to_tptp

    phi = _formula(args.formula)
    if args.target == "foml":
        out = to_foml_text(phi)
    elif args.target == "tptp":
        out = to_tptp(phi)
    elif args.target == "2sfol":
        out = print_fo(to_2sfol(phi, guarded=args.guarded), args.style)
    else:
        body, theta, chi = to_fol1(to_2sfol(phi, guarded=args.guarded))
        out = "\n".join(print_fo(f, args.style) for f in (body, theta, chi))
    _emit(args, {"target": args.target, "output": out}, out)
    return OK


def cmd_embed(args) -> int:
    from .fol import parse_fo
    from .translate import embed_prenex_fol

    psi = parse_fo(Path(args.prenex).read_text().strip())
    out = print_formula(embed_prenex_fol(psi))
    _emit(args, {"formula": out}, out)
    return OK


def cmd_check_proof(args) -> int:
    from .hilbert import bundled_lemmas, check_proof, load_lemma_dir
    from .syntax import parse_proof

    store = bundled_lemmas()
    if args.lemmas:
        for name, res in load_lemma_dir(store, args.lemmas):
            if not res.ok:
                print(f"lemma {name}: {res}", file=sys.stderr)
    path = Path(args.file)
    script = parse_proof(path.read_text(), path.stem)
    res = check_proof(script, store)
    rec = {"ok": res.ok, "line": res.line, "reason": res.reason, "kind": res.kind}
    if not res.ok:
        print(f"{path}:{res.line}: {res.reason}", file=sys.stderr)
    _emit(args, rec, str(res))
    return OK if res.ok else NEG


def cmd_search_model(args) -> int:
    from .search import FrameClass, bounded_search

    phi = _formula(args.formula)
    res = bounded_search(phi, args.max_worlds, args.max_objects, FrameClass(args.frame), engine=args.engine)
    if not res:
        rec = {"found": False, "max_worlds": args.max_worlds, "max_objects": args.max_objects}
        _emit(args, rec, f"no model within {args.max_worlds} worlds and {args.max_objects} objects")
        return NEG
    data = json.loads(dump_model(res.model))
    rec = {"found": True, "world": res.world, "assignment": res.sigma, "model": data}
    if args.model_out:
        Path(args.model_out).write_text(dump_model(res.model) + "\n")
    _emit(args, rec, f"model found at {res.world} with {len(res.model.worlds)} worlds\n{dump_model(res.model)}")
    return OK


def cmd_test_suite(args) -> int:
    from .harness import SUITES, replay, run_suite

    if args.replay:
        msg = replay(args.replay)
        _emit(args, {"reproduced": msg is not None, "detail": msg}, msg or "no failure on replay")
        return NEG if msg else OK
    if args.name not in SUITES:
        raise UsageError(f"suite must be one of: {', '.join(SUITES)}")
    rep = run_suite(args.name, args.cases, args.seed, args.dump, args.workers)
    rec = {
        "suite": rep.name,
        "cases": rep.cases,
        "passed": rep.passed,
        "seconds": round(rep.seconds, 3),
        "stats": rep.stats,
        "failures": [{"index": f.index, "check": f.check, "detail": f.detail} for f in rep.failures],
    }
    lines = [rep.summary()] + [f"  case {f.index} [{f.check}]: {f.detail}" for f in rep.failures[:20]]
    _emit(args, rec, "\n".join(lines))
    return OK if rep.ok else NEG


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")

    p = argparse.ArgumentParser(prog="mlms", description="Mention-some modal logic toolkit.")
    p.add_argument("--version", action="version", version=f"mlms {__version__}")
    p.add_argument("--json", action="store_true", default=False, help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help):
        sp = sub.add_parser(name, parents=[common], help=help, description=help)
        sp.set_defaults(func=func)
        return sp

    def style(sp, default="ascii"):
        sp.add_argument("--style", choices=("ascii", "unicode"), default=default)

    sp = add("parse", cmd_parse, "parse a formula and show its structure")
    sp.add_argument("formula")
    sp = add("print", cmd_print, "print a formula in normal form")
    sp.add_argument("formula")
    style(sp)
    sp = add("pnf", cmd_pnf, "positive normal form")
    sp.add_argument("formula")
    style(sp)
    sp = add("reletter", cmd_reletter, "rename bound variables apart")
    sp.add_argument("formula")
    style(sp)

    sp = add("sat", cmd_sat, "decide satisfiability with the tableau")
    sp.add_argument("formula")
    sp.add_argument("--model-out", metavar="FILE")
    sp.add_argument("--tableau-out", metavar="FILE")
    sp.add_argument("--left-first", action="store_true", help="try the left disjunct first")

    sp = add("mc", cmd_mc, "model checking")
    sp.add_argument("model")
    sp.add_argument("world")
    sp.add_argument("formula")
    sp.add_argument("--assign", action="append", metavar="VAR=OBJ")
    sp.add_argument("--default", metavar="OBJ", help="value for unassigned free variables")
    sp.add_argument("--strict", action="store_true", help="require predicate tuples inside local domains")

    sp = add("bisim", cmd_bisim, "check bisimilarity of two pointed models")
    sp.add_argument("model_a")
    sp.add_argument("world_a")
    sp.add_argument("model_b")
    sp.add_argument("world_b")
    sp.add_argument("--seq-a", metavar="a,b,...", help="object sequence in the first model")
    sp.add_argument("--seq-b", metavar="c,d,...", help="object sequence in the second model")
    sp.add_argument("--witness", action="store_true", help="print the relation or a distinguishing formula")

    sp = add("translate", cmd_translate, "translate into first-order languages")
    sp.add_argument("formula")
    sp.add_argument("--target", choices=("foml", "2sfol", "fol1", "tptp"), required=True)
    sp.add_argument("--guarded", action="store_true", help="add the Evx guard under boxes")
    sp.add_argument("--style", choices=("ascii", "compact"), default="compact")

    sp = add("embed", cmd_embed, "embed a prenex first-order sentence")
    sp.add_argument("--prenex", metavar="FILE", required=True)

    sp = add("check-proof", cmd_check_proof, "check a Hilbert proof script")
    sp.add_argument("file")
    sp.add_argument("--lemmas", metavar="DIR")

    sp = add("search-model", cmd_search_model, "bounded model search")
    sp.add_argument("formula")
    sp.add_argument("--max-worlds", type=int, default=4)
    sp.add_argument("--max-objects", type=int, default=3)
    sp.add_argument("--frame", choices=("arbitrary", "s5"), default="arbitrary")
    sp.add_argument("--engine", choices=("sat", "enumerate"), default="sat")
    sp.add_argument("--model-out", metavar="FILE")

    sp = add("test-suite", cmd_test_suite, "run a cross-checking suite")
    sp.add_argument("name", nargs="?")
    sp.add_argument("--cases", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--dump", metavar="DIR")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--replay", metavar="FILE", help="re-run a dumped failure")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else ERR
    try:
        return args.func(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
    except (SchemaError, ArityMismatch, EqualityNotSupported, UsageError) as e:
        print(f"error: {e}", file=sys.stderr)
    except KeyError as e:
        print(f"error: {e.args[0] if e.args else e}", file=sys.stderr)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
    return ERR


if __name__ == "__main__":
    sys.exit(main())
