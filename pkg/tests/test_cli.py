import json
import shutil
import subprocess
import sys

import pytest

from mlms import __version__
from mlms.cli import main
from mlms.syntax import load_model

from conftest import GALLERY

FIGURE = "K[x](P(x)|Q(x)) & D[y]~Q(y) & ~P(z)"
M1, N1 = str(GALLERY / "pair_a_M.json"), str(GALLERY / "pair_a_N.json")
N2 = str(GALLERY / "pair_b_N.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sat(capsys):
    assert run(capsys, "sat", FIGURE)[:2] == (0, "SAT\n")
    assert run(capsys, "sat", "K[x] P(x) & D[y] ~P(y)")[:2] == (1, "UNSAT\n")


def test_sat_outputs(capsys, tmp_path):
    tab, mod = tmp_path / "t.txt", tmp_path / "m.json"
    code, out, _ = run(capsys, "--json", "sat", FIGURE, "--tableau-out", str(tab), "--model-out", str(mod))
    assert code == 0
    rec = json.loads(out)
    assert rec["status"] == "SAT" and rec["root"] == "w"
    assert "wv^x_y: {Px, ¬Qx}" in tab.read_text()
    assert "wv^z_y: {Qx, ¬Qz}" in tab.read_text()
    assert load_model(mod).worlds == ("w", "wv^x_y", "wv^z_y")
    assert run(capsys, "mc", str(mod), "w", FIGURE, "--assign", "z=z")[:2] == (0, "true\n")


def test_mc(capsys):
    assert run(capsys, "mc", M1, "w", "K[x] P(x)")[:2] == (1, "false\n")
    assert run(capsys, "mc", M1, "w", "D[x] P(x)")[:2] == (0, "true\n")
    assert run(capsys, "mc", M1, "v", "P(y)", "--assign", "y=a")[:2] == (0, "true\n")
    code, _, err = run(capsys, "mc", M1, "w", "P(y)")
    assert code == 2 and "no value" in err
    code, _, err = run(capsys, "mc", M1, "nowhere", "p")
    assert code == 2 and "unknown world nowhere" in err


def test_bisim(capsys):
    code, out, _ = run(capsys, "bisim", M1, "w", N1, "s")
    assert (code, out) == (0, "true\n")
    code, out, _ = run(capsys, "bisim", M1, "w", N2, "s", "--witness")
    assert code == 1
    assert out.splitlines()[1].startswith("distinguishing formula: ")
    code, out, _ = run(capsys, "--json", "bisim", M1, "w", N1, "s", "--witness", "--seq-a", "a", "--seq-b", "c")
    assert code == 1 and json.loads(out)["formula"] == "K[y1] ~(y1 = x1)"


def test_formula_commands(capsys):
    assert run(capsys, "print", "--style", "unicode", "K[x] P(x)")[1] == "□ˣPx\n"
    assert run(capsys, "pnf", "~K[x] P(x)")[1] == "D[x] ~P(x)\n"
    assert run(capsys, "reletter", "K[x] P(x) & K[x] Q(x)")[1] == "K[x] P(x) & K[_v0] Q(_v0)\n"
    rec = json.loads(run(capsys, "parse", "--json", "K[x] R(x, y)")[1])
    assert rec == {"formula": "K[x] R(x,y)", "free_vars": ["y"], "modal_depth": 1, "size": 2}


def test_translate_and_embed(capsys, tmp_path):
    out = run(capsys, "translate", "K[x] P(x)", "--target", "fol1")[1]
    assert out.splitlines()[0] == "∃x(S₁x ∧ S₂u ∧ Eux ∧ ∀v((S₂v ∧ Ruv) → Q_P v x))"
    assert run(capsys, "translate", "K[x] P(x)", "--target", "tptp")[1].count("fof(") == 3
    assert run(capsys, "translate", "K[x] P(x)", "--target", "foml")[1] == "exists x . K P(x)\n"
    f = tmp_path / "s.fo"
    f.write_text("exists x. forall y. R(x,y)\n")
    assert run(capsys, "embed", "--prenex", str(f))[1] == "K[x] D[y] K R(x,y)\n"


def test_check_proof(capsys, tmp_path):
    good = tmp_path / "good.prf"
    good.write_text("1. x = y -> y = x ; LEMMA SYM\n")
    assert run(capsys, "check-proof", str(good))[:2] == (0, "Ok\n")
    bad = tmp_path / "bad.prf"
    bad.write_text("1. x = x ; ID\n2. x = y ; ID\n")
    code, out, err = run(capsys, "check-proof", str(bad))
    assert code == 1 and out.startswith("Error at line 2")
    assert "bad.prf:2:" in err
    broken = tmp_path / "broken.prf"
    broken.write_text("1. x = ; ID\n")
    assert run(capsys, "check-proof", str(broken))[0] == 2


def test_search_model(capsys):
    code, out, _ = run(capsys, "--json", "search-model", "D[x] P(x) & ~P(z)", "--frame", "s5")
    rec = json.loads(out)
    assert code == 0 and rec["found"]
    code, out, _ = run(capsys, "search-model", "P(x) & ~P(x)", "--max-worlds", "2", "--max-objects", "2")
    assert code == 1 and "no model" in out


def test_test_suite(capsys, tmp_path):
    code, out, _ = run(capsys, "test-suite", "pnf", "--cases", "20")
    assert code == 0 and out.startswith("pnf: PASS 20/20")
    code, _, err = run(capsys, "test-suite", "nope")
    assert code == 2 and "suite must be one of" in err


def test_usage_errors(capsys):
    assert run(capsys, "parse", "K[x")[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "sat", "x = y")[0] == 2
    assert run(capsys, "mc", "/nonexistent.json", "w", "p")[0] == 2
    assert run(capsys, "mc", M1, "w", "p", "--assign", "oops")[0] == 2


def test_version(capsys):
    assert run(capsys, "--version") == (0, f"mlms {__version__}\n", "")


@pytest.mark.skipif(shutil.which("mlms") is None, reason="console script not installed")
def test_console_script():
    r = subprocess.run(["mlms", "sat", FIGURE], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "SAT\n"
    r = subprocess.run([sys.executable, "-m", "mlms.cli", "bisim", M1, "w", N1, "s"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "true\n"
