import io
import json
import subprocess
import sys

import pytest

from bangcalc.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


class TestParsePrint:
    def test_parse_text(self, capsys):
        assert run(capsys, "parse", r"\x.x !x") == (0, "\\x. x !x\n", "")

    def test_parse_json(self, capsys):
        code, data = run_json(capsys, "parse", "!x", "--format", "json")
        assert code == 0 and data == {"body": {"name": "x", "tag": "var"}, "tag": "bang"}

    def test_parse_lambda_rejects_bang(self, capsys):
        code, _, err = run(capsys, "parse", "!x", "--calculus", "lambda")
        assert code == 2 and "bang construct in lambda mode" in err

    def test_print(self, capsys):
        ast = json.dumps({"tag": "der", "body": {"tag": "var", "name": "y"}})
        assert run(capsys, "print", ast)[1] == "der y\n"

    def test_print_stdin(self, capsys, monkeypatch):
        monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps({"tag": "var", "name": "z"})))
        assert run(capsys, "print", "-")[1] == "z\n"

    def test_bad_ast(self, capsys):
        assert run(capsys, "print", '{"tag": "box"}')[0] == 2


class TestReduce:
    def test_text_trace(self, capsys):
        code, out, _ = run(capsys, "reduce", r"der !(\x. der !x !x) !(\x. der !x !x)", "--ground")
        assert code == 0
        lines = out.splitlines()
        assert lines[1].startswith("  ->d [fun]")
        assert lines[2].startswith("  ->v [root]")
        assert lines[-1] == "outcome: cycle (period 2)"

    def test_json_trace(self, capsys):
        code, data = run_json(capsys, "reduce", r"\x. der !x !x", "--ground", "--format", "json")
        assert data == {
            "initial": r"\x. der !x !x",
            "outcome": "normal",
            "steps": [{"kind": "d", "path": ["body", "fun"], "result": r"\x. x !x"}],
        }

    def test_lambda(self, capsys):
        code, data = run_json(
            capsys, "reduce", r"(\x. x) \y. y", "--calculus", "lambda", "--relation", "betav", "--format", "json"
        )
        assert data["outcome"] == "normal" and data["steps"][0]["result"] == r"\y. y"

    def test_budget(self, capsys):
        code, out, _ = run(capsys, "reduce", r"(\x. x !x) !(\x. x !x)", "--max-steps", "2", "--no-cycles")
        assert out.splitlines()[-1] == "outcome: budget_exhausted"

    def test_wrong_relation(self, capsys):
        assert run(capsys, "reduce", "x", "--relation", "beta")[0] == 2


class TestTranslate:
    def test_cbn(self, capsys):
        assert run(capsys, "translate", "--cbn", r"(\x. x x) \x. x x")[1] == "(\\x. x !x) !(\\x. x !x)\n"

    def test_cbv(self, capsys):
        assert run(capsys, "translate", "--cbv", r"\x. x x")[1] == "!(\\x. der !x !x)\n"

    def test_untranslate(self, capsys):
        assert run(capsys, "untranslate", "--cbn", r"(\x. x !x) !(\x. x !x)")[1] == "(\\x. x x) \\x. x x\n"
        assert run(capsys, "untranslate", "--cbv-forgetful", r"!(\x. x !x)")[1] == "\\x. x x\n"
        assert run(capsys, "untranslate", "--forgetful", "!x")[1] == "x\n"

    def test_not_in_image(self, capsys):
        code, _, err = run(capsys, "untranslate", "--cbn", "!x")
        assert code == 2 and "image" in err


class TestCheck:
    def test_simulation(self, capsys):
        code, data = run_json(capsys, "check", "simulation", r"(\x. x) \y. y", "--mode", "cbv")
        assert code == 0 and data["ok"]
        sound = [r for r in data["reports"] if r["direction"] == "soundness"]
        assert [s["kind"] for s in sound[0]["matched_steps"]] == ["d", "v"]

    def test_confluence_peaks(self, capsys):
        code, data = run_json(capsys, "check", "confluence", r"(\x. der !x) !(der !y)")
        assert code == 0 and data == {"ok": True, "open_peaks": []}

    def test_confluence_join(self, capsys):
        code, data = run_json(capsys, "check", "confluence", r"der !y", r"(\x. x) !y")
        assert code == 0 and data["joined"] and data["common"] == "y"

    def test_confluence_not_joined(self, capsys):
        code, data = run_json(capsys, "check", "confluence", "x", "y")
        assert code == 1 and data == {"joined": False}

    def test_equiv(self, capsys):
        code, data = run_json(capsys, "check", "equiv", r"(\x. x) y", "y", "--mode", "cbn")
        assert code == 0 and data["common"] == "y"

    def test_equiv_inconclusive(self, capsys):
        code, data = run_json(
            capsys, "check", "equiv", r"(\x. x x) \x. x x", "y", "--join-budget", "20"
        )
        assert code == 1 and data["joined"] is None

    def test_factorization(self, capsys):
        code, data = run_json(capsys, "check", "factorization", r"\x. x", "--depth", "2", "--budget", "8")
        assert code == 0 and data["equal"]

    def test_inclusion(self, capsys):
        code, data = run_json(capsys, "check", "inclusion", r"\x. x x", "--depth", "3", "--budget", "11")
        assert code == 0
        assert data["strict_witnesses"] == [{"env": {}, "type": "[[[] -o [] -o []] -o [] -o []]"}]

    def test_invariance(self, capsys):
        code, data = run_json(capsys, "check", "invariance", r"der !(\x. x !x)", "--budget", "10")
        assert code == 0 and data == {"equal": True, "reducts_checked": 1}


class TestTypes:
    def test_enumerate(self, capsys):
        code, out, _ = run(capsys, "types", "--depth", "1", "--width", "1", "--budget", "3")
        assert out.splitlines() == ["[]", "[[]]", "[[[]]]", "[] -o []"]

    def test_interpret(self, capsys):
        code, out, _ = run(capsys, "types", "--system", "cbv", "--term", "x", "--depth", "1", "--width", "1", "--budget", "4")
        assert out.splitlines() == ["x:[] |- []", "x:[[]] |- [[]]"]

    def test_interpret_json(self, capsys):
        code, data = run_json(
            capsys, "types", "--term", r"\x. x", "--depth", "1", "--width", "1", "--budget", "5", "--format", "json"
        )
        assert data["vars"] == [] and {"env": {}, "type": "[[]] -o []"} in data["judgements"]

    def test_single_judgement(self, capsys):
        code, data = run_json(
            capsys, "types", "--term", r"!\x. der !x !x", "--type", "[[[] -o [] -o []] -o [] -o []]",
            "--depth", "3", "--budget", "20",
        )
        assert code == 0 and data == {"derivable": True}
        code, data = run_json(
            capsys, "types", "--system", "cbv", "--term", r"\x. x x", "--type", "[[[] -o [] -o []] -o [] -o []]",
            "--depth", "3", "--budget", "20",
        )
        assert code == 1 and data == {"derivable": False}

    def test_environment(self, capsys):
        code, data = run_json(capsys, "types", "--term", "x", "--env", "x:[[]]", "--type", "[]")
        assert data == {"derivable": True}

    def test_bad_type(self, capsys):
        assert run(capsys, "types", "--term", "x", "--type", "[")[0] == 2


class TestSuite:
    def test_text(self, capsys):
        code, out, _ = run(capsys, "suite", "--name", "rewrite", "--cases", "5", "--only", "roundtrip")
        assert code == 0 and out.startswith("roundtrip") and out.rstrip().endswith("ok")

    def test_json_without_timings_is_stable(self, capsys, monkeypatch):
        monkeypatch.setenv("BANGCALC_SEED", "5")
        args = ("suite", "--name", "translate", "--cases", "5", "--format", "json", "--no-timings")
        first = run(capsys, *args)[1]
        second = run(capsys, *args)[1]
        assert first == second and json.loads(first)["seed"] == 5

    def test_budget_flag(self, capsys):
        code, data = run_json(
            capsys, "suite", "--name", "rewrite", "--cases", "3", "--budget", "bang_size=4", "--format", "json",
            "--only", "confluence",
        )
        assert code == 0 and data["properties"][0]["cases_run"] == 3


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "bangcalc", "translate", "--cbv", "x"], capture_output=True, text=True, check=True
    )
    assert proc.stdout == "!x\n"


def test_missing_command():
    with pytest.raises(SystemExit):
        main([])
