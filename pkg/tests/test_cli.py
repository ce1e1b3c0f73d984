import io
import json
import os

import pytest

from efq.cli import main

from conftest import DATA

COLOURS = os.path.join(DATA, "colour_models.json")
MARKED = os.path.join(DATA, "marked_models.json")


def run(*argv, stdin=""):
    out = io.StringIO()
    code = main(list(argv), out=out, inp=io.StringIO(stdin))
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--json")
    return code, json.loads(text)


@pytest.mark.parametrize("name,value", [("A", "true"), ("B1", "false"), ("B2", "false")])
def test_eval(name, value):
    code, text = run("eval", "-w", COLOURS, "--structure", name, "--formula", "exactly=3 x. (B(x) | R(x))")
    assert code == 0 and text.strip() == value


def test_eval_assign_and_trace():
    code, text = run("eval", "-w", COLOURS, "--structure", "A{x=3}", "--formula", "!B(x) & exactly=3 y. B(y)",
                     "--trace")
    assert code == 0 and text.splitlines()[0] == "true" and "extension" in text


def test_eval_json():
    code, data = run_json("eval", "-w", COLOURS, "--structure", "A", "--formula", "exactly=3 x. B(x)")
    assert code == 0 and data["value"] is True and data["size"] == 2


def test_ef_game():
    code, data = run_json("ef-game", "-w", COLOURS, "--left", "A", "--right", "B2", "--rounds", "1", "--witness")
    assert code == 0 and data["winner"] == "I" and data["witness"]["verified"]
    code, text = run("ef-game", "-w", COLOURS, "--left", "A", "--right", "B1", "--rounds", "0", "--expect-player-i")
    assert code == 2 and "Player II" in text


def test_ef_game_find_min():
    code, data = run_json("ef-game", "-w", COLOURS, "--left", "A", "--right", "B1", "--rounds", "2", "--find-min")
    assert code == 0 and data["min_rounds"] == 1


def test_pair_game_marked_models():
    code, data = run_json("pair-game", "-w", MARKED, "--budget", "2")
    assert code == 0 and data["winner"] == "I"
    code, data = run_json("pair-game", "-w", MARKED, "--budget", "1", "--no-split")
    assert code == 0 and data["winner"] == "II"
    code, _ = run("pair-game", "-w", MARKED, "--budget", "1", "--expect-player-i")
    assert code == 2


def test_size_game_and_transcript():
    code, text = run("size-game", "-w", MARKED, "--budget", "3", "--left-class", "A", "--right-class", "B",
                     "--transcript", "--witness")
    assert code == 0 and "Player I" in text and "witness:" in text and "verified" in text
    code, data = run_json("size-game", "-w", MARKED, "--budget", "2", "--left-class", "A", "--right-class", "B")
    assert data["winner"] == "II"


def test_weak_game():
    code, data = run_json("weak-game", "-w", COLOURS, "--budget", "3", "--left-class", "A",
                          "--right-class", "B1,B2", "--witness")
    assert code == 0 and data["winner"] in ("I", "II")
    if data["winner"] == "II":
        assert data["counterpair"]


def test_synth_size_and_depth():
    code, data = run_json("synth", "-w", MARKED, "--max", "4")
    assert code == 0 and data["minimum"] == 3 and data["verified"]
    code, data = run_json("synth", "-w", COLOURS, "--mode", "depth", "--max", "2", "--left", "A", "--right", "B1")
    assert code == 0 and data["minimum"] == 1 and data["depth"] <= 1
    code, text = run("synth", "-w", MARKED, "--max", "2")
    assert code == 0 and "no separating formula" in text


def test_types():
    code, data = run_json("types", "-w", COLOURS, "--structures", "A", "--vars", "x", "--depth", "3")
    assert code == 0 and len(data["cells"]) == 2 and "note" in data


def test_check_quantifier():
    code, text = run("check-quantifier", "exactly=3", "haertig", "ham", "--max-domain-size", "3")
    assert code == 0 and text.count("ok") >= 3
    code, data = run_json("check-quantifier", "--predicate", "size % 2 == 1", "--name", "odd")
    assert code == 0 and data["ok"]


def test_quantifier_override_and_dump(tmp_path):
    dump = tmp_path / "ws.json"
    code, text = run("eval", "-w", COLOURS, "-q", "exists,forall", "--structure", "A",
                     "--formula", "exists x. R(x)", "--dump-workspace", str(dump))
    assert code == 0 and text.strip() == "false"
    assert json.loads(dump.read_text())["quantifiers"] == ["exists", "forall"]


def test_errors():
    assert run("eval", "-w", COLOURS, "--structure", "Z", "--formula", "B(x)")[0] == 1
    assert run("eval", "-w", COLOURS, "--structure", "A", "--formula", "B(x")[0] == 1
    assert run("eval", "-w", "/nonexistent.json", "--structure", "A", "--formula", "x = x")[0] == 1
    assert run("size-game", "-w", COLOURS, "--budget", "3", "--left-class", "A", "--right-class", "B1",
               "--max-budget", "2")[0] == 3
    with pytest.raises(SystemExit) as e:
        run("frobnicate")
    assert e.value.code == 1


def test_play_pair_as_player_ii():
    # the engine (Player I) wins at budget 2; the human always picks the first reply, then declines the witness
    code, text = run("play", "pair", "-w", MARKED, "--side", "II", "--budget", "2", stdin="1\n" * 10 + "n\n")
    assert code == 0 and "Player I wins" in text


def test_play_reprompts_and_aborts_on_eof():
    code, text = run("play", "class", "-w", MARKED, "--side", "I", "--budget", "3", "--left-class", "A",
                     "--right-class", "B", stdin="99\nabc\n")
    assert code == 0 and "please enter a number" in text and "input closed; game aborted" in text


def test_play_ef_engine_wins():
    argv = ("play", "ef", "-w", COLOURS, "--side", "II", "--left", "A", "--right", "B2", "--rounds", "1")
    code, text = run(*argv, stdin="1\n" * 20)
    assert code == 0 and "Player I wins" in text
    prompts = text.count("your move")
    code, text = run(*argv, stdin="1\n" * prompts + "y\n")
    assert code == 0 and "witness:" in text and "verified" in text


def test_eval_or_primitive_size():
    code, text = run("eval", "-w", MARKED, "--structure", "A", "--formula", "P1(x) | P2(x) | P3(x)", "--assign", "x=0",
                     "--or-primitive")
    assert code == 0 and text.splitlines() == ["true", "size 9; 3 with primitive disjunction"]
    code, data = run_json("eval", "-w", MARKED, "--structure", "A{x=3}", "--formula", "P1(x) | P2(x)", "--or-primitive")
    assert data["value"] is False and (data["size"], data["size_or_primitive"]) == (5, 2)
