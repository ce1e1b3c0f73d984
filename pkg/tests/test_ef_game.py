import random

import pytest

from efq.corpus import VOCABULARIES, random_context_pair
from efq.errors import CapExceeded
from efq.ef_game import (IllegalMove, Phase, apply, legal_moves, partial_isomorphism, reference_winner, replay,
                         solve_ef, start_position)
from efq.formulas import depth, evaluate
from efq.oracle import separable_at_depth
from efq.quantifiers import QuantifierSet
from efq.structures import Context, Structure, Vocabulary

EX = QuantifierSet.of("exists")


def test_colour_models_one_round(colours, exactly3):
    A, B1, B2 = colours["A"], colours["B1"], colours["B2"]
    assert solve_ef(A, B1, 1, exactly3).winner == "I"
    assert solve_ef(A, B2, 1, exactly3).winner == "I"
    assert solve_ef(A, B1, 0, exactly3).winner == "II"
    assert solve_ef(A, A, 2, exactly3).winner == "II"


def test_attack_is_reported(colours, exactly3):
    out = solve_ef(colours["A"], colours["B2"], 1, exactly3)
    js = out.to_json()
    assert js["winner"] == "I" and js["first_move"]["quantifier"] == "exactly=3"


def test_partial_isomorphism_at_start():
    v = Vocabulary.of({"P": 1})
    s = Structure.build(v, 2, P=[0])
    a, b = Context(s, {"x": 0}), Context(s, {"x": 1})
    assert not partial_isomorphism(a, b)
    assert solve_ef(a, b, 0, EX).winner == "I"
    assert start_position(a, b, 0).phase == Phase.TERMINAL


def tiny_pairs(n, seed, max_domain=2):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        vocab = VOCABULARIES[rng.choice(["unary1", "unary2", "binary"])]
        qs = rng.choice([EX, QuantifierSet.of("exactly=2"), QuantifierSet.of("most"), QuantifierSet.of("forall")])
        a, b = random_context_pair(rng, vocab, max_domain, rng.choice([(), ("x",)]))
        out.append((a, b, rng.randint(0, 2), qs))
    return out


@pytest.mark.parametrize("a,b,d,qs", tiny_pairs(40, 21))
@pytest.mark.parametrize("keep", [True, False])
def test_round_solver_matches_explicit_tree(a, b, d, qs, keep):
    assert solve_ef(a, b, d, qs, keep_assignment=keep).winner == reference_winner(a, b, d, qs, keep_assignment=keep)


@pytest.mark.parametrize("a,b,d,qs", tiny_pairs(40, 22, max_domain=3))
def test_winner_matches_depth_separability(a, b, d, qs):
    w = solve_ef(a, b, d, qs).winner
    f = separable_at_depth(a, b, d, qs)
    assert (w == "I") == (f is not None)
    if f is not None:
        assert depth(f) <= d and evaluate(a, f, qs) and not evaluate(b, f, qs)


def _play_out(outcome, qset):
    """Winner plays its strategy; the loser tries every legal move. Every line must end in a win for the winner."""
    stack = [outcome.start]
    seen = set()
    while stack:
        p = stack.pop()
        if p.key in seen:
            continue
        seen.add(p.key)
        moves = legal_moves(p, qset)
        if p.phase == Phase.TERMINAL or not moves:
            winner = p.winner if p.phase == Phase.TERMINAL else ("I" if p.mover == "II" else "II")
            assert winner == outcome.winner, p.describe()
            continue
        if p.mover == outcome.winner:
            stack.append(apply(p, outcome.strategy.move(p), qset))
        else:
            stack.extend(apply(p, m, qset, check=False) for m in moves)


@pytest.mark.parametrize("a,b,d,qs", tiny_pairs(12, 23))
def test_strategy_wins_against_every_line(a, b, d, qs):
    _play_out(solve_ef(a, b, d, qs), qs)


def test_illegal_move_rejected(colours, exactly3):
    p = start_position(colours["A"], colours["B2"], 1)
    with pytest.raises(IllegalMove):
        apply(p, ("pass",), exactly3)


def test_replay_records_moves(colours, exactly3):
    out = solve_ef(colours["A"], colours["B2"], 1, exactly3)
    lines = replay(out, [])
    assert lines and lines[0]["actor"] in ("Player I", "I")


def test_caps_refuse(colours, exactly3):
    with pytest.raises(CapExceeded):
        solve_ef(colours["A"], colours["B1"], 9, exactly3)
