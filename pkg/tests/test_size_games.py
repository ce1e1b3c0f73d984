import functools
import itertools
import random

import pytest

from efq.caps import DEFAULT_CAPS
from efq.corpus import VOCABULARIES, random_class_pair, random_context, random_context_pair
from efq.errors import CapExceeded, InputError
from efq.quantifiers import QuantifierSet
from efq.size_games import (ClassPosition, PairPosition, SizeGameSolver, atomic_separates, class_moves,
                            class_successors, class_terminal, min_winning_budget, pair_moves, pair_successors,
                            pair_terminal, replay, solve_class_game, solve_pair_game, solve_weak_game,
                            weak_game_counterpair)
from efq.structures import Context, Structure, Vocabulary

EX = QuantifierSet.of("exists")
EX2 = QuantifierSet.of("exists", "exactly=2")


def explicit_class_winner(p, qset):
    """Plain minimax over every witness function (no canonical restriction, no memo beyond positions)."""
    @functools.lru_cache(maxsize=None)
    def wins(q):
        t = class_terminal(q)
        if t is not None:
            return t[0] == "I"
        for m in class_moves(q, qset, canonical=False, limit=10 ** 7):
            if all(wins(r) for _, r in class_successors(q, m, qset)):
                return True
        return False
    return "I" if wins(p) else "II"


def explicit_pair_winner(p, qset, split=True):
    @functools.lru_cache(maxsize=None)
    def wins(q):
        t = pair_terminal(q)
        if t is not None:
            return t[0] == "I"
        for m in pair_moves(q, qset, split=split, canonical=False, limit=10 ** 7):
            if all(wins(r) for _, r in pair_successors(q, m, qset)):
                return True
        return False
    return "I" if wins(p) else "II"


def tiny_class_instances(n, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        vocab = VOCABULARIES[rng.choice(["unary1", "unary2", "binary"])]
        L, R = random_class_pair(rng, vocab, 2, 2, rng.choice([(), ("x",)]))
        out.append((L, R, rng.randint(1, 3)))
    return out


OTHER_SETS = [QuantifierSet.of("exactly=2", "forall"), QuantifierSet.of("most"), QuantifierSet.of("haertig")]


@pytest.mark.parametrize("L,R,s", tiny_class_instances(30, 11))
def test_class_solver_matches_explicit_minimax(L, R, s):
    p = ClassPosition(s, L, R)
    assert solve_class_game(p, EX).winner == explicit_class_winner(p, EX)


@pytest.mark.parametrize("qset", OTHER_SETS, ids=lambda q: "+".join(q.names()))
def test_solvers_match_explicit_minimax_other_quantifiers(qset):
    for L, R, s in tiny_class_instances(25, 13):
        p = ClassPosition(s, L, R)
        assert solve_class_game(p, qset).winner == explicit_class_winner(p, qset)
        pp = PairPosition(s, L[0], R[0])
        assert solve_pair_game(pp, qset).winner == explicit_pair_winner(pp, qset)


def tiny_pairs(n, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        vocab = VOCABULARIES[rng.choice(["unary1", "unary2", "binary"])]
        a, b = random_context_pair(rng, vocab, 2, rng.choice([(), ("x",)]))
        out.append((a, b, rng.randint(1, 4)))
    return out


@pytest.mark.parametrize("a,b,s", tiny_pairs(30, 12))
def test_pair_solver_matches_explicit_minimax(a, b, s):
    p = PairPosition(s, a, b)
    assert solve_pair_game(p, EX).winner == explicit_pair_winner(p, EX)
    assert solve_pair_game(p, EX, split=False).winner == explicit_pair_winner(p, EX, split=False)


def test_marked_models_pair_game(marked, exactly3):
    A, B = marked["A"], marked["B"]
    assert solve_pair_game(PairPosition(1, A, B), exactly3).winner == "II"
    for s in (2, 3):
        for split in (True, False):
            assert solve_pair_game(PairPosition(s, A, B), exactly3, split=split).winner == "I"
    assert min_winning_budget("pair", (A, B), 4, exactly3) == 2


def test_marked_models_class_game(marked, exactly3):
    A, B = marked["A"], marked["B"]
    assert min_winning_budget("class", ([A], [B]), 4, exactly3) == 3


def test_atomic_terminal():
    v = Vocabulary.of({"P": 1})
    a = Context(Structure.build(v, 2, P=[0]), {"x": 0})
    b = Context(Structure.build(v, 2, P=[0]), {"x": 1})
    assert atomic_separates([a], [b]) is not None
    assert class_terminal(ClassPosition(5, [a], [b]))[0] == "I"
    assert class_terminal(ClassPosition(1, [a], [a]))[0] == "II"


def test_empty_class_literal_reading():
    v = Vocabulary.of({"P": 1})
    a = Context(Structure.build(v, 2, P=[0]))
    # with no variables there is no atomic formula, so budget 1 is a Player II win even against an empty class
    assert solve_class_game(ClassPosition(1, [], [a]), EX).winner == "II"
    # two empty classes are separated by any atom, the vacuous terminal case
    assert solve_class_game(ClassPosition(1, [], []), EX).winner == "I"
    # ... while a bound variable makes x = x available as a separator
    ax = Context(a.structure, {"x": 0})
    assert solve_class_game(ClassPosition(1, [ax], []), EX).winner == "I"
    # with budget 2 a negated quantifier separates anything from the empty class
    assert solve_class_game(ClassPosition(2, [a], []), EX).winner == "I"
    # the weak game has no pair for Player II to choose
    assert solve_weak_game(1, [], [a], EX) == "I"


def test_weak_game_counterpair(marked, exactly3):
    A, B = marked["A"], marked["B"]
    assert weak_game_counterpair(2, [A], [B], exactly3) == (A, B)
    assert weak_game_counterpair(3, [A], [B], exactly3) is None
    assert solve_weak_game(3, [A], [B], exactly3) == "I"


@pytest.mark.parametrize("seed", range(8))
def test_budget_monotonicity(seed):
    rng = random.Random(seed)
    vocab = VOCABULARIES["mixed"]
    L, R = random_class_pair(rng, vocab, 3, 2)
    wins = [solve_class_game(ClassPosition(s, L, R), EX2).winner == "I" for s in range(1, 6)]
    assert wins == sorted(wins)
    a, b = L[0], R[0]
    pw = [solve_pair_game(PairPosition(s, a, b), EX2).winner == "I" for s in range(1, 6)]
    assert pw == sorted(pw)


@pytest.mark.parametrize("seed", range(10))
def test_split_move_is_redundant(seed):
    rng = random.Random(100 + seed)
    a, b = random_context_pair(rng, VOCABULARIES["mixed"], 3)
    for s in range(1, 5):
        p = PairPosition(s, a, b)
        assert solve_pair_game(p, EX2).winner == solve_pair_game(p, EX2, split=False).winner


@pytest.mark.parametrize("seed", range(6))
def test_pair_game_is_at_most_class_game(seed):
    rng = random.Random(200 + seed)
    a, b = random_context_pair(rng, VOCABULARIES["unary2"], 3)
    for s in range(1, 5):
        if solve_class_game(ClassPosition(s, [a], [b]), EX2).winner == "I":
            assert solve_pair_game(PairPosition(s, a, b), EX2).winner == "I"


def _exhaust(outcome, qset, kind):
    """Follow the winner's strategy against every reply of the loser; check every line ends in a win."""
    strat = outcome.strategy
    terminal = class_terminal if kind == "class" else pair_terminal
    moves = (lambda p: class_moves(p, qset)) if kind == "class" else (lambda p: pair_moves(p, qset))
    succ = class_successors if kind == "class" else pair_successors
    stack = [outcome.start]
    while stack:
        p = stack.pop()
        t = terminal(p)
        if t is not None:
            assert t[0] == outcome.winner
            continue
        if outcome.winner == "I":
            m = strat.player_i_move(p)
            assert m is not None
            stack.extend(q for _, q in succ(p, m, qset))
        else:
            for m in moves(p):
                opts = succ(p, m, qset)
                stack.append(opts[strat.player_ii_reply(opts)][1])


@pytest.mark.parametrize("seed", range(6))
def test_strategies_win_every_line(seed):
    rng = random.Random(300 + seed)
    L, R = random_class_pair(rng, VOCABULARIES["unary2"], 2, 2)
    for s in (2, 3):
        _exhaust(solve_class_game(ClassPosition(s, L, R), EX), EX, "class")
        _exhaust(solve_pair_game(PairPosition(s, L[0], R[0]), EX), EX, "pair")


def test_replay_transcript(marked, exactly3):
    out = solve_pair_game(PairPosition(2, marked["A"], marked["B"]), exactly3)
    lines = replay(out, [0, 0, 0, 0], exactly3)
    assert lines[0]["actor"] == "Player I" and "Player I wins" in lines[-1]["note"]
    lost = solve_pair_game(PairPosition(1, marked["A"], marked["B"]), exactly3)
    assert "Player II wins" in replay(lost, [], exactly3)[-1]["note"]


def test_class_move_validation(marked, exactly3):
    p = ClassPosition(3, [marked["A"]], [marked["B"]])
    with pytest.raises(InputError):
        class_successors(p, ("split", 1, 1, frozenset(), frozenset()), exactly3)
    with pytest.raises(InputError):
        class_successors(p, ("quantify", "exactly=3", (("y",),), (2,), ({marked["A"]: frozenset()}, )), exactly3)


def test_caps_refuse():
    rng = random.Random(1)
    big = random_context(rng, VOCABULARIES["unary1"], 6, min_domain=6)
    with pytest.raises(CapExceeded):
        solve_pair_game(PairPosition(2, big, big), EX)
    small = random_context(rng, VOCABULARIES["unary1"], 2)
    with pytest.raises(CapExceeded):
        solve_class_game(ClassPosition(DEFAULT_CAPS.max_budget + 1, [small], [small]), EX)


def test_budget_must_be_positive():
    with pytest.raises(InputError):
        ClassPosition(0, [], [])


@pytest.mark.parametrize("seed", range(3))
def test_rule_family_matches_brute_force(seed):
    rng = random.Random(seed)
    for _ in range(10):
        vocab = VOCABULARIES[rng.choice(list(VOCABULARIES))]
        qs = rng.choice([EX, QuantifierSet.of("exactly=2", "forall"), QuantifierSet.of("haertig"),
                         QuantifierSet.of("most")])
        vs = ("x",) if rng.random() < 0.6 else ("x", "y")
        ctxs = [random_context(rng, vocab, 2 if len(vs) == 2 else 3, vs) for _ in range(rng.randint(1, 3))]
        fast, slow = SizeGameSolver(qs), SizeGameSolver(qs, family_budget=1)
        keys = sorted({fast.register(c) for c in ctxs})
        for c in ctxs:
            slow.register(c)
        everything = frozenset(keys)
        for u in (2, 3):
            fam = fast.rule_family(keys, u)
            brute = {frozenset(S) for r in range(len(keys) + 1) for S in itertools.combinations(keys, r)
                     if slow.class_wins(u, frozenset(S), everything - frozenset(S))}
            assert set(fam) == brute
