import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from efq.errors import InputError
from efq.structures import (Assignment, Context, Structure, Vocabulary, canonical_key, dump_structures,
                            extend_assignment, load_structures, respects_repetitions, tuples_respecting)

V = Vocabulary.of({"B": 1, "R": 1})


def test_respects_repetitions_examples():
    assert respects_repetitions((5, 5, 2), ("x", "x", "y"))
    assert not respects_repetitions((5, 3, 2), ("x", "x", "y"))
    assert respects_repetitions((7,), ("x",))


def test_respects_repetitions_length_mismatch():
    with pytest.raises(InputError):
        respects_repetitions((1, 2), ("x",))


def test_extend_assignment_examples():
    assert extend_assignment(Assignment(), ("x",), (3,)).as_dict() == {"x": 3}
    assert extend_assignment(Assignment.of({"x": 1, "z": 0}), ("x",), (4,)).as_dict() == {"x": 4, "z": 0}
    assert extend_assignment(Assignment(), ("x", "y"), (2, 2)).as_dict() == {"x": 2, "y": 2}


def test_extend_assignment_rejects_non_respecting():
    with pytest.raises(InputError):
        extend_assignment(Assignment(), ("x", "x"), (0, 1))


def test_tuples_respecting_examples():
    s2 = Structure.build(V, 2)
    assert set(tuples_respecting(s2, ("x", "y"))) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert set(tuples_respecting(s2, ("x", "x"))) == {(0, 0), (1, 1)}
    assert set(tuples_respecting(Structure.build(V, 3), ("x",))) == {(0,), (1,), (2,)}


def test_canonical_key_examples():
    a = Structure.build(V, 3, B=[0])
    b = Structure.build(V, 3, B=[1])
    c1 = Context(a, Assignment.of({"x": 0}))
    assert canonical_key(c1) == canonical_key(Context(a, Assignment.of({"x": 0})))
    assert canonical_key(c1) != canonical_key(Context(a, Assignment.of({"x": 1})))
    assert canonical_key(c1) != canonical_key(Context(b, Assignment.of({"x": 0})))


def test_structure_validation():
    with pytest.raises(InputError):
        Structure.build(V, 2, B=[2])
    with pytest.raises(InputError):
        Structure(V, 2, {"Z": []})
    with pytest.raises(InputError):
        Structure(V, 2, {"B": [(0, 1)]})
    with pytest.raises(InputError):
        Vocabulary.of({"E": 0})
    with pytest.raises(InputError):
        Context(Structure.build(V, 2), Assignment.of({"x": 5}))


def test_empty_vocabulary_allowed():
    s = Structure(Vocabulary(), 3, {})
    assert s.size == 3 and len(s.vocabulary) == 0


def test_json_round_trip():
    text = '{"vocabulary": {"B":1,"R":1}, "structures": {"A": {"domain": 4, "relations": {"B": [[0],[1],[2]], "R": []}}}}'
    vocab, structures = load_structures(json.loads(text))
    again = load_structures(json.loads(json.dumps(dump_structures(vocab, structures))))
    assert again[0] == vocab and again[1] == structures
    assert structures["A"].rel("B") == frozenset({(0,), (1,), (2,)})


def test_json_rejects_unknown_relation():
    with pytest.raises(InputError):
        load_structures({"vocabulary": {"B": 1}, "structures": {"A": {"domain": 2, "relations": {"C": []}}}})


def test_iso_key_identifies_isomorphic_contexts():
    a = Structure.build(V, 3, B=[0, 1], R=[2])
    b = a.permuted([2, 0, 1])
    assert Context(a).iso_key == Context(b).iso_key
    assert Context(a, Assignment.of({"x": 0})).iso_key == Context(b, Assignment.of({"x": 2})).iso_key
    assert Context(a, Assignment.of({"x": 0})).iso_key != Context(a, Assignment.of({"x": 2})).iso_key


var_tuples = st.lists(st.sampled_from("xyz"), min_size=1, max_size=3).map(tuple)


@given(n=st.integers(1, 4), x=var_tuples)
def test_tuples_respecting_count_and_membership(n, x):
    ts = tuples_respecting(n, x)
    assert len(ts) == n ** len(set(x))
    assert all(respects_repetitions(t, x) for t in ts)


@given(n=st.integers(1, 4), x=var_tuples, data=st.data())
def test_extend_assignment_idempotent(n, x, data):
    t = data.draw(st.sampled_from(tuples_respecting(n, x)))
    f = Assignment.of({"z": 0, "x": n - 1})
    once = extend_assignment(f, x, t)
    assert extend_assignment(once, x, t) == once
    assert all(once[v] == e for v, e in zip(x, t))
