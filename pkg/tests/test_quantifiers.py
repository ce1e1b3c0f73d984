import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from efq.errors import InputError, ParseError
from efq.quantifiers import (QuantifierSet, builtin, check_iso_invariance, custom_monadic, custom_quantifier,
                             has_hamiltonian_path, q_accepts)


def acc(qname, n, *sets):
    return q_accepts(builtin(qname), n, [set(s) for s in sets])


def test_builtin_examples():
    assert acc("exactly=3", 4, [(0,), (1,), (2,)])
    assert acc("forall", 3, [(0,), (1,), (2,)])
    assert not acc("forall", 3, [(0,), (1,)])
    assert acc("haertig", 4, [(0,), (1,)], [(2,), (3,)])
    assert acc("ham", 3, [(0, 1), (1, 2)])
    assert not acc("ham", 3, [(0, 1)])


def test_q_accepts_examples():
    assert not acc("exists", 4, [])
    assert not acc("exactly=3", 4, [(0,), (1,), (2,), (3,)])
    assert acc("most", 5, [(0,), (1,), (2,)])
    assert acc("atleast=2", 3, [(0,), (2,)]) and not acc("atmost=1", 3, [(0,), (2,)])


def test_q_accepts_errors():
    with pytest.raises(InputError):
        q_accepts(builtin("haertig"), 3, [set()])
    with pytest.raises(InputError):
        q_accepts(builtin("exists"), 3, [{(0, 1)}])


def test_builtin_unknown():
    with pytest.raises(ParseError):
        builtin("several")
    with pytest.raises(ParseError):
        builtin("exactly=-1")


def test_types():
    assert builtin("haertig").arities == (1, 1) and builtin("haertig").width == 2
    assert builtin("ham").arities == (2,)
    assert builtin("most").arities == (1,)


def test_ham_single_vertex_accepts_empty():
    # a path of length 0 visits the only vertex
    assert acc("ham", 1, [])


def test_ham_is_directed_path_not_cycle():
    assert has_hamiltonian_path(3, frozenset({(2, 1), (1, 0)}))
    assert not has_hamiltonian_path(3, frozenset({(0, 1), (2, 1)}))
    assert not has_hamiltonian_path(4, frozenset({(0, 1), (1, 0), (2, 3), (3, 2)}))


@pytest.mark.parametrize("qname", ["exists", "forall", "exactly=2", "exactly=3", "atleast=2", "atmost=1",
                                  "most", "haertig", "ham"])
def test_builtins_iso_invariant(qname):
    r = check_iso_invariance(builtin(qname), 4)
    assert r.ok and r.exhaustive


def test_broken_quantifier_detected():
    broken = custom_quantifier("zero_in", [1], lambda n, sets: (0,) in sets[0])
    r = check_iso_invariance(broken, 3)
    assert not r.ok and r.violations


def test_custom_monadic_and_config():
    odd = custom_monadic("odd", "size % 2 == 1")
    assert q_accepts(odd, 4, [{(0,)}]) and not q_accepts(odd, 4, [{(0,), (1,)}])
    qs = QuantifierSet.from_config({"quantifiers": ["exists", {"name": "odd", "width": 1, "type": [1],
                                                                "cardinality_predicate": "size % 2 == 1"}]})
    assert qs.names() == ["exists", "odd"]
    again = QuantifierSet.from_config(qs.to_config())
    assert again.names() == qs.names()


def test_predicate_grammar_is_restricted():
    with pytest.raises(ParseError):
        custom_monadic("bad", "__import__('os')")
    with pytest.raises(ParseError):
        custom_monadic("bad", "size +")


def test_duplicate_names_rejected():
    with pytest.raises(InputError):
        QuantifierSet.of("exists", "exists")


@pytest.mark.parametrize("qname", ["exists", "forall", "exactly=2", "most", "atleast=3"])
def test_monadic_builtins_depend_only_on_cardinality(qname):
    q = builtin(qname)
    for n in range(1, 5):
        by_size = {}
        for k in range(n + 1):
            for sub in itertools.combinations(range(n), k):
                by_size.setdefault(k, set()).add(q_accepts(q, n, [{(e,) for e in sub}]))
        assert all(len(v) == 1 for v in by_size.values())


@given(n=st.integers(1, 4), data=st.data())
def test_ham_matches_permutation_search(n, data):
    pairs = [(a, b) for a in range(n) for b in range(n)]
    edges = frozenset(data.draw(st.sets(st.sampled_from(pairs))))
    brute = any(all((p[i], p[i + 1]) in edges for i in range(n - 1)) for p in itertools.permutations(range(n)))
    assert has_hamiltonian_path(n, edges) == brute
