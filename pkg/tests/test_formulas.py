import pytest
from hypothesis import given
from hypothesis import strategies as st

from efq.corpus import COLOURS, MARKS, colour_models, random_context
from efq.errors import InputError, ParseError
from efq.formulas import (And, Eq, Not, Or, Q, Quant, Rel, as_or, atoms_over, depth, disjoin, evaluate, extension,
                          free_vars, parse, size, to_text, trace)
from efq.quantifiers import QuantifierSet
from efq.structures import Assignment, Context, Structure, Vocabulary

QS = QuantifierSet.of("exists", "forall", "exactly=3", "most", "haertig", "ham")
BIN = Vocabulary.of({"P": 1, "E": 2})


def P(v):
    return Rel("P", (v,))


def test_size_examples():
    assert size(Rel("B", ("x",))) == 1
    assert size(Not(Rel("B", ("x",)))) == 2
    assert size(And(Rel("B", ("x",)), Rel("R", ("x",)))) == 2
    assert size(Q("exactly=3", "x", Or(Rel("B", ("x",)), Rel("R", ("x",))))) == 6


def test_or_is_sugar():
    f = parse("B(x) | R(x)", COLOURS, QS)
    assert f == Not(And(Not(Rel("B", ("x",))), Not(Rel("R", ("x",)))))
    assert as_or(f) == (Rel("B", ("x",)), Rel("R", ("x",)))
    assert size(f) == 5 and size(f, or_primitive=True) == 2


def test_depth_and_free_vars():
    f = parse("exists x. (P(x) & exists y. E(x,y)) & P(z)", BIN, QS)
    assert depth(f) == 2
    assert free_vars(f) == {"z"}
    g = parse("haertig (x)(y). (P(x), E(y,z))", BIN, QS)
    assert free_vars(g) == {"z"} and depth(g) == 1 and size(g) == 3


def test_parse_print_round_trip_examples():
    for text in ["exactly=3 x. (B(x) | R(x))", "!B(x) & R(y)", "forall x. exists y. x = y",
                 "most x. B(x)", "ham (x,y). (B(x) & !x = y)"]:
        f = parse(text, COLOURS, QS)
        assert parse(to_text(f), COLOURS, QS) == f


def test_parse_width2_and_type2():
    f = parse("haertig (x)(y). (P(x), !P(y))", BIN, QS)
    assert isinstance(f, Quant) and f.bound == (("x",), ("y",))
    g = parse("ham (x,y). E(x,y)", BIN, QS)
    assert g.bound == (("x", "y"),)
    assert parse(to_text(f), BIN, QS) == f and parse(to_text(g), BIN, QS) == g


@pytest.mark.parametrize("text", ["B(x", "exists . B(x)", "C(x)", "B(x,y)", "unknownq x. B(x)",
                                  "B(x) &", "haertig (x). B(x)", "ham x. B(x)", ""])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text, COLOURS, QS)


def test_parse_error_has_position():
    with pytest.raises(ParseError) as e:
        parse("B(x) & & R(x)", COLOURS, QS)
    assert e.value.pos is not None and "^" in str(e.value)


def test_quantifier_not_in_set_rejected():
    with pytest.raises(ParseError):
        parse("exists x. B(x)", COLOURS, QuantifierSet.of("exactly=3"))


def test_colour_models_evaluation():
    qs = QuantifierSet.of("exactly=3")
    f = parse("exactly=3 x. (B(x) | R(x))", COLOURS, qs)
    ms = colour_models()
    assert [evaluate(Context(ms[k]), f, qs) for k in ("A", "B1", "B2")] == [True, False, False]


def test_unbound_free_variable_rejected():
    a = Context(colour_models()["A"])
    with pytest.raises(InputError):
        evaluate(a, Rel("B", ("x",)), QS)
    assert evaluate(Context(a.structure, Assignment.of({"x": 0})), Rel("B", ("x",)), QS)


def test_extension_respects_repetitions():
    s = Structure.build(BIN, 3, E={(0, 0), (1, 2), (2, 2)})
    c = Context(s)
    assert extension(c, Rel("E", ("x", "x")), ("x",), QS) == {(0,), (2,)}
    y2 = Context(s, Assignment.of({"y": 2}))
    assert extension(y2, Rel("E", ("x", "y")), ("x", "x"), QS) == {(1, 1), (2, 2)}
    assert extension(c, Rel("E", ("x", "y")), ("x", "y"), QS) == {(0, 0), (1, 2), (2, 2)}


def test_haertig_and_ham_on_hand_built_models():
    four = Structure.build(BIN, 4, P={(0,), (1,)}, E={(0, 1), (1, 2), (2, 3)})
    even = Context(four)
    assert evaluate(even, parse("haertig (x)(y). (P(x), !P(y))", BIN, QS), QS)
    assert not evaluate(even, parse("haertig (x)(y). (P(x), y = y)", BIN, QS), QS)
    assert evaluate(even, parse("ham (x,y). E(x,y)", BIN, QS), QS)
    assert not evaluate(even, parse("ham (x,y). E(y,x) & P(y)", BIN, QS), QS)
    # a path needs n-1 distinct edges; the reversed edges still form a path
    assert evaluate(even, parse("ham (x,y). E(y,x)", BIN, QS), QS)


def test_trace_reports_extensions():
    qs = QuantifierSet.of("exactly=3")
    f = parse("exactly=3 x. (B(x) | R(x))", COLOURS, qs)
    [(g, env, exts)] = trace(Context(colour_models()["B1"]), f, qs)
    assert g == f and exts == [[(0,), (1,), (2,), (3,)]]


def test_atoms_over():
    atoms = atoms_over(Vocabulary.of({"E": 2}), ["x", "y"])
    assert Eq("x", "y") in atoms and Eq("x", "x") in atoms
    assert sum(isinstance(a, Rel) for a in atoms) == 4


def test_disjoin_empty_rejected():
    with pytest.raises(InputError):
        disjoin([])


# -- properties ------------------------------------------------------------------

atoms = st.sampled_from([P("x"), P("y"), Rel("E", ("x", "y")), Eq("x", "y")])
formulas = st.recursive(
    atoms,
    lambda sub: st.one_of(
        sub.map(Not),
        st.tuples(sub, sub).map(lambda t: And(*t)),
        st.tuples(sub, sub).map(lambda t: Or(*t)),
        st.tuples(st.sampled_from(["exists", "forall", "most"]), st.sampled_from(["x", "y"]), sub)
          .map(lambda t: Q(*t)),
        st.tuples(st.sampled_from(["x", "y"]), sub).map(lambda t: Quant("ham", (("x", "y"),), (t[1],))),
        st.tuples(sub, sub).map(lambda t: Quant("haertig", (("x",), ("y",)), t)),
    ),
    max_leaves=6,
)


@given(f=formulas)
def test_round_trip_property(f):
    g = parse(to_text(f), BIN, QS)
    assert g == f
    assert size(g) == size(f) and depth(g) == depth(f)


@given(f=formulas, seed=st.integers(0, 10_000))
def test_or_semantics_and_size_property(f, seed):
    import random
    rng = random.Random(seed)
    c = random_context(rng, BIN, 3, ("x", "y"))
    g = Or(f, P("x"))
    assert evaluate(c, g, QS) == (evaluate(c, f, QS) or evaluate(c, P("x"), QS))
    assert size(g) == size(f) + 4
    assert size(g, or_primitive=True) == size(f, or_primitive=True) + 1


@given(f=formulas)
def test_size_bounds_depth(f):
    assert depth(f) < size(f)


def test_marked_vocabulary():
    assert [n for n, _ in MARKS] == ["P1", "P2", "P3"]
