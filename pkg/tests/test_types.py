import random

import pytest

from efq.caps import DEFAULT_CAPS
from efq.corpus import VOCABULARIES, colour_models, random_context, random_context_pair
from efq.errors import CapExceeded, InputError
from efq.formulas import depth, evaluate, extension, free_vars, size
from efq.oracle import depth_separable_by_enumeration, separable_at_depth
from efq.quantifiers import QuantifierSet
from efq.structures import Context, tuples_respecting
from efq.types_engine import (closed_set_formula, d_equivalent, joint_partition, stabilization_depth,
                              type_formula)

EX = QuantifierSet.of("exists")


def members(p, cell):
    return {(i, t) for i, t in p.cells[cell]}


def defined_set(p, f, qset):
    out = set()
    for i, c in enumerate(p.contexts):
        for t in extension(c, f, p.var_tuple, qset):
            out.add((i, t))
    return out


def check_partition(p, qset):
    for k in range(len(p.cells)):
        f = type_formula(p, k)
        assert depth(f) <= p.depth
        assert free_vars(f) <= set(p.var_tuple)
        assert defined_set(p, f, qset) == members(p, k)


def test_colour_types(colours, exactly3):
    A = colours["A"]
    p = joint_partition([A], ("x",), 1, exactly3)
    cells = sorted(sorted(t[0] for _, t in c) for c in p.cells)
    assert cells == [[0, 1, 2], [3]]
    check_partition(p, exactly3)


def test_partition_covers_universe(colours, exactly3):
    ctxs = list(colours.values())
    p = joint_partition(ctxs, ("x", "y"), 1, exactly3)
    universe = {(i, t) for i, c in enumerate(ctxs) for t in tuples_respecting(c.size, ("x", "y"))}
    union = set().union(*map(set, p.cells))
    assert union == universe and sum(len(c) for c in p.cells) == len(universe)


def test_refinement_with_depth(colours, exactly3):
    ctxs = list(colours.values())
    prev = None
    for d in range(3):
        p = joint_partition(ctxs, ("x",), d, exactly3)
        if prev is not None:
            for c in p.cells:
                assert any(c <= old for old in prev.cells)
        prev = p


def test_union_formulas(colours, exactly3):
    ctxs = list(colours.values())
    p = joint_partition(ctxs, ("x",), 1, exactly3)
    for mask in range(1, 1 << len(p.cells)):
        cells = [k for k in range(len(p.cells)) if mask >> k & 1]
        f = closed_set_formula(p, cells)
        assert defined_set(p, f, exactly3) == set().union(*(members(p, k) for k in cells))


def test_d_equivalence(colours, exactly3):
    assert d_equivalent(colours["A"], colours["A"], 2, exactly3)
    assert d_equivalent(colours["A"], colours["B1"], 0, exactly3)
    assert not d_equivalent(colours["A"], colours["B1"], 1, exactly3)


def test_stabilization(colours, exactly3):
    assert stabilization_depth([colours["A"]], ("x",), exactly3, max_depth=3) == 0
    pair = [colours["A"], colours["B1"]]
    d = stabilization_depth(pair, ("x",), exactly3, max_depth=3)
    assert d == 1
    sizes = [len(joint_partition(pair, ("x",), k, exactly3).cells) for k in range(4)]
    assert sizes[0] < sizes[1] == sizes[2] == sizes[3]


def test_errors(colours, exactly3):
    with pytest.raises(InputError):
        joint_partition([colours["A"]], ("x",), -1, exactly3)
    with pytest.raises(CapExceeded):
        joint_partition([colours["A"]], ("x",), 9, exactly3)
    p = joint_partition([colours["A"]], ("x",), 1, exactly3)
    with pytest.raises(InputError):
        type_formula(p, 99)


@pytest.mark.parametrize("seed", range(12))
def test_random_partitions_are_defined_by_their_formulas(seed):
    rng = random.Random(seed)
    vocab = VOCABULARIES[rng.choice(list(VOCABULARIES))]
    qs = rng.choice([EX, QuantifierSet.of("exactly=2"), QuantifierSet.of("most", "forall"), QuantifierSet.of("haertig")])
    ctxs = [random_context(rng, vocab, 3) for _ in range(rng.randint(1, 3))]
    for d in (0, 1, 2):
        check_partition(joint_partition(ctxs, ("x",), d, qs), qs)


def test_ham_types_on_small_graphs():
    rng = random.Random(3)
    qs = QuantifierSet.of("ham", "exists")
    ctxs = [random_context(rng, VOCABULARIES["binary"], 3) for _ in range(3)]
    caps = DEFAULT_CAPS.updated(max_cells=64)
    for d in (0, 1):
        check_partition(joint_partition(ctxs, ("x",), d, qs, caps), qs)
    with pytest.raises(CapExceeded):
        joint_partition(ctxs, ("x",), 1, qs, DEFAULT_CAPS.updated(max_cells=4))


def test_cell_lookup(colours, exactly3):
    p = joint_partition([colours["A"]], ("x",), 1, exactly3)
    assert p.cell_of(0, (0,)) == p.cell_of(0, (1,)) != p.cell_of(0, (3,))
    assert evaluate(Context(colour_models()["A"], {"x": 3}), p.formula(p.cell_of(0, (3,))), exactly3)


@pytest.mark.parametrize("seed", range(10))
def test_depth_separability_matches_enumeration(seed):
    # the enumeration is bounded by size, so a type-based witness larger than the bound is not re-found
    rng = random.Random(100 + seed)
    vocab = VOCABULARIES[rng.choice(["unary1", "unary2", "mixed"])]
    qs = rng.choice([EX, QuantifierSet.of("exactly=2"), QuantifierSet.of("most", "forall")])
    for _ in range(6):
        a, b = random_context_pair(rng, vocab, 3, rng.choice([(), ("x",)]))
        for d in (0, 1, 2):
            f = separable_at_depth(a, b, d, qs)
            g = depth_separable_by_enumeration(a, b, d, 5, qs)
            assert d_equivalent(a, b, d, qs) == (f is None)
            if g is not None:
                assert f is not None and depth(g) <= d
            if f is not None and size(f) <= 5:
                assert g is not None
