"""Hand-built example structures and seeded random instance generators.

The generators produce small structures, contexts and class pairs for
cross-checking the game solvers against brute-force enumeration. Besides
uniformly random relations they produce perturbed copies (one tuple toggled,
or a relabelled copy), so that both separable and inseparable instances occur.
"""

from __future__ import annotations

import itertools
import random
from typing import Sequence

from .structures import Assignment, Context, Structure, Vocabulary

# -- hand-built examples --------------------------------------------------------------------

COLOURS = Vocabulary.of({"B": 1, "R": 1})
MARKS = Vocabulary.of({"P1": 1, "P2": 1, "P3": 1})


def colour_models() -> dict[str, Structure]:
    """Three 4-element models over unary B and R.

    ``A`` has three B-points; ``B1`` additionally colours the fourth point R;
    ``B2`` has one B-point, one R-point and two uncoloured points. Exactly three
    points satisfy B(x)|R(x) in A, four in B1 and two in B2.
    """
    return {
        "A": Structure.build(COLOURS, 4, "A", B={(0,), (1,), (2,)}, R=set()),
        "B1": Structure.build(COLOURS, 4, "B1", B={(0,), (1,), (2,)}, R={(3,)}),
        "B2": Structure.build(COLOURS, 4, "B2", B={(0,)}, R={(1,)}),
    }


def marked_models() -> dict[str, Structure]:
    """``A``: four elements, P_i = {i-1} for i = 1..3; ``B``: one element, nothing marked.

    Exactly three elements of A satisfy P1|P2|P3, while the model pair game is
    won by Player I at a budget smaller than the least separating formula size.
    """
    return {
        "A": Structure.build(MARKS, 4, "A", P1={(0,)}, P2={(1,)}, P3={(2,)}),
        "B": Structure.build(MARKS, 1, "B"),
    }


def parity_classes(domain: int = 5) -> tuple[list[Context], list[Context]]:
    """Models over one unary P on a fixed domain: |P| odd in {1, 3} versus |P| even in {2, 4}."""
    vocab = Vocabulary.of({"P": 1})
    left = [Context(Structure.build(vocab, domain, f"odd{k}", P={(i,) for i in range(k)})) for k in (1, 3)]
    right = [Context(Structure.build(vocab, domain, f"even{k}", P={(i,) for i in range(k)})) for k in (2, 4)]
    return left, right


# -- random generation --------------------------------------------------------------------------

VOCABULARIES = {
    "unary1": Vocabulary.of({"P": 1}),
    "unary2": Vocabulary.of({"P": 1, "Q": 1}),
    "binary": Vocabulary.of({"E": 2}),
    "mixed": Vocabulary.of({"P": 1, "E": 2}),
}


def random_structure(rng: random.Random, vocab: Vocabulary, size: int, density: float = 0.4, name: str = "") -> Structure:
    rels = {}
    for rname, arity in vocab:
        rels[rname] = {t for t in itertools.product(range(size), repeat=arity) if rng.random() < density}
    return Structure.build(vocab, size, name, **rels)


def perturbed(rng: random.Random, s: Structure, name: str = "") -> Structure:
    """Either a random relabelling of s (isomorphic) or s with one tuple toggled."""
    if rng.random() < 0.35:
        perm = list(range(s.size))
        rng.shuffle(perm)
        out = s.permuted(perm)
        return Structure(out.vocabulary, out.size, out.relations, name)
    rname, arity = rng.choice(list(s.vocabulary))
    t = tuple(rng.randrange(s.size) for _ in range(arity))
    rels = {r: set(s.relations[r]) for r, _ in s.vocabulary}
    rels[rname] ^= {t}
    return Structure.build(s.vocabulary, s.size, name, **rels)


def random_assignment(rng: random.Random, size: int, variables: Sequence[str]) -> Assignment:
    return Assignment.of({v: rng.randrange(size) for v in variables})


def random_context(rng: random.Random, vocab: Vocabulary, max_domain: int, variables: Sequence[str] = (),
                   min_domain: int = 1) -> Context:
    n = rng.randint(min_domain, max_domain)
    return Context(random_structure(rng, vocab, n, rng.choice((0.25, 0.5))), random_assignment(rng, n, variables))


def random_context_pair(rng: random.Random, vocab: Vocabulary, max_domain: int,
                        variables: Sequence[str] = ()) -> tuple[Context, Context]:
    """Two contexts over the same variables; about half the time the second is a perturbed copy."""
    a = random_context(rng, vocab, max_domain, variables)
    if rng.random() < 0.5:
        s = perturbed(rng, a.structure)
        b = Context(s, random_assignment(rng, s.size, variables) if rng.random() < 0.3 else a.assignment)
    else:
        b = random_context(rng, vocab, max_domain, variables)
    return a, b


def random_class_pair(rng: random.Random, vocab: Vocabulary, max_domain: int, max_class: int = 2,
                      variables: Sequence[str] = ()) -> tuple[list[Context], list[Context]]:
    """Two nonempty classes of at most ``max_class`` contexts each, with overlapping shapes."""
    left = [random_context(rng, vocab, max_domain, variables) for _ in range(rng.randint(1, max_class))]
    right = []
    for _ in range(rng.randint(1, max_class)):
        if rng.random() < 0.5:
            src = rng.choice(left)
            s = perturbed(rng, src.structure)
            right.append(Context(s, random_assignment(rng, s.size, variables)))
        else:
            right.append(random_context(rng, vocab, max_domain, variables))
    return left, right


__all__ = [
    "COLOURS", "MARKS", "colour_models", "marked_models", "parity_classes", "VOCABULARIES", "random_structure",
    "perturbed", "random_assignment", "random_context", "random_context_pair", "random_class_pair",
]
