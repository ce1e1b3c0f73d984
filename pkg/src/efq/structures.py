"""Finite relational structures, variable assignments and contexts.

Domains are always ``{0, ..., n-1}``. Everything here is immutable and hashable
so the game solvers can memoize on it freely.
"""

from __future__ import annotations

import itertools
from types import MappingProxyType
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import InputError

VarTuple = tuple  # tuple[str, ...], nonempty, repetition allowed


@dataclass(frozen=True)
class Vocabulary:
    symbols: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        seen = set()
        for name, arity in self.symbols:
            if not isinstance(name, str) or not name:
                raise InputError(f"bad relation name {name!r}")
            if name in seen:
                raise InputError(f"duplicate relation name {name!r}")
            if not isinstance(arity, int) or arity < 1:
                raise InputError(f"relation {name!r} must have positive arity, got {arity!r}")
            seen.add(name)

    @classmethod
    def of(cls, entry: Mapping[str, int] | Iterable[tuple[str, int]]) -> Vocabulary:
        items = entry.items() if isinstance(entry, Mapping) else entry
        return cls(tuple((str(n), int(a)) for n, a in items))

    @cached_property
    def _arity(self) -> dict[str, int]:
        return dict(self.symbols)

    def arity(self, name: str) -> int:
        try:
            return self._arity[name]
        except KeyError:
            raise InputError(f"unknown relation {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._arity

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def names(self) -> list[str]:
        return [n for n, _ in self.symbols]

    def to_json(self) -> dict[str, int]:
        return dict(self.symbols)


@dataclass(frozen=True, eq=False)
class Structure:
    """A finite tau-structure. ``relations`` maps each symbol to a frozenset of tuples."""

    vocabulary: Vocabulary
    size: int
    relations: Mapping[str, frozenset]
    name: str = ""

    def __post_init__(self):
        if not isinstance(self.size, int) or self.size < 1:
            raise InputError(f"domain size must be a positive integer, got {self.size!r}")
        rels = {}
        for rname in self.relations:
            if rname not in self.vocabulary:
                raise InputError(f"structure {self.name!r}: unknown relation {rname!r}")
        for rname, arity in self.vocabulary:
            tuples = set()
            for t in self.relations.get(rname, ()):
                t = tuple(t)
                if len(t) != arity:
                    raise InputError(
                        f"structure {self.name!r}: tuple {t} has wrong arity for {rname}/{arity}")
                for e in t:
                    if not isinstance(e, int) or not 0 <= e < self.size:
                        raise InputError(
                            f"structure {self.name!r}: element {e!r} outside domain 0..{self.size - 1}")
                tuples.add(t)
            rels[rname] = frozenset(tuples)
        object.__setattr__(self, "relations", MappingProxyType(rels))

    @classmethod
    def build(cls, vocabulary: Vocabulary, size: int, name: str = "", **relations) -> Structure:
        """Convenience constructor; unary relations may be given as plain element lists."""
        rels = {}
        for rname, tuples in relations.items():
            rels[rname] = [t if isinstance(t, (tuple, list)) else (t,) for t in tuples]
        return cls(vocabulary, size, rels, name)

    def rel(self, name: str) -> frozenset:
        return self.relations[name]

    def holds(self, name: str, args: tuple[int, ...]) -> bool:
        return args in self.relations[name]

    @cached_property
    def key(self) -> bytes:
        body = tuple((n, tuple(sorted(self.relations[n]))) for n, _ in self.vocabulary)
        return repr((self.vocabulary.symbols, self.size, body)).encode()

    def __eq__(self, other):
        return isinstance(other, Structure) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        label = self.name or "Structure"
        rels = ", ".join(f"{n}={sorted(self.relations[n])}" for n, _ in self.vocabulary)
        return f"<{label} |{self.size}| {rels}>"

    def permuted(self, perm: Sequence[int]) -> Structure:
        rels = {n: {tuple(perm[e] for e in t) for t in ts} for n, ts in self.relations.items()}
        return Structure(self.vocabulary, self.size, rels, self.name)

    def to_json(self) -> dict:
        return {
            "domain": self.size,
            "relations": {n: [list(t) for t in sorted(self.relations[n])] for n, _ in self.vocabulary},
        }


@dataclass(frozen=True)
class Assignment:
    """A finite partial map from variable names to domain elements."""

    items: tuple[tuple[str, int], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[str, int] | None = None, **kw) -> Assignment:
        d = dict(mapping or {})
        d.update(kw)
        return cls(tuple(sorted(d.items())))

    def __getitem__(self, var: str) -> int:
        for k, v in self.items:
            if k == var:
                return v
        raise KeyError(var)

    def get(self, var, default=None):
        for k, v in self.items:
            if k == var:
                return v
        return default

    def __contains__(self, var) -> bool:
        return any(k == var for k, _ in self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __bool__(self) -> bool:
        return bool(self.items)

    def domain(self) -> frozenset[str]:
        return frozenset(k for k, _ in self.items)

    def as_dict(self) -> dict[str, int]:
        return dict(self.items)

    def __str__(self):
        return "{" + ", ".join(f"{k}↦{v}" for k, v in self.items) + "}"


def respects_repetitions(t: Sequence[int], x: Sequence[str]) -> bool:
    if len(t) != len(x):
        raise InputError(f"tuple {tuple(t)} and variable tuple {tuple(x)} differ in length")
    seen: dict[str, int] = {}
    for var, val in zip(x, t):
        if seen.setdefault(var, val) != val:
            return False
    return True


def extend_assignment(f: Assignment, x: Sequence[str], t: Sequence[int]) -> Assignment:
    if not respects_repetitions(t, x):
        raise InputError(f"tuple {tuple(t)} does not respect the repetitions of {tuple(x)}")
    d = f.as_dict()
    d.update(zip(x, t))
    return Assignment(tuple(sorted(d.items())))


@lru_cache(maxsize=None)
def _respecting(n: int, x: tuple[str, ...]) -> tuple[tuple[int, ...], ...]:
    distinct = list(dict.fromkeys(x))
    pos = [distinct.index(v) for v in x]
    return tuple(tuple(vals[i] for i in pos) for vals in itertools.product(range(n), repeat=len(distinct)))


def tuples_respecting(structure: Structure | int, x: Sequence[str]) -> tuple[tuple[int, ...], ...]:
    """All tuples over the domain that respect the repetitions of ``x``, in lexicographic order."""
    n = structure if isinstance(structure, int) else structure.size
    if not x:
        raise InputError("variable tuple must be nonempty")
    return _respecting(n, tuple(x))


@dataclass(frozen=True, eq=False)
class Context:
    """A structure together with an assignment over it."""

    structure: Structure
    assignment: Assignment = field(default_factory=Assignment)

    def __post_init__(self):
        if isinstance(self.assignment, Mapping):
            object.__setattr__(self, "assignment", Assignment.of(self.assignment))
        for var, val in self.assignment.items:
            if not isinstance(val, int) or not 0 <= val < self.structure.size:
                raise InputError(f"assignment {var}↦{val!r} outside domain of size {self.structure.size}")

    @property
    def size(self) -> int:
        return self.structure.size

    def extend(self, x: Sequence[str], t: Sequence[int]) -> Context:
        return Context(self.structure, extend_assignment(self.assignment, x, t))

    def restrict(self, keep: Iterable[str]) -> Context:
        keep = set(keep)
        return Context(self.structure, Assignment(tuple(kv for kv in self.assignment.items if kv[0] in keep)))

    @cached_property
    def key(self) -> bytes:
        return self.structure.key + b"|" + repr(self.assignment.items).encode()

    @cached_property
    def iso_key(self) -> bytes:
        """Key shared by exactly the contexts isomorphic to this one."""
        return _iso_key(self.structure, self.assignment)

    def __eq__(self, other):
        return isinstance(other, Context) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        label = self.structure.name or f"|{self.structure.size}|"
        return f"({label}, {self.assignment})"


POOL_NAMES = ("x", "y", "z", "u", "v", "w")


def fresh_variables(taken: Iterable[str], count: int) -> tuple[str, ...]:
    """The first ``count`` names of the canonical pool ``x, y, z, u, v, w, x1, x2, ...`` not in ``taken``."""
    taken = set(taken)
    out = [n for n in POOL_NAMES if n not in taken]
    k = 1
    while len(out) < count:
        name = f"x{k}"
        if name not in taken:
            out.append(name)
        k += 1
    return tuple(out[:count])


def canonical_key(c: Context) -> bytes:
    return c.key


@lru_cache(maxsize=200_000)
def _iso_key(structure: Structure, assignment: Assignment) -> bytes:
    n = structure.size
    names = [name for name, _ in structure.vocabulary]
    best = None
    for perm in itertools.permutations(range(n)):
        rels = tuple(tuple(sorted(tuple(perm[e] for e in t) for t in structure.relations[r])) for r in names)
        asg = tuple((k, perm[v]) for k, v in assignment.items)
        enc = (asg, rels)
        if best is None or enc < best:
            best = enc
    return repr((structure.vocabulary.symbols, n, best)).encode()


def atomic_profile(c: Context, variables: Sequence[str] | None = None) -> tuple[bool, ...]:
    """Truth values of all atoms over ``variables`` (default: the assignment's domain).

    Atom order: equalities ``u=v`` for u<v in the given order, then every relation
    applied to every argument tuple over the variables.
    """
    env = c.assignment.as_dict()
    vs = list(variables) if variables is not None else [k for k, _ in c.assignment.items]
    vals = [env[v] for v in vs]
    out = [vals[i] == vals[j] for i in range(len(vs)) for j in range(i + 1, len(vs))]
    for rname, arity in c.structure.vocabulary:
        rel = c.structure.relations[rname]
        for idx in itertools.product(range(len(vs)), repeat=arity):
            out.append(tuple(vals[i] for i in idx) in rel)
    return tuple(out)


def load_structures(obj: Mapping) -> tuple[Vocabulary, dict[str, Structure]]:
    """Read the ``{"vocabulary": ..., "structures": ...}`` JSON format."""
    if "vocabulary" not in obj:
        raise InputError("structure file needs a 'vocabulary' object")
    vocab = Vocabulary.of(obj["vocabulary"])
    out = {}
    for name, entry in (obj.get("structures") or {}).items():
        if "domain" not in entry:
            raise InputError(f"structure {name!r} needs a 'domain' size")
        rels = {r: [tuple(t) for t in ts] for r, ts in (entry.get("relations") or {}).items()}
        out[name] = Structure(vocab, entry["domain"], rels, name)
    return vocab, out


def dump_structures(vocab: Vocabulary, structures: Mapping[str, Structure]) -> dict:
    return {"vocabulary": vocab.to_json(), "structures": {n: s.to_json() for n, s in structures.items()}}
