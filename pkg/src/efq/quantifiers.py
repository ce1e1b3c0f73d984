"""Generalized quantifiers of arbitrary width and type.

A quantifier of width k and type (n_1, ..., n_k) is represented by its acceptance
predicate ``accepts(domain_size, (P_1, ..., P_k))`` where P_i is a set of
n_i-tuples. Quantifiers whose acceptance only looks at ``(|P_1|, ..., |P_k|)``
additionally carry a ``cardinality`` predicate; the solvers use it as a fast path.
"""

from __future__ import annotations

import ast
import itertools
import operator
import random
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from .errors import InputError, ParseError


@dataclass(frozen=True)
class QuantifierType:
    arities: tuple[int, ...]

    def __post_init__(self):
        if not self.arities or any((not isinstance(a, int)) or a < 1 for a in self.arities):
            raise InputError(f"quantifier type must be a nonempty list of positive integers, got {self.arities!r}")

    @property
    def width(self) -> int:
        return len(self.arities)


@dataclass(frozen=True, eq=False)
class Quantifier:
    name: str
    qtype: QuantifierType
    test: Callable[[int, tuple], bool] = field(repr=False)
    cardinality: Callable[[int, tuple[int, ...]], bool] | None = field(default=None, repr=False)

    @property
    def width(self) -> int:
        return self.qtype.width

    @property
    def arities(self) -> tuple[int, ...]:
        return self.qtype.arities

    def __str__(self):
        return self.name


def q_accepts(q: Quantifier, domain_size: int, sets: Sequence[Iterable]) -> bool:
    """Check ``(domain, P_1, ..., P_k) in q`` after validating the input shape.

    Unary components may be given as plain element sets.
    """
    if len(sets) != q.width:
        raise InputError(f"quantifier {q.name} has width {q.width}, got {len(sets)} sets")
    norm = []
    for arity, s in zip(q.arities, sets):
        comp = set()
        for t in s:
            if isinstance(t, int):
                t = (t,)
            t = tuple(t)
            if len(t) != arity or any(not 0 <= e < domain_size for e in t):
                raise InputError(f"{q.name}: tuple {t} is not an {arity}-tuple over a domain of size {domain_size}")
            comp.add(t)
        norm.append(frozenset(comp))
    return bool(q.test(domain_size, tuple(norm)))


def _monadic(name: str, pred: Callable[[int, int], bool]) -> Quantifier:
    card = lambda n, sizes: pred(n, sizes[0])
    return Quantifier(name, QuantifierType((1,)), lambda n, sets: pred(n, len(sets[0])), card)


@lru_cache(maxsize=1 << 16)
def has_hamiltonian_path(n: int, edges: frozenset) -> bool:
    """Directed path visiting every vertex of ``{0..n-1}`` exactly once."""
    if n == 1:
        return True
    succ = [0] * n
    for a, b in edges:
        if a != b:
            succ[a] |= 1 << b
    full = (1 << n) - 1
    # reach[mask] = bitset of end vertices of paths covering exactly mask
    reach = [0] * (1 << n)
    for v in range(n):
        reach[1 << v] = 1 << v
    for mask in range(1, full + 1):
        ends = reach[mask]
        if not ends:
            continue
        v = 0
        while ends:
            if ends & 1:
                nxt = succ[v] & ~mask
                while nxt:
                    low = nxt & -nxt
                    reach[mask | low] |= low
                    nxt ^= low
            ends >>= 1
            v += 1
    return reach[full] != 0


def _ham() -> Quantifier:
    return Quantifier("ham", QuantifierType((2,)), lambda n, sets: has_hamiltonian_path(n, frozenset(sets[0])))


def _haertig() -> Quantifier:
    return Quantifier("haertig", QuantifierType((1, 1)),
                      lambda n, sets: len(sets[0]) == len(sets[1]),
                      lambda n, sizes: sizes[0] == sizes[1])


_COUNTING = {
    "exactly": operator.eq,
    "atleast": operator.ge,
    "atmost": operator.le,
}


def builtin(text: str) -> Quantifier:
    """Look up a built-in quantifier by name, e.g. ``exists`` or ``exactly=3``."""
    text = text.strip()
    if text == "exists":
        return _monadic("exists", lambda n, s: s >= 1)
    if text == "forall":
        return _monadic("forall", lambda n, s: s == n)
    if text == "most":
        return _monadic("most", lambda n, s: 2 * s > n)
    if text == "haertig":
        return _haertig()
    if text == "ham":
        return _ham()
    m = re.fullmatch(r"(exactly|atleast|atmost)=(\d+)", text)
    if m:
        op, k = _COUNTING[m.group(1)], int(m.group(2))
        return _monadic(text, lambda n, s: op(s, k))
    raise ParseError(f"unknown quantifier {text!r}")


BUILTIN_NAMES = ("exists", "forall", "exactly=N", "atleast=N", "atmost=N", "most", "haertig", "ham")


# -- cardinality predicate DSL ------------------------------------------------

_BINOPS = {
    ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
    ast.FloorDiv: operator.floordiv, ast.Mod: operator.mod,
}
_CMPOPS = {
    ast.Eq: operator.eq, ast.NotEq: operator.ne, ast.Lt: operator.lt,
    ast.LtE: operator.le, ast.Gt: operator.gt, ast.GtE: operator.ge,
}


def compile_cardinality_predicate(text: str) -> Callable[[int, int], bool]:
    """Compile an expression over ``size`` and ``domain`` (e.g. ``size % 2 == 1``).

    Only integer literals, ``+ - * // %``, comparisons, ``and``/``or``/``not`` and
    parentheses are accepted.
    """
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as e:
        raise ParseError(f"bad cardinality predicate: {e.msg}", (e.offset or 1) - 1, text) from None

    def check(node):
        if isinstance(node, ast.Expression):
            return check(node.body)
        if isinstance(node, ast.Constant) and type(node.value) is int:
            return
        if isinstance(node, ast.Name) and node.id in ("size", "domain"):
            return
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            check(node.left)
            check(node.right)
            return
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.Not)):
            check(node.operand)
            return
        if isinstance(node, ast.BoolOp):
            for v in node.values:
                check(v)
            return
        if isinstance(node, ast.Compare) and all(type(op) in _CMPOPS for op in node.ops):
            check(node.left)
            for c in node.comparators:
                check(c)
            return
        raise ParseError(f"unsupported construct in cardinality predicate: {ast.dump(node)[:40]}",
                         getattr(node, "col_offset", None), text)

    check(tree)

    def ev(node, env):
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.Name):
            return env[node.id]
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](ev(node.left, env), ev(node.right, env))
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand, env)
            return -v if isinstance(node.op, ast.USub) else not v
        if isinstance(node, ast.BoolOp):
            if isinstance(node.op, ast.And):
                return all(ev(v, env) for v in node.values)
            return any(ev(v, env) for v in node.values)
        left = ev(node.left, env)
        for op, comp in zip(node.ops, node.comparators):
            right = ev(comp, env)
            if not _CMPOPS[type(op)](left, right):
                return False
            left = right
        return True

    body = tree.body

    def pred(n: int, s: int) -> bool:
        try:
            return bool(ev(body, {"size": s, "domain": n}))
        except ZeroDivisionError:
            return False

    return pred


def custom_monadic(name: str, predicate: str) -> Quantifier:
    return _monadic(name, compile_cardinality_predicate(predicate))


def custom_quantifier(name: str, arities: Sequence[int], test: Callable[[int, tuple], bool]) -> Quantifier:
    """Wrap an arbitrary acceptance predicate. Isomorphism closure is the caller's obligation."""
    return Quantifier(name, QuantifierType(tuple(arities)), test)


@dataclass(frozen=True)
class QuantifierSet:
    quantifiers: tuple[Quantifier, ...]

    def __post_init__(self):
        names = [q.name for q in self.quantifiers]
        if len(set(names)) != len(names):
            raise InputError(f"duplicate quantifier names in {names}")

    @classmethod
    def of(cls, *items: str | Quantifier) -> QuantifierSet:
        if len(items) == 1 and not isinstance(items[0], (str, Quantifier)):
            items = tuple(items[0])
        return cls(tuple(builtin(q) if isinstance(q, str) else q for q in items))

    @classmethod
    def from_config(cls, obj: Mapping | Sequence) -> QuantifierSet:
        """Read ``{"quantifiers": [...]}``; entries are built-in quantifier names or custom monadic objects."""
        entries = obj.get("quantifiers", []) if isinstance(obj, Mapping) else obj
        qs = []
        for e in entries:
            if isinstance(e, str):
                qs.append(builtin(e))
                continue
            if not isinstance(e, Mapping) or "name" not in e or "cardinality_predicate" not in e:
                raise InputError(f"bad quantifier entry {e!r}")
            width = e.get("width", 1)
            arities = list(e.get("type", [1]))
            if width != 1 or arities != [1]:
                raise InputError(f"custom quantifier {e['name']!r}: only width 1, type [1] is supported")
            q = custom_monadic(e["name"], e["cardinality_predicate"])
            object.__setattr__(q, "source", e["cardinality_predicate"])
            qs.append(q)
        return cls(tuple(qs))

    def to_config(self) -> dict:
        out = []
        for q in self.quantifiers:
            src = getattr(q, "source", None)
            if src is not None:
                out.append({"name": q.name, "width": 1, "type": [1], "cardinality_predicate": src})
            else:
                out.append(q.name)
        return {"quantifiers": out}

    def __iter__(self):
        return iter(self.quantifiers)

    def __len__(self):
        return len(self.quantifiers)

    def __contains__(self, name) -> bool:
        return any(q.name == name for q in self.quantifiers)

    def get(self, name: str) -> Quantifier:
        for q in self.quantifiers:
            if q.name == name:
                return q
        raise InputError(f"quantifier {name!r} is not in the quantifier set {self.names()}")

    def names(self) -> list[str]:
        return [q.name for q in self.quantifiers]


# -- isomorphism invariance ---------------------------------------------------

@dataclass
class IsoReport:
    quantifier: str
    max_domain: int
    checked: int = 0
    exhaustive: bool = True
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _permute_sets(sets, perm):
    return tuple(frozenset(tuple(perm[e] for e in t) for t in s) for s in sets)


def check_iso_invariance(q: Quantifier, max_domain: int, *, exhaustive_bits: int = 18,
                         samples: int = 4000, seed: int = 0, max_violations: int = 10) -> IsoReport:
    """Check ``accepts(n, P) == accepts(n, pi(P))`` for all domain sizes up to ``max_domain``.

    Adjacent transpositions generate the symmetric group, so testing them on every
    input is an exhaustive check. When the number of inputs exceeds
    ``2**exhaustive_bits`` a seeded random sample of inputs and full permutations is
    used instead, and the report says so.
    """
    report = IsoReport(q.name, max_domain)
    rng = random.Random(seed)
    for n in range(1, max_domain + 1):
        universes = [list(itertools.product(range(n), repeat=a)) for a in q.arities]
        bits = sum(len(u) for u in universes)
        if bits <= exhaustive_bits:
            inputs = itertools.product(*[range(1 << len(u)) for u in universes])
            perms = [tuple(list(range(i)) + [i + 1, i] + list(range(i + 2, n))) for i in range(n - 1)]
        else:
            report.exhaustive = False
            inputs = (tuple(rng.getrandbits(len(u)) for u in universes) for _ in range(samples))
            perms = None
        for masks in inputs:
            sets = tuple(frozenset(t for i, t in enumerate(u) if m >> i & 1) for u, m in zip(universes, masks))
            base = bool(q.test(n, sets))
            ps = perms if perms is not None else [tuple(rng.sample(range(n), n))]
            for perm in ps:
                report.checked += 1
                if bool(q.test(n, _permute_sets(sets, perm))) != base:
                    report.violations.append((n, sets, perm))
                    if len(report.violations) >= max_violations:
                        return report
    return report
