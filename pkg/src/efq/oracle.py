"""Brute-force ground truth: semantic enumeration of formulas by size.

The enumerator works on an extension-closed family: every base context is paired
with every assignment of a pool of fresh variables, and each formula is
represented by its truth table over those rows. Negation, conjunction and
quantifier application are table-to-table operators, so formulas with equal
tables (and no worse free variables, size or depth) are interchangeable and
only one representative is kept.

Bound variables always come from the fresh pool: by renaming, any formula of
size at most ``s_max`` is equivalent to one whose bound variables are drawn from
a pool of ``(s_max - 1) * w`` names, ``w`` the largest number of bound positions
of a quantifier.

``naive_table_count`` is a deliberately simple second implementation (plain
Python, one row at a time) used to cross-check the enumerator.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .caps import DEFAULT_CAPS, Caps
from .errors import CapExceeded, InputError
from .formulas import (And, Eq, Formula, Not, Quant, Rel, atoms_over, conjoin, depth as f_depth,
                       disjoin, evaluate, size as f_size)
from .quantifiers import Quantifier, QuantifierSet
from .structures import Context, fresh_variables

pool_names = fresh_variables


def sufficient_pool(s_max: int, qset: QuantifierSet) -> int:
    """Number of fresh names that suffices, up to renaming, for every formula of size <= s_max."""
    if s_max <= 1 or len(qset) == 0:
        return 0
    w = max(sum(q.arities) for q in qset)
    return (s_max - 1) * w


def _as_family(side) -> list[Context]:
    if isinstance(side, Context):
        return [side]
    return list(side)


# -- universe ----------------------------------------------------------------------------

class Universe:
    """Rows ``(context index, values of the fresh pool)``, block by block in C order."""

    def __init__(self, family: Sequence[Context], pool: int, caps: Caps = DEFAULT_CAPS):
        self.family = list(family)
        if not self.family:
            raise InputError("the oracle needs at least one context")
        vocab = self.family[0].structure.vocabulary
        dom = self.family[0].assignment.domain()
        for c in self.family:
            if c.structure.vocabulary != vocab:
                raise InputError("all contexts must share one vocabulary")
            if c.assignment.domain() != dom:
                raise InputError("all contexts must bind the same variables")
            caps.check("max_domain", c.size)
        self.vocab = vocab
        self.bound_vars = tuple(sorted(dom))
        self.fresh = pool_names(dom, pool)
        self.p = pool
        self.offsets = []
        total = 0
        for c in self.family:
            self.offsets.append(total)
            total += c.size ** pool
        caps.check("max_universe", total, f"{len(self.family)} contexts x pool of {pool} fresh variables")
        self.rows = total
        self.values = {v: np.zeros(total, dtype=np.int64) for v in self.bound_vars + self.fresh}
        self.base_rows = np.array(self.offsets, dtype=np.int64)
        for i, c in enumerate(self.family):
            n, off = c.size, self.offsets[i]
            L = n ** pool
            grid = np.indices((n,) * pool).reshape(pool, L) if pool else np.zeros((0, 1), dtype=np.int64)
            for k, v in enumerate(self.fresh):
                self.values[v][off:off + L] = grid[k]
            for v, a in c.assignment.items:
                self.values[v][off:off + L] = a

    def block(self, i: int) -> tuple[int, int, int]:
        n = self.family[i].size
        return self.offsets[i], n ** self.p, n

    def atom_table(self, a: Formula) -> np.ndarray:
        if isinstance(a, Eq):
            return self.values[a.left] == self.values[a.right]
        out = np.zeros(self.rows, dtype=bool)
        for i, c in enumerate(self.family):
            off, L, _ = self.block(i)
            rel = c.structure.relations[a.name]
            cols = [self.values[v][off:off + L] for v in a.args]
            out[off:off + L] = [tuple(int(col[r]) for col in cols) in rel for r in range(L)]
        return out


# -- quantifier application ---------------------------------------------------------------

class _Applier:
    """Vectorized ``Q ybar_1..ybar_k (phi_1..phi_k)`` on stacks of truth tables."""

    def __init__(self, u: Universe):
        self.u = u
        self._luts: dict = {}
        self._tests: dict = {}

    def _lut(self, q: Quantifier, n: int, maxima: tuple[int, ...]) -> np.ndarray:
        key = (q.name, id(q), n, maxima)
        lut = self._luts.get(key)
        if lut is None:
            lut = np.zeros(tuple(m + 1 for m in maxima), dtype=bool)
            for idx in itertools.product(*(range(m + 1) for m in maxima)):
                lut[idx] = bool(q.cardinality(n, idx))
            self._luts[key] = lut
        return lut

    def _test(self, q: Quantifier, n: int, sets: tuple) -> bool:
        key = (id(q), n, sets)
        v = self._tests.get(key)
        if v is None:
            v = self._tests[key] = bool(q.test(n, sets))
        return v

    def apply(self, q: Quantifier, bound: tuple[tuple[str, ...], ...], tables: Sequence[np.ndarray]) -> np.ndarray:
        u = self.u
        B = tables[0].shape[0]
        out = np.empty((B, u.rows), dtype=bool)
        axes_per = []
        for y in bound:
            distinct = list(dict.fromkeys(y))
            axes_per.append((y, distinct, [1 + u.fresh.index(v) for v in distinct]))
        self._axis_order = {tuple(y): sorted(dict.fromkeys(y), key=u.fresh.index) for y in bound}
        for i in range(len(u.family)):
            off, L, n = u.block(i)
            shape = (B,) + (n,) * u.p
            subs = [t[:, off:off + L].reshape(shape) for t in tables]
            if q.cardinality is not None:
                counts = []
                maxima = []
                for sub, (_, distinct, axes) in zip(subs, axes_per):
                    c = sub.sum(axis=tuple(axes), keepdims=True, dtype=np.int64)
                    counts.append(np.broadcast_to(c, shape))
                    maxima.append(n ** len(distinct))
                lut = self._lut(q, n, tuple(maxima))
                res = lut[tuple(counts)]
            else:
                res = self._generic(q, n, subs, axes_per, shape)
            out[:, off:off + L] = res.reshape(B, L)
        return out

    def _generic(self, q, n, subs, axes_per, shape):
        res = np.empty(shape, dtype=bool)
        p = self.u.p
        for b in range(shape[0]):
            for a in itertools.product(range(n), repeat=p):
                sets = []
                for sub, (y, distinct, axes) in zip(subs, axes_per):
                    by_axis = self._axis_order[tuple(y)]
                    idx = [b] + list(a)
                    for ax in axes:
                        idx[ax] = slice(None)
                    sel = sub[tuple(idx)]
                    members = []
                    for vals in zip(*np.nonzero(sel)):
                        env = dict(zip(by_axis, (int(v) for v in vals)))
                        members.append(tuple(env[v] for v in y))
                    sets.append(frozenset(members))
                res[(b,) + a] = self._test(q, n, tuple(sets))
        return res


# -- enumeration ---------------------------------------------------------------------------

@dataclass
class Entry:
    size: int
    depth: int
    mask: int
    recipe: tuple


@dataclass
class Enumeration:
    """Result of ``enumerate_by_size``: representatives per truth table."""

    universe: Universe
    s_max: int
    entries: list[Entry]
    tables: list[np.ndarray]
    by_table: dict = field(repr=False)
    qset: QuantifierSet = field(repr=False, default=None)

    def formula(self, eid: int) -> Formula:
        return _build(self, eid)

    def __len__(self) -> int:
        return len(self.by_table)

    def items(self) -> Iterator[tuple[bytes, Formula]]:
        """(packed truth table, smallest representative formula) per distinct table."""
        for key, ids in self.by_table.items():
            best = min(ids, key=lambda e: (self.entries[e].size, self.entries[e].mask))
            yield key, self.formula(best)

    def sentences(self) -> Iterator[int]:
        """Ids of entries with no free fresh variables, in order of increasing size."""
        for eid, e in enumerate(self.entries):
            if e.mask == 0:
                yield eid

    def table(self, eid: int) -> np.ndarray:
        return self.tables[eid]


def _build(en: Enumeration, eid: int) -> Formula:
    cache: dict[int, Formula] = {}

    def go(k: int) -> Formula:
        if k in cache:
            return cache[k]
        r = en.entries[k].recipe
        if r[0] == "atom":
            f = r[1]
        elif r[0] == "not":
            f = Not(go(r[1]))
        elif r[0] == "and":
            f = And(go(r[1]), go(r[2]))
        else:
            _, qname, bound, subs = r
            f = Quant(qname, bound, tuple(go(s) for s in subs))
        cache[k] = f
        return f

    return go(eid)


class SizeEnumerator:
    """Incremental bottom-up enumeration; ``advance()`` completes one more size level."""

    def __init__(self, family: Sequence[Context], s_max: int, qset: QuantifierSet, caps: Caps = DEFAULT_CAPS,
                 max_depth: int | None = None, pool: int | None = None):
        caps.check("max_budget", s_max, "formula size bound")
        self.qset = qset
        self.s_max = s_max
        self.max_depth = max_depth
        self.pool = sufficient_pool(s_max, qset) if pool is None else pool
        self.u = Universe(family, self.pool, caps)
        self.applier = _Applier(self.u)
        self.entries: list[Entry] = []
        self.tables: list[np.ndarray] = []
        self.by_table: dict[bytes, list[int]] = {}
        self.by_size: dict[int, list[int]] = {}
        self.level = 0
        self._bit = {v: 1 << k for k, v in enumerate(self.u.fresh)}

    def result(self) -> Enumeration:
        return Enumeration(self.u, self.level, self.entries, self.tables, self.by_table, self.qset)

    def _mask(self, variables: Iterable[str]) -> int:
        m = 0
        for v in variables:
            m |= self._bit.get(v, 0)
        return m

    def _offer(self, table: np.ndarray, size: int, depth: int, mask: int, recipe: tuple) -> None:
        key = np.packbits(table).tobytes()
        ids = self.by_table.get(key)
        if ids is not None:
            for e in ids:
                o = self.entries[e]
                if o.mask & mask == o.mask and o.depth <= depth:
                    return
        else:
            ids = self.by_table[key] = []
        eid = len(self.entries)
        self.entries.append(Entry(size, depth, mask, recipe))
        self.tables.append(table)
        ids.append(eid)
        self.by_size.setdefault(size, []).append(eid)

    def _stack(self, ids: list[int]) -> np.ndarray:
        if not ids:
            return np.zeros((0, self.u.rows), dtype=bool)
        return np.stack([self.tables[e] for e in ids])

    def advance(self) -> list[int]:
        """Generate all representatives of the next size; returns their ids."""
        s = self.level + 1
        if s > self.s_max:
            raise InputError("enumeration bound reached")
        self.level = s
        start = len(self.entries)
        if s == 1:
            for a in atoms_over(self.u.vocab, self.u.bound_vars + self.u.fresh):
                vs = (a.left, a.right) if isinstance(a, Eq) else a.args
                self._offer(self.u.atom_table(a), 1, 0, self._mask(vs), ("atom", a))
            self.by_size.setdefault(1, [])
            return list(range(start, len(self.entries)))
        # negation
        prev = list(self.by_size.get(s - 1, []))
        for e in prev:
            o = self.entries[e]
            self._offer(~self.tables[e], s, o.depth, o.mask, ("not", e))
        # conjunction
        for a in range(1, s // 2 + 1):
            b = s - a
            left = list(self.by_size.get(a, []))
            right = list(self.by_size.get(b, []))
            if not left or not right:
                continue
            R = self._stack(right)
            rmask = [self.entries[e].mask for e in right]
            rdep = [self.entries[e].depth for e in right]
            for li, e in enumerate(left):
                o = self.entries[e]
                conj = self.tables[e][None, :] & R
                for ri, f in enumerate(right):
                    if a == b and ri <= li:
                        continue
                    self._offer(conj[ri], s, max(o.depth, rdep[ri]), o.mask | rmask[ri], ("and", e, f))
        # quantifiers
        for q in self.qset:
            self._quantify(q, s)
        self.by_size.setdefault(s, [])
        return list(range(start, len(self.entries)))

    def _quantify(self, q: Quantifier, s: int) -> None:
        k = q.width
        if s - 1 < k:
            return
        depth_ok = (lambda d: True) if self.max_depth is None else (lambda d: d + 1 <= self.max_depth)
        tuples_per = [list(itertools.product(self.u.fresh, repeat=a)) for a in q.arities]
        if any(not t for t in tuples_per):
            return
        for split in _compositions(s - 1, k):
            pools = []
            for part in split:
                ids = [e for e in self.by_size.get(part, []) if depth_ok(self.entries[e].depth)]
                pools.append(ids)
            if any(not p for p in pools):
                continue
            for combo_bound in itertools.product(*tuples_per):
                bmasks = [self._mask(y) for y in combo_bound]
                if k == 1:
                    ids_list = [(e,) for e in pools[0]]
                else:
                    ids_list = list(itertools.product(*pools))
                for chunk_start in range(0, len(ids_list), 4096):
                    chunk = ids_list[chunk_start:chunk_start + 4096]
                    stacks = [self._stack([c[j] for c in chunk]) for j in range(k)]
                    res = self.applier.apply(q, combo_bound, stacks)
                    for r, ids in enumerate(chunk):
                        mask = 0
                        dep = 0
                        for j, e in enumerate(ids):
                            o = self.entries[e]
                            mask |= o.mask & ~bmasks[j]
                            dep = max(dep, o.depth)
                        self._offer(res[r], s, dep + 1, mask, ("q", q.name, combo_bound, ids))

    def run(self) -> Enumeration:
        while self.level < self.s_max:
            self.advance()
        return self.result()


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_by_size(family: Sequence[Context], s_max: int, qset: QuantifierSet, caps: Caps = DEFAULT_CAPS,
                      max_depth: int | None = None, pool: int | None = None) -> Enumeration:
    return SizeEnumerator(family, s_max, qset, caps, max_depth, pool).run()


# -- separation queries --------------------------------------------------------------------

@dataclass(frozen=True)
class Separation:
    size: int
    formula: Formula

    def __iter__(self):
        return iter((self.size, self.formula))


def min_separating_size(left, right, s_max: int, qset: QuantifierSet, caps: Caps = DEFAULT_CAPS,
                        max_depth: int | None = None, pool: int | None = None,
                        or_primitive: bool = False) -> Separation | None:
    """Least size of a formula true on every left context and false on every right one.

    ``left``/``right`` are contexts or collections of contexts. The witness has no free
    variables beyond those bound by the contexts' assignments. With ``or_primitive``
    the size measure counts the disjunction pattern like a conjunction; the search
    still runs over the official grammar, so the result is then an upper bound
    computed from the official-size minimum plus a re-measure.
    """
    L, R = _as_family(left), _as_family(right)
    if not L or not R:
        raise InputError("use weak_vs_strong_report or the class game for empty classes")
    en = SizeEnumerator(L + R, s_max, qset, caps, max_depth, pool)
    target = np.array([True] * len(L) + [False] * len(R))
    base = en.u.base_rows
    while en.level < s_max:
        new = en.advance()
        for eid in new:
            if en.entries[eid].mask:
                continue
            if np.array_equal(en.tables[eid][base], target):
                f = en.result().formula(eid)
                return Separation(f_size(f, or_primitive), f)
    return None


def separates(f: Formula, left, right, qset: QuantifierSet) -> bool:
    return (all(evaluate(c, f, qset) for c in _as_family(left))
            and not any(evaluate(c, f, qset) for c in _as_family(right)))


def separable_at_depth(left: Context, right: Context, d: int, qset: QuantifierSet,
                       caps: Caps = DEFAULT_CAPS) -> Formula | None:
    """A formula of depth <= d true on ``left`` and false on ``right``, or None."""
    from .types_engine import joint_partition, type_formula

    if left.assignment.domain() != right.assignment.domain():
        raise InputError("contexts must bind the same variables")
    p = joint_partition([left, right], (), d, qset, caps)
    a, b = p.cell_of(0), p.cell_of(1)
    if a == b:
        return None
    return type_formula(p, a)


@dataclass
class WeakStrongReport:
    weakly_separable: bool | None
    pair_minima: dict
    psi: Formula | None
    psi_size: int | None
    psi_verified: bool
    true_minimum: int | None
    minimum_status: str
    witness: Formula | None = None

    def to_json(self) -> dict:
        from .formulas import to_text

        return {
            "weakly_separable": self.weakly_separable,
            "pair_minima": {f"{a},{b}": v for (a, b), v in self.pair_minima.items()},
            "psi": None if self.psi is None else to_text(self.psi),
            "psi_size": self.psi_size,
            "psi_verified": self.psi_verified,
            "true_minimum": self.true_minimum,
            "minimum_status": self.minimum_status,
            "witness": None if self.witness is None else to_text(self.witness),
        }


def weak_vs_strong_report(A: Sequence[Context], B: Sequence[Context], s_max: int, qset: QuantifierSet,
                          caps: Caps = DEFAULT_CAPS) -> WeakStrongReport:
    """Per-pair minima, the disjunction-of-conjunctions separator, and the true class minimum."""
    A, B = list(A), list(B)
    if not A or not B:
        return WeakStrongReport(True, {}, None, None, True, None, "vacuous: an empty class is separated by any formula")
    minima: dict = {}
    witnesses: dict = {}
    for i, a in enumerate(A):
        for j, b in enumerate(B):
            r = min_separating_size(a, b, s_max, qset, caps)
            minima[(i, j)] = None if r is None else r.size
            if r is not None:
                witnesses[(i, j)] = r.formula
    if len(witnesses) < len(A) * len(B):
        return WeakStrongReport(False, minima, None, None, False, None,
                                f"some pair has no separator of size <= {s_max}")
    psi = disjoin([conjoin([witnesses[(i, j)] for j in range(len(B))]) for i in range(len(A))])
    verified = separates(psi, A, B, qset)
    psi_size = f_size(psi)
    bound = min(psi_size, caps.max_budget)
    try:
        r = min_separating_size(A, B, bound, qset, caps)
    except CapExceeded as e:
        return WeakStrongReport(True, minima, psi, psi_size, verified, None, f"unknown ({e})")
    if r is None:
        status = "unknown: no separator within the budget cap" if bound < psi_size else "none found (contradiction)"
        return WeakStrongReport(True, minima, psi, psi_size, verified, None, status)
    return WeakStrongReport(True, minima, psi, psi_size, verified, r.size, "exact", r.formula)


# -- independent cross-check ---------------------------------------------------------------

def naive_table_count(family: Sequence[Context], s_max: int, qset: QuantifierSet, pool: int) -> int:
    """Number of distinct truth tables of formulas of size <= s_max, computed row by row.

    Shares no code with ``SizeEnumerator`` beyond the atom list: rows are explicit
    assignments, quantifiers are applied by building each extension set and calling
    the quantifier's acceptance test.
    """
    family = list(family)
    dom = sorted(family[0].assignment.domain())
    fresh = pool_names(dom, pool)
    rows = []
    for i, c in enumerate(family):
        for vals in itertools.product(range(c.size), repeat=pool):
            env = c.assignment.as_dict()
            env.update(zip(fresh, vals))
            rows.append((i, env))
    index = {(i, tuple(env[v] for v in fresh)): r for r, (i, env) in enumerate(rows)}
    vocab = family[0].structure.vocabulary

    def atom(a):
        out = []
        for i, env in rows:
            if isinstance(a, Eq):
                out.append(env[a.left] == env[a.right])
            else:
                out.append(tuple(env[v] for v in a.args) in family[i].structure.relations[a.name])
        return tuple(out)

    def quantify(q, bound, tabs):
        out = []
        for i, env in rows:
            n = family[i].size
            sets = []
            for y, t in zip(bound, tabs):
                distinct = list(dict.fromkeys(y))
                members = set()
                for vals in itertools.product(range(n), repeat=len(distinct)):
                    e2 = dict(env)
                    e2.update(zip(distinct, vals))
                    if t[index[(i, tuple(e2[v] for v in fresh))]]:
                        members.add(tuple(e2[v] for v in y))
                sets.append(frozenset(members))
            out.append(bool(q.test(n, tuple(sets))))
        return tuple(out)

    by_size: dict[int, set] = {1: {atom(a) for a in atoms_over(vocab, tuple(dom) + fresh)}}
    for s in range(2, s_max + 1):
        cur = {tuple(not v for v in t) for t in by_size[s - 1]}
        for a in range(1, s):
            for t1 in by_size[a]:
                for t2 in by_size[s - a]:
                    cur.add(tuple(x and y for x, y in zip(t1, t2)))
        for q in qset:
            for split in _compositions(s - 1, q.width):
                for bound in itertools.product(*(itertools.product(fresh, repeat=ar) for ar in q.arities)):
                    for tabs in itertools.product(*(by_size[part] for part in split)):
                        cur.add(quantify(q, bound, tabs))
        by_size[s] = cur
    return len(set().union(*by_size.values()))


def depth_separable_by_enumeration(left: Context, right: Context, d: int, s_max: int, qset: QuantifierSet,
                                   caps: Caps = DEFAULT_CAPS) -> Formula | None:
    """Separator of depth <= d and size <= s_max found by enumeration, or None."""
    r = min_separating_size(left, right, s_max, qset, caps, max_depth=d)
    return None if r is None else r.formula


__all__ = [
    "Universe", "Enumeration", "SizeEnumerator", "enumerate_by_size", "min_separating_size",
    "separable_at_depth", "separates", "weak_vs_strong_report", "WeakStrongReport",
    "naive_table_count", "depth_separable_by_enumeration", "sufficient_pool", "Separation",
]
