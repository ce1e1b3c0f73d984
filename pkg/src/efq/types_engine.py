"""Joint d-type partitions over a family of contexts, and their defining formulas.

Members of a universe are pairs ``(context index, tuple)`` for every tuple that
respects the repetitions of the variable tuple ``x``. Depth 0 groups members by
their atomic truth vectors. Depth d+1 refines depth d: two members stay together
iff, for every quantifier Q and every choice of unions of depth-d cells of the
universes extended by fresh bound tuples, Q's acceptance agrees on them.

Cardinality quantifiers are compared through reachable count pairs (a dynamic
program over cells) instead of enumerating unions; other quantifiers enumerate
unions of the cells either member touches, under the ``max_cells`` cap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .caps import DEFAULT_CAPS, Caps
from .errors import InputError
from .formulas import And, Eq, Formula, Not, Or, Quant, atoms_over, conjoin, disjoin
from .quantifiers import Quantifier, QuantifierSet
from .structures import Context, atomic_profile, tuples_respecting


def fresh_names(taken: set[str] | frozenset[str], count: int, stem: str = "y") -> tuple[str, ...]:
    """The first ``count`` names ``stem1, stem2, ...`` not in ``taken``."""
    out = []
    k = 1
    while len(out) < count:
        name = f"{stem}{k}"
        if name not in taken:
            out.append(name)
        k += 1
    return tuple(out)


@dataclass(frozen=True)
class _Universe:
    family: tuple[Context, ...]
    x: tuple[str, ...]
    members: tuple[tuple[int, tuple[int, ...]], ...]
    index: dict = field(compare=False, hash=False)

    @property
    def variables(self) -> tuple[str, ...]:
        dom = [k for k, _ in self.family[0].assignment.items] if self.family else []
        return tuple(dict.fromkeys(dom + list(self.x)))


@dataclass
class _Level:
    """One stratum: ``cell_of[m]`` per member, ``cells`` as member lists, parent cell per cell."""

    cell_of: list[int]
    cells: list[list[int]]
    parent: list[int]


@dataclass
class TypePartition:
    depth: int
    var_tuple: tuple[str, ...]
    contexts: tuple[Context, ...]
    cells: list[frozenset]
    engine: "TypeEngine" = field(repr=False)

    def cell_of(self, context_index: int, t: Sequence[int] = ()) -> int:
        key = (context_index, tuple(t))
        for i, c in enumerate(self.cells):
            if key in c:
                return i
        raise InputError(f"{key} is not a member of this partition's universe")

    def formula(self, cell: int) -> Formula:
        return type_formula(self, cell)


class TypeEngine:
    def __init__(self, qset: QuantifierSet, caps: Caps = DEFAULT_CAPS):
        self.qset = qset
        self.caps = caps
        self._universes: dict = {}
        self._levels: dict = {}
        self._formulas: dict = {}

    # -- universes -----------------------------------------------------------

    def universe(self, family: Sequence[Context], x: Sequence[str]) -> _Universe:
        family = tuple(family)
        x = tuple(x)
        key = (tuple(c.key for c in family), x)
        u = self._universes.get(key)
        if u is None:
            self._validate(family)
            members = []
            for i, c in enumerate(family):
                if x:
                    members.extend((i, t) for t in tuples_respecting(c.size, x))
                else:
                    members.append((i, ()))
            u = _Universe(family, x, tuple(members), {m: k for k, m in enumerate(members)})
            self._universes[key] = u
        return u

    def _validate(self, family: tuple[Context, ...]) -> None:
        if not family:
            return
        vocab = family[0].structure.vocabulary
        dom = family[0].assignment.domain()
        for c in family:
            if c.structure.vocabulary != vocab:
                raise InputError("all contexts must share one vocabulary")
            if c.assignment.domain() != dom:
                raise InputError("all contexts must bind the same variables")
            self.caps.check("max_domain", c.size)

    def fresh_tuple(self, u: _Universe, arity: int) -> tuple[str, ...]:
        taken = set(u.variables)
        return fresh_names(taken, arity)

    def member_context(self, u: _Universe, m: int) -> Context:
        i, t = u.members[m]
        c = u.family[i]
        return c.extend(u.x, t) if u.x else c

    # -- strata --------------------------------------------------------------

    def level(self, u: _Universe, d: int) -> _Level:
        key = (tuple(c.key for c in u.family), u.x, d)
        lv = self._levels.get(key)
        if lv is not None:
            return lv
        if d == 0:
            lv = self._level0(u)
        else:
            lv = self._refine(u, d)
        self._levels[key] = lv
        return lv

    def _level0(self, u: _Universe) -> _Level:
        variables = u.variables
        groups: dict = {}
        cell_of = []
        for m in range(len(u.members)):
            prof = atomic_profile(self.member_context(u, m), variables)
            cell_of.append(groups.setdefault(prof, len(groups)))
        cells = [[] for _ in groups]
        for m, c in enumerate(cell_of):
            cells[c].append(m)
        return _Level(cell_of, cells, [0] * len(cells))

    def _component_data(self, u: _Universe, d: int, q: Quantifier):
        """For each component: (extended universe, its depth-d level, bound tuple, member -> [(subcell, tuple)])."""
        out = []
        for arity in q.arities:
            y = self.fresh_tuple(u, arity)
            sub = self.universe(u.family, u.x + y)
            lv = self.level(sub, d - 1)
            rows: list[list] = [[] for _ in u.members]
            lx = len(u.x)
            for sm, (i, t) in enumerate(sub.members):
                parent = u.index[(i, t[:lx])]
                rows[parent].append((lv.cell_of[sm], t[lx:]))
            out.append((sub, lv, y, rows))
        return out

    def _refine(self, u: _Universe, d: int) -> _Level:
        prev = self.level(u, d - 1)
        comps = {q.name: self._component_data(u, d, q) for q in self.qset}
        cell_of = [0] * len(u.members)
        cells: list[list[int]] = []
        parent: list[int] = []
        for pc, members in enumerate(prev.cells):
            reps: list[int] = []
            for m in members:
                for k, r in enumerate(reps):
                    if self.distinguisher(u, comps, r, m) is None:
                        cid = len(cells) - len(reps) + k
                        cells[cid].append(m)
                        cell_of[m] = cid
                        break
                else:
                    reps.append(m)
                    cell_of[m] = len(cells)
                    cells.append([m])
                    parent.append(pc)
        return _Level(cell_of, cells, parent)

    def distinguisher(self, u: _Universe, comps: dict, m1: int, m2: int):
        """A (quantifier, per-component cell sets, accepted-at-m1) triple telling m1 from m2, or None."""
        n1 = u.family[u.members[m1][0]].size
        n2 = u.family[u.members[m2][0]].size
        for q in self.qset:
            data = comps[q.name]
            if q.cardinality is not None:
                hit = self._card_distinguish(q, data, m1, m2, n1, n2)
            else:
                hit = self._generic_distinguish(q, data, m1, m2, n1, n2)
            if hit is not None:
                return (q, hit[0], hit[1])
        return None

    @staticmethod
    def _counts(rows, m):
        out: dict[int, int] = {}
        for cell, _ in rows[m]:
            out[cell] = out.get(cell, 0) + 1
        return out

    def _card_distinguish(self, q, data, m1, m2, n1, n2):
        reach_per_comp = []
        for _, _, _, rows in data:
            c1, c2 = self._counts(rows, m1), self._counts(rows, m2)
            reach = {(0, 0): frozenset()}
            for cell in set(c1) | set(c2):
                a, b = c1.get(cell, 0), c2.get(cell, 0)
                for (x, y), cs in list(reach.items()):
                    reach.setdefault((x + a, y + b), cs | {cell})
            reach_per_comp.append(list(reach.items()))
        for combo in itertools.product(*reach_per_comp):
            s1 = tuple(p[0][0] for p in combo)
            s2 = tuple(p[0][1] for p in combo)
            v1 = bool(q.cardinality(n1, s1))
            if v1 != bool(q.cardinality(n2, s2)):
                return tuple(p[1] for p in combo), v1
        return None

    def _generic_distinguish(self, q, data, m1, m2, n1, n2):
        per_comp = []
        total = 0
        for _, _, _, rows in data:
            touched = sorted({c for c, _ in rows[m1]} | {c for c, _ in rows[m2]})
            total += len(touched)
            per_comp.append((touched, rows))
        self.caps.check("max_cells", total, f"unions of cells for quantifier {q.name}")
        choices = []
        for touched, rows in per_comp:
            opts = []
            for r in range(len(touched) + 1):
                for cs in itertools.combinations(touched, r):
                    s = set(cs)
                    opts.append((frozenset(s),
                                 frozenset(t for c, t in rows[m1] if c in s),
                                 frozenset(t for c, t in rows[m2] if c in s)))
            choices.append(opts)
        for combo in itertools.product(*choices):
            v1 = bool(q.test(n1, tuple(o[1] for o in combo)))
            if v1 != bool(q.test(n2, tuple(o[2] for o in combo))):
                return tuple(o[0] for o in combo), v1
        return None

    # -- formulas ------------------------------------------------------------

    def cell_formula(self, u: _Universe, d: int, cell: int) -> Formula | None:
        """Defining formula of a depth-d cell; ``None`` stands for the empty conjunction (true)."""
        key = (tuple(c.key for c in u.family), u.x, d, cell)
        if key in self._formulas:
            return self._formulas[key]
        lv = self.level(u, d)
        if d == 0:
            f = self._atomic_type_formula(u, lv.cells[cell][0])
        else:
            pc = lv.parent[cell]
            base = self.cell_formula(u, d - 1, pc)
            siblings = [c for c in range(len(lv.cells)) if lv.parent[c] == pc and c != cell]
            parts = [] if base is None else [base]
            if siblings:
                comps = {q.name: self._component_data(u, d, q) for q in self.qset}
                rep = lv.cells[cell][0]
                for other in siblings:
                    parts.append(self._theta(u, d, comps, rep, lv.cells[other][0]))
            f = conjoin(parts) if parts else None
        self._formulas[key] = f
        return f

    def _atomic_type_formula(self, u: _Universe, m: int) -> Formula | None:
        variables = u.variables
        if not variables:
            return None
        vocab = u.family[0].structure.vocabulary
        atoms = atoms_over(vocab, variables)
        ctx = self.member_context(u, m)
        env = ctx.assignment.as_dict()
        parts = []
        for a in atoms:
            if isinstance(a, Eq):
                val = env[a.left] == env[a.right]
            else:
                val = tuple(env[v] for v in a.args) in ctx.structure.relations[a.name]
            parts.append(a if val else Not(a))
        return conjoin(parts)

    def _theta(self, u: _Universe, d: int, comps: dict, m_true: int, m_false: int) -> Formula:
        hit = self.distinguisher(u, comps, m_true, m_false)
        if hit is None:
            raise AssertionError("cells were split without a distinguishing quantifier")
        q, cellsets, accepted = hit
        data = comps[q.name]
        bound = []
        subs = []
        for (sub, _lv, y, _rows), cs in zip(data, cellsets):
            bound.append(y)
            subs.append(self.union_formula(sub, d - 1, cs))
        phi = Quant(q.name, tuple(bound), tuple(subs))
        return phi if accepted else Not(phi)

    def _constant(self, u: _Universe, d: int, value: bool) -> Formula:
        """A formula of depth <= d over the universe's variables that is always ``value``."""
        if u.variables:
            v = u.variables[-1]
            return Eq(v, v) if value else Not(Eq(v, v))
        if d < 1 or len(self.qset) == 0:
            raise InputError("no formula without free variables has depth "
                             f"{d}{' and no quantifiers' if d >= 1 else ''}; the union has no defining formula")
        q = next(iter(self.qset))
        (y,) = fresh_names(set(), 1)
        s = Quant(q.name, tuple((y,) * n for n in q.arities), tuple(Eq(y, y) for _ in q.arities))
        return Or(s, Not(s)) if value else And(s, Not(s))

    def union_formula(self, u: _Universe, d: int, cells) -> Formula:
        cells = sorted(cells)
        if not cells:
            return self._constant(u, d, False)
        parts = [self.cell_formula(u, d, c) for c in cells]
        if any(p is None for p in parts):
            return self._constant(u, d, True)
        return disjoin(parts)


# -- module-level operations --------------------------------------------------------

_ENGINES: dict = {}


def engine_for(qset: QuantifierSet, caps: Caps = DEFAULT_CAPS) -> TypeEngine:
    key = (id(qset), caps)
    eng = _ENGINES.get(key)
    if eng is None or eng.qset is not qset:
        eng = TypeEngine(qset, caps)
        _ENGINES[key] = eng
    return eng


def joint_partition(contexts: Sequence[Context], x: Sequence[str], d: int, qset: QuantifierSet,
                    caps: Caps = DEFAULT_CAPS) -> TypePartition:
    if d < 0:
        raise InputError("depth must be nonnegative")
    caps.check("max_depth", d)
    eng = engine_for(qset, caps)
    u = eng.universe(contexts, x)
    lv = eng.level(u, d)
    cells = [frozenset(u.members[m] for m in ms) for ms in lv.cells]
    p = TypePartition(d, tuple(x), tuple(contexts), cells, eng)
    p._universe = u  # type: ignore[attr-defined]
    return p


def type_formula(p: TypePartition, cell: int) -> Formula:
    if not 0 <= cell < len(p.cells):
        raise InputError(f"cell index {cell} out of range 0..{len(p.cells) - 1}")
    u = p._universe  # type: ignore[attr-defined]
    f = p.engine.cell_formula(u, p.depth, cell)
    if f is None:
        return p.engine.union_formula(u, p.depth, range(len(p.cells)))
    return f


def closed_set_formula(p: TypePartition, cells) -> Formula:
    u = p._universe  # type: ignore[attr-defined]
    cells = sorted(set(cells))
    for c in cells:
        if not 0 <= c < len(p.cells):
            raise InputError(f"cell index {c} out of range")
    return p.engine.union_formula(u, p.depth, cells)


def d_equivalent(c1: Context, c2: Context, d: int, qset: QuantifierSet, caps: Caps = DEFAULT_CAPS) -> bool:
    if c1.assignment.domain() != c2.assignment.domain():
        raise InputError("contexts must bind the same variables")
    p = joint_partition([c1, c2], (), d, qset, caps)
    return p.cell_of(0) == p.cell_of(1)


def stabilization_depth(contexts: Sequence[Context], x: Sequence[str], qset: QuantifierSet,
                        caps: Caps = DEFAULT_CAPS, max_depth: int | None = None) -> int:
    """Least d with stratum d+1 equal to stratum d (searched up to ``max_depth``, default ``caps.max_depth``)."""
    limit = caps.max_depth if max_depth is None else max_depth
    prev = len(joint_partition(contexts, x, 0, qset, caps).cells)
    for d in range(limit):
        cur = len(joint_partition(contexts, x, d + 1, qset, caps).cells)
        if cur == prev:
            return d
        prev = cur
    return limit
