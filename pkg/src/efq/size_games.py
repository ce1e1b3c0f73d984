"""Formula-size games: the class game, the weak game and the model-pair game.

Positions are solved by exact minimax with the following reductions, each of
which keeps the winner unchanged:

* Contexts are identified up to isomorphism; a class is the set of isomorphism
  classes of its members. A context occurring (up to isomorphism) on both sides
  can never be separated, so such positions are lost for Player I.
* Player I winning at ``(s, A, B)`` implies winning at ``(s, A', B')`` for all
  ``A' <= A`` and ``B' <= B`` (restrict the strategy). Hence conjunction covers
  only need to be partitions, and a position is lost as soon as one pair
  ``({a}, {b})`` from ``A x B`` is lost.
* In a quantifier move, a witness set that contains one of two isomorphic
  extended contexts but not the other hands Player II an unseparable position.
  Witness sets are therefore unions of isomorphism classes of extended contexts,
  and the search only keeps sets whose boundary pairs are all won.
* Quantified variables are fresh. Re-binding an assigned variable loses the old
  value and can only help Player II.

In the model-pair game the four replies of Player II to a quantifier move are
exactly the pairs (inside, outside) across the boundary of the chosen witness
set, so that move is won iff every such pair is won at the allotted budget.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .caps import DEFAULT_CAPS, Caps
from .errors import EFQError, InputError
from .formulas import Eq, Formula, Rel, atoms_over
from .quantifiers import Quantifier, QuantifierSet
from .structures import Context, Vocabulary, fresh_variables, tuples_respecting

PLAYER_I = "I"
PLAYER_II = "II"

VACUOUS_WITNESS: Formula = Eq("x", "x")
"""Returned by ``atomic_separates`` when both classes are empty (anything separates them)."""


# -- positions -------------------------------------------------------------------------

def _ctx_label(c: Context) -> str:
    return repr(c)


@dataclass(frozen=True)
class ClassPosition:
    budget: int
    left: frozenset
    right: frozenset

    def __post_init__(self):
        if not isinstance(self.budget, int) or self.budget < 1:
            raise InputError(f"budget must be a positive integer, got {self.budget!r}")
        object.__setattr__(self, "left", frozenset(self.left))
        object.__setattr__(self, "right", frozenset(self.right))

    def describe(self) -> str:
        left = ", ".join(sorted(map(_ctx_label, self.left))) or "∅"
        right = ", ".join(sorted(map(_ctx_label, self.right))) or "∅"
        return f"budget {self.budget}: left {{{left}}} vs right {{{right}}}"


@dataclass(frozen=True)
class PairPosition:
    budget: int
    left: Context
    right: Context

    def __post_init__(self):
        if not isinstance(self.budget, int) or self.budget < 1:
            raise InputError(f"budget must be a positive integer, got {self.budget!r}")
        if self.left.assignment.domain() != self.right.assignment.domain():
            raise InputError("the two contexts of a pair position need equal assignment domains")

    def describe(self) -> str:
        return f"budget {self.budget}: {self.left!r} vs {self.right!r}"


# -- atoms -------------------------------------------------------------------------------

def _vocabulary(contexts: Iterable[Context]) -> Vocabulary | None:
    vocab = None
    for c in contexts:
        if vocab is None:
            vocab = c.structure.vocabulary
        elif c.structure.vocabulary != vocab:
            raise InputError("all contexts of a game must share one vocabulary")
    return vocab


def _common_variables(contexts: Sequence[Context]) -> tuple[str, ...]:
    if not contexts:
        return ()
    common = set(contexts[0].assignment.domain())
    for c in contexts[1:]:
        common &= c.assignment.domain()
    return tuple(sorted(common))


def _atom_holds(c: Context, atom: Formula) -> bool:
    if isinstance(atom, Eq):
        return c.assignment[atom.left] == c.assignment[atom.right]
    return c.structure.holds(atom.name, tuple(c.assignment[a] for a in atom.args))


def atomic_separates(left_class: Iterable[Context], right_class: Iterable[Context]) -> Formula | None:
    """An atom true on every left context and false on every right one, or None.

    Only atoms over variables assigned in every context are considered. When
    both classes are empty, ``VACUOUS_WITNESS`` is returned.
    """
    left, right = list(left_class), list(right_class)
    if not left and not right:
        return VACUOUS_WITNESS
    vocab = _vocabulary(left + right)
    for atom in atoms_over(vocab, _common_variables(left + right)):
        if all(_atom_holds(c, atom) for c in left) and not any(_atom_holds(c, atom) for c in right):
            return atom
    return None


# -- helpers ------------------------------------------------------------------------------

def compositions(total: int, parts: int) -> list[tuple[int, ...]]:
    """All ways to write ``total`` as an ordered sum of ``parts`` positive integers."""
    if parts == 1:
        return [(total,)] if total >= 1 else []
    return [(first,) + rest for first in range(1, total - parts + 2) for rest in compositions(total - first, parts - 1)]


def repetition_patterns(arity: int, taken: Iterable[str]) -> list[tuple[str, ...]]:
    """One variable tuple per repetition pattern, using fresh names in canonical order."""
    fresh = fresh_variables(taken, arity)
    out = []

    def grow(prefix: list[int], top: int):
        if len(prefix) == arity:
            out.append(tuple(fresh[i] for i in prefix))
            return
        for i in range(top + 1):
            grow(prefix + [i], max(top, i + 1) if i == top else top)

    grow([], 0)
    return out


def _acceptance(q: Quantifier, n: int, sets: Sequence[frozenset]) -> bool:
    if q.cardinality is not None:
        return bool(q.cardinality(n, tuple(len(s) for s in sets)))
    return bool(q.test(n, tuple(sets)))


@dataclass
class _Component:
    """Extensions of a list of base contexts by one variable tuple, grouped by isomorphism class."""

    x: tuple[str, ...]
    keys: list[bytes]                                  # distinct extended classes, in first-seen order
    members: list[list[tuple[tuple[int, ...], bytes]]]  # per base context: (tuple, class key)


# -- the solver ----------------------------------------------------------------------------

class SizeGameSolver:
    """Memoized exact solver for the class game and the model-pair game over a fixed quantifier set."""

    def __init__(self, qset: QuantifierSet, caps: Caps = DEFAULT_CAPS, family_budget: int = 3):
        self.qset = qset
        self.caps = caps
        self.family_budget = family_budget  # witness candidates come from rule_family up to this budget
        self._rep: dict[bytes, Context] = {}
        self._class_memo: dict = {}
        self._class_moves: dict = {}
        self._single: dict = {}
        self._families: dict = {}
        self._pair_memo: dict = {}
        self._pair_moves: dict = {}
        self._components: dict = {}
        self._profiles: dict = {}
        self._acc_cache: dict = {}
        self.nodes = 0

    # -- canonical contexts --
    def register(self, c: Context) -> bytes:
        k = c.iso_key
        if k not in self._rep:
            self._rep[k] = c
        return k

    def context(self, key: bytes) -> Context:
        return self._rep[key]

    def _profile(self, key: bytes, variables: tuple[str, ...]) -> int:
        pk = (key, variables)
        v = self._profiles.get(pk)
        if v is None:
            c = self._rep[key]
            atoms = atoms_over(c.structure.vocabulary, variables)
            v = sum(1 << i for i, a in enumerate(atoms) if _atom_holds(c, a))
            self._profiles[pk] = v
        return v

    def atomic_key_separation(self, left: frozenset, right: frozenset) -> Formula | None:
        if not left and not right:
            return VACUOUS_WITNESS
        ctxs = [self._rep[k] for k in itertools.chain(left, right)]
        variables = _common_variables(ctxs)
        if not variables:
            return None
        atoms = atoms_over(ctxs[0].structure.vocabulary, variables)
        full = (1 << len(atoms)) - 1
        on_left = full
        for k in left:
            on_left &= self._profile(k, variables)
        on_right = 0
        for k in right:
            on_right |= self._profile(k, variables)
        sep = on_left & ~on_right
        if not sep:
            return None
        return atoms[(sep & -sep).bit_length() - 1]

    def _component(self, base: tuple[bytes, ...], x: tuple[str, ...]) -> _Component:
        ck = (base, x)
        comp = self._components.get(ck)
        if comp is None:
            keys: dict[bytes, None] = {}
            members = []
            for b in base:
                c = self._rep[b]
                row = []
                for t in tuples_respecting(c.size, x):
                    k = self.register(c.extend(x, t))
                    keys.setdefault(k)
                    row.append((t, k))
                members.append(row)
            self.caps.check("max_universe", len(keys), f"extended contexts for variables {x}")
            comp = self._components[ck] = _Component(x, list(keys), members)
        return comp

    def _quantifier_setups(self, q: Quantifier, base: tuple[bytes, ...], s: int):
        """Yield (variable tuples, budget split, components) for every quantifier move shape."""
        taken = set()
        for b in base:
            taken |= self._rep[b].assignment.domain()
        pattern_lists = [repetition_patterns(n, taken) for n in q.arities]
        for us in compositions(s - 1, q.width):
            for xs in itertools.product(*pattern_lists):
                yield xs, us, [self._component(base, x) for x in xs]

    def _accepts(self, q: Quantifier, n: int, sets: tuple[frozenset, ...]) -> bool:
        if q.cardinality is not None:
            return bool(q.cardinality(n, tuple(len(s) for s in sets)))
        key = (id(q), n, sets)
        v = self._acc_cache.get(key)
        if v is None:
            v = self._acc_cache[key] = bool(q.test(n, sets))
        return v

    def atom_extensions(self, keys: Sequence[bytes]) -> list[frozenset]:
        """Distinct sets {k in keys : atom holds at k}, one per atomic formula over the shared variables.

        At budget 1 Player I wins (1, S, keys - S) exactly when S is one of these.
        """
        ctxs = [self._rep[k] for k in keys]
        variables = _common_variables(ctxs)
        if not ctxs or not variables:
            return []
        n_atoms = len(atoms_over(ctxs[0].structure.vocabulary, variables))
        profiles = [self._profile(k, variables) for k in keys]
        out = {frozenset(k for k, p in zip(keys, profiles) if p >> i & 1) for i in range(n_atoms)}
        return sorted(out, key=lambda S: sorted(S))

    def rule_family(self, keys: Sequence[bytes], u: int) -> list[frozenset] | None:
        """Every S with Player I winning (u, S, keys - S), for u <= 3, read off the game rules.

        Budget 1 positions are decided by atoms alone, so F_1 is the set of atom
        extensions. For u = 2, 3 every move leads to positions of budget < u:
        S is an atom's extension (atomic win), the complement of a set in
        F_{u-1} (negation), an intersection X1 & X2 with X1 in F_a, X2 in F_b,
        a + b = u (conjunction: each excluded context is excluded by one side),
        or the set accepted by a quantifier whose witness sets come from
        F_{u_j} of the extended components. A conjunct position covers only
        part of the universe, but for u_j <= 2 its winning witness extends to
        the whole universe, so the global families suffice. None unless all
        contexts assign the same nonempty set of variables.
        """
        if u == 1:
            return self.atom_extensions(keys)
        keys = tuple(keys)
        ck = (keys, u)
        if ck in self._families:
            return self._families[ck]
        ctxs = [self._rep[k] for k in keys]
        domains = {c.assignment.domain() for c in ctxs}
        if len(domains) != 1 or not next(iter(domains)):
            self._families[ck] = None
            return None
        everything = frozenset(keys)
        atoms = self.atom_extensions(keys)
        out = set(atoms)
        out.update(everything - X for X in self.rule_family(keys, u - 1))
        for a in range(1, u // 2 + 1):
            for X1 in self.rule_family(keys, a):
                for X2 in self.rule_family(keys, u - a):
                    out.add(X1 & X2)
        for q in self.qset:
            for xs, us, comps in self._quantifier_setups(q, keys, u):
                fams = [self.rule_family(c.keys, uj) for c, uj in zip(comps, us)]
                if any(f is None for f in fams):
                    self._families[ck] = None
                    return None
                for choice in itertools.product(*fams):
                    out.add(frozenset(
                        k for k, c, i in zip(keys, ctxs, range(len(keys)))
                        if self._accepts(q, c.size, tuple(frozenset(t for t, kk in comp.members[i] if kk in X)
                                                          for comp, X in zip(comps, choice)))))
        fam = self._families[ck] = sorted(out, key=lambda S: sorted(S))
        return fam

    def budget_two_family(self, keys: Sequence[bytes]) -> list[frozenset] | None:
        return self.rule_family(keys, 2)

    def _witness_search(self, q: Quantifier, base: tuple[bytes, ...], accept: Sequence[bool],
                        comps: list[_Component], pair_ok, leaf_ok, fixed: Sequence[list | None] = ()):
        """Search for witness sets S_j (unions of extended classes) meeting the quantifier constraint.

        ``accept[i]`` says whether base context i must be accepted or rejected.
        ``pair_ok(j, a, b)`` must hold for every a in S_j and b outside; ``leaf_ok``
        is checked on complete choices. ``fixed[j]``, when given, lists the only
        candidates for S_j. Returns the tuple of sets or None.
        """
        fixed = list(fixed) + [None] * (len(comps) - len(fixed))
        free = [j for j, f in enumerate(fixed) if f is None]
        order: list[tuple[int, bytes]] = []
        seen = set()
        done_at: dict[int, list[int]] = {}
        for i in range(len(base)):
            for j in free:
                for _, k in comps[j].members[i]:
                    if (j, k) not in seen:
                        seen.add((j, k))
                        order.append((j, k))
            done_at.setdefault(len(order) - 1, []).append(i)
        inside = [set() for _ in comps]
        outside = [set() for _ in comps]
        sizes = [self._rep[b].size for b in base]

        def context_ok(i: int) -> bool:
            sets = tuple(frozenset(t for t, k in comp.members[i] if k in inside[j]) for j, comp in enumerate(comps))
            return self._accepts(q, sizes[i], sets) == accept[i]

        def rec(pos: int):
            if pos == len(order):
                result = tuple(frozenset(s) for s in inside)
                return result if leaf_ok(result) else None
            j, k = order[pos]
            for put_in in (True, False):
                if put_in:
                    if not all(pair_ok(j, k, b) for b in outside[j]):
                        continue
                    inside[j].add(k)
                else:
                    if not all(pair_ok(j, a, k) for a in inside[j]):
                        continue
                    outside[j].add(k)
                if all(context_ok(i) for i in done_at.get(pos, ())):
                    r = rec(pos + 1)
                    if r is not None:
                        return r
                (inside if put_in else outside)[j].discard(k)
            return None

        fixed_idx = [j for j in range(len(comps)) if fixed[j] is not None]
        for combo in itertools.product(*[fixed[j] for j in fixed_idx]):
            for j, S in zip(fixed_idx, combo):
                inside[j] = set(S)
                outside[j] = set(comps[j].keys) - inside[j]
            if all(context_ok(i) for i in done_at.get(-1, ())):
                r = rec(0)
                if r is not None:
                    return r
        return None

    # -- class game --
    def _atomic_win(self, A: frozenset, B: frozenset) -> bool:
        return self.atomic_key_separation(A, B) is not None

    def class_wins(self, s: int, left: frozenset, right: frozenset) -> bool:
        """Does Player I win the class game from (s, left, right)? Classes are sets of class keys."""
        if s == 1:
            return self._atomic_win(left, right)
        key = (s, left, right)
        v = self._class_memo.get(key)
        if v is None:
            v = self._class_memo[key] = self._class_solve(s, left, right)
        return v

    def single_wins(self, s: int, a: bytes, b: bytes) -> bool:
        """class_wins(s, {a}, {b}), cached on the bare keys."""
        key = (s, a, b)
        v = self._single.get(key)
        if v is None:
            v = self._single[key] = self.class_wins(s, frozenset((a,)), frozenset((b,)))
        return v

    def _class_solve(self, s: int, A: frozenset, B: frozenset) -> bool:
        self.nodes += 1
        key = (s, A, B)
        if self._atomic_win(A, B):
            self._class_moves[key] = ("atomic",)
            return True
        if A & B:
            return False
        if len(A) * len(B) > 1:
            for a in A:
                for b in B:
                    if not self.single_wins(s, a, b):
                        return False
        if self.class_wins(s - 1, B, A):
            self._class_moves[key] = ("negate",)
            return True
        move = self._class_conjunction(s, A, B)
        if move is None:
            move = self._class_quantifier(s, A, B)
        if move is None:
            return False
        self._class_moves[key] = move
        return True

    def _class_conjunction(self, s: int, A: frozenset, B: frozenset):
        """Find budgets u + v = s and a partition C, D of B with both (u, A, C) and (v, A, D) won.

        Winning is antitone in the right class, so partitions suffice and a
        partial C or D that already loses can be abandoned.
        """
        members = sorted(B)
        for u in range(1, s // 2 + 1):
            v = s - u
            if u == 1:
                # Player I wins (1, A, C) iff some atom holds on A and fails on C;
                # the best C for a given atom is everything the atom fails on.
                cuts = [B - ext for ext in self.atom_extensions(sorted(A | B)) if A <= ext]
                if self._atomic_win(A, frozenset()):
                    cuts.append(frozenset())
                for C in cuts:
                    D = B - C
                    if self.class_wins(v, A, D):
                        return ("split", u, v, C, D)
                continue
            good_u = [self.class_wins(u, A, frozenset((b,))) for b in members]
            good_v = [self.class_wins(v, A, frozenset((b,))) for b in members]
            if not all(x or y for x, y in zip(good_u, good_v)):
                continue
            C: list[bytes] = []
            D: list[bytes] = []

            def rec(i: int):
                if i == len(members):
                    return True
                b = members[i]
                if good_u[i]:
                    C.append(b)
                    if self.class_wins(u, A, frozenset(C)) and rec(i + 1):
                        return True
                    C.pop()
                if good_v[i]:
                    D.append(b)
                    if self.class_wins(v, A, frozenset(D)) and rec(i + 1):
                        return True
                    D.pop()
                return False

            if rec(0):
                return ("split", u, v, frozenset(C), frozenset(D))
        return None

    def _class_quantifier(self, s: int, A: frozenset, B: frozenset):
        base = tuple(sorted(A | B))
        accept = [b in A for b in base]
        for q in self.qset:
            for xs, us, comps in self._quantifier_setups(q, base, s):
                def pair_ok(j, a, b, us=us):
                    return self.single_wins(us[j], a, b)

                fixed = [self.rule_family(c.keys, u) if u <= self.family_budget else None
                         for c, u in zip(comps, us)]

                def leaf_ok(sets, us=us, comps=comps, fixed=fixed):
                    return all(fixed[j] is not None or self.class_wins(us[j], S, frozenset(comps[j].keys) - S)
                               for j, S in enumerate(sets))

                found = self._witness_search(q, base, accept, comps, pair_ok, leaf_ok, fixed)
                if found is not None:
                    return ("quantify", q.name, xs, us, found)
        return None

    # -- model-pair game --
    def pair_wins(self, s: int, left: bytes, right: bytes, split: bool = True) -> bool:
        key = (s, left, right, split)
        v = self._pair_memo.get(key)
        if v is None:
            v = self._pair_memo[key] = self._pair_solve(s, left, right, split)
        return v

    def _pair_solve(self, s: int, a: bytes, b: bytes, split: bool) -> bool:
        self.nodes += 1
        key = (s, a, b, split)
        if self.atomic_key_separation(frozenset((a,)), frozenset((b,))) is not None:
            self._pair_moves[key] = ("atomic",)
            return True
        if s == 1 or a == b:
            return False
        if self.pair_wins(s - 1, b, a, split):
            self._pair_moves[key] = ("swap",)
            return True
        base = (a, b)
        for q in self.qset:
            for xs, us, comps in self._quantifier_setups(q, base, s):
                def pair_ok(j, e, f, us=us):
                    return self.pair_wins(us[j], e, f, split)

                # Witness sets need not be definable here: only the boundary pairs are played.
                found = self._witness_search(q, base, (True, False), comps, pair_ok, lambda sets: True)
                if found is not None:
                    self._pair_moves[key] = ("quantify", q.name, xs, us, found)
                    return True
        if split:
            for u in range(1, s // 2 + 1):
                if self.pair_wins(u, a, b, split) and self.pair_wins(s - u, a, b, split):
                    self._pair_moves[key] = ("split", u, s - u)
                    return True
        return False

    # -- translating key-level moves to concrete positions --
    def class_keys(self, contexts: Iterable[Context]) -> frozenset:
        return frozenset(self.register(c) for c in contexts)

    def class_position_wins(self, p: ClassPosition) -> bool:
        return self.class_wins(p.budget, self.class_keys(p.left), self.class_keys(p.right))

    def pair_position_wins(self, p: PairPosition, split: bool = True) -> bool:
        return self.pair_wins(p.budget, self.register(p.left), self.register(p.right), split)


# -- explicit game rules (used for strategies, replay and play) ------------------------------------

def _check_contexts(contexts: Sequence[Context], caps: Caps, what: str) -> None:
    for c in contexts:
        caps.check("max_domain", c.size, what)


def class_terminal(p: ClassPosition) -> tuple[str, str] | None:
    """Winner and reason if the class game ends at p, else None."""
    atom = atomic_separates(p.left, p.right)
    if atom is not None:
        return PLAYER_I, f"the atomic formula {atom} separates the classes"
    if p.budget == 1:
        return PLAYER_II, "budget exhausted and no atomic formula separates the classes"
    return None


def _covers(right: frozenset):
    members = sorted(right, key=lambda c: c.key)
    for labels in itertools.product((0, 1, 2), repeat=len(members)):
        C = frozenset(c for c, l in zip(members, labels) if l != 1)
        D = frozenset(c for c, l in zip(members, labels) if l != 0)
        yield C, D


def _witness_functions(q: Quantifier, xs, contexts: Sequence[Context], accept: Sequence[bool],
                       iso_closed: bool, limit: int):
    """Witness functions P_j as tuples of sets indexed like ``contexts``; iso_closed restricts to unions of iso classes."""
    out = []
    if iso_closed:
        solver = SizeGameSolver(QuantifierSet.of(q))
        base = tuple(solver.register(c) for c in contexts)
        comps = [solver._component(tuple(dict.fromkeys(base)), x) for x in xs]
        key_lists = [c.keys for c in comps]
        for choice in itertools.product(*[range(1 << len(kl)) for kl in key_lists]):
            chosen = [frozenset(k for i, k in enumerate(kl) if m >> i & 1) for kl, m in zip(key_lists, choice)]
            P = []
            for j, x in enumerate(xs):
                P.append(tuple(frozenset(t for t in tuples_respecting(c.size, x) if solver.register(c.extend(x, t)) in chosen[j])
                               for c in contexts))
            if all(_acceptance(q, c.size, tuple(P[j][i] for j in range(len(xs)))) == acc
                   for i, (c, acc) in enumerate(zip(contexts, accept))):
                out.append(tuple(P))
                if len(out) >= limit:
                    break
        return out
    per_context = []
    for c, acc in zip(contexts, accept):
        tls = [tuples_respecting(c.size, x) for x in xs]
        opts = []
        for masks in itertools.product(*[range(1 << len(tl)) for tl in tls]):
            sets = tuple(frozenset(t for i, t in enumerate(tl) if m >> i & 1) for tl, m in zip(tls, masks))
            if _acceptance(q, c.size, sets) == acc:
                opts.append(sets)
        per_context.append(opts)
    for combo in itertools.product(*per_context):
        out.append(tuple(tuple(combo[i][j] for i in range(len(contexts))) for j in range(len(xs))))
        if len(out) >= limit:
            break
    return out


def class_moves(p: ClassPosition, qset: QuantifierSet, *, canonical: bool = True, limit: int = 500) -> list[tuple]:
    """Player I's moves at p. With ``canonical`` quantifier moves use witness sets closed under isomorphism."""
    if class_terminal(p) is not None:
        return []
    moves: list[tuple] = [("negate",)]
    s = p.budget
    for u in range(1, s):
        for C, D in _covers(p.right):
            moves.append(("split", u, s - u, C, D))
    if p.left & p.right:
        # a context on both sides would need its witness sets both accepted and rejected
        return moves
    contexts = sorted(p.left | p.right, key=lambda c: c.key)
    accept = [c in p.left for c in contexts]
    taken = set()
    for c in contexts:
        taken |= c.assignment.domain()
    for q in qset:
        pattern_lists = [repetition_patterns(n, taken) for n in q.arities]
        for us in compositions(s - 1, q.width):
            for xs in itertools.product(*pattern_lists):
                for P in _witness_functions(q, xs, contexts, accept, canonical, limit):
                    moves.append(("quantify", q.name, xs, us, tuple(dict(zip(contexts, Pj)) for Pj in P)))
                    if len(moves) >= limit:
                        return moves
    return moves


def _extend_class(P_j: dict, x: tuple[str, ...], inside: bool) -> frozenset:
    out = set()
    for c, chosen in P_j.items():
        for t in tuples_respecting(c.size, x):
            if (t in chosen) == inside:
                out.add(c.extend(x, t))
    return frozenset(out)


def class_successors(p: ClassPosition, move: tuple, qset: QuantifierSet) -> list[tuple[str, ClassPosition]]:
    """Player II's options after Player I plays ``move`` at p, as (label, position) pairs."""
    kind = move[0]
    if kind == "negate":
        return [("continue", ClassPosition(p.budget - 1, p.right, p.left))]
    if kind == "split":
        _, u, v, C, D = move
        if u < 1 or v < 1 or u + v != p.budget or (C | D) != p.right or not (C <= p.right and D <= p.right):
            raise InputError(f"illegal conjunction move {move_text(move)}")
        return [(f"first conjunct (budget {u})", ClassPosition(u, p.left, C)),
                (f"second conjunct (budget {v})", ClassPosition(v, p.left, D))]
    if kind == "quantify":
        _, qname, xs, us, P = move
        q = qset.get(qname)
        if len(xs) != q.width or len(us) != q.width or sum(us) != p.budget - 1 or min(us) < 1:
            raise InputError(f"illegal quantifier move {move_text(move)}")
        if p.left & p.right:
            raise InputError("no quantifier move exists when a context lies in both classes")
        everyone = p.left | p.right
        for c in everyone:
            sets = []
            for j, x in enumerate(xs):
                chosen = P[j].get(c)
                if chosen is None:
                    raise InputError(f"witness function {j + 1} misses context {c!r}")
                allowed = set(tuples_respecting(c.size, x))
                if not set(chosen) <= allowed:
                    raise InputError(f"witness set for {c!r} does not respect the repetitions of {x}")
                sets.append(frozenset(chosen))
            if _acceptance(q, c.size, tuple(sets)) != (c in p.left):
                side = "accept" if c in p.left else "reject"
                raise InputError(f"{qname} must {side} the witness sets of {c!r}")
        return [(f"component {j + 1} (budget {us[j]})",
                 ClassPosition(us[j], _extend_class(P[j], x, True), _extend_class(P[j], x, False)))
                for j, x in enumerate(xs)]
    raise InputError(f"unknown move {move!r}")


def pair_terminal(p: PairPosition) -> tuple[str, str] | None:
    atom = atomic_separates([p.left], [p.right])
    if atom is not None:
        return PLAYER_I, f"the atomic formula {atom} separates the two contexts"
    if p.budget == 1:
        return PLAYER_II, "budget exhausted and no atomic formula separates the two contexts"
    return None


def pair_moves(p: PairPosition, qset: QuantifierSet, *, split: bool = True, canonical: bool = True,
               limit: int = 500) -> list[tuple]:
    if pair_terminal(p) is not None:
        return []
    s = p.budget
    moves: list[tuple] = [("swap",)]
    if split:
        moves += [("split", u, s - u) for u in range(1, s)]
    taken = p.left.assignment.domain()
    for q in qset:
        pattern_lists = [repetition_patterns(n, taken) for n in q.arities]
        for us in compositions(s - 1, q.width):
            for xs in itertools.product(*pattern_lists):
                for P in _witness_functions(q, xs, [p.left, p.right], [True, False], canonical, limit):
                    moves.append(("quantify", q.name, xs, us,
                                  tuple(P[j][0] for j in range(len(xs))),
                                  tuple(P[j][1] for j in range(len(xs)))))
                    if len(moves) >= limit:
                        return moves
    return moves


def pair_successors(p: PairPosition, move: tuple, qset: QuantifierSet) -> list[tuple[str, PairPosition]]:
    kind = move[0]
    M, N = p.left, p.right
    if kind == "swap":
        return [("continue", PairPosition(p.budget - 1, N, M))]
    if kind == "split":
        _, u, v = move
        if u < 1 or v < 1 or u + v != p.budget:
            raise InputError(f"illegal split {move!r}")
        return [(f"budget {u}", PairPosition(u, M, N)), (f"budget {v}", PairPosition(v, M, N))]
    if kind == "quantify":
        _, qname, xs, us, Ms, Ns = move
        q = qset.get(qname)
        if len(xs) != q.width or len(us) != q.width or sum(us) != p.budget - 1 or min(us) < 1:
            raise InputError(f"illegal quantifier move {move_text(move)}")
        for ctx, sets, want in ((M, Ms, True), (N, Ns, False)):
            for x, chosen in zip(xs, sets):
                if not set(chosen) <= set(tuples_respecting(ctx.size, x)):
                    raise InputError(f"witness set does not respect the repetitions of {x}")
            if _acceptance(q, ctx.size, tuple(frozenset(s) for s in sets)) != want:
                raise InputError(f"{qname} must {'accept' if want else 'reject'} the witness sets of {ctx!r}")
        out = []
        for j, x in enumerate(xs):
            m_all, n_all = tuples_respecting(M.size, x), tuples_respecting(N.size, x)
            m_in = [t for t in m_all if t in Ms[j]]
            m_out = [t for t in m_all if t not in Ms[j]]
            n_in = [t for t in n_all if t in Ns[j]]
            n_out = [t for t in n_all if t not in Ns[j]]
            u = us[j]
            tag = f"component {j + 1}: " if len(xs) > 1 else ""
            for a in m_in:
                for b in n_out:
                    out.append((f"{tag}{a} in the left set, {b} outside the right set",
                                PairPosition(u, M.extend(x, a), N.extend(x, b))))
            for a in m_out:
                for b in n_in:
                    out.append((f"{tag}{b} in the right set, {a} outside the left set (sides swap)",
                                PairPosition(u, N.extend(x, b), M.extend(x, a))))
            for a in m_in:
                for a2 in m_out:
                    out.append((f"{tag}{a} in and {a2} outside the left set",
                                PairPosition(u, M.extend(x, a), M.extend(x, a2))))
            for b in n_in:
                for b2 in n_out:
                    out.append((f"{tag}{b} in and {b2} outside the right set",
                                PairPosition(u, N.extend(x, b), N.extend(x, b2))))
        return out
    raise InputError(f"unknown move {move!r}")


def move_text(move: tuple) -> str:
    kind = move[0]
    if kind == "negate":
        return "swap the classes (negation)"
    if kind == "swap":
        return "swap the models (negation)"
    if kind == "split" and len(move) == 5:
        _, u, v, C, D = move
        return (f"split the budget {u}+{v} and cover the right class by {{{', '.join(sorted(map(_ctx_label, C)))}}}"
                f" and {{{', '.join(sorted(map(_ctx_label, D)))}}} (conjunction)")
    if kind == "split":
        return f"split the budget {move[1]}+{move[2]} (conjunction)"
    if kind == "quantify":
        q, xs, us = move[1], move[2], move[3]
        xtext = ", ".join("(" + ",".join(x) + ")" for x in xs)
        if len(move) == 6:
            sets = "; ".join(f"left {sorted(m)} right {sorted(n)}" for m, n in zip(move[4], move[5]))
        else:
            sets = "; ".join(
                ", ".join(f"{_ctx_label(c)}: {sorted(s)}" for c, s in sorted(P.items(), key=lambda kv: kv[0].key))
                for P in move[4])
        return f"quantify {q} over {xtext} with budgets {list(us)} and witness sets {sets}"
    return repr(move)


# -- strategies and outcomes ------------------------------------------------------------------------------

def _unkey_class_move(solver: SizeGameSolver, p: ClassPosition, kmove: tuple) -> tuple:
    kind = kmove[0]
    if kind == "negate":
        return kmove
    if kind == "split":
        _, u, v, Ck, Dk = kmove
        C = frozenset(c for c in p.right if solver.register(c) in Ck)
        D = frozenset(c for c in p.right if solver.register(c) in Dk)
        return ("split", u, v, C, D)
    _, qname, xs, us, sets = kmove
    P = tuple({c: frozenset(t for t in tuples_respecting(c.size, x) if solver.register(c.extend(x, t)) in S)
               for c in p.left | p.right} for x, S in zip(xs, sets))
    return ("quantify", qname, xs, us, P)


def _unkey_pair_move(solver: SizeGameSolver, p: PairPosition, kmove: tuple) -> tuple:
    if kmove[0] in ("swap", "split"):
        return kmove
    _, qname, xs, us, sets = kmove
    Ms = tuple(frozenset(t for t in tuples_respecting(p.left.size, x) if solver.register(p.left.extend(x, t)) in S)
               for x, S in zip(xs, sets))
    Ns = tuple(frozenset(t for t in tuples_respecting(p.right.size, x) if solver.register(p.right.extend(x, t)) in S)
               for x, S in zip(xs, sets))
    return ("quantify", qname, xs, us, Ms, Ns)


@dataclass
class SizeGameStrategy:
    """Optimal play for the winner, and optimal answers for either player, derived from the solver."""

    kind: str                      # "class" or "pair"
    holder: str
    solver: SizeGameSolver = field(repr=False)
    split: bool = True

    def wins(self, p) -> bool:
        if self.kind == "class":
            return self.solver.class_position_wins(p)
        return self.solver.pair_position_wins(p, self.split)

    def player_i_move(self, p) -> tuple | None:
        """A winning move for Player I at p (None if Player I does not win there or the game is over)."""
        if not self.wins(p):
            return None
        if self.kind == "class":
            key = (p.budget, self.solver.class_keys(p.left), self.solver.class_keys(p.right))
            kmove = self.solver._class_moves.get(key, ("atomic",))
            return None if kmove[0] == "atomic" else _unkey_class_move(self.solver, p, kmove)
        key = (p.budget, self.solver.register(p.left), self.solver.register(p.right), self.split)
        kmove = self.solver._pair_moves.get(key, ("atomic",))
        return None if kmove[0] == "atomic" else _unkey_pair_move(self.solver, p, kmove)

    def player_ii_reply(self, options: Sequence[tuple[str, object]]) -> int:
        """Index of an option that Player I cannot win from (or 0 if every option is lost for Player II)."""
        for i, (_, q) in enumerate(options):
            if not self.wins(q):
                return i
        return 0


@dataclass
class SizeGameOutcome:
    winner: str
    budget: int
    start: object
    strategy: SizeGameStrategy

    def first_move(self) -> tuple | None:
        return self.strategy.player_i_move(self.start) if self.winner == PLAYER_I else None

    def to_json(self) -> dict:
        out = {"winner": self.winner, "budget": self.budget}
        m = self.first_move()
        if m is not None:
            out["first_move"] = move_text(m)
        return out


_SOLVERS: dict = {}


def solver_for(qset: QuantifierSet, caps: Caps = DEFAULT_CAPS) -> SizeGameSolver:
    key = (id(qset), caps)
    s = _SOLVERS.get(key)
    if s is None or s.qset is not qset:
        s = _SOLVERS[key] = SizeGameSolver(qset, caps)
    return s


def _check_class_position(p: ClassPosition, caps: Caps) -> None:
    caps.check("max_budget", p.budget, "formula-size budget")
    caps.check("max_class", max(len(p.left), len(p.right)), "contexts per class")
    _check_contexts(list(p.left | p.right), caps, "class game")
    _vocabulary(p.left | p.right)


def solve_class_game(p: ClassPosition, qset: QuantifierSet, caps: Caps = DEFAULT_CAPS) -> SizeGameOutcome:
    """Winner of the class formula-size game from p, with a strategy."""
    _check_class_position(p, caps)
    solver = solver_for(qset, caps)
    winner = PLAYER_I if solver.class_position_wins(p) else PLAYER_II
    return SizeGameOutcome(winner, p.budget, p, SizeGameStrategy("class", winner, solver))


def solve_weak_game(s: int, left_class: Iterable[Context], right_class: Iterable[Context], qset: QuantifierSet,
                    caps: Caps = DEFAULT_CAPS) -> str:
    """Winner of the weak game: Player II picks one context per side, then the class game is played on them."""
    left, right = list(left_class), list(right_class)
    _check_class_position(ClassPosition(s, left, right), caps)
    solver = solver_for(qset, caps)
    for a in left:
        for b in right:
            if not solver.class_wins(s, frozenset((solver.register(a),)), frozenset((solver.register(b),))):
                return PLAYER_II
    return PLAYER_I


def weak_game_counterpair(s: int, left_class: Iterable[Context], right_class: Iterable[Context], qset: QuantifierSet,
                          caps: Caps = DEFAULT_CAPS) -> tuple[Context, Context] | None:
    """A pair Player II can choose to win the weak game at budget s, or None."""
    solver = solver_for(qset, caps)
    for a in left_class:
        for b in right_class:
            if not solver.class_wins(s, frozenset((solver.register(a),)), frozenset((solver.register(b),))):
                return a, b
    return None


def solve_pair_game(p: PairPosition, qset: QuantifierSet, caps: Caps = DEFAULT_CAPS,
                    split: bool = True) -> SizeGameOutcome:
    """Winner of the model-pair game from p, with a strategy. ``split=False`` removes the budget-splitting move."""
    caps.check("max_budget", p.budget, "formula-size budget")
    _check_contexts([p.left, p.right], caps, "pair game")
    _vocabulary([p.left, p.right])
    solver = solver_for(qset, caps)
    winner = PLAYER_I if solver.pair_position_wins(p, split) else PLAYER_II
    return SizeGameOutcome(winner, p.budget, p, SizeGameStrategy("pair", winner, solver, split))


GAME_KINDS = ("class", "weak", "pair")


def min_winning_budget(kind: str, inputs: tuple, s_max: int, qset: QuantifierSet,
                       caps: Caps = DEFAULT_CAPS, split: bool = True) -> int | None:
    """Least budget s <= s_max at which Player I wins, or None.

    ``inputs`` is (left_class, right_class) for "class" and "weak", and
    (left_context, right_context) for "pair".
    """
    if s_max < 1:
        raise InputError("s_max must be at least 1")
    left, right = inputs
    for s in range(1, s_max + 1):
        if kind == "class":
            w = solve_class_game(ClassPosition(s, left, right), qset, caps).winner
        elif kind == "weak":
            w = solve_weak_game(s, left, right, qset, caps)
        elif kind == "pair":
            w = solve_pair_game(PairPosition(s, left, right), qset, caps, split).winner
        else:
            raise InputError(f"unknown game kind {kind!r}; expected one of {GAME_KINDS}")
        if w == PLAYER_I:
            return s
    return None


def replay(outcome: SizeGameOutcome, opponent_choices: Sequence[int], qset: QuantifierSet) -> list[dict]:
    """Play the solver's moves for both sides, using ``opponent_choices`` for the loser's decisions.

    When Player I is the loser, each choice indexes ``class_moves``/``pair_moves``
    (canonical list); when Player II is the loser it indexes the successor list.
    """
    strat = outcome.strategy
    kind = strat.kind
    terminal = class_terminal if kind == "class" else pair_terminal
    moves_of = (lambda p: class_moves(p, qset)) if kind == "class" else (lambda p: pair_moves(p, qset, split=strat.split))
    successors = class_successors if kind == "class" else pair_successors
    choices = list(opponent_choices)
    p = outcome.start
    transcript = []
    while True:
        t = terminal(p)
        if t is not None:
            transcript.append({"position": p.describe(), "actor": None, "move": None, "note": f"Player {t[0]} wins: {t[1]}"})
            return transcript
        if outcome.winner == PLAYER_I:
            m = strat.player_i_move(p)
            note = "strategy"
        else:
            if not choices:
                transcript.append({"position": p.describe(), "actor": "Player I", "move": None, "note": "awaiting opponent move"})
                return transcript
            legal = moves_of(p)
            if not legal:
                transcript.append({"position": p.describe(), "actor": None, "move": None, "note": "Player II wins: Player I has no move"})
                return transcript
            i = choices.pop(0)
            if not 0 <= i < len(legal):
                raise InputError(f"move index {i} out of range 0..{len(legal) - 1}")
            m = legal[i]
            note = "opponent"
        transcript.append({"position": p.describe(), "actor": "Player I", "move": move_text(m), "note": note})
        opts = successors(p, m, qset)
        if not opts:
            transcript.append({"position": p.describe(), "actor": None, "move": None, "note": "Player I wins: Player II has no reply"})
            return transcript
        if outcome.winner == PLAYER_II:
            i = strat.player_ii_reply(opts)
            note = "strategy"
        else:
            if not choices:
                transcript.append({"position": p.describe(), "actor": "Player II", "move": None, "note": "awaiting opponent move"})
                return transcript
            i = choices.pop(0)
            if not 0 <= i < len(opts):
                raise InputError(f"reply index {i} out of range 0..{len(opts) - 1}")
            note = "opponent"
        transcript.append({"position": p.describe(), "actor": "Player II", "move": opts[i][0], "note": note})
        p = opts[i][1]


__all__ = [
    "PLAYER_I", "PLAYER_II", "VACUOUS_WITNESS", "ClassPosition", "PairPosition", "atomic_separates",
    "compositions", "repetition_patterns", "SizeGameSolver", "solver_for", "class_terminal", "class_moves",
    "class_successors", "pair_terminal", "pair_moves", "pair_successors", "move_text", "SizeGameStrategy",
    "SizeGameOutcome", "solve_class_game", "solve_weak_game", "weak_game_counterpair", "solve_pair_game",
    "min_winning_budget", "replay", "GAME_KINDS",
]
