"""The EF game for generalized quantifiers: explicit move engine and exact solvers.

Two views of the same game are provided.

* ``legal_moves``/``apply`` walk the game move by move (quantifier and witness
  sets, contests, spillover sets, the defender's witness sets, the attacker's
  pick and the defender's reply). ``reference_winner`` is plain minimax over this
  tree and is only meant for tiny instances.
* ``EFSolver`` decides a whole round at once. Every way a round can end leads to
  a position one round shorter, so after computing the value of those
  positions the round reduces to a combinatorial check on witness sets (see
  ``EFSolver._attack``). ``solve_ef`` uses it.

Round accounting: a contested round counts as a round. After the last round the
player who is then defending wins unless the position fails to be a partial
isomorphism, in which case the player then attacking wins. A player without a
legal move loses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence

from .caps import DEFAULT_CAPS, Caps
from .errors import EFQError, InputError
from .quantifiers import Quantifier, QuantifierSet
from .structures import Assignment, Context, atomic_profile, fresh_variables, tuples_respecting

PLAYER_I = "I"
PLAYER_II = "II"


def other(player: str) -> str:
    return PLAYER_II if player == PLAYER_I else PLAYER_I


class IllegalMove(EFQError):
    def __init__(self, move, legal):
        self.move = move
        self.legal = list(legal)
        super().__init__(f"illegal move {move!r}; {len(self.legal)} legal moves available")


# -- basics -----------------------------------------------------------------------

def partial_isomorphism(left: Context, right: Context) -> bool:
    """Do the two contexts agree on every atomic formula over their assigned variables?"""
    if left.assignment.domain() != right.assignment.domain():
        raise InputError("partial isomorphism needs equal assignment domains")
    variables = [k for k, _ in left.assignment.items]
    return atomic_profile(left, variables) == atomic_profile(right, variables)


def variable_choices(bound: Iterable[str], arity: int) -> list[tuple[str, ...]]:
    """Variable tuples worth trying: bound variables plus canonically named fresh ones.

    Fresh names are interchangeable, so only tuples introducing them in pool order
    are produced (every repetition pattern occurs).
    """
    bound = sorted(bound)
    fresh = fresh_variables(bound, arity)
    out = []
    for t in itertools.product(bound + list(fresh), repeat=arity):
        used = [v for v in dict.fromkeys(t) if v in fresh]
        if used == list(fresh[:len(used)]):
            out.append(t)
    return out


def _mask_members(tuples: Sequence[tuple], mask: int) -> frozenset:
    return frozenset(t for i, t in enumerate(tuples) if mask >> i & 1)


def _subsets(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


class _Acceptance:
    """Cached ``Q(n, sets)`` for sets given as bitmasks over fixed tuple lists."""

    def __init__(self):
        self._cache: dict = {}

    def __call__(self, q: Quantifier, n: int, tuple_lists: Sequence[Sequence[tuple]], masks: Sequence[int]) -> bool:
        if q.cardinality is not None:
            return bool(q.cardinality(n, tuple(bin(m).count("1") for m in masks)))
        key = (id(q), n, tuple(tuple(tl) for tl in tuple_lists), tuple(masks))
        v = self._cache.get(key)
        if v is None:
            sets = tuple(_mask_members(tl, m) for tl, m in zip(tuple_lists, masks))
            v = self._cache[key] = bool(q.test(n, sets))
        return v


# -- fast round solver ------------------------------------------------------------------

@dataclass(frozen=True)
class Attack:
    """A winning first move: witness sets on ``side`` (0 = first context), spillover on the other."""

    side: int
    quantifier: str
    xs: tuple[tuple[str, ...], ...]
    witness: tuple[frozenset, ...]
    spillover: tuple[frozenset, ...]


class EFSolver:
    """Exact values of EF positions with a fixed number of rounds left.

    ``keep_assignment`` controls the position reached when the defender answers
    from a spillover set: with True the other model keeps its assignment and
    only the bound tuple is overwritten; with False the assignment is reset to the
    bound tuple alone.
    """

    def __init__(self, qset: QuantifierSet, caps: Caps = DEFAULT_CAPS, keep_assignment: bool = True):
        self.qset = qset
        self.caps = caps
        self.keep_assignment = keep_assignment
        self.acc = _Acceptance()
        self._memo: dict = {}
        self.nodes = 0

    # value of the position reached at the end of a round, for whoever attacks there
    def after(self, m: Context, n: Context, r: int) -> bool:
        if not partial_isomorphism(m, n):
            return True
        return r >= 1 and self.attacker_wins(m, n, r)

    def attacker_wins(self, m: Context, n: Context, r: int) -> bool:
        return self.winning_attack(m, n, r) is not None

    def winning_attack(self, m: Context, n: Context, r: int) -> Attack | None:
        """A winning first move for the attacker at (m, n), phrased in the tuples of m and n."""
        if r < 1:
            return None
        km, kn = m.iso_key, n.iso_key
        key = (km, kn, r) if km <= kn else (kn, km, r)
        if key in self._memo:
            hit = self._memo[key]
            if hit is None:
                return None
            first, second, att = hit
            # the stored sets name elements of one particular pair; reuse them only for that pair
            if (first, second) == (m.key, n.key):
                return att
            if (first, second) == (n.key, m.key):
                return replace(att, side=1 - att.side)
            return self._search(m, n, r)
        self.nodes += 1
        result = self._search(m, n, r) if km != kn else None
        self._memo[key] = None if result is None else (m.key, n.key, result)
        return result

    def _search(self, m: Context, n: Context, r: int) -> Attack | None:
        for side, (M, N) in enumerate(((m, n), (n, m))):
            for q in self.qset:
                for xs in itertools.product(*(variable_choices(M.assignment.domain(), a) for a in q.arities)):
                    found = self._attack(M, N, q, xs, r)
                    if found is not None:
                        return Attack(side, q.name, xs, *found)
        return None

    def _tables(self, M: Context, N: Context, x: tuple[str, ...], r: int):
        tm = tuples_respecting(M.size, x)
        tn = tuples_respecting(N.size, x)
        self.caps.check("max_witness_tuples", max(len(tm), len(tn)), f"tuples for variables {x}")
        Mx = [M.extend(x, a) for a in tm]
        Nx = [N.extend(x, b) for b in tn]
        r1 = r - 1
        # rows over the other model's tuples, as bitmasks
        mn_lose = []  # w -> {w' : the attacker does not win (M,N,hw,h'w')}
        for a in Mx:
            row = 0
            for i, b in enumerate(Nx):
                if not self.after(a, b, r1):
                    row |= 1 << i
            mn_lose.append(row)
        mm_bad = []  # u -> {u' : the defender's contest (u in X, u' outside) would succeed}
        for a in Mx:
            row = 0
            for i, a2 in enumerate(Mx):
                if not self.after(a, a2, r1):
                    row |= 1 << i
            mm_bad.append(row)
        nn_bad = []  # u -> {u' : the attacker's contest (u in X', u' outside) would succeed}
        for b in Nx:
            row = 0
            for i, b2 in enumerate(Nx):
                if not self.after(b, b2, r1):
                    row |= 1 << i
            nn_bad.append(row)
        N0 = N if self.keep_assignment else Context(N.structure, Assignment())
        N0x = [N0.extend(x, b) for b in tn]
        nn0_lose = []  # w in P -> {w' : the attacker does not win (N,N,w,w')}
        for b in N0x:
            row = 0
            for i, b2 in enumerate(N0x):
                if not self.after(b, b2, r1):
                    row |= 1 << i
            nn0_lose.append(row)
        all_m = (1 << len(tm)) - 1
        all_n = (1 << len(tn)) - 1
        safe_spill = all_n  # w' that no contest with any w in M can exploit
        for row in mn_lose:
            safe_spill &= ~row
        return tm, tn, mn_lose, mm_bad, nn_bad, nn0_lose, all_m, all_n, safe_spill

    @staticmethod
    def _closed(mask: int, bad: list[int], size: int) -> bool:
        for i in range(size):
            if mask >> i & 1 and bad[i] & ~mask:
                return False
        return True

    def _attack(self, M: Context, N: Context, q: Quantifier, xs, r: int):
        comps = [self._tables(M, N, x, r) for x in xs]
        # attacker witness candidates per component: closed under the defender's witness contest
        x_opts = []
        for tm, tn, mn_lose, mm_bad, *_ in comps:
            x_opts.append([mk for mk in range(1 << len(tm)) if self._closed(mk, mm_bad, len(tm))])
        # defender witness candidates: accepted on N, closed under the attacker's contest
        y_opts = []
        for tm, tn, mn_lose, mm_bad, nn_bad, *_ in comps:
            y_opts.append([mk for mk in range(1 << len(tn)) if self._closed(mk, nn_bad, len(tn))])
        tms = [c[0] for c in comps]
        tns = [c[1] for c in comps]
        valid_y = [ys for ys in itertools.product(*y_opts) if self.acc(q, N.size, tns, ys)]
        for xsets in itertools.product(*x_opts):
            if not self.acc(q, M.size, tms, xsets):
                continue
            forced = []
            for (tm, tn, mn_lose, *_), xm in zip(comps, xsets):
                a = 0
                for i in range(len(tm)):
                    if xm >> i & 1:
                        a |= mn_lose[i]
                forced.append(a)
            for psets in itertools.product(*(_subsets(c[8]) for c in comps)):
                lo, hi = [], []
                for c, a, pm in zip(comps, forced, psets):
                    nn0_lose = c[5]
                    b2 = 0
                    for i in range(len(c[1])):
                        if pm >> i & 1:
                            b2 |= nn0_lose[i]
                    lo.append(a | pm)
                    hi.append(a | b2)
                if not any(all(y & l == l and y & ~h == 0 for y, l, h in zip(ys, lo, hi)) for ys in valid_y):
                    return (tuple(_mask_members(t, m) for t, m in zip(tms, xsets)),
                            tuple(_mask_members(t, m) for t, m in zip(tns, psets)))
        return None


# -- explicit game -------------------------------------------------------------------

class Phase(str, Enum):
    ROUND_START = "round-start"          # attacker: quantifier, variables, side and witness sets
    AFTER_WITNESS = "after-witness"      # defender: contest a witness set or pass
    CHOOSE_SPILLOVER = "choose-spillover"  # attacker: spillover sets
    AFTER_SPILLOVER = "after-spillover"  # defender: contest a spillover set or choose witness sets
    AFTER_DEFENDER_WITNESS = "after-defender-witness"  # attacker: contest, or pick outside / inside
    DEFENDER_REPLY = "defender-reply"    # defender: answer from the witness or the spillover sets
    TERMINAL = "terminal"


@dataclass(frozen=True)
class EFPosition:
    left: Context
    right: Context
    attacker: str
    rounds_left: int
    phase: Phase = Phase.ROUND_START
    quantifier: str | None = None
    xs: tuple = ()
    side: int = 0
    witness: tuple = ()
    spillover: tuple = ()
    reply: tuple = ()
    pick: tuple | None = None
    winner: str | None = None
    note: str = ""

    @property
    def defender(self) -> str:
        return other(self.attacker)

    @property
    def mover(self) -> str | None:
        if self.phase == Phase.TERMINAL:
            return None
        if self.phase in (Phase.AFTER_WITNESS, Phase.AFTER_SPILLOVER, Phase.DEFENDER_REPLY):
            return self.defender
        return self.attacker

    @property
    def models(self) -> tuple[Context, Context]:
        """(M, N): M holds the attacker's witness sets."""
        return (self.left, self.right) if self.side == 0 else (self.right, self.left)

    @property
    def key(self):
        return (self.left.key, self.right.key, self.attacker, self.rounds_left, self.phase, self.quantifier,
                self.xs, self.side, self.witness, self.spillover, self.reply, self.pick, self.winner)

    def describe(self) -> str:
        def ctx(c):
            return f"{c.structure.name or '|' + str(c.size) + '|'}{c.assignment}"
        head = f"[{self.phase.value}] {ctx(self.left)} vs {ctx(self.right)}; attacker: Player {self.attacker}; rounds left: {self.rounds_left}"
        if self.phase == Phase.TERMINAL:
            return f"{head}; Player {self.winner} wins ({self.note})"
        parts = [head]
        if self.quantifier:
            parts.append(f"Q={self.quantifier} x={list(map(list, self.xs))} side={'left' if self.side == 0 else 'right'}")
        if self.witness:
            parts.append(f"X={[sorted(s) for s in self.witness]}")
        if self.spillover:
            parts.append(f"P={[sorted(s) for s in self.spillover]}")
        if self.reply:
            parts.append(f"X'={[sorted(s) for s in self.reply]}")
        if self.pick:
            parts.append(f"picked component {self.pick[0] + 1}, w'={self.pick[1]}")
        return "; ".join(parts)


def start_position(left: Context, right: Context, d: int) -> EFPosition:
    if d < 0:
        raise InputError("number of rounds must be nonnegative")
    p = EFPosition(left, right, PLAYER_I, d)
    if not partial_isomorphism(left, right):
        return replace(p, phase=Phase.TERMINAL, winner=PLAYER_I, note="the initial assignments are not a partial isomorphism")
    if d == 0:
        return replace(p, phase=Phase.TERMINAL, winner=PLAYER_II, note="no rounds; partial isomorphism holds")
    return p


def _end_round(p: EFPosition, new_left: Context, new_right: Context, swap: bool, note: str) -> EFPosition:
    attacker = other(p.attacker) if swap else p.attacker
    base = EFPosition(new_left, new_right, attacker, p.rounds_left - 1)
    if not partial_isomorphism(new_left, new_right):
        return replace(base, phase=Phase.TERMINAL, winner=attacker, note=f"{note}; not a partial isomorphism")
    if base.rounds_left == 0:
        return replace(base, phase=Phase.TERMINAL, winner=other(attacker), note=f"{note}; rounds exhausted")
    return base


def _all_subsets(tuples: Sequence[tuple]) -> list[frozenset]:
    return [_mask_members(tuples, m) for m in range(1 << len(tuples))]


def legal_moves(p: EFPosition, qset: QuantifierSet, caps: Caps = DEFAULT_CAPS) -> list[tuple]:
    """Every legal move of the player to move; an empty list means that player loses."""
    if p.phase == Phase.TERMINAL:
        return []
    M, N = p.models
    if p.phase == Phase.ROUND_START:
        out = []
        for side, W in enumerate((p.left, p.right)):
            for q in qset:
                for xs in itertools.product(*(variable_choices(W.assignment.domain(), a) for a in q.arities)):
                    tls = [tuples_respecting(W.size, x) for x in xs]
                    for t in tls:
                        caps.check("max_witness_tuples", len(t))
                    for sets in itertools.product(*(_all_subsets(t) for t in tls)):
                        if q.test(W.size, tuple(sets)):
                            out.append(("witness", q.name, xs, side, tuple(sets)))
        return out
    q = qset.get(p.quantifier)
    tms = [tuples_respecting(M.size, x) for x in p.xs]
    tns = [tuples_respecting(N.size, x) for x in p.xs]
    if p.phase == Phase.AFTER_WITNESS:
        out = [("pass",)]
        for j, (X, tm) in enumerate(zip(p.witness, tms)):
            for u in sorted(X):
                for u2 in tm:
                    if u2 not in X:
                        out.append(("contest-witness", j, u, u2))
        return out
    if p.phase == Phase.CHOOSE_SPILLOVER:
        return [("spillover", tuple(sets)) for sets in itertools.product(*(_all_subsets(t) for t in tns))]
    if p.phase == Phase.AFTER_SPILLOVER:
        out = []
        for j, (P, tm) in enumerate(zip(p.spillover, tms)):
            for w2 in sorted(P):
                for w in tm:
                    out.append(("contest-spillover", j, w2, w))
        for sets in itertools.product(*(_all_subsets(t) for t in tns)):
            if all(P <= Y for P, Y in zip(p.spillover, sets)) and q.test(N.size, tuple(sets)):
                out.append(("witness", tuple(sets)))
        return out
    if p.phase == Phase.AFTER_DEFENDER_WITNESS:
        out = []
        for j, (Y, tn) in enumerate(zip(p.reply, tns)):
            for u in sorted(Y):
                for u2 in tn:
                    if u2 not in Y:
                        out.append(("contest-witness", j, u, u2))
        for j, (X, Y, tn) in enumerate(zip(p.witness, p.reply, tns)):
            for w2 in tn:
                if w2 not in Y:
                    for w in sorted(X):
                        out.append(("outside", j, w2, w))
            for w2 in sorted(Y):
                out.append(("inside", j, w2))
        return out
    if p.phase == Phase.DEFENDER_REPLY:
        j, _ = p.pick
        out = [("from-witness", w) for w in sorted(p.witness[j])]
        out += [("from-spillover", w) for w in sorted(p.spillover[j])]
        return out
    raise AssertionError(p.phase)


def _oriented(p: EFPosition, m_ctx: Context, n_ctx: Context) -> tuple[Context, Context]:
    return (m_ctx, n_ctx) if p.side == 0 else (n_ctx, m_ctx)


def apply(p: EFPosition, move: tuple, qset: QuantifierSet, caps: Caps = DEFAULT_CAPS,
          keep_assignment: bool = True, check: bool = True) -> EFPosition:
    """The position after ``move``; raises IllegalMove if it is not legal."""
    if check:
        legal = legal_moves(p, qset, caps)
        if move not in legal:
            raise IllegalMove(move, legal)
    kind = move[0]
    if p.phase == Phase.ROUND_START:
        _, qname, xs, side, sets = move
        return replace(p, phase=Phase.AFTER_WITNESS, quantifier=qname, xs=xs, side=side, witness=sets)
    M, N = p.models
    if p.phase == Phase.AFTER_WITNESS:
        if kind == "pass":
            return replace(p, phase=Phase.CHOOSE_SPILLOVER)
        _, j, u, u2 = move
        x = p.xs[j]
        return _end_round(p, M.extend(x, u), M.extend(x, u2), False, "defender contested a witness set")
    if p.phase == Phase.CHOOSE_SPILLOVER:
        return replace(p, phase=Phase.AFTER_SPILLOVER, spillover=move[1])
    if p.phase == Phase.AFTER_SPILLOVER:
        if kind == "witness":
            return replace(p, phase=Phase.AFTER_DEFENDER_WITNESS, reply=move[1])
        _, j, w2, w = move
        x = p.xs[j]
        a, b = _oriented(p, M.extend(x, w), N.extend(x, w2))
        return _end_round(p, a, b, False, "defender contested a spillover set")
    if p.phase == Phase.AFTER_DEFENDER_WITNESS:
        if kind == "contest-witness":
            _, j, u, u2 = move
            x = p.xs[j]
            return _end_round(p, N.extend(x, u), N.extend(x, u2), True, "attacker contested a witness set")
        if kind == "outside":
            _, j, w2, w = move
            x = p.xs[j]
            a, b = _oriented(p, M.extend(x, w), N.extend(x, w2))
            return _end_round(p, a, b, True, "attacker picked outside the defender's witness set")
        _, j, w2 = move
        return replace(p, phase=Phase.DEFENDER_REPLY, pick=(j, w2))
    if p.phase == Phase.DEFENDER_REPLY:
        j, w2 = p.pick
        x = p.xs[j]
        w = move[1]
        if kind == "from-witness":
            a, b = _oriented(p, M.extend(x, w), N.extend(x, w2))
            return _end_round(p, a, b, False, "defender answered from the witness set")
        N0 = N if keep_assignment else Context(N.structure, Assignment())
        return _end_round(p, N0.extend(x, w), N0.extend(x, w2), False, "defender answered from the spillover set")
    raise IllegalMove(move, [])


def stuck_winner(p: EFPosition, qset: QuantifierSet, caps: Caps = DEFAULT_CAPS) -> str | None:
    """Winner of a terminal position, or of one where the player to move has no legal move."""
    if p.phase == Phase.TERMINAL:
        return p.winner
    if not legal_moves(p, qset, caps):
        return other(p.mover)
    return None


# -- explicit minimax -----------------------------------------------------------------

class ExplicitSolver:
    """Minimax over the explicit move tree.

    With ``solver`` given, positions at the start of a round are valued by the
    round solver instead of being expanded (used to pick moves for a strategy);
    without it the whole tree is searched (the reference solver, tiny inputs only).
    """

    def __init__(self, qset: QuantifierSet, caps: Caps = DEFAULT_CAPS, keep_assignment: bool = True,
                 solver: EFSolver | None = None):
        self.qset = qset
        self.caps = caps
        self.keep_assignment = keep_assignment
        self.solver = solver
        self._memo: dict = {}

    def winner(self, p: EFPosition) -> str:
        if p.phase == Phase.TERMINAL:
            return p.winner
        if self.solver is not None and p.phase == Phase.ROUND_START:
            wins = self.solver.attacker_wins(p.left, p.right, p.rounds_left)
            return p.attacker if wins else p.defender
        k = p.key
        if k in self._memo:
            return self._memo[k]
        mover = p.mover
        result = other(mover)
        for m in legal_moves(p, self.qset, self.caps):
            if self.winner(self.successor(p, m)) == mover:
                result = mover
                break
        self._memo[k] = result
        return result

    def successor(self, p: EFPosition, move: tuple) -> EFPosition:
        return apply(p, move, self.qset, self.caps, self.keep_assignment, check=False)

    def best_move(self, p: EFPosition) -> tuple | None:
        """A move keeping the player to move winning, if there is one."""
        mover = p.mover
        if mover is None:
            return None
        if self.solver is not None and p.phase == Phase.ROUND_START:
            att = self.solver.winning_attack(p.left, p.right, p.rounds_left)
            if att is not None and mover == p.attacker:
                return ("witness", att.quantifier, att.xs, att.side, att.witness)
        if self.solver is not None and p.phase == Phase.CHOOSE_SPILLOVER:
            att = self.solver.winning_attack(p.left, p.right, p.rounds_left)
            if (att is not None and (att.quantifier, att.xs, att.side, att.witness)
                    == (p.quantifier, p.xs, p.side, p.witness)):
                return ("spillover", att.spillover)
        for m in legal_moves(p, self.qset, self.caps):
            if self.winner(self.successor(p, m)) == mover:
                return m
        return None


def reference_winner(left: Context, right: Context, d: int, qset: QuantifierSet, caps: Caps = DEFAULT_CAPS,
                     keep_assignment: bool = True) -> str:
    """Winner by exhaustive search of the explicit game tree (tiny instances only)."""
    return ExplicitSolver(qset, caps, keep_assignment).winner(start_position(left, right, d))


# -- outcomes, strategies, replay ----------------------------------------------------------

@dataclass
class Strategy:
    """The winner's moves, computed on demand and recorded per position key."""

    holder: str
    engine: ExplicitSolver = field(repr=False)
    table: dict = field(default_factory=dict, repr=False)

    def move(self, p: EFPosition) -> tuple:
        k = p.key
        if k not in self.table:
            m = self.engine.best_move(p)
            if m is None:
                raise EFQError(f"no winning move for Player {self.holder} at {p.describe()}")
            self.table[k] = m
        return self.table[k]

    def materialize(self, start: EFPosition, max_positions: int = 100_000) -> dict:
        """Explore every line of play against the opponent and record the holder's moves."""
        seen = set()
        stack = [start]
        while stack:
            p = stack.pop()
            if p.key in seen or p.phase == Phase.TERMINAL:
                continue
            seen.add(p.key)
            if len(seen) > max_positions:
                raise EFQError("strategy exploration exceeded the position limit")
            if p.mover == self.holder:
                stack.append(self.engine.successor(p, self.move(p)))
            else:
                for m in legal_moves(p, self.engine.qset, self.engine.caps):
                    stack.append(self.engine.successor(p, m))
        return self.table


@dataclass
class EFOutcome:
    winner: str
    rounds: int
    start: EFPosition
    strategy: Strategy
    attack: Attack | None = None
    solver: EFSolver | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        out = {"winner": self.winner, "rounds": self.rounds}
        if self.attack is not None:
            a = self.attack
            out["first_move"] = {
                "quantifier": a.quantifier, "variables": [list(x) for x in a.xs],
                "side": "left" if a.side == 0 else "right",
                "witness": [sorted(map(list, s)) for s in a.witness],
                "spillover": [sorted(map(list, s)) for s in a.spillover],
            }
        return out


_SOLVERS: dict = {}


def solver_for(qset: QuantifierSet, caps: Caps = DEFAULT_CAPS, keep_assignment: bool = True) -> EFSolver:
    key = (id(qset), caps, keep_assignment)
    s = _SOLVERS.get(key)
    if s is None or s.qset is not qset:
        s = _SOLVERS[key] = EFSolver(qset, caps, keep_assignment)
    return s


def solve_ef(left: Context, right: Context, d: int, qset: QuantifierSet, caps: Caps = DEFAULT_CAPS,
             keep_assignment: bool = True) -> EFOutcome:
    """Winner of the d-round EF game from (left, right), with a strategy for the winner."""
    caps.check("max_depth", d, "number of rounds")
    caps.check("max_domain", max(left.size, right.size))
    solver = solver_for(qset, caps, keep_assignment)
    start = start_position(left, right, d)
    attack = None
    if start.phase == Phase.TERMINAL:
        winner = start.winner
    else:
        attack = solver.winning_attack(left, right, d)
        winner = PLAYER_I if attack is not None else PLAYER_II
    engine = ExplicitSolver(qset, caps, keep_assignment, solver)
    return EFOutcome(winner, d, start, Strategy(winner, engine), attack, solver)


def move_text(move: tuple) -> str:
    kind = move[0]
    if kind == "witness" and len(move) == 5:
        _, q, xs, side, sets = move
        return f"choose {q} over {', '.join('(' + ','.join(x) + ')' for x in xs)} with witness sets {[sorted(s) for s in sets]} in the {'left' if side == 0 else 'right'} model"
    if kind == "witness":
        return f"choose witness sets {[sorted(s) for s in move[1]]}"
    if kind == "spillover":
        return f"choose spillover sets {[sorted(s) for s in move[1]]}"
    if kind == "pass":
        return "let the round continue"
    if kind == "contest-witness":
        return f"contest witness set {move[1] + 1} with {move[2]} inside and {move[3]} outside"
    if kind == "contest-spillover":
        return f"contest spillover set {move[1] + 1} with {move[2]} against {move[3]}"
    if kind == "outside":
        return f"pick {move[2]} outside component {move[1] + 1} of the defender's sets, against {move[3]}"
    if kind == "inside":
        return f"pick {move[2]} inside component {move[1] + 1} of the defender's sets"
    if kind == "from-witness":
        return f"answer with {move[1]} from the witness set"
    if kind == "from-spillover":
        return f"answer with {move[1]} from the spillover set"
    return repr(move)


def replay(outcome: EFOutcome, opponent_moves: Sequence[tuple]) -> list[dict]:
    """Play the stored strategy against the given opponent moves.

    Returns a transcript of ``{position, actor, move, note}`` entries ending at a
    terminal position or when the opponent's moves run out.
    """
    engine = outcome.strategy.engine
    p = outcome.start
    moves = list(opponent_moves)
    transcript = []
    while True:
        w = stuck_winner(p, engine.qset, engine.caps)
        if w is not None:
            note = p.note if p.phase == Phase.TERMINAL else f"Player {p.mover} has no legal move"
            transcript.append({"position": p.describe(), "actor": None, "move": None, "note": f"Player {w} wins: {note}"})
            return transcript
        actor = p.mover
        if actor == outcome.winner:
            m = outcome.strategy.move(p)
            note = "strategy"
        else:
            if not moves:
                transcript.append({"position": p.describe(), "actor": actor, "move": None, "note": "awaiting opponent move"})
                return transcript
            m = tuple(moves.pop(0))
            legal = legal_moves(p, engine.qset, engine.caps)
            if m not in legal:
                raise IllegalMove(m, legal)
            note = "opponent"
        transcript.append({"position": p.describe(), "actor": f"Player {actor}", "move": move_text(m), "note": note})
        p = engine.successor(p, m)


__all__ = [
    "PLAYER_I", "PLAYER_II", "other", "partial_isomorphism", "variable_choices", "EFSolver", "Attack",
    "Phase", "EFPosition", "start_position", "legal_moves", "apply", "stuck_winner", "ExplicitSolver",
    "reference_winner", "Strategy", "EFOutcome", "solve_ef", "replay", "move_text", "IllegalMove", "solver_for",
]
