"""Command-line front end: ``efq <command> [options]``.

Every command reads a workspace JSON file (``--workspace``, default
``workspace.json`` or ``$EFQ_WORKSPACE``) holding the vocabulary, named
structures and assignments, the quantifier set and the caps. Contexts are named
``NAME``, ``NAME:ASSIGNMENT`` or ``NAME{x=0,y=1}``.

Exit codes: 0 completed, 1 input error, 2 Player II wins under
``--expect-player-i``, 3 a cap refused the instance.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields
from typing import Callable, Sequence, TextIO

from . import ef_game, oracle, size_games
from .caps import Caps
from .errors import CapExceeded, EFQError, InputError
from .formulas import depth as f_depth
from .formulas import evaluate, parse, size as f_size, to_text, trace
from .quantifiers import BUILTIN_NAMES, QuantifierSet, builtin, check_iso_invariance, custom_monadic
from .size_games import PLAYER_I, PLAYER_II, ClassPosition, PairPosition
from .structures import Context
from .types_engine import closed_set_formula, joint_partition, stabilization_depth, type_formula
from .workspace import Workspace, parse_bindings

EXIT_OK, EXIT_INPUT, EXIT_PLAYER_II, EXIT_CAP = 0, 1, 2, 3
DEFAULT_WORKSPACE = "workspace.json"


# -- shared plumbing ------------------------------------------------------------------------

def _cap_flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("-w", "--workspace", default=os.environ.get("EFQ_WORKSPACE", DEFAULT_WORKSPACE),
                   help="workspace JSON file (default: $EFQ_WORKSPACE or workspace.json)")
    p.add_argument("-q", "--quantifiers", help="comma-separated built-in quantifiers replacing the workspace's set")
    p.add_argument("--json", action="store_true", help="print a machine-readable JSON result")
    p.add_argument("--dump-workspace", metavar="PATH",
                   help="write the effective workspace (after overrides) to PATH")
    caps = p.add_argument_group("caps")
    for f in fields(Caps):
        caps.add_argument(_cap_flag(f.name), type=int, dest=f"cap_{f.name}", metavar="N",
                          help=f"override the {f.name} cap")
    return p


def _game_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--expect-player-i", action="store_true",
                   help="exit with status 2 when Player II wins")
    p.add_argument("--find-min", action="store_true", help="also report the least parameter at which Player I wins")
    p.add_argument("--transcript", action="store_true", help="print a line of optimal play")
    p.add_argument("--witness", action="store_true", help="print a separating formula from the oracle")
    return p


def load_workspace(args) -> Workspace:
    ws = Workspace.load(args.workspace)
    if getattr(args, "quantifiers", None):
        ws.qset = QuantifierSet.of(*[s for s in args.quantifiers.split(",") if s.strip()])
    overrides = {f.name: getattr(args, f"cap_{f.name}", None) for f in fields(Caps)}
    ws.caps = ws.caps.updated(**overrides)
    if getattr(args, "dump_workspace", None):
        ws.dump(args.dump_workspace)
    return ws


def _assign(args) -> dict[str, int]:
    return parse_bindings(args.assign) if getattr(args, "assign", None) else {}


class Reporter:
    """Collects text lines and a JSON payload; prints one or the other."""

    def __init__(self, args, out: TextIO):
        self.as_json = getattr(args, "json", False)
        self.out = out
        self.data: dict = {"command": args.command}

    def line(self, text: str = "") -> None:
        if not self.as_json:
            print(text, file=self.out)

    def set(self, **kw) -> None:
        self.data.update(kw)

    def finish(self) -> None:
        if self.as_json:
            print(json.dumps(self.data, indent=2, sort_keys=True, default=str), file=self.out)


def _winner_line(winner: str) -> str:
    return f"Player {winner} wins"


def _game_exit(args, winner: str) -> int:
    return EXIT_PLAYER_II if args.expect_player_i and winner == PLAYER_II else EXIT_OK


def _report_witness(rep: Reporter, f, left, right, qset, what: str) -> None:
    if f is None:
        rep.line(f"witness: none ({what})")
        rep.set(witness=None)
        return
    ok = oracle.separates(f, left, right, qset)
    if not ok:
        raise EFQError(f"internal error: oracle witness {to_text(f)} does not separate")
    rep.line(f"witness: {to_text(f)}  (size {f_size(f)}, depth {f_depth(f)}; verified)")
    rep.set(witness={"formula": to_text(f), "size": f_size(f), "depth": f_depth(f), "verified": ok})


def _transcript_lines(rep: Reporter, transcript: list[dict]) -> None:
    rep.set(transcript=transcript)
    for i, step in enumerate(transcript, 1):
        rep.line(f"{i:3}. {step['position']}")
        if step["move"] is not None:
            rep.line(f"     {step['actor']}: {step['move']}")
        elif step["note"]:
            rep.line(f"     {step['note']}")


# -- eval ---------------------------------------------------------------------------------

def cmd_eval(args, out: TextIO) -> int:
    ws = load_workspace(args)
    rep = Reporter(args, out)
    c = ws.context(args.structure, _assign(args))
    f = parse(args.formula, ws.vocabulary, ws.qset)
    value = evaluate(c, f, ws.qset)
    rep.line("true" if value else "false")
    rep.set(value=value, formula=to_text(f), size=f_size(f), depth=f_depth(f), context=repr(c))
    if args.or_primitive:
        rep.line(f"size {f_size(f)}; {f_size(f, or_primitive=True)} with primitive disjunction")
        rep.set(size_or_primitive=f_size(f, or_primitive=True))
    if args.trace:
        rows = []
        for g, env, exts in trace(c, f, ws.qset):
            rows.append({"subformula": to_text(g), "assignment": env, "extensions": [[list(t) for t in e] for e in exts]})
            shown = "; ".join(str([t[0] if len(t) == 1 else t for t in e]) for e in exts)
            rep.line(f"  {to_text(g)}  under {env or '{}'}: extension {shown}")
        rep.set(trace=rows)
    rep.finish()
    return EXIT_OK


# -- EF game ------------------------------------------------------------------------------

def ef_principal_line(outcome: ef_game.EFOutcome, max_steps: int = 200) -> list[dict]:
    """The winner follows its strategy; the loser always plays its first legal move."""
    engine = outcome.strategy.engine
    p = outcome.start
    out = []
    for _ in range(max_steps):
        w = ef_game.stuck_winner(p, engine.qset, engine.caps)
        if w is not None:
            note = p.note if p.phase == ef_game.Phase.TERMINAL else f"Player {p.mover} has no legal move"
            out.append({"position": p.describe(), "actor": None, "move": None, "note": f"Player {w} wins: {note}"})
            return out
        actor = p.mover
        if actor == outcome.winner:
            m, note = outcome.strategy.move(p), "strategy"
        else:
            m, note = ef_game.legal_moves(p, engine.qset, engine.caps)[0], "first legal move"
        out.append({"position": p.describe(), "actor": f"Player {actor}", "move": ef_game.move_text(m), "note": note})
        p = engine.successor(p, m)
    return out


def cmd_ef_game(args, out: TextIO) -> int:
    ws = load_workspace(args)
    rep = Reporter(args, out)
    left, right = ws.context(args.left, _assign(args)), ws.context(args.right, _assign(args))
    keep = not args.drop_assignment
    if args.rounds is None and not args.find_min:
        raise InputError("give --rounds, or --find-min to search up to the max_depth cap")
    d = ws.caps.max_depth if args.rounds is None else args.rounds
    rep.set(left=args.left, right=args.right, quantifiers=ws.qset.names())
    if args.find_min:
        least = None
        for k in range(d + 1):
            if ef_game.solve_ef(left, right, k, ws.qset, ws.caps, keep).winner == PLAYER_I:
                least = k
                break
        rep.set(min_rounds=least)
    outcome = ef_game.solve_ef(left, right, d, ws.qset, ws.caps, keep)
    rep.line(_winner_line(outcome.winner))
    rep.set(**outcome.to_json())
    if outcome.attack is not None:
        a = outcome.attack
        rep.line("first move: " + ef_game.move_text(("witness", a.quantifier, a.xs, a.side, a.witness)))
    if args.find_min:
        least = rep.data["min_rounds"]
        rep.line(f"least winning number of rounds: {least}" if least is not None
                 else f"Player I wins no game with at most {d} rounds")
    if args.witness:
        f = oracle.separable_at_depth(left, right, d, ws.qset, ws.caps)
        _report_witness(rep, f, [left], [right], ws.qset, f"no formula of depth <= {d} separates")
    if args.transcript:
        _transcript_lines(rep, ef_principal_line(outcome))
    rep.finish()
    return _game_exit(args, outcome.winner)


# -- formula-size games ---------------------------------------------------------------------

def _classes(ws: Workspace, args) -> tuple[list[Context], list[Context]]:
    if not args.left_class or not args.right_class:
        raise InputError("give --left-class and --right-class (comma-separated context names)")
    return ws.contexts(args.left_class, _assign(args)), ws.contexts(args.right_class, _assign(args))


def _pair(ws: Workspace, args) -> tuple[Context, Context]:
    if args.left and args.right:
        return ws.context(args.left, _assign(args)), ws.context(args.right, _assign(args))
    if args.left or args.right:
        raise InputError("give both --left and --right, or neither")
    names = list(ws.structures)
    if len(names) != 2:
        raise InputError(f"the workspace has {len(names)} structures; name the pair with --left and --right")
    return ws.context(names[0], _assign(args)), ws.context(names[1], _assign(args))


def _budget(ws: Workspace, args) -> int:
    if args.budget is None and not args.find_min:
        raise InputError("give --budget, or --find-min to search up to the max_budget cap")
    s = ws.caps.max_budget if args.budget is None else args.budget
    if s < 1:
        raise InputError("the budget must be at least 1")
    return s


def _size_game_common(rep: Reporter, args, ws: Workspace, kind: str, inputs, s: int, solve: Callable) -> int:
    if args.find_min:
        least = size_games.min_winning_budget(kind, inputs, s, ws.qset, ws.caps, split=not getattr(args, "no_split", False))
        rep.set(min_budget=least)
    outcome = solve(s)
    rep.line(_winner_line(outcome.winner))
    rep.set(**outcome.to_json())
    move = outcome.first_move()
    if move is not None:
        rep.line("first move: " + size_games.move_text(move))
    if args.find_min:
        least = rep.data["min_budget"]
        rep.line(f"least winning budget: {least}" if least is not None else f"Player I wins at no budget <= {s}")
    return outcome


def cmd_size_game(args, out: TextIO) -> int:
    ws = load_workspace(args)
    rep = Reporter(args, out)
    L, R = _classes(ws, args)
    s = _budget(ws, args)
    rep.set(left_class=args.left_class, right_class=args.right_class, quantifiers=ws.qset.names())
    outcome = _size_game_common(rep, args, ws, "class", (L, R), s,
                                lambda b: size_games.solve_class_game(ClassPosition(b, L, R), ws.qset, ws.caps))
    if args.witness:
        _size_witness(rep, ws, L, R, s)
    if args.transcript:
        _transcript_lines(rep, size_games.replay(outcome, [0] * 1000, ws.qset))
    rep.finish()
    return _game_exit(args, outcome.winner)


def _size_witness(rep: Reporter, ws: Workspace, L, R, s: int) -> None:
    if not L or not R:
        rep.line("witness: none needed (an empty class)")
        return
    r = oracle.min_separating_size(L, R, s, ws.qset, ws.caps)
    _report_witness(rep, None if r is None else r.formula, L, R, ws.qset, f"no formula of size <= {s} separates")


def cmd_pair_game(args, out: TextIO) -> int:
    ws = load_workspace(args)
    rep = Reporter(args, out)
    a, b = _pair(ws, args)
    s = _budget(ws, args)
    split = not args.no_split
    rep.set(left=repr(a), right=repr(b), split=split, quantifiers=ws.qset.names())
    outcome = _size_game_common(rep, args, ws, "pair", (a, b), s,
                                lambda u: size_games.solve_pair_game(PairPosition(u, a, b), ws.qset, ws.caps, split))
    if args.witness:
        # The pair game only bounds the size from below; the least separator may be larger.
        r = oracle.min_separating_size(a, b, max(s, ws.caps.max_budget), ws.qset, ws.caps)
        _report_witness(rep, None if r is None else r.formula, [a], [b], ws.qset,
                        f"no formula of size <= {max(s, ws.caps.max_budget)} separates")
    if args.transcript:
        _transcript_lines(rep, size_games.replay(outcome, [0] * 1000, ws.qset))
    rep.finish()
    return _game_exit(args, outcome.winner)


def cmd_weak_game(args, out: TextIO) -> int:
    ws = load_workspace(args)
    rep = Reporter(args, out)
    L, R = _classes(ws, args)
    s = _budget(ws, args)
    rep.set(left_class=args.left_class, right_class=args.right_class, quantifiers=ws.qset.names(), budget=s)
    if args.find_min:
        rep.set(min_budget=size_games.min_winning_budget("weak", (L, R), s, ws.qset, ws.caps))
    winner = size_games.solve_weak_game(s, L, R, ws.qset, ws.caps)
    rep.line(_winner_line(winner))
    rep.set(winner=winner)
    if winner == PLAYER_II:
        a, b = size_games.weak_game_counterpair(s, L, R, ws.qset, ws.caps)
        rep.line(f"Player II picks {a!r} and {b!r}")
        rep.set(counterpair=[repr(a), repr(b)])
    if args.find_min:
        least = rep.data["min_budget"]
        rep.line(f"least winning budget: {least}" if least is not None else f"Player I wins at no budget <= {s}")
    if args.witness:
        report = oracle.weak_vs_strong_report(L, R, s, ws.qset, ws.caps)
        rep.set(report=report.to_json())
        if report.psi is not None:
            rep.line(f"per-pair separators combined: {to_text(report.psi)}  (size {report.psi_size}, "
                     f"{'verified' if report.psi_verified else 'NOT a separator'})")
        rep.line(f"least single separator: {report.true_minimum if report.true_minimum is not None else '-'} "
                 f"({report.minimum_status})")
    if args.transcript and winner == PLAYER_I:
        rep.line("every pair Player II can pick is won by Player I; use size-game on a pair for a transcript")
    rep.finish()
    return _game_exit(args, winner)


# -- synthesis ----------------------------------------------------------------------------

def _depth_separator(L: list[Context], R: list[Context], d: int, ws: Workspace):
    domains = {c.assignment.domain() for c in L + R}
    if len(domains) != 1:
        raise InputError("depth mode needs every context to bind the same variables")
    p = joint_partition(L + R, (), d, ws.qset, ws.caps)
    lc = {p.cell_of(i) for i in range(len(L))}
    rc = {p.cell_of(len(L) + i) for i in range(len(R))}
    if lc & rc:
        return None
    return type_formula(p, next(iter(lc))) if len(lc) == 1 else closed_set_formula(p, lc)


def cmd_synth(args, out: TextIO) -> int:
    ws = load_workspace(args)
    rep = Reporter(args, out)
    if args.left_class or args.right_class:
        L, R = _classes(ws, args)
    else:
        a, b = _pair(ws, args)
        L, R = [a], [b]
    if not L or not R:
        raise InputError("both classes must be nonempty")
    rep.set(mode=args.mode, max=args.max, quantifiers=ws.qset.names())
    if args.mode == "size":
        r = oracle.min_separating_size(L, R, args.max, ws.qset, ws.caps)
        f = None if r is None else r.formula
        found = None if r is None else r.size
    else:
        f = found = None
        for d in range(args.max + 1):
            f = _depth_separator(L, R, d, ws)
            if f is not None:
                found = d
                break
    if f is None:
        rep.line(f"no separating formula with {args.mode} <= {args.max}")
        rep.set(formula=None)
        rep.finish()
        return EXIT_OK
    if not oracle.separates(f, L, R, ws.qset):
        raise EFQError(f"internal error: synthesized formula {to_text(f)} does not separate")
    rep.line(to_text(f))
    rep.line(f"minimal {args.mode}: {found}; size {f_size(f)}; depth {f_depth(f)}"
             + (f"; size with primitive disjunction {f_size(f, or_primitive=True)}" if args.or_primitive else ""))
    rep.set(formula=to_text(f), minimum=found, size=f_size(f), depth=f_depth(f), verified=True)
    if args.or_primitive:
        rep.set(size_or_primitive=f_size(f, or_primitive=True))
    rep.finish()
    return EXIT_OK


# -- types --------------------------------------------------------------------------------

def cmd_types(args, out: TextIO) -> int:
    ws = load_workspace(args)
    rep = Reporter(args, out)
    contexts = ws.contexts(args.structures, _assign(args))
    if not contexts:
        raise InputError("give at least one structure with --structures")
    x = tuple(v.strip() for v in args.vars.split(",") if v.strip()) if args.vars else ()
    p = joint_partition(contexts, x, args.depth, ws.qset, ws.caps)
    stable = stabilization_depth(contexts, x, ws.qset, ws.caps, max_depth=args.depth)
    cells = []
    rep.line(f"{len(p.cells)} cell(s) at depth {args.depth} for variables ({', '.join(x)})")
    if stable < args.depth:
        note = f"depth {args.depth} is past the refinement fixpoint: the partition is already stable at depth {stable}"
        rep.line(f"note: {note}")
        rep.set(note=note)
    labels = _labels(contexts)
    for i, cell in enumerate(p.cells):
        f = p.formula(i)
        _verify_cell(f, p, i, contexts, x, ws)
        members = {}
        for ci, t in sorted(cell):
            members.setdefault(labels[ci], []).append(list(t))
        cells.append({"cell": i, "members": members, "formula": to_text(f), "verified": True})
        rep.line(f"cell {i}: " + "; ".join(f"{k}: {[t[0] if len(t) == 1 else tuple(t) for t in v]}"
                                           for k, v in members.items()))
        rep.line(f"  defined by {to_text(f)}")
    rep.set(depth=args.depth, variables=list(x), stable_from=stable, cells=cells)
    rep.finish()
    return EXIT_OK


def _labels(contexts: Sequence[Context]) -> list[str]:
    out = []
    for i, c in enumerate(contexts):
        name = c.structure.name or f"context{i}"
        label = name if not c.assignment else f"{name}{c.assignment}"
        out.append(label if label not in out else f"{label}#{i}")
    return out


def _verify_cell(f, p, i: int, contexts: Sequence[Context], x: tuple, ws: Workspace) -> None:
    from .structures import tuples_respecting

    for ci, c in enumerate(contexts):
        for t in (tuples_respecting(c.size, x) if x else [()]):
            inside = (ci, tuple(t)) in p.cells[i]
            cc = c.extend(x, t) if x else c
            if evaluate(cc, f, ws.qset) != inside:
                raise EFQError(f"internal error: cell formula {to_text(f)} fails at context {ci}, tuple {t}")


# -- check-quantifier ---------------------------------------------------------------------------

def cmd_check_quantifier(args, out: TextIO) -> int:
    rep = Reporter(args, out)
    qs = []
    if args.predicate:
        qs.append(custom_monadic(args.name or "custom", args.predicate))
    for entry in args.specs:
        qs.append(builtin(entry))
    if not qs:
        if os.path.exists(args.workspace):
            qs = list(load_workspace(args).qset)
        if not qs:
            raise InputError(f"name quantifiers to check (built-ins: {', '.join(BUILTIN_NAMES)}) or give --predicate")
    results, all_ok = [], True
    for q in qs:
        r = check_iso_invariance(q, args.max_domain)
        all_ok &= r.ok
        status = "ok" if r.ok else f"{len(r.violations)} violation(s)"
        how = "exhaustive" if r.exhaustive else "sampled"
        rep.line(f"{q.name}: {status} ({how}, {r.checked} checks, domains <= {args.max_domain})")
        for n, sets, perm in r.violations[:3]:
            rep.line(f"  domain {n}: sets {[sorted(s) for s in sets]} change acceptance under permutation {list(perm)}")
        results.append({"quantifier": q.name, "ok": r.ok, "exhaustive": r.exhaustive, "checked": r.checked,
                        "violations": [{"domain": n, "sets": [sorted(map(list, s)) for s in sets], "permutation": list(perm)}
                                       for n, sets, perm in r.violations]})
    rep.set(results=results, ok=all_ok)
    rep.finish()
    return EXIT_OK


# -- play ---------------------------------------------------------------------------------

class _EOF(Exception):
    pass


class Console:
    """Numbered-choice prompts over a pair of text streams."""

    def __init__(self, inp: TextIO, out: TextIO):
        self.inp, self.out = inp, out

    def say(self, text: str = "") -> None:
        print(text, file=self.out, flush=True)

    def choose(self, prompt: str, options: Sequence[str]) -> int:
        for i, text in enumerate(options, 1):
            self.say(f"  [{i}] {text}")
        while True:
            self.out.write(f"{prompt} (1-{len(options)}): ")
            self.out.flush()
            line = self.inp.readline()
            if not line:
                raise _EOF()
            line = line.strip()
            if line.isdigit() and 1 <= int(line) <= len(options):
                return int(line) - 1
            self.say(f"please enter a number between 1 and {len(options)}")

    def yes(self, prompt: str) -> bool:
        self.out.write(f"{prompt} [y/N]: ")
        self.out.flush()
        line = self.inp.readline()
        if not line:
            raise _EOF()
        return line.strip().lower() in ("y", "yes")


def play_ef(con: Console, left: Context, right: Context, d: int, human: str, ws: Workspace, keep: bool) -> str:
    outcome = ef_game.solve_ef(left, right, d, ws.qset, ws.caps, keep)
    engine = outcome.strategy.engine
    p = outcome.start
    con.say(f"EF game with {d} round(s); the engine plays Player {ef_game.other(human)}")
    while True:
        w = ef_game.stuck_winner(p, ws.qset, ws.caps)
        if w is not None:
            con.say(p.describe())
            if p.phase != ef_game.Phase.TERMINAL:
                con.say(f"Player {p.mover} has no legal move")
            return w
        con.say(p.describe())
        legal = ef_game.legal_moves(p, ws.qset, ws.caps)
        if p.mover == human:
            i = con.choose("your move", [ef_game.move_text(m) for m in legal])
            m = legal[i]
        else:
            m = engine.best_move(p) or legal[0]
            con.say(f"engine (Player {p.mover}): {ef_game.move_text(m)}")
        p = engine.successor(p, m)


def play_size(con: Console, kind: str, start, human: str, ws: Workspace, split: bool = True) -> str:
    solver = size_games.solver_for(ws.qset, ws.caps)
    strat = size_games.SizeGameStrategy(kind, PLAYER_I, solver, split)
    terminal = size_games.class_terminal if kind == "class" else size_games.pair_terminal
    successors = size_games.class_successors if kind == "class" else size_games.pair_successors
    p = start
    con.say(f"{'class' if kind == 'class' else 'model-pair'} formula-size game; the engine plays Player "
            f"{ef_game.other(human)}")
    while True:
        con.say(p.describe())
        t = terminal(p)
        if t is not None:
            con.say(t[1])
            return t[0]
        if kind == "class":
            legal = size_games.class_moves(p, ws.qset)
        else:
            legal = size_games.pair_moves(p, ws.qset, split=split)
        if human == PLAYER_I:
            m = legal[con.choose("your move", [size_games.move_text(m) for m in legal])]
        else:
            m = strat.player_i_move(p) or legal[0]
            con.say(f"engine (Player I): {size_games.move_text(m)}")
        opts = successors(p, m, ws.qset)
        if not opts:
            con.say("Player II has no reply")
            return PLAYER_I
        if human == PLAYER_II:
            i = con.choose("your reply", [label for label, _ in opts])
        else:
            i = strat.player_ii_reply(opts)
            con.say(f"engine (Player II): {opts[i][0]}")
        p = opts[i][1]


def cmd_play(args, out: TextIO, inp: TextIO | None = None) -> int:
    ws = load_workspace(args)
    con = Console(inp or sys.stdin, out)
    human = PLAYER_I if args.side in ("I", "1") else PLAYER_II
    try:
        if args.game == "ef":
            left, right = ws.context(args.left, _assign(args)), ws.context(args.right, _assign(args))
            if args.rounds is None:
                raise InputError("the EF game needs --rounds")
            winner = play_ef(con, left, right, args.rounds, human, ws, not args.drop_assignment)
            L, R = [left], [right]
        elif args.game == "pair":
            a, b = _pair(ws, args)
            if args.budget is None:
                raise InputError("the pair game needs --budget")
            size_games.solve_pair_game(PairPosition(args.budget, a, b), ws.qset, ws.caps, not args.no_split)
            winner = play_size(con, "pair", PairPosition(args.budget, a, b), human, ws, not args.no_split)
            L, R = [a], [b]
        else:
            L, R = _classes(ws, args)
            if args.budget is None:
                raise InputError("the size games need --budget")
            size_games.solve_class_game(ClassPosition(args.budget, L, R), ws.qset, ws.caps)
            if args.game == "weak":
                pairs = [(a, b) for a in L for b in R]
                if human == PLAYER_II:
                    a, b = pairs[con.choose("pick a pair", [f"{a!r} against {b!r}" for a, b in pairs])]
                else:
                    a, b = size_games.weak_game_counterpair(args.budget, L, R, ws.qset, ws.caps) or pairs[0]
                    con.say(f"engine (Player II) picks {a!r} against {b!r}")
                L, R = [a], [b]
            winner = play_size(con, "class", ClassPosition(args.budget, L, R), human, ws)
        con.say(_winner_line(winner))
        if winner == PLAYER_I and con.yes("show a separating formula from the oracle?"):
            _play_witness(con, args, ws, L, R)
    except _EOF:
        con.say("")
        con.say("input closed; game aborted")
        return EXIT_OK
    return EXIT_OK


def _play_witness(con: Console, args, ws: Workspace, L, R) -> None:
    if args.game == "ef":
        f = oracle.separable_at_depth(L[0], R[0], args.rounds, ws.qset, ws.caps)
    else:
        bound = args.budget if args.game != "pair" else max(args.budget, ws.caps.max_budget)
        r = oracle.min_separating_size(L, R, bound, ws.qset, ws.caps)
        f = None if r is None else r.formula
    if f is None or not oracle.separates(f, L, R, ws.qset):
        con.say("the oracle found no separating formula within the caps")
    else:
        con.say(f"witness: {to_text(f)}  (size {f_size(f)}, depth {f_depth(f)}; verified)")


# -- argument parsing -----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error status (2 is reserved for Player II wins)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common, game = _common_parser(), _game_parser()
    parser = _Parser(prog="efq", description="First-order logic with generalized quantifiers: "
                                     "evaluation, model-comparison games, types and formula synthesis.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a formula in a context")
    p.add_argument("--structure", required=True, help="context: NAME, NAME:ASSIGNMENT or NAME{x=0}")
    p.add_argument("--formula", required=True)
    p.add_argument("--assign", help="extra bindings, e.g. x=0,y=1")
    p.add_argument("--trace", action="store_true", help="print the extension of each quantified subformula")
    p.add_argument("--or-primitive", action="store_true", help="also report the size counting | like &")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ef-game", parents=[common, game], help="solve the Ehrenfeucht-Fraisse game")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--rounds", type=int)
    p.add_argument("--assign", help="bindings added to both contexts")
    p.add_argument("--drop-assignment", action="store_true",
                   help="a spillover answer restarts from the empty assignment instead of keeping it")
    p.set_defaults(func=cmd_ef_game)

    p = sub.add_parser("size-game", parents=[common, game], help="solve the class formula-size game")
    p.add_argument("--budget", type=int)
    p.add_argument("--left-class")
    p.add_argument("--right-class")
    p.add_argument("--assign", help="bindings added to every context")
    p.set_defaults(func=cmd_size_game)

    p = sub.add_parser("pair-game", parents=[common, game], help="solve the model-pair formula-size game")
    p.add_argument("--budget", type=int)
    p.add_argument("--left", help="default: the workspace's first structure")
    p.add_argument("--right", help="default: the workspace's second structure")
    p.add_argument("--assign", help="bindings added to both contexts")
    p.add_argument("--no-split", action="store_true", help="remove the budget-splitting move")
    p.set_defaults(func=cmd_pair_game)

    p = sub.add_parser("weak-game", parents=[common, game], help="solve the weak formula-size game")
    p.add_argument("--budget", type=int)
    p.add_argument("--left-class")
    p.add_argument("--right-class")
    p.add_argument("--assign", help="bindings added to every context")
    p.set_defaults(func=cmd_weak_game)

    p = sub.add_parser("synth", parents=[common], help="synthesize a minimal separating formula")
    p.add_argument("--mode", choices=("size", "depth"), default="size")
    p.add_argument("--max", type=int, required=True, help="largest size or depth to try")
    p.add_argument("--left", help="single left context (default: the workspace's first structure)")
    p.add_argument("--right", help="single right context (default: the workspace's second structure)")
    p.add_argument("--left-class")
    p.add_argument("--right-class")
    p.add_argument("--assign", help="bindings added to every context")
    p.add_argument("--or-primitive", action="store_true",
                   help="also report the size counting the disjunction pattern as one connective")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("types", parents=[common], help="list the joint type partition")
    p.add_argument("--structures", required=True, help="comma-separated contexts")
    p.add_argument("--vars", default="", help="comma-separated variable tuple, e.g. x or x,y")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--assign", help="bindings added to every context")
    p.set_defaults(func=cmd_types)

    p = sub.add_parser("play", parents=[common], help="play a game against the solver")
    p.add_argument("game", choices=("ef", "class", "pair", "weak"))
    p.add_argument("--side", choices=("I", "II", "1", "2"), required=True, help="the side you play")
    p.add_argument("--left")
    p.add_argument("--right")
    p.add_argument("--left-class")
    p.add_argument("--right-class")
    p.add_argument("--rounds", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--assign", help="bindings added to every context")
    p.add_argument("--no-split", action="store_true")
    p.add_argument("--drop-assignment", action="store_true")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("check-quantifier", parents=[common], help="check quantifiers for isomorphism invariance")
    p.add_argument("specs", nargs="*", help=f"built-in quantifiers ({', '.join(BUILTIN_NAMES)})")
    p.add_argument("--max-domain-size", dest="max_domain", type=int, default=4)
    p.add_argument("--predicate", help="custom width-1 quantifier: expression over size and domain")
    p.add_argument("--name", help="name for the --predicate quantifier")
    p.set_defaults(func=cmd_check_quantifier)
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, inp: TextIO | None = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.func is cmd_play:
            return cmd_play(args, out, inp)
        return args.func(args, out)
    except CapExceeded as e:
        print(f"efq: cap refused: {e}", file=sys.stderr)
        return EXIT_CAP
    except InputError as e:
        print(f"efq: {e}", file=sys.stderr)
        return EXIT_INPUT
    except KeyboardInterrupt:
        print("efq: interrupted", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
