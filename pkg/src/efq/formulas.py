"""FO(Q) syntax: AST, parser, printer, size/depth/free variables, and the evaluator.

Concrete syntax::

    x = y                 equality
    R(x, y)               relation atom
    !phi                  negation
    phi & psi             conjunction
    phi | psi             disjunction (sugar for !(!phi & !psi))
    exists x. phi         width-1, type-(1) quantifier; the body extends to the right
    ham (x,y). phi        width-1, type-(2) quantifier
    haertig (x)(y). (phi, psi)   width-2 quantifier: one tuple and one body per component

Disjunction has no AST node of its own, so sizes follow the official grammar.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import InputError, ParseError
from .quantifiers import QuantifierSet
from .structures import Context, Vocabulary, tuples_respecting


class Formula:
    __slots__ = ()

    def __str__(self):
        return to_text(self)

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True, repr=False)
class Eq(Formula):
    left: str
    right: str

    def __repr__(self):
        return f"Eq({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Rel(Formula):
    name: str
    args: tuple[str, ...]

    def __repr__(self):
        return f"Rel({self.name!r}, {self.args!r})"


@dataclass(frozen=True, repr=False)
class Not(Formula):
    sub: Formula

    def __repr__(self):
        return f"Not({self.sub!r})"


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"And({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Quant(Formula):
    q: str
    bound: tuple[tuple[str, ...], ...]
    subs: tuple[Formula, ...]

    def __post_init__(self):
        if len(self.bound) != len(self.subs) or not self.bound:
            raise InputError(f"quantifier {self.q}: {len(self.bound)} variable tuples for {len(self.subs)} subformulas")
        if any(not t for t in self.bound):
            raise InputError(f"quantifier {self.q}: empty variable tuple")

    def __repr__(self):
        return f"Quant({self.q!r}, {self.bound!r}, {self.subs!r})"


def Or(a: Formula, b: Formula) -> Formula:
    """Disjunction as the official shorthand ``!(!a & !b)``."""
    return Not(And(Not(a), Not(b)))


def Q(name: str, var: str | Sequence[str], body: Formula) -> Quant:
    """Width-1 convenience constructor: ``Q("exists", "x", P(x))``."""
    t = (var,) if isinstance(var, str) else tuple(var)
    return Quant(name, (t,), (body,))


def as_or(f: Formula) -> tuple[Formula, Formula] | None:
    """Return ``(a, b)`` if ``f`` is the disjunction pattern ``!(!a & !b)``."""
    if isinstance(f, Not) and isinstance(f.sub, And):
        l, r = f.sub.left, f.sub.right
        if isinstance(l, Not) and isinstance(r, Not):
            return l.sub, r.sub
    return None


def conjoin(fs: Sequence[Formula]) -> Formula:
    fs = list(fs)
    if not fs:
        raise InputError("empty conjunction")
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disjoin(fs: Sequence[Formula]) -> Formula:
    fs = list(fs)
    if not fs:
        raise InputError("empty disjunction")
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


# -- metadata -------------------------------------------------------------------

def size(f: Formula, or_primitive: bool = False) -> int:
    """Formula size: atoms 1, negation +1, conjunction sums, quantifier sums +1.

    With ``or_primitive`` the disjunction pattern counts like a conjunction.
    """
    if isinstance(f, (Eq, Rel)):
        return 1
    if or_primitive:
        parts = as_or(f)
        if parts is not None:
            return size(parts[0], True) + size(parts[1], True)
    if isinstance(f, Not):
        return size(f.sub, or_primitive) + 1
    if isinstance(f, And):
        return size(f.left, or_primitive) + size(f.right, or_primitive)
    if isinstance(f, Quant):
        return sum(size(s, or_primitive) for s in f.subs) + 1
    raise TypeError(f"not a formula: {f!r}")


def depth(f: Formula) -> int:
    if isinstance(f, (Eq, Rel)):
        return 0
    if isinstance(f, Not):
        return depth(f.sub)
    if isinstance(f, And):
        return max(depth(f.left), depth(f.right))
    if isinstance(f, Quant):
        return 1 + max(depth(s) for s in f.subs)
    raise TypeError(f"not a formula: {f!r}")


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Eq):
        return frozenset((f.left, f.right))
    if isinstance(f, Rel):
        return frozenset(f.args)
    if isinstance(f, Not):
        return free_vars(f.sub)
    if isinstance(f, And):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, Quant):
        out: frozenset[str] = frozenset()
        for t, s in zip(f.bound, f.subs):
            out |= free_vars(s) - set(t)
        return out
    raise TypeError(f"not a formula: {f!r}")


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.sub)
    elif isinstance(f, And):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, Quant):
        for s in f.subs:
            yield from subformulas(s)


def check(f: Formula, vocab: Vocabulary, qset: QuantifierSet) -> None:
    """Validate relation arities and quantifier widths/types."""
    for g in subformulas(f):
        if isinstance(g, Rel):
            if vocab.arity(g.name) != len(g.args):
                raise InputError(f"relation {g.name} has arity {vocab.arity(g.name)}, got {len(g.args)} arguments")
        elif isinstance(g, Quant):
            q = qset.get(g.q)
            if len(g.bound) != q.width:
                raise InputError(f"quantifier {g.q} has width {q.width}, got {len(g.bound)} components")
            for t, a in zip(g.bound, q.arities):
                if len(t) != a:
                    raise InputError(f"quantifier {g.q} binds {a}-tuples, got {t}")


# -- printer --------------------------------------------------------------------

_P_OR, _P_AND, _P_UNARY = 1, 2, 3


def _tuple_text(t: tuple[str, ...], bare_ok: bool) -> str:
    if bare_ok and len(t) == 1:
        return t[0]
    return "(" + ",".join(t) + ")"


def _text(f: Formula, prec: int, closed: bool) -> str:
    """Render ``f`` for a context of precedence ``prec``; ``closed`` means text follows."""
    parts = as_or(f)
    if parts is not None:
        wrap = prec > _P_OR
        body = _text(parts[0], _P_OR, True) + " | " + _text(parts[1], _P_AND, closed and not wrap)
        return f"({body})" if wrap else body
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Rel):
        return f"{f.name}({','.join(f.args)})"
    if isinstance(f, Not):
        inner = _text(f.sub, _P_UNARY, closed)
        return "!" + inner
    if isinstance(f, And):
        wrap = prec > _P_AND
        body = _text(f.left, _P_AND, True) + " & " + _text(f.right, _P_UNARY, closed and not wrap)
        return f"({body})" if wrap else body
    if isinstance(f, Quant):
        if len(f.subs) == 1:
            body = f"{f.q} {_tuple_text(f.bound[0], True)}. {_text(f.subs[0], _P_OR, False)}"
            return f"({body})" if closed else body
        tuples = "".join(_tuple_text(t, False) for t in f.bound)
        subs = ", ".join(_text(s, _P_OR, False) for s in f.subs)
        return f"{f.q} {tuples}. ({subs})"
    raise TypeError(f"not a formula: {f!r}")


def to_text(f: Formula) -> str:
    return _text(f, _P_OR, False)


# -- parser ---------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[()!&|=.,]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[start]!r}", start, text)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, vocab: Vocabulary, qset: QuantifierSet):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.vocab = vocab
        self.qset = qset

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def err(self, msg: str, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok[2], self.text)

    def expect(self, value: str):
        tok = self.peek()
        if tok[1] != value or tok[0] not in ("op",):
            self.err(f"expected {value!r}, found {tok[1] or 'end of input'!r}")
        self.i += 1
        return tok

    def var(self) -> str:
        tok = self.peek()
        if tok[0] != "ident":
            self.err(f"expected a variable, found {tok[1] or 'end of input'!r}")
        self.i += 1
        return tok[1]

    def parse(self) -> Formula:
        f = self.disj()
        if self.peek()[0] != "eof":
            self.err(f"unexpected {self.peek()[1]!r}")
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek() == ("op", "|", self.peek()[2]):
            self.i += 1
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek() == ("op", "&", self.peek()[2]):
            self.i += 1
            f = And(f, self.unary())
        return f

    def quantifier_name(self) -> tuple[str, int] | None:
        """Recognize a quantifier at the cursor; returns (name, tokens consumed)."""
        tok = self.peek()
        if tok[0] != "ident":
            return None
        nxt, nxt2 = self.peek(1), self.peek(2)
        if nxt[1] == "=" and nxt[0] == "op" and nxt2[0] == "num":
            name = f"{tok[1]}={nxt2[1]}"
            if name in self.qset:
                return name, 3
            if tok[1] in ("exactly", "atleast", "atmost"):
                self.err(f"quantifier {name!r} is not in the quantifier set {self.qset.names()}", tok)
            return None
        if tok[1] in self.qset:
            return tok[1], 1
        return None

    def unary(self) -> Formula:
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "!":
            self.i += 1
            return Not(self.unary())
        if tok[0] == "op" and tok[1] == "(":
            self.i += 1
            f = self.disj()
            self.expect(")")
            return f
        qn = self.quantifier_name()
        if qn is not None:
            return self.quant(*qn)
        if tok[0] != "ident":
            self.err(f"expected a formula, found {tok[1] or 'end of input'!r}")
        nxt = self.peek(1)
        if nxt[0] == "op" and nxt[1] == "(":
            return self.rel()
        if nxt[0] == "op" and nxt[1] == "=":
            left = self.var()
            self.i += 1
            return Eq(left, self.var())
        if tok[1] not in self.vocab and nxt[0] == "ident":
            self.err(f"unknown quantifier {tok[1]!r}", tok)
        self.err(f"expected an atom after {tok[1]!r}", nxt)

    def rel(self) -> Formula:
        tok = self.peek()
        name = tok[1]
        if name not in self.vocab:
            self.err(f"unknown relation {name!r}", tok)
        self.i += 1
        self.expect("(")
        args = [self.var()]
        while self.peek()[1] == ",":
            self.i += 1
            args.append(self.var())
        close = self.expect(")")
        if len(args) != self.vocab.arity(name):
            raise ParseError(f"relation {name} has arity {self.vocab.arity(name)}, got {len(args)} arguments",
                             tok[2], self.text)
        return Rel(name, tuple(args))

    def var_tuple(self) -> tuple[str, ...]:
        if self.peek()[1] == "(":
            self.i += 1
            vs = [self.var()]
            while self.peek()[1] == ",":
                self.i += 1
                vs.append(self.var())
            self.expect(")")
            return tuple(vs)
        return (self.var(),)

    def quant(self, name: str, ntoks: int) -> Formula:
        start = self.peek()
        self.i += ntoks
        q = self.qset.get(name)
        tuples = [self.var_tuple() for _ in range(q.width)]
        for t, a in zip(tuples, q.arities):
            if len(t) != a:
                raise ParseError(f"quantifier {name} binds {a}-tuples, got {t}", start[2], self.text)
        self.expect(".")
        if q.width == 1:
            return Quant(name, (tuples[0],), (self.disj(),))
        self.expect("(")
        subs = [self.disj()]
        while self.peek()[1] == ",":
            self.i += 1
            subs.append(self.disj())
        self.expect(")")
        if len(subs) != q.width:
            raise ParseError(f"quantifier {name} has width {q.width}, got {len(subs)} subformulas",
                             start[2], self.text)
        return Quant(name, tuple(tuples), tuple(subs))


def parse(text: str, vocab: Vocabulary, qset: QuantifierSet) -> Formula:
    return _Parser(text, vocab, qset).parse()


# -- semantics --------------------------------------------------------------------

def _eval(structure, env: dict, f: Formula, qset: QuantifierSet) -> bool:
    if isinstance(f, Eq):
        return env[f.left] == env[f.right]
    if isinstance(f, Rel):
        return tuple(env[a] for a in f.args) in structure.relations[f.name]
    if isinstance(f, Not):
        return not _eval(structure, env, f.sub, qset)
    if isinstance(f, And):
        return _eval(structure, env, f.left, qset) and _eval(structure, env, f.right, qset)
    if isinstance(f, Quant):
        q = qset.get(f.q)
        sets = tuple(_extension(structure, env, s, t, qset) for t, s in zip(f.bound, f.subs))
        return bool(q.test(structure.size, sets))
    raise TypeError(f"not a formula: {f!r}")


def _extension(structure, env: dict, f: Formula, x: tuple[str, ...], qset: QuantifierSet) -> frozenset:
    out = []
    inner = dict(env)
    for t in tuples_respecting(structure.size, x):
        inner.update(zip(x, t))
        if _eval(structure, inner, f, qset):
            out.append(t)
    return frozenset(out)


def _check_bound(c: Context, f: Formula, extra: Sequence[str] = ()) -> None:
    missing = free_vars(f) - c.assignment.domain() - set(extra)
    if missing:
        raise InputError(f"free variable(s) {sorted(missing)} are not bound by the assignment {c.assignment}")


def evaluate(c: Context, f: Formula, qset: QuantifierSet) -> bool:
    """Truth of ``f`` in the context ``c``."""
    _check_bound(c, f)
    return _eval(c.structure, c.assignment.as_dict(), f, qset)


def extension(c: Context, f: Formula, x: Sequence[str], qset: QuantifierSet) -> frozenset:
    """The repetition-respecting tuples ``t`` with ``c[x := t]`` satisfying ``f``."""
    x = tuple(x)
    _check_bound(c, f, x)
    return _extension(c.structure, c.assignment.as_dict(), f, x, qset)


def trace(c: Context, f: Formula, qset: QuantifierSet) -> list[tuple[Formula, dict, list]]:
    """Extensions of every quantified subformula met while evaluating ``f`` at top level of each scope."""
    _check_bound(c, f)
    out: list = []

    def walk(env, g):
        if isinstance(g, Not):
            walk(env, g.sub)
        elif isinstance(g, And):
            walk(env, g.left)
            walk(env, g.right)
        elif isinstance(g, Quant):
            exts = [sorted(_extension(c.structure, env, s, t, qset)) for t, s in zip(g.bound, g.subs)]
            out.append((g, dict(env), exts))

    walk(c.assignment.as_dict(), f)
    return out


# -- atoms ------------------------------------------------------------------------

def atoms_over(vocab: Vocabulary, variables: Sequence[str]) -> list[Formula]:
    """Every atomic formula whose variables come from ``variables``, in a fixed order.

    Equalities ``u = v`` for u before v (and ``u = u``), then each relation over all
    argument tuples.
    """
    vs = list(variables)
    out: list[Formula] = []
    for i, u in enumerate(vs):
        for v in vs[i:]:
            out.append(Eq(u, v))
    for name, arity in vocab:
        for args in itertools.product(vs, repeat=arity):
            out.append(Rel(name, tuple(args)))
    return out


def rename_free(f: Formula, mapping: dict[str, str]) -> Formula:
    """Rename free variables (bound variables are assumed disjoint from the mapping's targets)."""
    if isinstance(f, Eq):
        return Eq(mapping.get(f.left, f.left), mapping.get(f.right, f.right))
    if isinstance(f, Rel):
        return Rel(f.name, tuple(mapping.get(a, a) for a in f.args))
    if isinstance(f, Not):
        return Not(rename_free(f.sub, mapping))
    if isinstance(f, And):
        return And(rename_free(f.left, mapping), rename_free(f.right, mapping))
    if isinstance(f, Quant):
        subs = []
        for t, s in zip(f.bound, f.subs):
            m = {k: v for k, v in mapping.items() if k not in t}
            subs.append(rename_free(s, m))
        return Quant(f.q, f.bound, tuple(subs))
    raise TypeError(f"not a formula: {f!r}")
