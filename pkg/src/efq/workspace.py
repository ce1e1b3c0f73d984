"""Workspace files: a vocabulary, named structures and assignments, a quantifier set and caps.

File format (JSON)::

    {
      "vocabulary": {"B": 1, "R": 1},
      "structures": {"A": {"domain": 4, "relations": {"B": [[0], [1], [2]], "R": []}}},
      "assignments": {"f": {"x": 0}},
      "quantifiers": ["exactly=3"],
      "caps": {"max_domain": 4}
    }

Only ``vocabulary`` and ``structures`` are required. Contexts are referred to as
``NAME`` (empty assignment), ``NAME:f`` (named assignment ``f``) or
``NAME{x=0,y=1}`` (inline assignment).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .caps import DEFAULT_CAPS, Caps
from .errors import InputError
from .quantifiers import QuantifierSet
from .structures import Assignment, Context, Structure, Vocabulary, dump_structures, load_structures

_REF = re.compile(r"^\s*(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*(?::\s*(?P<asg>[A-Za-z_][A-Za-z0-9_]*)|\{(?P<inline>[^}]*)\})?\s*$")


def parse_bindings(text: str) -> dict[str, int]:
    """Parse ``x=0,y=1`` into a mapping."""
    out: dict[str, int] = {}
    text = text.strip()
    if not text:
        return out
    for part in text.split(","):
        if "=" not in part:
            raise InputError(f"bad binding {part.strip()!r}; expected VAR=ELEMENT")
        var, val = (s.strip() for s in part.split("=", 1))
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", var):
            raise InputError(f"bad variable name {var!r}")
        try:
            out[var] = int(val)
        except ValueError:
            raise InputError(f"binding {var}={val!r}: element must be an integer") from None
    return out


@dataclass
class Workspace:
    vocabulary: Vocabulary
    structures: dict[str, Structure]
    assignments: dict[str, dict[str, int]] = field(default_factory=dict)
    qset: QuantifierSet = field(default_factory=lambda: QuantifierSet(()))
    caps: Caps = DEFAULT_CAPS

    @classmethod
    def from_json(cls, obj: Mapping) -> Workspace:
        if not isinstance(obj, Mapping):
            raise InputError("workspace must be a JSON object")
        vocab, structures = load_structures(obj)
        assignments = {}
        for name, binding in (obj.get("assignments") or {}).items():
            if not isinstance(binding, Mapping) or not all(isinstance(v, int) for v in binding.values()):
                raise InputError(f"assignment {name!r} must map variable names to integers")
            assignments[name] = dict(binding)
        qset = QuantifierSet.from_config(list(obj.get("quantifiers") or []))
        caps = DEFAULT_CAPS.updated(**(obj.get("caps") or {}))
        return cls(vocab, structures, assignments, qset, caps)

    @classmethod
    def load(cls, path: str | Path) -> Workspace:
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise InputError(f"cannot read workspace {path}: {e.strerror}") from None
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
        return cls.from_json(obj)

    def to_json(self) -> dict:
        out = dump_structures(self.vocabulary, self.structures)
        if self.assignments:
            out["assignments"] = {k: dict(v) for k, v in self.assignments.items()}
        out["quantifiers"] = self.qset.to_config()["quantifiers"]
        out["caps"] = self.caps.to_json()
        return out

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")

    # -- lookups --
    def structure(self, name: str) -> Structure:
        try:
            return self.structures[name]
        except KeyError:
            raise InputError(f"unknown structure {name!r}; known: {', '.join(self.structures) or 'none'}") from None

    def context(self, ref: str, extra: Mapping[str, int] | None = None) -> Context:
        """Resolve ``NAME``, ``NAME:assignment`` or ``NAME{x=0}``; ``extra`` bindings are added on top."""
        m = _REF.match(ref)
        if not m:
            raise InputError(f"bad context reference {ref!r}; use NAME, NAME:ASSIGNMENT or NAME{{x=0,...}}")
        s = self.structure(m["name"])
        binding: dict[str, int] = {}
        if m["asg"]:
            if m["asg"] not in self.assignments:
                raise InputError(f"unknown assignment {m['asg']!r}")
            binding.update(self.assignments[m["asg"]])
        if m["inline"] is not None:
            binding.update(parse_bindings(m["inline"]))
        if extra:
            binding.update(extra)
        return Context(s, Assignment.of(binding))

    def contexts(self, refs: str, extra: Mapping[str, int] | None = None) -> list[Context]:
        """Resolve a comma-separated list of references (commas inside braces belong to the assignment)."""
        parts, depth, cur = [], 0, ""
        for ch in refs:
            if ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
            if ch == "," and depth == 0:
                parts.append(cur)
                cur = ""
            else:
                cur += ch
        if cur.strip():
            parts.append(cur)
        return [self.context(p, extra) for p in parts if p.strip()]


__all__ = ["Workspace", "parse_bindings"]
