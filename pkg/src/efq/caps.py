from dataclasses import dataclass, fields, replace

from .errors import CapExceeded, InputError


@dataclass(frozen=True)
class Caps:
    """Size limits shared by every exponential search in the package.

    Every refusal raises CapExceeded naming the field below.
    """

    max_domain: int = 4
    max_class: int = 4
    max_budget: int = 8
    max_depth: int = 3
    fresh_pool: int = 2
    max_cells: int = 16
    max_universe: int = 2048
    max_witness_tuples: int = 16

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 1:
                raise InputError(f"cap {f.name} must be positive")

    def check(self, name: str, value: int, detail: str = "") -> None:
        limit = getattr(self, name)
        if value > limit:
            raise CapExceeded(name, value, limit, detail)

    def updated(self, **overrides) -> "Caps":
        known = {f.name for f in fields(self)}
        bad = set(overrides) - known
        if bad:
            raise InputError(f"unknown caps: {sorted(bad)}")
        return replace(self, **{k: int(v) for k, v in overrides.items() if v is not None})

    def to_json(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_CAPS = Caps()
