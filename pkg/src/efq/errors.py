class EFQError(Exception):
    """Base class for all errors raised by efq."""


class InputError(EFQError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, pos: int | None = None, text: str | None = None):
        self.pos = pos
        self.text = text
        if pos is not None:
            message = f"{message} (at position {pos})"
            if text is not None:
                message += f"\n  {text}\n  {' ' * pos}^"
        super().__init__(message)


class CapExceeded(EFQError):
    """A search was refused because an instance dimension is over its configured cap."""

    def __init__(self, cap: str, value: int, limit: int, detail: str = ""):
        self.cap = cap
        self.value = value
        self.limit = limit
        msg = f"cap '{cap}' exceeded: {value} > {limit}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
