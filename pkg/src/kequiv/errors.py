"""Exception type shared by every module; the CLI turns it into error JSON."""

from __future__ import annotations


class KequivError(ValueError):
    """A structured, machine-readable failure.

    ``code`` is a short stable identifier; ``message`` is the human text.
    """

    def __init__(self, code: str, message: str, **details):
        super().__init__(message)
        self.code = code
        self.message = message
        self.details = details

    def to_dict(self) -> dict:
        out = {"error": self.code, "message": self.message}
        if self.details:
            out["details"] = {k: _plain(v) for k, v in self.details.items()}
        return out


def _plain(value):
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (int, str, bool)) or value is None:
        return value
    return str(value)
