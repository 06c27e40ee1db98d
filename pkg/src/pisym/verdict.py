"""Three-valued answers of bounded checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

__all__ = ["Verdict", "Holds", "Fails", "Unknown", "HOLDS", "FAILS", "UNKNOWN"]

HOLDS, FAILS, UNKNOWN = "holds", "fails", "unknown"


@dataclass(frozen=True)
class Verdict:
    kind: str
    witness: Any = None
    reason: str = ""
    details: tuple = field(default=(), compare=False)

    @property
    def holds(self) -> bool:
        return self.kind == HOLDS

    @property
    def fails(self) -> bool:
        return self.kind == FAILS

    @property
    def unknown(self) -> bool:
        return self.kind == UNKNOWN

    @property
    def exit_code(self) -> int:
        return {HOLDS: 0, FAILS: 1, UNKNOWN: 2}[self.kind]

    def __str__(self) -> str:
        return self.kind if not self.reason else f"{self.kind} ({self.reason})"


def Holds(witness: Any = None, reason: str = "", details: tuple = ()) -> Verdict:
    return Verdict(HOLDS, witness, reason, tuple(details))


def Fails(witness: Any, reason: str = "", details: tuple = ()) -> Verdict:
    """Fails always carries a witness that can be replayed."""
    return Verdict(FAILS, witness, reason, tuple(details))


def Unknown(reason: str = "depth bound reached", details: tuple = ()) -> Verdict:
    return Verdict(UNKNOWN, None, reason, tuple(details))
