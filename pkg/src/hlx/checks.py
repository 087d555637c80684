"""Pass/fail records shared by every validator."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Check:
    ok: bool
    witness: Any = None
    detail: str = ""

    def __bool__(self):
        return self.ok

    def as_dict(self) -> dict:
        d: dict[str, Any] = {"ok": self.ok}
        if self.witness is not None:
            d["witness"] = _plain(self.witness)
        if self.detail:
            d["detail"] = self.detail
        return d


PASS = Check(True)


def fail(witness=None, detail: str = "") -> Check:
    return Check(False, witness, detail)


@dataclass
class Report:
    """Named checks in insertion order.

    Slots listed in ``advisory`` are reported but do not affect ``ok``.
    """

    checks: dict[str, Check] = field(default_factory=dict)
    advisory: set[str] = field(default_factory=set)
    info: dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, check: Check, advisory: bool = False) -> Check:
        self.checks[name] = check
        if advisory:
            self.advisory.add(name)
        return check

    def __getitem__(self, name: str) -> Check:
        return self.checks[name]

    def __contains__(self, name: str) -> bool:
        return name in self.checks

    @property
    def ok(self) -> bool:
        return all(c.ok for n, c in self.checks.items() if n not in self.advisory)

    def __bool__(self):
        return self.ok

    def failures(self) -> list[str]:
        return [n for n, c in self.checks.items() if not c.ok]

    def as_dict(self) -> dict:
        out = {}
        for name, c in self.checks.items():
            d = c.as_dict()
            if name in self.advisory:
                d["advisory"] = True
            out[name] = d
        if self.info:
            out["info"] = _plain(self.info)
        return out

    def __repr__(self):
        marks = ", ".join(f"{n}={'ok' if c.ok else 'FAIL'}" for n, c in self.checks.items())
        return f"Report({marks})"


def _plain(x):
    if isinstance(x, tuple) or isinstance(x, list):
        return [_plain(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    return str(x)
