"""Per-clause verdict containers used by the checkers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

PASS, FAIL, SKIP, INFO = "pass", "fail", "skip", "info"


@dataclass
class Clause:
    name: str
    status: str
    detail: str = ""
    witness: Any = None

    def as_dict(self) -> dict:
        d = {"clause": self.name, "status": self.status, "detail": self.detail}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class ClauseReport:
    title: str
    clauses: list[Clause] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, name, ok, detail="", witness=None) -> Clause:
        status = ok if isinstance(ok, str) else (PASS if ok else FAIL)
        c = Clause(name, status, detail, witness)
        self.clauses.append(c)
        return c

    @property
    def ok(self) -> bool:
        return all(c.status != FAIL for c in self.clauses)

    def __getitem__(self, name) -> Clause:
        for c in self.clauses:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name):
        return any(c.name == name for c in self.clauses)

    def failed(self) -> list[str]:
        return [c.name for c in self.clauses if c.status == FAIL]

    def as_dict(self) -> dict:
        return {"title": self.title, "ok": self.ok,
                "clauses": [c.as_dict() for c in self.clauses], "notes": list(self.notes)}

    def render(self) -> str:
        """Plain-text table: one line per clause, failing witnesses, then notes."""
        lines = [f"== {self.title}: {'ok' if self.ok else 'FAILED'}"]
        for c in self.clauses:
            lines.append(f"  {c.status:<4}  {c.name}" + (f"  -- {c.detail}" if c.detail else ""))
            if c.witness is not None and c.status == FAIL:
                lines.append(f"          witness: {json.dumps(c.witness, default=str)}")
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)

    def merge(self, other: "ClauseReport", prefix: str = "") -> None:
        for c in other.clauses:
            self.clauses.append(Clause(prefix + c.name, c.status, c.detail, c.witness))
        self.notes.extend(other.notes)
