"""Structured verification reports with deterministic serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    witness: Any = None

    def as_dict(self) -> dict:
        out = {"name": self.name, "pass": bool(self.passed)}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    command: str
    params: dict
    results: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    citations: list[str] = field(default_factory=list)
    timing_ms: float | None = None

    def check(self, name: str, passed: bool, witness: Any = None) -> bool:
        self.checks.append(Check(name, bool(passed), witness))
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "results": self.results,
            "checks": [c.as_dict() for c in self.checks],
            "citations": list(self.citations),
            "timing_ms": self.timing_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2, default=_plain) + "\n"

    def to_text(self) -> str:
        lines = [f"{self.command}"]
        for k, v in sorted(self.params.items()):
            lines.append(f"  {k}: {_fmt(v)}")
        lines.append("results:")
        lines.extend(_text_lines(self.results, 1))
        if self.checks:
            lines.append("checks:")
            for c in self.checks:
                lines.append(f"  {'PASS' if c.passed else 'FAIL'}  {c.name}")
                if c.witness is not None:
                    lines.append(f"        witness: {_fmt(c.witness)}")
        if self.citations:
            lines.append("citations:")
            lines.extend(f"  - {c}" for c in self.citations)
        if self.timing_ms is not None:
            lines.append(f"timing_ms: {self.timing_ms:.1f}")
        return "\n".join(lines) + "\n"


def _plain(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (tuple, set, frozenset)):
        return sorted(obj) if isinstance(obj, (set, frozenset)) else list(obj)
    return str(obj)


def _fmt(v) -> str:
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(v, sort_keys=True, default=_plain)
    return str(v)


def _text_lines(obj, depth: int) -> list[str]:
    pad = "  " * depth
    out = []
    for k in sorted(obj):
        v = obj[k]
        if isinstance(v, dict):
            out.append(f"{pad}{k}:")
            out.extend(_text_lines(v, depth + 1))
        else:
            out.append(f"{pad}{k}: {_fmt(v)}")
    return out
