"""Ring specifications as text.

    spec    := scalars vars? trunc?
    scalars := "F" prime | "Z/" prime "^" int
    vars    := "[" ident ("," ident)* "]"
    trunc   := "/m^" int

Whitespace is ignored.  Variables without a truncation are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ring import RingSpec, is_prime

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"[0-9]+")


class SpecSyntaxError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        self.message = message
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}\n  {text}\n  {' ' * position}^")


@dataclass(frozen=True)
class RingSpecExpr:
    kind: str  # "F" or "Z"
    p: int
    k: int = 1
    variables: tuple[str, ...] = ()
    trunc: int | None = None

    def __str__(self) -> str:
        out = f"F{self.p}" if self.kind == "F" else f"Z/{self.p}^{self.k}"
        if self.variables:
            out += "[" + ",".join(self.variables) + "]"
        if self.trunc is not None:
            out += f"/m^{self.trunc}"
        return out

    def to_ring_spec(self) -> RingSpec:
        N = self.trunc if self.variables else 1
        return RingSpec(self.p, self.k, self.variables, N)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        # keep a map from stripped offsets back to the original text
        self.chars = [(i, c) for i, c in enumerate(text) if not c.isspace()]
        self.src = "".join(c for _, c in self.chars)
        self.pos = 0

    def where(self, pos: int | None = None) -> int:
        pos = self.pos if pos is None else pos
        if pos < len(self.chars):
            return self.chars[pos][0]
        return len(self.text)

    def fail(self, message: str, pos: int | None = None):
        raise SpecSyntaxError(message, self.text, self.where(pos))

    def at_end(self) -> bool:
        return self.pos >= len(self.src)

    def peek(self, literal: str) -> bool:
        return self.src.startswith(literal, self.pos)

    def expect(self, literal: str) -> None:
        if not self.peek(literal):
            self.fail(f"expected {literal!r}")
        self.pos += len(literal)

    def match(self, pattern: re.Pattern, what: str) -> tuple[str, int]:
        m = pattern.match(self.src, self.pos)
        if not m:
            self.fail(f"expected {what}")
        start = self.pos
        self.pos = m.end()
        return m.group(), start


def _positive_int(sc: _Scanner, what: str) -> int:
    digits, start = sc.match(_INT, what)
    value = int(digits)
    if value < 1:
        sc.fail(f"{what} must be at least 1", start)
    return value


def _prime(sc: _Scanner) -> int:
    digits, start = sc.match(_INT, "a prime")
    p = int(digits)
    if not is_prime(p):
        sc.fail(f"{p} is not prime", start)
    return p


def parse_ring_spec(text: str) -> RingSpecExpr:
    sc = _Scanner(text)
    if sc.peek("F"):
        sc.expect("F")
        kind, p, k = "F", _prime(sc), 1
    elif sc.peek("Z/"):
        sc.expect("Z/")
        kind, p = "Z", _prime(sc)
        sc.expect("^")
        k = _positive_int(sc, "a precision exponent")
    else:
        sc.fail("expected 'F' or 'Z/'")
    variables: list[str] = []
    if sc.peek("["):
        sc.expect("[")
        while True:
            name, start = sc.match(_IDENT, "a variable name")
            if name in variables:
                sc.fail(f"duplicate variable {name!r}", start)
            variables.append(name)
            if sc.peek(","):
                sc.expect(",")
                continue
            sc.expect("]")
            break
    trunc = None
    if sc.peek("/"):
        sc.expect("/m^")
        trunc = _positive_int(sc, "a truncation exponent")
    elif variables:
        sc.fail("variables need a truncation '/m^N'")
    if not sc.at_end():
        sc.fail("unexpected trailing input")
    expr = RingSpecExpr(kind, p, k, tuple(variables), trunc)
    try:
        expr.to_ring_spec()
    except ValueError as exc:
        raise SpecSyntaxError(str(exc), text, 0) from None
    return expr


def parse_ring(text: str) -> RingSpec:
    return parse_ring_spec(text).to_ring_spec()


def print_ring_spec(expr: RingSpecExpr) -> str:
    return str(expr)
