"""S-expression reader and printer with line/column provenance.

Grammar (``;`` starts a comment that runs to the end of the line)::

    doc   := sexpr+
    sexpr := '(' sexpr* ')' | atom
    atom  := integer | rational p/q | symbol

A list normally starts with a symbol naming the form; lists of lists (such
as coefficient vectors of digit pairs) and the empty list are accepted too.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from ..errors import TropivolError

_INT = re.compile(r"[+-]?[0-9]+\Z")
_RAT = re.compile(r"([+-]?[0-9]+)/([0-9]+)\Z")
_SYM = re.compile(r"[A-Za-z_+\-*<>=!?.:][A-Za-z0-9_+\-*/<>=!?.:]*\Z")
_DELIMS = set("();")


class ParseError(TropivolError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Atom:
    value: Union[int, Fraction, str]
    kind: str  # "int" | "rat" | "sym"
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    @property
    def is_symbol(self) -> bool:
        return self.kind == "sym"


@dataclass(frozen=True)
class SList:
    items: tuple[Node, ...]
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    @property
    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Atom) and self.items[0].is_symbol:
            return self.items[0].value
        return None

    @property
    def args(self) -> tuple[Node, ...]:
        return self.items[1:] if self.head is not None else self.items


Node = Union[Atom, SList]


def classify(text: str, line: int, col: int) -> Atom:
    if _INT.match(text):
        return Atom(int(text), "int", line, col)
    m = _RAT.match(text)
    if m:
        den = int(m.group(2))
        if den == 0:
            raise ParseError(f"zero denominator in rational {text!r}", line, col)
        q = Fraction(int(m.group(1)), den)
        return Atom(q.numerator if q.denominator == 1 else q, "int" if q.denominator == 1 else "rat",
                    line, col)
    if _SYM.match(text):
        return Atom(text, "sym", line, col)
    raise ParseError(f"bad atom {text!r}", line, col)


def parse(text: str) -> list[Node]:
    """Parse a whole document into its top-level forms."""
    stack: list[tuple[list[Node], int, int]] = []
    top: list[Node] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "(":
            stack.append(([], line, col))
            i += 1
            col += 1
            continue
        if ch == ")":
            if not stack:
                raise ParseError("unexpected ')'", line, col)
            items, l0, c0 = stack.pop()
            node = SList(tuple(items), l0, c0)
            (stack[-1][0] if stack else top).append(node)
            i += 1
            col += 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in _DELIMS:
            j += 1
        atom = classify(text[i:j], line, col)
        (stack[-1][0] if stack else top).append(atom)
        col += j - i
        i = j
    if stack:
        _, l0, c0 = stack[-1]
        raise ParseError(f"unexpected end of input: '(' opened at {l0}:{c0} is never closed", line, col)
    if not top:
        raise ParseError("empty document", line, col)
    return top


def render_atom(a: Atom) -> str:
    if a.kind == "rat":
        return f"{a.value.numerator}/{a.value.denominator}"
    return str(a.value)


def render(node: Node) -> str:
    if isinstance(node, Atom):
        return render_atom(node)
    return "(" + " ".join(render(x) for x in node.items) + ")"


def render_doc(nodes: list[Node]) -> str:
    return "\n".join(render(x) for x in nodes) + "\n"


def pretty(node: Node, indent: int = 0, width: int = 88) -> str:
    """Multi-line rendering; reparses to the same tree as ``render``."""
    flat = render(node)
    if isinstance(node, Atom) or len(flat) + indent <= width or not node.items:
        return flat
    pad = " " * (indent + 1)
    first = render(node.items[0])
    rest = [pretty(x, indent + 1, width) for x in node.items[1:]]
    return "(" + first + "".join("\n" + pad + r for r in rest) + ")"


# convenience constructors for writers

def sym(s: str) -> Atom:
    return Atom(s, "sym")


def num(x: int | Fraction) -> Atom:
    x = Fraction(x)
    if x.denominator == 1:
        return Atom(int(x), "int")
    return Atom(x, "rat")


def lst(*items: Node | str | int | Fraction) -> SList:
    out: list[Node] = []
    for it in items:
        if isinstance(it, (Atom, SList)):
            out.append(it)
        elif isinstance(it, str):
            out.append(sym(it))
        else:
            out.append(num(it))
    return SList(tuple(out))
