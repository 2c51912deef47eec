"""The max-plus semiring Z-bar = {-inf} u Z u {+inf}.

Addition is ``max`` and multiplication is integer ``+``.  ``-inf`` is the
additive zero and absorbs multiplication, including ``(+inf) * (-inf)``;
``+inf`` absorbs every other element under multiplication.
"""
from __future__ import annotations

from functools import total_ordering
from typing import Iterable

_NEG, _FIN, _POS = -1, 0, 1


@total_ordering
class ZBar:
    __slots__ = ("_kind", "_n")

    def __init__(self, kind: int, n: int = 0):
        if kind not in (_NEG, _FIN, _POS):
            raise ValueError(f"bad ZBar kind {kind!r}")
        self._kind = kind
        self._n = int(n) if kind == _FIN else 0

    @classmethod
    def fin(cls, n: int) -> ZBar:
        return cls(_FIN, n)

    @classmethod
    def coerce(cls, x: ZBar | int) -> ZBar:
        if isinstance(x, ZBar):
            return x
        if isinstance(x, bool) or not isinstance(x, int):
            raise TypeError(f"cannot coerce {x!r} to ZBar")
        return cls(_FIN, x)

    @property
    def is_finite(self) -> bool:
        return self._kind == _FIN

    @property
    def is_neginf(self) -> bool:
        return self._kind == _NEG

    @property
    def is_posinf(self) -> bool:
        return self._kind == _POS

    @property
    def value(self) -> int:
        """The integer value; raises for the infinities."""
        if self._kind != _FIN:
            raise ValueError(f"{self} has no finite value")
        return self._n

    def _key(self) -> tuple[int, int]:
        return (self._kind, self._n)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int) and not isinstance(other, bool):
            other = ZBar.fin(other)
        if not isinstance(other, ZBar):
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other: ZBar | int) -> bool:
        other = ZBar.coerce(other)
        return self._key() < other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def oplus(self, other: ZBar | int) -> ZBar:
        return oplus(self, ZBar.coerce(other))

    def odot(self, other: ZBar | int) -> ZBar:
        return odot(self, ZBar.coerce(other))

    def __repr__(self) -> str:
        if self._kind == _FIN:
            return f"ZBar.fin({self._n})"
        return "NEG_INF" if self._kind == _NEG else "POS_INF"

    def __str__(self) -> str:
        return render(self)


NEG_INF = ZBar(_NEG)
POS_INF = ZBar(_POS)
ZERO = ZBar.fin(0)


def oplus(a: ZBar, b: ZBar) -> ZBar:
    return a if a >= b else b


def odot(a: ZBar, b: ZBar) -> ZBar:
    if a._kind == _NEG or b._kind == _NEG:
        return NEG_INF
    if a._kind == _POS or b._kind == _POS:
        return POS_INF
    return ZBar.fin(a._n + b._n)


def sup(values: Iterable[ZBar]) -> ZBar:
    out = NEG_INF
    for v in values:
        if v > out:
            out = v
    return out


def render(z: ZBar) -> str:
    if z._kind == _NEG:
        return "-inf"
    if z._kind == _POS:
        return "+inf"
    return str(z._n)


def parse(text: str) -> ZBar:
    t = text.strip()
    if t == "-inf":
        return NEG_INF
    if t in ("+inf", "inf"):
        return POS_INF
    try:
        return ZBar.fin(int(t))
    except ValueError:
        raise ValueError(f"not a ZBar literal: {text!r}") from None


def to_json(z: ZBar) -> dict:
    if z._kind == _NEG:
        return {"neginf": True}
    if z._kind == _POS:
        return {"posinf": True}
    return {"fin": z._n}


def from_json(obj: dict) -> ZBar:
    if obj == {"neginf": True}:
        return NEG_INF
    if obj == {"posinf": True}:
        return POS_INF
    if set(obj) == {"fin"} and isinstance(obj["fin"], int) and not isinstance(obj["fin"], bool):
        return ZBar.fin(obj["fin"])
    raise ValueError(f"not a ZBar JSON object: {obj!r}")
