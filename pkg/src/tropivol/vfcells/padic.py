"""Elements of K = k((t)) given by finite expansions sum d_e * t^e with
rational digits.  Since the residue field has characteristic 0 digit
arithmetic has no carries, so truncations and angular components are
plain coefficient slices.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ..errors import DomainError


@dataclass(frozen=True)
class PadicConstant:
    terms: tuple[tuple[int, Fraction], ...] = ()

    def __post_init__(self):
        prev = None
        clean = []
        for e, d in self.terms:
            d = Fraction(d)
            if d == 0:
                raise DomainError("digits of a constant must be nonzero")
            if prev is not None and e <= prev:
                raise DomainError("exponents of a constant must be strictly increasing")
            prev = e
            clean.append((int(e), d))
        object.__setattr__(self, "terms", tuple(clean))

    @classmethod
    def from_dict(cls, coeffs: dict[int, Fraction | int]) -> PadicConstant:
        return cls(tuple((e, Fraction(d)) for e, d in sorted(coeffs.items()) if d != 0))

    @classmethod
    def monomial(cls, exponent: int, digit: Fraction | int = 1) -> PadicConstant:
        return cls.from_dict({exponent: digit})

    @classmethod
    def from_digits(cls, start: int, digits: Sequence[Fraction | int]) -> PadicConstant:
        return cls.from_dict({start + k: d for k, d in enumerate(digits)})

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def ord(self) -> int:
        if not self.terms:
            raise DomainError("ord of 0 is undefined")
        return self.terms[0][0]

    def digit(self, e: int) -> Fraction:
        for x, d in self.terms:
            if x == e:
                return d
        return Fraction(0)

    def ac(self, n: int) -> tuple[Fraction, ...]:
        """The first ``n`` digits starting at ``ord``: the angular component ac_n."""
        o = self.ord
        return tuple(self.digit(o + k) for k in range(n))

    def __add__(self, other: PadicConstant) -> PadicConstant:
        out = dict(self.terms)
        for e, d in other.terms:
            out[e] = out.get(e, Fraction(0)) + d
        return PadicConstant.from_dict(out)

    def __neg__(self) -> PadicConstant:
        return PadicConstant(tuple((e, -d) for e, d in self.terms))

    def __sub__(self, other: PadicConstant) -> PadicConstant:
        return self + (-other)

    def __mul__(self, other: PadicConstant) -> PadicConstant:
        out: dict[int, Fraction] = {}
        for e1, d1 in self.terms:
            for e2, d2 in other.terms:
                out[e1 + e2] = out.get(e1 + e2, Fraction(0)) + d1 * d2
        return PadicConstant.from_dict(out)

    def above(self, e: int) -> PadicConstant:
        """Digits at exponents >= e."""
        return PadicConstant(tuple(t for t in self.terms if t[0] >= e))

    def below(self, e: int) -> PadicConstant:
        """Digits at exponents < e."""
        return PadicConstant(tuple(t for t in self.terms if t[0] < e))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, d in self.terms:
            parts.append(f"{d}*t^{e}")
        return " + ".join(parts)


ZERO = PadicConstant()
ONE = PadicConstant.monomial(0)


def mul_truncated(a: Sequence[Fraction], b: Sequence[Fraction], n: int) -> tuple[Fraction, ...]:
    """Product of two digit vectors (power series in t) modulo t^n."""
    out = [Fraction(0)] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[:n - i]):
                out[i + j] += x * y
    return tuple(out)


def inverse_truncated(a: Sequence[Fraction], n: int) -> tuple[Fraction, ...]:
    """Inverse of a unit power series modulo t^n."""
    a = [Fraction(x) for x in a] + [Fraction(0)] * max(0, n - len(a))
    if a[0] == 0:
        raise DomainError("only units are invertible")
    inv = [Fraction(0)] * n
    inv[0] = 1 / a[0]
    for k in range(1, n):
        s = sum(a[j] * inv[k - j] for j in range(1, k + 1))
        inv[k] = -s / a[0]
    return tuple(inv)


def digits_of(values: Iterable[Fraction | int]) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)
