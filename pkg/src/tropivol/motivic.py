"""Motivic classes through their Poincare polynomials in Z[T, T^-1].

The class of the affine line maps to T^2, so the virtual dimension of a
class is half the degree of its polynomial.  Virtual dimensions are kept
doubled so that half-integers stay exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InvalidFiberError
from .vfcells import DefinableSet, DimFunction, integrate
from .zbar import NEG_INF, POS_INF, ZBar, odot


@dataclass(frozen=True)
class PoincareElement:
    """A Laurent polynomial, stored as sorted (exponent, nonzero coefficient) pairs."""
    terms: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        acc: dict[int, int] = {}
        for e, c in self.terms:
            acc[int(e)] = acc.get(int(e), 0) + int(c)
        object.__setattr__(self, "terms", tuple(sorted((e, c) for e, c in acc.items() if c)))

    @classmethod
    def of(cls, coeffs: Mapping[int, int] | Iterable[tuple[int, int]]) -> PoincareElement:
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        return cls(tuple(items))

    @classmethod
    def monomial(cls, exponent: int, coeff: int = 1) -> PoincareElement:
        return cls(((exponent, coeff),))

    @classmethod
    def const(cls, c: int) -> PoincareElement:
        return cls.monomial(0, c)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int | None:
        return self.terms[-1][0] if self.terms else None

    @property
    def leading_coefficient(self) -> int:
        return self.terms[-1][1] if self.terms else 0

    def __add__(self, other: PoincareElement) -> PoincareElement:
        return PoincareElement(self.terms + other.terms)

    def __neg__(self) -> PoincareElement:
        return PoincareElement(tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: PoincareElement) -> PoincareElement:
        return self + (-other)

    def __mul__(self, other: PoincareElement | int) -> PoincareElement:
        if isinstance(other, int):
            other = PoincareElement.const(other)
        return PoincareElement(tuple((e1 + e2, c1 * c2) for e1, c1 in self.terms for e2, c2 in other.terms))

    __rmul__ = __mul__

    def shift(self, k: int) -> PoincareElement:
        """Multiply by T^k."""
        return PoincareElement(tuple((e + k, c) for e, c in self.terms))

    def __str__(self) -> str:
        return render_poly(self)


L_CLASS = PoincareElement.monomial(2)


def render_poly(p: PoincareElement) -> str:
    if p.is_zero():
        return "0"
    out = []
    for k, (e, c) in enumerate(reversed(p.terms)):
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if e == 0:
            mono = str(a)
        else:
            var = "T" if e == 1 else f"T^{e}"
            mono = var if a == 1 else f"{a}*{var}"
        if k == 0:
            out.append(mono if sign == "+" else f"-{mono}")
        else:
            out.append(f"{sign} {mono}")
    return " ".join(out)


@dataclass(frozen=True)
class VirtualDim:
    """A value in (1/2)Z together with -inf and +inf, stored doubled."""
    doubled: ZBar

    @classmethod
    def of_zbar(cls, z: ZBar) -> VirtualDim:
        return cls(odot(z, z) if z.is_finite else z)

    @property
    def is_integral(self) -> bool:
        return not self.doubled.is_finite or self.doubled.value % 2 == 0

    def to_zbar(self) -> ZBar:
        if not self.is_integral:
            raise ValueError(f"{self} is not an integer")
        return self.doubled if not self.doubled.is_finite else ZBar.fin(self.doubled.value // 2)

    def __add__(self, other: VirtualDim) -> VirtualDim:
        return VirtualDim(odot(self.doubled, other.doubled))

    def __str__(self) -> str:
        d = self.doubled
        if not d.is_finite:
            return str(d)
        return str(d.value // 2) if d.value % 2 == 0 else f"{d.value}/2"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, VirtualDim):
            return self.doubled == other.doubled
        if isinstance(other, (ZBar, int)) and not isinstance(other, bool):
            return self.doubled == VirtualDim.of_zbar(ZBar.coerce(other)).doubled
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.doubled)

    def __lt__(self, other: VirtualDim) -> bool:
        return self.doubled < other.doubled

    def __le__(self, other: VirtualDim) -> bool:
        return self.doubled <= other.doubled


def virtual_dim(p: PoincareElement) -> VirtualDim:
    if p.is_zero():
        return VirtualDim(NEG_INF)
    return VirtualDim(ZBar.fin(p.degree))


@dataclass(frozen=True)
class Component:
    poincare: PoincareElement
    dim: int
    ord_omega: int


@dataclass(frozen=True)
class WeakNeronData:
    dim_x: int
    components: tuple[Component, ...]

    def __post_init__(self):
        for k, c in enumerate(self.components):
            _check_fiber(c.poincare, c.dim, f"component {k}")
            if c.dim > self.dim_x:
                raise InvalidFiberError(f"component {k} has dimension {c.dim} > dim X = {self.dim_x}")


def _check_fiber(p: PoincareElement, dim: int, what: str) -> None:
    if p.degree != 2 * dim or p.leading_coefficient <= 0:
        raise InvalidFiberError(
            f"{what}: polynomial {render_poly(p)} must have degree {2 * dim} and positive leading coefficient")


def motivic_integral(w: WeakNeronData) -> PoincareElement:
    """L^{-dim X} * sum_C [C] L^{-ord_C omega}, realized in Z[T, T^-1]."""
    total = PoincareElement()
    for c in w.components:
        total = total + c.poincare.shift(-2 * c.ord_omega)
    return total.shift(-2 * w.dim_x)


def product_data(a: WeakNeronData, b: WeakNeronData) -> WeakNeronData:
    """Data of the product variety with the product form."""
    comps = tuple(Component(x.poincare * y.poincare, x.dim + y.dim, x.ord_omega + y.ord_omega)
                  for x in a.components for y in b.components)
    return WeakNeronData(a.dim_x + b.dim_x, comps)


@dataclass(frozen=True)
class HaarResult:
    integral: PoincareElement
    dim: VirtualDim


def haar_integral(gk: PoincareElement, g: int, gamma: int) -> HaarResult:
    """L^{-gamma-g} [G_k] for a smooth group of pure dimension g; its dimension is -gamma."""
    _check_fiber(gk, g, "special fiber")
    p = gk.shift(-2 * (gamma + g))
    d = virtual_dim(p)
    if d != ZBar.fin(-gamma):  # pragma: no cover - guaranteed by the degree check
        raise InvalidFiberError(f"dimension {d} differs from {-gamma}")
    return HaarResult(p, d)


@dataclass(frozen=True)
class CompareResult:
    lhs: VirtualDim
    rhs: ZBar
    equal: bool


def compare_check(w: WeakNeronData, a: DefinableSet, phi: DimFunction) -> CompareResult:
    """Virtual dimension of the motivic integral against the dimensional integral."""
    lhs = virtual_dim(motivic_integral(w))
    rhs = integrate(a, phi)
    return CompareResult(lhs, rhs, lhs == rhs)
