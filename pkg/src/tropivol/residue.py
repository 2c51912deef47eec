"""Coordinate cells in k^m over the algebraically closed residue field
(characteristic 0, digits modelled in Q), their dimensions, and the
max-plus integral of piecewise-constant dimensional functions on them.

A coordinate is one of

* ``Free(excluded)``: any value except finitely many; dimension 1.
  ``Free()`` is the whole line and ``FREE_NONZERO`` removes 0.
* ``Fixed(q)``: the single value ``q``; dimension 0.

A cell may instead carry a declared dimension (an opaque constructible set
such as a special fibre); then its coordinates only fix the ambient width.
Opaque cells are treated as generic: they meet a cell made of Free markers
in themselves, meet an identical opaque cell in itself, and any other
intersection is unsupported.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import ArityError, DomainError, UnsupportedError
from .zbar import NEG_INF, ZBar, odot, sup


@dataclass(frozen=True)
class Free:
    excluded: frozenset[Fraction] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "excluded", frozenset(Fraction(q) for q in self.excluded))

    dim = 1

    def contains(self, v: Fraction) -> bool:
        return v not in self.excluded

    def representative(self) -> Fraction:
        v = 0
        while Fraction(v) in self.excluded:
            v += 1
        return Fraction(v)


@dataclass(frozen=True)
class Fixed:
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))

    dim = 0

    def contains(self, v: Fraction) -> bool:
        return v == self.value

    def representative(self) -> Fraction:
        return self.value


Marker = Union[Free, Fixed]
FREE = Free()
FREE_NONZERO = Free(frozenset({Fraction(0)}))


def intersect_markers(a: Marker, b: Marker) -> Marker | None:
    """None means the intersection is empty."""
    if isinstance(a, Free) and isinstance(b, Free):
        return Free(a.excluded | b.excluded)
    if isinstance(a, Fixed) and isinstance(b, Fixed):
        return a if a.value == b.value else None
    fixed, free = (a, b) if isinstance(a, Fixed) else (b, a)
    return fixed if free.contains(fixed.value) else None


@dataclass(frozen=True)
class ResiduePoint:
    """A point of k^m; ``atom`` marks the generic point of an opaque cell."""
    values: tuple[Fraction, ...]
    atom: ResidueCell | None = None


@dataclass(frozen=True)
class ResidueCell:
    coords: tuple[Marker, ...] = ()
    declared_dim: int | None = None

    def __post_init__(self):
        if self.declared_dim is not None and self.declared_dim < 0:
            raise DomainError("declared dimension must be non-negative")

    @classmethod
    def opaque(cls, dim: int, width: int | None = None) -> ResidueCell:
        return cls((FREE,) * (dim if width is None else width), dim)

    @property
    def width(self) -> int:
        return len(self.coords)

    @property
    def is_opaque(self) -> bool:
        return self.declared_dim is not None

    @property
    def dim(self) -> int:
        if self.declared_dim is not None:
            return self.declared_dim
        return sum(m.dim for m in self.coords)

    def _is_free_box(self) -> bool:
        return not self.is_opaque and all(isinstance(m, Free) for m in self.coords)

    def representative(self) -> ResiduePoint:
        vals = tuple(m.representative() for m in self.coords)
        return ResiduePoint(vals, self if self.is_opaque else None)

    def contains(self, p: ResiduePoint) -> bool:
        if len(p.values) != self.width:
            raise ArityError("residue point width mismatch")
        if self.is_opaque:
            return p.atom == self
        if p.atom is not None:
            if self._is_free_box():
                return True
            raise UnsupportedError("membership of an opaque generic point in a fixed-coordinate cell")
        return all(m.contains(v) for m, v in zip(self.coords, p.values))


def intersect_cells(a: ResidueCell, b: ResidueCell) -> ResidueCell | None:
    if a.width != b.width:
        raise ArityError(f"residue widths differ: {a.width} vs {b.width}")
    if a.is_opaque or b.is_opaque:
        if a == b:
            return a
        if b._is_free_box():
            return a
        if a._is_free_box():
            return b
        raise UnsupportedError("intersection of an opaque residue cell with a non-generic cell")
    out = []
    for x, y in zip(a.coords, b.coords):
        m = intersect_markers(x, y)
        if m is None:
            return None
        out.append(m)
    return ResidueCell(tuple(out))


def product_cells(a: ResidueCell, b: ResidueCell) -> ResidueCell:
    coords = a.coords + b.coords
    if a.is_opaque or b.is_opaque:
        return ResidueCell(coords, a.dim + b.dim)
    return ResidueCell(coords)


@dataclass(frozen=True)
class ResidueSet:
    width: int
    cells: tuple[ResidueCell, ...] = ()

    def __post_init__(self):
        for c in self.cells:
            if c.width != self.width:
                raise ArityError(f"residue cell of width {c.width} in a set of width {self.width}")

    @classmethod
    def point(cls) -> ResidueSet:
        """k^0: a single point, the neutral factor for products."""
        return cls(0, (ResidueCell(),))

    @classmethod
    def space(cls, width: int) -> ResidueSet:
        return cls(width, (ResidueCell((FREE,) * width),))

    @classmethod
    def empty(cls, width: int) -> ResidueSet:
        return cls(width, ())

    @classmethod
    def of(cls, cells: Sequence[ResidueCell]) -> ResidueSet:
        if not cells:
            raise ArityError("width of an empty residue set is ambiguous; use ResidueSet.empty")
        return cls(cells[0].width, tuple(cells))

    def is_empty(self) -> bool:
        return not self.cells

    def contains(self, p: ResiduePoint) -> bool:
        return any(c.contains(p) for c in self.cells)


def dimension(s: ResidueSet) -> ZBar:
    return sup(ZBar.fin(c.dim) for c in s.cells)


def integrate_residue(s: ResidueSet, values: Sequence[ZBar]) -> ZBar:
    if len(values) != len(s.cells):
        raise ArityError(f"{len(values)} values for {len(s.cells)} residue cells")
    return sup(odot(ZBar.fin(c.dim), ZBar.coerce(v)) for c, v in zip(s.cells, values))


def product(a: ResidueSet, b: ResidueSet) -> ResidueSet:
    return ResidueSet(a.width + b.width, tuple(product_cells(x, y) for x in a.cells for y in b.cells))


def intersect(a: ResidueSet, b: ResidueSet) -> ResidueSet:
    if a.width != b.width:
        raise ArityError(f"residue widths differ: {a.width} vs {b.width}")
    cells = []
    for x in a.cells:
        for y in b.cells:
            c = intersect_cells(x, y)
            if c is not None:
                cells.append(c)
    return ResidueSet(a.width, tuple(cells))


def union(sets: Iterable[ResidueSet], width: int) -> ResidueSet:
    cells: list[ResidueCell] = []
    for s in sets:
        if s.width != width:
            raise ArityError("residue widths differ in union")
        cells.extend(s.cells)
    return ResidueSet(width, tuple(cells))


@dataclass(frozen=True)
class FubiniResult:
    iterated: ZBar
    joint: ZBar
    equal: bool


def residue_fubini_check(x: ResidueSet, y: ResidueSet, phi: Sequence[Sequence[ZBar]]) -> FubiniResult:
    """Compare the iterated and joint integrals of a function constant on each x_i * y_j."""
    if len(phi) != len(x.cells) or any(len(row) != len(y.cells) for row in phi):
        raise ArityError("phi must be a len(x.cells) by len(y.cells) matrix")
    phi = [[ZBar.coerce(v) for v in row] for row in phi]
    inner = [integrate_residue(y, row) for row in phi]
    iterated = integrate_residue(x, inner) if x.cells else NEG_INF
    joint = product(x, y)
    flat = [phi[i][j] for i in range(len(x.cells)) for j in range(len(y.cells))]
    joint_v = integrate_residue(joint, flat)
    return FubiniResult(iterated, joint_v, iterated == joint_v)
