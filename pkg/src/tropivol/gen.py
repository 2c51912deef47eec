"""Seeded random instance generators for the property suites and `tropivol gen`."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import presburger as pb
from .conductor import RamifiedGaloisModule, induced_rep
from .intlat import GroupAction, IntMatrix
from .presburger import AffineForm, PresburgerSet
from .residue import FREE, FREE_NONZERO, Fixed, ResidueCell, ResidueSet
from .vfcells import (FREE_UNIT, DefinableSet, DimFunction, FixedDigits, PadicConstant, Piece, VFCell,
                      apply_affine_map, product_cell)
from .zbar import NEG_INF, POS_INF, ZBar


def rng_from(seed: int | None) -> random.Random:
    return random.Random(seed)


def zbar(rng: random.Random, lo: int = -9, hi: int = 9, inf_weight: float = 0.15) -> ZBar:
    x = rng.random()
    if x < inf_weight / 2:
        return NEG_INF
    if x < inf_weight:
        return POS_INF
    return ZBar.fin(rng.randint(lo, hi))


def box_constraints(dim: int, index: int, lo: int, hi: int) -> list[tuple[tuple[int, ...], int]]:
    e = tuple(int(k == index) for k in range(dim))
    return [(e, lo), (tuple(-x for x in e), -hi)]


def pset(rng: random.Random, dim: int, *, bounded: bool = True, lo: int = -2, width: int = 3,
         coeff: int = 9, extra: int = 2, congs: int = 1, wild: float = 0.1) -> PresburgerSet:
    """A one-cell set; ``bounded`` boxes every variable, otherwise only from below.

    Extra constraints are anchored at a random witness point, so the set is
    nonempty except in the ``wild`` fraction where bounds are arbitrary.
    """
    ineqs: list[tuple[tuple[int, ...], int]] = []
    witness = []
    for j in range(dim):
        a = rng.randint(lo, lo + 2)
        w = rng.randint(0, width)
        witness.append(rng.randint(a, a + w))
        if bounded:
            ineqs += box_constraints(dim, j, a, a + w)
        else:
            ineqs.append((tuple(int(k == j) for k in range(dim)), a))
    anchored = rng.random() >= wild
    for _ in range(rng.randint(0, extra)):
        c = tuple(rng.randint(-coeff, coeff) for _ in range(dim))
        at = sum(x * y for x, y in zip(c, witness))
        ineqs.append((c, at - rng.randint(0, 3) if anchored else rng.randint(-coeff * 3, coeff)))
    cg = []
    for _ in range(rng.randint(0, congs)):
        m = rng.randint(2, 3)
        c = tuple(rng.randint(0, 2) for _ in range(dim))
        res = sum(x * y for x, y in zip(c, witness)) % m if anchored else rng.randint(0, m - 1)
        cg.append((c, res, m))
    return PresburgerSet.of(dim, ineqs, cg)


def padic(rng: random.Random, lo: int = -2, hi: int = 2, zero_weight: float = 0.3) -> PadicConstant:
    if rng.random() < zero_weight:
        return PadicConstant()
    start = rng.randint(lo, hi)
    digits = {start + k: Fraction(rng.randint(-2, 2)) for k in range(rng.randint(1, 3))}
    digits[start] = Fraction(rng.choice([-2, -1, 1, 2]))
    return PadicConstant.from_dict(digits)


def unit_digits(rng: random.Random, depth: int) -> tuple[Fraction, ...]:
    return (Fraction(rng.choice([-1, 1, 2])),) + tuple(Fraction(rng.randint(-1, 1)) for _ in range(depth - 1))


def ac_choice(rng: random.Random, max_depth: int = 3):
    d = rng.randint(1, max_depth)
    if rng.random() < 0.5:
        return d, FREE_UNIT
    return d, FixedDigits(unit_digits(rng, d))


def residue_cell(rng: random.Random, width: int) -> ResidueCell:
    marks = []
    for _ in range(width):
        x = rng.random()
        marks.append(FREE if x < 0.4 else FREE_NONZERO if x < 0.7 else Fixed(rng.randint(-2, 2)))
    return ResidueCell(tuple(marks))


def residue_set(rng: random.Random, width: int, max_cells: int = 3, allow_empty: bool = True) -> ResidueSet:
    k = rng.randint(0 if allow_empty else 1, max_cells)
    return ResidueSet(width, tuple(residue_cell(rng, width) for _ in range(k)))


def vfcell(rng: random.Random, n: int, r: int = 0, m: int = 0, *, centers: Sequence[PadicConstant] | None = None,
           bounded: bool = True, max_depth: int = 3, lo: int = -2, coeff: int = 9, extra: int = 2,
           fixed_weight: float = 0.5) -> VFCell:
    if centers is None:
        centers = [padic(rng) for _ in range(n)]
    depths, acs = [], []
    for _ in range(n):
        d, ac = ac_choice(rng, max_depth)
        if rng.random() >= fixed_weight:
            ac = FREE_UNIT
        depths.append(d)
        acs.append(ac)
    ordset = pset(rng, n + r, bounded=bounded, lo=lo, coeff=coeff, extra=extra)
    residue = ResidueSet.point() if m == 0 else ResidueSet(m, (residue_cell(rng, m),))
    return VFCell(tuple(centers), tuple(depths), tuple(acs), ordset, residue)


def definable_set(rng: random.Random, profile: tuple[int, int, int], *, centers=None, cells: int = 2,
                  bounded: bool = True, lo: int = -2, coeff: int = 3) -> DefinableSet:
    n, m, r = profile
    if centers is None:
        centers = [padic(rng) for _ in range(n)]
    return DefinableSet(profile, tuple(vfcell(rng, n, r, m, centers=centers, bounded=bounded, lo=lo, coeff=coeff)
                                       for _ in range(rng.randint(1, cells))))


def form(rng: random.Random, dim: int, *, inf_weight: float = 0.1, lo: int = -2, hi: int = 1) -> AffineForm:
    """Coefficients <= 1 keep integrals over sets bounded below finite
    (the volume density already contributes -gamma)."""
    off = zbar(rng, -5, 5, inf_weight)
    return AffineForm(tuple(rng.randint(lo, hi) for _ in range(dim)), off)


def dim_function(rng: random.Random, profile: tuple[int, int, int], centers, *, pieces: int = 3,
                 inf_weight: float = 0.1, bounded: bool = False, nonneg_coeffs: bool = False) -> DimFunction:
    """Pieces share ``centers`` so they meet the generated sets."""
    n, m, r = profile
    out = []
    for _ in range(rng.randint(1, pieces)):
        cell = vfcell(rng, n, r, m, centers=centers, bounded=bounded, max_depth=2, lo=-3, extra=0,
                      fixed_weight=0.25)
        if rng.random() < 0.7:
            cell = cell.replace(residue=ResidueSet.space(m))
        f = form(rng, n + r, inf_weight=inf_weight)
        if nonneg_coeffs:
            f = AffineForm(tuple(abs(c) for c in f.coeffs), f.offset)
        out.append(Piece(cell, f))
    return DimFunction(profile, tuple(out))


def oracle_cell(rng: random.Random, n: int, r: int = 0) -> DefinableSet:
    """A bounded cell of the kind used to compare vol with the truncation oracle."""
    m = rng.randint(0, 1)
    return DefinableSet((n, m, r), (vfcell(rng, n, r, m, bounded=True, lo=-2),))


@dataclass(frozen=True)
class ProductInstance:
    ax: DefinableSet
    ay: DefinableSet
    phi: DimFunction


def product_instance(rng: random.Random, *, inf_weight: float = 0.15) -> ProductInstance:
    """Fubini instance.  x-sides are bounded, or the product pieces are
    decoupled; both keep the iterated integral computable."""
    nx, ny = 1, rng.randint(1, 2) if rng.random() < 0.3 else 1
    mx, my = rng.randint(0, 1), rng.randint(0, 1)
    cx = [padic(rng) for _ in range(nx)]
    cy = [padic(rng) for _ in range(ny)]
    bounded_x = rng.random() < 0.6
    ax = definable_set(rng, (nx, mx, 0), centers=cx, bounded=bounded_x)
    ay = definable_set(rng, (ny, my, 0), centers=cy, bounded=rng.random() < 0.5)
    pieces = []
    for _ in range(rng.randint(1, 3)):
        px = vfcell(rng, nx, 0, mx, centers=cx, bounded=bounded_x, max_depth=2, lo=-3, extra=0,
                    fixed_weight=0.25)
        py = vfcell(rng, ny, 0, my, centers=cy, bounded=False, max_depth=2, lo=-3, extra=0,
                    fixed_weight=0.25)
        if rng.random() < 0.7:
            px = px.replace(residue=ResidueSet.space(mx))
        if rng.random() < 0.7:
            py = py.replace(residue=ResidueSet.space(my))
        cell = product_cell(px, py)
        if bounded_x and rng.random() < 0.5:
            # couple x and y through one mixed constraint
            coeffs = tuple(rng.randint(-2, 2) for _ in range(nx + ny))
            cell = cell.replace(ordset=pb.add_constraints(cell.ordset, [(coeffs, rng.randint(-6, 0))]))
        f = form(rng, nx + ny, inf_weight=inf_weight)
        pieces.append(Piece(cell, f))
    return ProductInstance(ax, ay, DimFunction((nx + ny, mx + my, 0), tuple(pieces)))


@dataclass(frozen=True)
class MapInstance:
    a: DefinableSet
    scale: tuple[PadicConstant, ...]
    offset: tuple[PadicConstant, ...]
    phi: DimFunction


def map_instance(rng: random.Random) -> MapInstance:
    n = rng.randint(1, 2)
    m = rng.randint(0, 1)
    centers = [padic(rng) for _ in range(n)]
    a = definable_set(rng, (n, m, 0), centers=centers, bounded=rng.random() < 0.5)
    scale = []
    for _ in range(n):
        e = rng.randint(-2, 3)
        digits = {e: Fraction(rng.choice([-2, -1, 1, 3]))}
        if rng.random() < 0.5:
            digits[e + 1] = Fraction(rng.randint(-2, 2))
        scale.append(PadicConstant.from_dict(digits))
    offset = tuple(padic(rng) for _ in range(n))
    image, _ = apply_affine_map(a, scale, offset)
    img_centers = image.cells[0].centers
    phi = dim_function(rng, (n, m, 0), img_centers, inf_weight=0.1)
    return MapInstance(a, tuple(scale), offset, phi)


# ---------------------------------------------------------------------------
# Galois lattices

def _perm_matrix(perm: Sequence[int]) -> IntMatrix:
    n = len(perm)
    return IntMatrix.from_rows([[int(perm[j] == i) for j in range(n)] for i in range(n)], cols=n)


def _block_diag(blocks: Sequence[IntMatrix]) -> IntMatrix:
    n = sum(b.rows for b in blocks)
    rows = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                rows[off + i][off + j] = b[i, j]
        off += b.rows
    return IntMatrix.from_rows(rows, cols=n)


# Irreducible-ish integral building blocks for each small group, keyed by
# generator images.  Each entry maps a generator name to a matrix.
def group_blocks(group: str) -> list[dict[str, IntMatrix]]:
    one = IntMatrix.identity(1)
    if group == "Z2":
        return [{"s": one}, {"s": IntMatrix.from_rows([[-1]])},
                {"s": _perm_matrix([1, 0])}]
    if group == "Z3":
        return [{"s": one}, {"s": _perm_matrix([1, 2, 0])},
                {"s": IntMatrix.from_rows([[0, -1], [1, -1]])}]
    if group == "S3":
        return [{"s": one, "t": one},
                {"s": one, "t": IntMatrix.from_rows([[-1]])},
                {"s": _perm_matrix([1, 2, 0]), "t": _perm_matrix([1, 0, 2])},
                {"s": IntMatrix.from_rows([[0, -1], [1, -1]]), "t": IntMatrix.from_rows([[0, 1], [1, 0]])}]
    raise ValueError(f"unknown group {group}")


def faithful_group(group: str) -> GroupAction:
    """The group acting faithfully by permutations, generators named in sorted order."""
    if group == "Z2":
        return GroupAction.generated_by(2, [_perm_matrix([1, 0])])
    if group == "Z3":
        return GroupAction.generated_by(3, [_perm_matrix([1, 2, 0])])
    if group == "S3":
        return GroupAction.generated_by(3, [_perm_matrix([1, 2, 0]), _perm_matrix([1, 0, 2])])
    raise ValueError(f"unknown group {group}")


def unimodular(rng: random.Random, n: int, steps: int = 4) -> tuple[IntMatrix, IntMatrix]:
    """A random unimodular matrix and its inverse, built from elementary operations."""
    p = [[int(i == j) for j in range(n)] for i in range(n)]
    q = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-1, 1])
        # p <- E p with E = I + c e_ij;  q <- q E^-1
        p[i] = [a + c * b for a, b in zip(p[i], p[j])]
        for row in q:
            row[j] -= c * row[i]
    return IntMatrix.from_rows(p, cols=n), IntMatrix.from_rows(q, cols=n)


def random_module_gens(rng: random.Random, group: str, blocks: int = 2) -> tuple[int, list[IntMatrix]]:
    """Generators of a direct sum of random blocks."""
    choices = [rng.choice(group_blocks(group)) for _ in range(rng.randint(1, blocks))]
    names = sorted(choices[0])
    gens = [_block_diag([c[nm] for c in choices]) for nm in names]
    return gens[0].rows, gens


def _tame(group: GroupAction, images: Sequence[IntMatrix]) -> RamifiedGaloisModule:
    return RamifiedGaloisModule.tame(group, induced_rep(group, images))


def exact_sequence(rng: random.Random, group: str) -> tuple[RamifiedGaloisModule, IntMatrix]:
    """A tame module with an equivariant injection of a submodule.

    Either a direct sum A + B, with A included, conjugated by a random
    unimodular change of basis, or a permutation lattice with its norm line
    or its augmentation sublattice (non-split over Z).
    """
    g = faithful_group(group)
    if rng.random() < 0.7:
        _, a = random_module_gens(rng, group)
        _, b = random_module_gens(rng, group)
        k = a[0].rows
        mids = [_block_diag([x, y]) for x, y in zip(a, b)]
        n = mids[0].rows
        p, p_inv = unimodular(rng, n, steps=2 * n)
        mids = [p @ m @ p_inv for m in mids]
        inj = p @ IntMatrix.from_rows([[int(i == j) for j in range(k)] for i in range(n)], cols=k)
    else:
        mids = list(g.generators)
        n = mids[0].rows
        if rng.random() < 0.5:
            inj = IntMatrix.from_rows([[1] for _ in range(n)], cols=1)
        else:
            inj = IntMatrix.from_rows([[int(i == j) - int(i == j + 1) for j in range(n - 1)] for i in range(n)],
                                      cols=n - 1)
    return _tame(g, mids), inj
