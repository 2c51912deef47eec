"""Valued-field cells, definable sets, dimensional functions, volumes and
the literal truncation-limit volume oracle.

A cell in h[n, m, r] is

    { (y, t, z) : ord(y_i - c_i) = gamma_i,
                  ac_{l_i}(y_i - c_i) satisfies the i-th constraint,
                  (gamma, z) in ordset, t in residue }

with constant centers c_i.  Points with y_i = c_i are not in the cell; they
form a set of lower dimension and never affect a volume.

Closed-form volume.  Fix a feasible (gamma, z).  At truncation level L
(large) coordinate i has L digits, of which gamma_i are copied from the
center, l_i lie in the angular-component window and the rest are free.  A
FreeUnit window contributes l_i free digits (the leading one avoids one
value), a FixedDigits window contributes none.  So the slice has dimension
sum_i (L - gamma_i - l_i + d_i) + dim(residue) with d_i = l_i for FreeUnit
and 0 otherwise, and subtracting L*n leaves the density
sum_i (-gamma_i - l_i + d_i).  The z coordinates are projected away, so the
volume is the supremum of the density over the ordset, times dim(residue).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from .. import presburger as pb
from .. import residue as rs
from ..errors import ArityError, DomainError, SingularMapError, UnsupportedError
from ..presburger import AffineForm, PresburgerSet
from ..residue import ResiduePoint, ResidueSet
from ..zbar import NEG_INF, POS_INF, ZBar, odot, sup
from .padic import PadicConstant, ZERO, inverse_truncated, mul_truncated


@dataclass(frozen=True)
class FreeUnit:
    """Any unit of R / m^depth."""

    def __repr__(self) -> str:
        return "FreeUnit()"


@dataclass(frozen=True)
class FixedDigits:
    digits: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(Fraction(d) for d in self.digits))
        if not self.digits or self.digits[0] == 0:
            raise DomainError("fixed angular component needs a nonzero leading digit")


AcConstraint = Union[FreeUnit, FixedDigits]
FREE_UNIT = FreeUnit()

Profile = tuple[int, int, int]


@dataclass(frozen=True)
class VFCell:
    centers: tuple[PadicConstant, ...]
    depths: tuple[int, ...]
    acs: tuple[AcConstraint, ...]
    ordset: PresburgerSet
    residue: ResidueSet

    def __post_init__(self):
        n = len(self.centers)
        if len(self.depths) != n or len(self.acs) != n:
            raise ArityError("centers, depths and ac constraints must have one entry per coordinate")
        if self.ordset.dim < n:
            raise ArityError(f"ordset has {self.ordset.dim} variables, need at least n = {n}")
        for d, ac in zip(self.depths, self.acs):
            if d < 1:
                raise DomainError("angular-component depth must be positive")
            if isinstance(ac, FixedDigits) and len(ac.digits) != d:
                raise DomainError(f"fixed angular component has {len(ac.digits)} digits, depth is {d}")

    @classmethod
    def build(cls, n: int = 1, *, centers: Sequence[PadicConstant] | None = None,
              depths: Sequence[int] | None = None, acs: Sequence[AcConstraint] | None = None,
              ordset: PresburgerSet | None = None, residue: ResidueSet | None = None,
              r: int = 0) -> VFCell:
        """Defaults: centers 0, depth 1, FreeUnit, no ord condition, residue point."""
        return cls(tuple(centers) if centers is not None else (ZERO,) * n,
                   tuple(depths) if depths is not None else (1,) * n,
                   tuple(acs) if acs is not None else (FREE_UNIT,) * n,
                   ordset if ordset is not None else PresburgerSet.universe(n + r),
                   residue if residue is not None else ResidueSet.point())

    @property
    def n(self) -> int:
        return len(self.centers)

    @property
    def r(self) -> int:
        return self.ordset.dim - self.n

    @property
    def m(self) -> int:
        return self.residue.width

    @property
    def profile(self) -> Profile:
        return (self.n, self.m, self.r)

    def density(self) -> AffineForm:
        """sum_i (-gamma_i - l_i + d_i) as a form in (gamma, z)."""
        off = -sum(d for d, ac in zip(self.depths, self.acs) if isinstance(ac, FixedDigits))
        return AffineForm((-1,) * self.n + (0,) * self.r, off)

    def replace(self, **kw) -> VFCell:
        vals = dict(centers=self.centers, depths=self.depths, acs=self.acs,
                    ordset=self.ordset, residue=self.residue)
        vals.update(kw)
        return VFCell(**vals)

    def universal_in(self, j: int) -> bool:
        """True if coordinate j is unconstrained (apart from y_j != c_j)."""
        if not isinstance(self.acs[j], FreeUnit):
            return False
        for c in self.ordset.cells:
            if any(i.coeffs[j] for i in c.ineqs) or any(g.coeffs[j] % g.modulus for g in c.congs):
                return False
        return True


@dataclass(frozen=True)
class DefinableSet:
    profile: Profile
    cells: tuple[VFCell, ...] = ()

    def __post_init__(self):
        for k, c in enumerate(self.cells):
            if c.profile != self.profile:
                raise ArityError(f"cell {k} has profile {c.profile}, set has {self.profile}")

    @classmethod
    def of(cls, *cells: VFCell) -> DefinableSet:
        if not cells:
            raise ArityError("profile of an empty set is ambiguous")
        return cls(cells[0].profile, tuple(cells))

    @property
    def n(self) -> int:
        return self.profile[0]

    @property
    def r(self) -> int:
        return self.profile[2]


@dataclass(frozen=True)
class Piece:
    cell: VFCell
    form: AffineForm

    def __post_init__(self):
        if self.form.dim != self.cell.n + self.cell.r:
            raise ArityError(f"form has {self.form.dim} coefficients, cell has n + r = "
                             f"{self.cell.n + self.cell.r} integer coordinates")


@dataclass(frozen=True)
class DimFunction:
    """Piecewise affine Z-bar valued function; overlaps take the max, and the
    function is -inf off the pieces."""
    profile: Profile
    pieces: tuple[Piece, ...] = ()

    def __post_init__(self):
        for k, p in enumerate(self.pieces):
            if p.cell.profile != self.profile:
                raise ArityError(f"piece {k} has profile {p.cell.profile}, function has {self.profile}")

    @classmethod
    def of(cls, profile: Profile, pieces: Iterable[tuple[VFCell, AffineForm]]) -> DimFunction:
        return cls(profile, tuple(Piece(c, f) for c, f in pieces))

    @classmethod
    def on(cls, a: DefinableSet, form_for) -> DimFunction:
        """One piece per cell of ``a``; ``form_for(cell)`` gives its form."""
        return cls(a.profile, tuple(Piece(c, form_for(c)) for c in a.cells))

    @classmethod
    def everywhere(cls, profile: Profile, form: AffineForm) -> DimFunction:
        n, m, r = profile
        return cls(profile, (Piece(VFCell.build(n, r=r, residue=ResidueSet.space(m)), form),))

    @classmethod
    def constant(cls, profile: Profile, value: ZBar | int) -> DimFunction:
        n, _, r = profile
        return cls.everywhere(profile, AffineForm.const(n + r, value))

    def shift(self, d: ZBar | int) -> DimFunction:
        """d odot phi."""
        return DimFunction(self.profile, tuple(Piece(p.cell, p.form.shift(d)) for p in self.pieces))

    def oplus(self, other: DimFunction) -> DimFunction:
        if other.profile != self.profile:
            raise ArityError("profile mismatch")
        return DimFunction(self.profile, self.pieces + other.pieces)


# ---------------------------------------------------------------------------
# intersection

def meet_ac(a: AcConstraint, da: int, b: AcConstraint, db: int) -> tuple[AcConstraint, int] | None:
    if isinstance(a, FreeUnit):
        return b, db
    if isinstance(b, FreeUnit):
        return a, da
    short, long_ = (a, b) if da <= db else (b, a)
    if long_.digits[:len(short.digits)] != short.digits:
        return None
    return long_, max(da, db)


def meet(a: VFCell, p: VFCell, p_form: AffineForm | None = None) -> VFCell | None:
    """Intersection of two cells with the same profile.

    Centers must agree coordinatewise, except that a coordinate left
    unconstrained by one side may adopt the other side's center (provided
    ``p_form`` does not read that coordinate on the adopted side).
    Returns None if the angular-component or residue conditions clash.
    """
    if a.profile != p.profile:
        raise ArityError(f"profiles differ: {a.profile} vs {p.profile}")
    centers, depths, acs = [], [], []
    for j in range(a.n):
        ca, cp = a.centers[j], p.centers[j]
        if ca != cp:
            if p.universal_in(j) and (p_form is None or p_form.coeffs[j] == 0):
                cp = ca
                p_ac, p_d = FREE_UNIT, 1
            elif a.universal_in(j):
                p_ac, p_d = p.acs[j], p.depths[j]
            else:
                raise UnsupportedError(
                    f"coordinate {j}: cells with different centers ({ca} vs {cp}) cannot be intersected")
            if cp == ca:
                m = meet_ac(a.acs[j], a.depths[j], p_ac, p_d)
                center = ca
            else:
                m = (p_ac, p_d)
                center = cp
        else:
            m = meet_ac(a.acs[j], a.depths[j], p.acs[j], p.depths[j])
            center = ca
        if m is None:
            return None
        centers.append(center)
        acs.append(m[0])
        depths.append(m[1])
    res = rs.intersect(a.residue, p.residue)
    if res.is_empty():
        return None
    return VFCell(tuple(centers), tuple(depths), tuple(acs), pb.intersect(a.ordset, p.ordset), res)


def _ordset_free_in(s: PresburgerSet, j: int) -> PresburgerSet:
    # the ordset with every constraint mentioning variable j dropped
    cells = []
    for c in s.cells:
        cells.append(pb.PresburgerCell(s.dim, tuple(i for i in c.ineqs if i.coeffs[j] == 0),
                                       tuple(g for g in c.congs if g.coeffs[j] % g.modulus == 0)))
    return PresburgerSet(s.dim, tuple(cells))


# ---------------------------------------------------------------------------
# points

@dataclass(frozen=True)
class VFPoint:
    ys: tuple[PadicConstant, ...]
    residue: ResiduePoint = field(default_factory=lambda: ResiduePoint(()))
    zs: tuple[int, ...] = ()


def coordinates(cell: VFCell, pt: VFPoint) -> tuple[int, ...] | None:
    """The (gamma, z) tuple of ``pt`` relative to ``cell``, or None if outside."""
    if len(pt.ys) != cell.n or len(pt.zs) != cell.r:
        raise ArityError("point profile mismatch")
    gammas = []
    for y, c, d, ac in zip(pt.ys, cell.centers, cell.depths, cell.acs):
        delta = y - c
        if delta.is_zero():
            return None
        if isinstance(ac, FixedDigits) and delta.ac(d) != ac.digits:
            return None
        gammas.append(delta.ord)
    coords = tuple(gammas) + tuple(pt.zs)
    if not cell.ordset.contains(coords) or not cell.residue.contains(pt.residue):
        return None
    return coords


def contains(a: DefinableSet, pt: VFPoint) -> bool:
    return any(coordinates(c, pt) is not None for c in a.cells)


def evaluate(phi: DimFunction, pt: VFPoint) -> ZBar:
    vals = []
    for p in phi.pieces:
        coords = coordinates(p.cell, pt)
        if coords is not None:
            vals.append(p.form(coords))
    return sup(vals)


def sample_point(cell: VFCell, coords: Sequence[int], residue_cell: int = 0) -> VFPoint:
    """The point y_i = c_i + t^gamma_i * (ac digits) with the given (gamma, z)."""
    ys = []
    for j in range(cell.n):
        ac = cell.acs[j]
        digits = ac.digits if isinstance(ac, FixedDigits) else (Fraction(1),)
        ys.append(cell.centers[j] + PadicConstant.from_digits(coords[j], digits))
    rp = cell.residue.cells[residue_cell].representative()
    return VFPoint(tuple(ys), rp, tuple(coords[cell.n:]))


def sample_points(cell: VFCell, box: int = 3) -> list[VFPoint]:
    """Representative points for every (gamma, z) of the ordset in [-box, box]^(n+r)."""
    dim = cell.ordset.dim
    boxed = pb.add_constraints(cell.ordset, [
        (tuple(int(i == j) * s for i in range(dim)), -box) for j in range(dim) for s in (1, -1)])
    out = []
    for coords in pb.points(boxed):
        for k in range(len(cell.residue.cells)):
            out.append(sample_point(cell, coords, k))
    return out


# ---------------------------------------------------------------------------
# volume, closed form

def cell_vol(cell: VFCell) -> ZBar:
    return odot(pb.sup_affine(cell.ordset, cell.density()), rs.dimension(cell.residue))


def vol(a: DefinableSet) -> ZBar:
    return sup(cell_vol(c) for c in a.cells)


def union(sets: Sequence[DefinableSet]) -> DefinableSet:
    if not sets:
        raise ArityError("empty union")
    prof = sets[0].profile
    cells: list[VFCell] = []
    for s in sets:
        if s.profile != prof:
            raise ArityError("profile mismatch in union")
        cells.extend(s.cells)
    return DefinableSet(prof, tuple(cells))


# ---------------------------------------------------------------------------
# products and coordinate permutations

def product_cell(x: VFCell, y: VFCell) -> VFCell:
    """Cartesian product; ordset variables are ordered (gamma_x, gamma_y, z_x, z_y)."""
    nx, ny, rx, ry = x.n, y.n, x.r, y.r
    s = pb.product(x.ordset, y.ordset)  # (gx, zx, gy, zy)
    order = (list(range(nx)) + list(range(nx + rx, nx + rx + ny))
             + list(range(nx, nx + rx)) + list(range(nx + rx + ny, nx + rx + ny + ry)))
    return VFCell(x.centers + y.centers, x.depths + y.depths, x.acs + y.acs,
                  pb.permute(s, order), rs.product(x.residue, y.residue))


def product(ax: DefinableSet, ay: DefinableSet) -> DefinableSet:
    nx, mx, rx = ax.profile
    ny, my, ry = ay.profile
    return DefinableSet((nx + ny, mx + my, rx + ry),
                        tuple(product_cell(x, y) for x in ax.cells for y in ay.cells))


def permute_coordinates(a: DefinableSet, order: Sequence[int]) -> DefinableSet:
    """New valued-field coordinate i is old coordinate order[i]."""
    n = a.n
    if sorted(order) != list(range(n)):
        raise ArityError("not a permutation of the valued-field coordinates")
    full = list(order) + list(range(n, n + a.r))
    cells = tuple(VFCell(tuple(c.centers[j] for j in order), tuple(c.depths[j] for j in order),
                         tuple(c.acs[j] for j in order), pb.permute(c.ordset, full), c.residue)
                  for c in a.cells)
    return DefinableSet(a.profile, cells)


# ---------------------------------------------------------------------------
# affine maps

def _map_cell(cell: VFCell, scale: Sequence[PadicConstant], offset: Sequence[PadicConstant]) -> VFCell:
    centers = tuple(a * c + b for a, c, b in zip(scale, cell.centers, offset))
    acs = []
    for a, d, ac in zip(scale, cell.depths, cell.acs):
        if isinstance(ac, FixedDigits):
            acs.append(FixedDigits(mul_truncated(a.ac(d), ac.digits, d)))
        else:
            acs.append(ac)
    shift = tuple(a.ord for a in scale) + (0,) * cell.r
    return VFCell(centers, cell.depths, tuple(acs), pb.translate(cell.ordset, shift), cell.residue)


def _check_jacobian_property(cell: VFCell, image: VFCell, scale, offset) -> None:
    # Affine maps satisfy the Jacobian property with constant Jacobian; verify
    # it on sample points rather than trusting it.
    pts = sample_points(cell, box=2)[:4]
    for p in pts:
        q = VFPoint(tuple(a * y + b for a, y, b in zip(scale, p.ys, offset)), p.residue, p.zs)
        if coordinates(image, q) is None:
            raise DomainError("affine image point fell outside the image cell")
    for p, q in zip(pts, pts[1:]):
        for j, a in enumerate(scale):
            diff = p.ys[j] - q.ys[j]
            if diff.is_zero():
                continue
            fdiff = a * diff
            if fdiff.ord != a.ord + diff.ord or fdiff.ac(1)[0] != a.ac(1)[0] * diff.ac(1)[0]:
                raise DomainError("Jacobian property failed for an affine map")


def apply_affine_map(a: DefinableSet, scale: Sequence[PadicConstant],
                     offset: Sequence[PadicConstant]) -> tuple[DefinableSet, int]:
    """Image under y_i -> scale_i * y_i + offset_i, and ord of the Jacobian."""
    if len(scale) != a.n or len(offset) != a.n:
        raise ArityError(f"map needs {a.n} scale and offset entries")
    for j, s in enumerate(scale):
        if s.is_zero():
            raise SingularMapError(f"scale factor {j} is zero")
    image = []
    for c in a.cells:
        im = _map_cell(c, scale, offset)
        _check_jacobian_property(c, im, scale, offset)
        image.append(im)
    return DefinableSet(a.profile, tuple(image)), sum(s.ord for s in scale)


def pull_back_cell(target: VFCell, scale: Sequence[PadicConstant], centers: Sequence[PadicConstant]
                   ) -> VFCell:
    """Preimage of ``target`` under y -> a*y + b, written around ``centers``
    (which must satisfy a*c + b = target center)."""
    acs = []
    for a, d, ac in zip(scale, target.depths, target.acs):
        if isinstance(ac, FixedDigits):
            acs.append(FixedDigits(mul_truncated(inverse_truncated(a.ac(d), d), ac.digits, d)))
        else:
            acs.append(ac)
    shift = tuple(-a.ord for a in scale) + (0,) * target.r
    return VFCell(tuple(centers), target.depths, tuple(acs), pb.translate(target.ordset, shift),
                  target.residue)


# ---------------------------------------------------------------------------
# truncation and the literal volume oracle

@lru_cache(maxsize=100_000)
def _coord_markers(center: PadicConstant, depth: int, ac: AcConstraint, g: int | None, L: int
                   ) -> tuple[tuple[rs.Marker, ...], int]:
    # Digits 0..L-1 of y = c + (y - c) with ord(y - c) = g (None: g >= L).
    out: list[rs.Marker] = []
    for p in range(L):
        cp = center.digit(p)
        if g is None or p < g:
            out.append(rs.Fixed(cp))
        elif p < g + depth:
            k = p - g
            if isinstance(ac, FixedDigits):
                out.append(rs.Fixed(cp + ac.digits[k]))
            elif k == 0:
                out.append(rs.Free(frozenset({cp})))
            else:
                out.append(rs.FREE)
        else:
            out.append(rs.FREE)
    return tuple(out), sum(1 for x in out if isinstance(x, rs.Free))


def _gamma_bounds(cell: VFCell) -> list[tuple[ZBar, ZBar]]:
    return [pb.bounds(cell.ordset, j) for j in range(cell.n)]


@lru_cache(maxsize=10_000)
def _gamma_points(ordset: PresburgerSet, n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(pb.project_points(ordset, list(range(n))))


def _patterns(cell: VFCell, L: int) -> list[tuple[int | None, ...]]:
    """Feasible gamma patterns at level L; None stands for gamma_j >= L."""
    n = cell.n
    bnds = _gamma_bounds(cell)
    if all(lo.is_finite and hi.is_finite for lo, hi in bnds):
        pats = {tuple(g if g < L else None for g in pt) for pt in _gamma_points(cell.ordset, n)}
        return sorted(pats, key=lambda t: tuple(L if g is None else g for g in t))
    out: list[tuple[int | None, ...]] = []

    def rec(j: int, prefix: list[int | None], cons: list):
        if j == n:
            out.append(tuple(prefix))
            return
        e = tuple(int(i == j) for i in range(cell.ordset.dim))
        ne = tuple(-x for x in e)
        for v in list(range(L)) + [None]:
            extra = [(e, L)] if v is None else [(e, v), (ne, -v)]
            trial = cons + extra
            if not pb.is_empty(pb.add_constraints(cell.ordset, trial)):
                rec(j + 1, prefix + [v], trial)

    rec(0, [], [])
    return out


def _check_in_ring(cell: VFCell, k: int) -> None:
    for j, c in enumerate(cell.centers):
        if not c.is_zero() and c.ord < 0:
            raise DomainError(f"cell {k}: center {j} is not in R (ord {c.ord} < 0)")
    if pb.is_empty(cell.ordset):
        return
    for j, (lo, _) in enumerate(_gamma_bounds(cell)):
        if lo < ZBar.fin(0):
            raise DomainError(f"cell {k}: coordinate {j} can have negative order ({lo})")


def truncate(a: DefinableSet, ell: int) -> ResidueSet:
    """The image of ``a`` in (R / t^ell)^n x (residue part), as residue cells."""
    if ell < 1:
        raise DomainError("truncation level must be positive")
    n, m, _ = a.profile
    cells = []
    for k, cell in enumerate(a.cells):
        _check_in_ring(cell, k)
        if cell.residue.is_empty():
            continue
        for pat in _patterns(cell, ell):
            digits: tuple = ()
            for j, g in enumerate(pat):
                digits += _coord_markers(cell.centers[j], cell.depths[j], cell.acs[j], g, ell)[0]
            for rc in cell.residue.cells:
                cells.append(rs.ResidueCell(digits + rc.coords, None if rc.declared_dim is None
                                            else rc.declared_dim + sum(isinstance(x, rs.Free) for x in digits)))
    return ResidueSet(n * ell + m, tuple(cells))


def _shift_cell(cell: VFCell, i: int) -> VFCell | None:
    # t^i (cell intersected with {ord y_j >= -i for all j})
    centers = list(cell.centers)
    depths = list(cell.depths)
    acs = list(cell.acs)
    ordset = cell.ordset
    dim = ordset.dim
    for j, c in enumerate(cell.centers):
        e_j = tuple(int(k == j) for k in range(dim))
        if c.is_zero() or c.ord >= -i:
            ordset = pb.add_constraints(ordset, [(e_j, -i)])
            continue
        # ord y >= -i forces ord(y - c) = ord c and cancels c's digits below -i
        e = c.ord
        ac, d = cell.acs[j], cell.depths[j]
        ordset = pb.insert_vars(pb.slice(ordset, {j: e}), j)
        rest: tuple[Fraction, ...] = ()
        if isinstance(ac, FixedDigits):
            for p in range(e, min(e + d, -i)):
                if ac.digits[p - e] != -c.digit(p):
                    return None
            rest = ac.digits[-i - e:] if e + d > -i else ()
        centers[j] = c.above(-i)
        nz = next((q for q, x in enumerate(rest) if x != 0), None)
        if nz is None:
            depths[j], acs[j] = 1, FREE_UNIT
            ordset = pb.add_constraints(ordset, [(e_j, -i + len(rest))])
        else:
            depths[j], acs[j] = len(rest) - nz, FixedDigits(rest[nz:])
            g = -i + nz
            ordset = pb.add_constraints(ordset, [(e_j, g), (tuple(-x for x in e_j), -g)])
    moved = VFCell(tuple(centers), tuple(depths), tuple(acs), ordset, cell.residue)
    t_i = PadicConstant.monomial(i)
    return _map_cell(moved, [t_i] * cell.n, [ZERO] * cell.n)


def shift(a: DefinableSet, i: int) -> DefinableSet:
    """A^{|i}: intersect with {ord y_j >= -i} and multiply the valued-field coordinates by t^i."""
    if i < 0:
        raise DomainError("shift index must be non-negative")
    cells = tuple(c2 for c in a.cells if (c2 := _shift_cell(c, i)) is not None)
    return DefinableSet(a.profile, cells)


def _ell_bound(a: DefinableSet) -> int:
    # Level from which no gamma-pattern is clamped or cut short near an optimum.
    best = 1
    for cell in a.cells:
        if pb.is_empty(cell.ordset) or cell.residue.is_empty():
            continue
        bnds = _gamma_bounds(cell)
        if all(hi.is_finite for _, hi in bnds):
            top = max((hi.value for _, hi in bnds), default=0)
        else:
            sumform = AffineForm((-1,) * cell.n + (0,) * cell.r)
            d = pb.sup_affine(cell.ordset, sumform)
            opt = pb.add_constraints(cell.ordset, [(sumform.coeffs, d.value)])
            top = max((pb.bounds(opt, j)[1].value for j in range(cell.n)), default=0)
        best = max(best, top + max(cell.depths, default=0) + 1)
    return best


def _certified(a: DefinableSet, i: int) -> bool:
    # A is already inside {ord y_j >= -i}, so larger shifts change nothing
    for cell in a.cells:
        if pb.is_empty(cell.ordset):
            continue
        for c in cell.centers:
            if not c.is_zero() and c.ord < -i:
                return False
        for lo, _ in _gamma_bounds(cell):
            if lo < ZBar.fin(-i):
                return False
    return True


@dataclass(frozen=True)
class OracleResult:
    value: ZBar
    stabilized: bool
    i_values: tuple[ZBar, ...]
    ell_sequences: tuple[tuple[ZBar, ...], ...]


def truncated_value(a: DefinableSet, i: int, ell: int, shifted: DefinableSet | None = None) -> ZBar:
    """n*i + dim(truncate(A^{|i}, ell)) - ell*n."""
    n = a.n
    ai = shifted if shifted is not None else shift(a, i)
    return odot(rs.dimension(truncate(ai, ell)), ZBar.fin(n * i - ell * n))


def vol_truncation_oracle(a: DefinableSet, i_max: int, ell_max: int) -> OracleResult:
    """Evaluate the double limit over i <= i_max, ell <= ell_max literally."""
    i_values: list[ZBar] = []
    seqs: list[tuple[ZBar, ...]] = []
    for i in range(i_max + 1):
        ai = shift(a, i)
        seq = tuple(truncated_value(a, i, L, ai) for L in range(1, ell_max + 1))
        seqs.append(seq)
        bound = _ell_bound(ai)
        stable_at = next((L for L in range(bound, ell_max - 1)
                          if seq[L - 1] == seq[L] == seq[L + 1]), None)
        v = seq[stable_at - 1] if stable_at is not None else seq[-1]
        i_values.append(v)
        if stable_at is not None and _certified(a, i):
            return OracleResult(v, True, tuple(i_values), tuple(seqs))
    return OracleResult(i_values[-1], False, tuple(i_values), tuple(seqs))
