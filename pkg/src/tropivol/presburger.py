"""Conjunctive linear/congruence cells in Z^r, finite unions of them, and
exact max-plus suprema of affine objectives over their integer points.

Solving strategy for one cell:

1. The congruences are solved once with a Smith normal form, which turns
   the cell into ``x = x0 + B u`` with ``u`` ranging over Z^r and only
   inequalities left on ``u``.
2. Integer feasibility of the inequalities is decided by the Omega test
   (Fourier-Motzkin with dark shadows and splinters), which is complete.
3. The objective is bounded above by the rational relaxation (exact
   Fourier-Motzkin over Q).  An unbounded relaxation with an integer point
   means the integer supremum is +inf.  Otherwise the exact maximum is
   found by galloping/binary search on the level ``c.u >= k`` with the
   feasibility test.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct
from math import floor, gcd
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ArityError, DomainError
from .intlat import IntMatrix, image_basis, smith_normal_form
from .zbar import NEG_INF, POS_INF, ZBar, odot

Constraint = tuple[tuple[int, ...], int]  # coeffs . x >= bound


@dataclass(frozen=True)
class Ineq:
    coeffs: tuple[int, ...]
    bound: int

    def holds(self, x: Sequence[int]) -> bool:
        return sum(a * v for a, v in zip(self.coeffs, x)) >= self.bound


@dataclass(frozen=True)
class Cong:
    coeffs: tuple[int, ...]
    residue: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise DomainError(f"congruence modulus must be >= 2, got {self.modulus}")
        if not 0 <= self.residue < self.modulus:
            object.__setattr__(self, "residue", self.residue % self.modulus)

    def holds(self, x: Sequence[int]) -> bool:
        return (sum(a * v for a, v in zip(self.coeffs, x)) - self.residue) % self.modulus == 0


@dataclass(frozen=True)
class PresburgerCell:
    dim: int
    ineqs: tuple[Ineq, ...] = ()
    congs: tuple[Cong, ...] = ()

    def __post_init__(self):
        for c in (*self.ineqs, *self.congs):
            if len(c.coeffs) != self.dim:
                raise ArityError(f"constraint has {len(c.coeffs)} coefficients in a {self.dim}-dim cell")

    def contains(self, x: Sequence[int]) -> bool:
        if len(x) != self.dim:
            raise ArityError("point dimension mismatch")
        return all(c.holds(x) for c in self.ineqs) and all(c.holds(x) for c in self.congs)


@dataclass(frozen=True)
class PresburgerSet:
    dim: int
    cells: tuple[PresburgerCell, ...] = ()

    def __post_init__(self):
        for c in self.cells:
            if c.dim != self.dim:
                raise ArityError(f"cell of dim {c.dim} in a set of dim {self.dim}")

    @classmethod
    def universe(cls, dim: int) -> PresburgerSet:
        return cls(dim, (PresburgerCell(dim),))

    @classmethod
    def empty(cls, dim: int) -> PresburgerSet:
        return cls(dim, ())

    @classmethod
    def of(cls, dim: int, ineqs: Iterable[tuple[Sequence[int], int]] = (),
           congs: Iterable[tuple[Sequence[int], int, int]] = ()) -> PresburgerSet:
        """One-cell set from plain tuples; convenient in tests."""
        cell = PresburgerCell(dim, tuple(Ineq(tuple(a), b) for a, b in ineqs),
                              tuple(Cong(tuple(a), r, m) for a, r, m in congs))
        return cls(dim, (cell,))

    def contains(self, x: Sequence[int]) -> bool:
        return any(c.contains(x) for c in self.cells)

    def union(self, other: PresburgerSet) -> PresburgerSet:
        if other.dim != self.dim:
            raise ArityError("union of sets of different dimension")
        return PresburgerSet(self.dim, self.cells + other.cells)


@dataclass(frozen=True)
class AffineForm:
    """``coeffs . x + offset``; an infinite offset makes the form constant."""
    coeffs: tuple[int, ...]
    offset: ZBar = field(default_factory=lambda: ZBar.fin(0))

    def __post_init__(self):
        object.__setattr__(self, "offset", ZBar.coerce(self.offset))
        if not self.offset.is_finite:
            object.__setattr__(self, "coeffs", (0,) * len(self.coeffs))

    @classmethod
    def const(cls, dim: int, value: ZBar | int) -> AffineForm:
        return cls((0,) * dim, ZBar.coerce(value))

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def __call__(self, x: Sequence[int]) -> ZBar:
        if not self.offset.is_finite:
            return self.offset
        return ZBar.fin(sum(a * v for a, v in zip(self.coeffs, x)) + self.offset.value)

    def plus(self, other: AffineForm) -> AffineForm:
        """Pointwise odot of two forms."""
        if other.dim != self.dim:
            raise ArityError("form dimension mismatch")
        off = odot(self.offset, other.offset)
        return AffineForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), off)

    def shift(self, d: ZBar | int) -> AffineForm:
        return AffineForm(self.coeffs, odot(self.offset, ZBar.coerce(d)))


# ---------------------------------------------------------------------------
# integer constraint systems

def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _normalize(cons: Iterable[Constraint]) -> list[Constraint] | None:
    """gcd-tighten, drop trivia, merge parallels.  None means infeasible."""
    best: dict[tuple[int, ...], int] = {}
    for a, b in cons:
        g = 0
        for x in a:
            g = gcd(g, x)
        if g == 0:
            if b > 0:
                return None
            continue
        if g != 1:
            a = tuple(x // g for x in a)
            b = _ceil_div(b, g)
        if a not in best or b > best[a]:
            best[a] = b
    for a, b in best.items():
        neg = tuple(-x for x in a)
        if neg in best and b > -best[neg]:
            return None
    return sorted(best.items())


def _substitute(cons: Iterable[Constraint], x0: Sequence[int], basis_cols: Sequence[Sequence[int]]
                ) -> list[Constraint]:
    # x = x0 + sum_j w_j * basis_cols[j]
    out = []
    for a, b in cons:
        coeffs = tuple(sum(ai * col[i] for i, ai in enumerate(a)) for col in basis_cols)
        out.append((coeffs, b - sum(ai * xi for ai, xi in zip(a, x0))))
    return out


def _find_equality(cons: list[Constraint]) -> Constraint | None:
    table = dict(cons)
    for a, b in cons:
        neg = tuple(-x for x in a)
        if neg in table and table[neg] == -b:
            return a, b
    return None


def _eliminate_equality(cons: list[Constraint], eq: Constraint) -> list[Constraint]:
    a, b = eq
    n = len(a)
    # a is primitive after normalisation, so a.x = b always has integer solutions
    snf = smith_normal_form(IntMatrix.from_rows([a], cols=n))
    u = snf.U[0, 0]
    vcols = snf.V.columns()
    x0 = [c * (u * b) for c in vcols[0]]
    return _substitute(cons, x0, vcols[1:])


@lru_cache(maxsize=200_000)
def _feasible(cons: tuple[Constraint, ...], n: int) -> bool:
    norm = _normalize(cons)
    if norm is None:
        return False
    if not norm:
        return True
    eq = _find_equality(norm)
    if eq is not None:
        return _feasible(tuple(_eliminate_equality(norm, eq)), n - 1)

    active = [k for k in range(n) if any(a[k] for a, _ in norm)]
    # a variable bounded on one side only can always be pushed out of the way
    for k in active:
        signs = {a[k] > 0 for a, _ in norm if a[k]}
        if len(signs) == 1:
            return _feasible(tuple(c for c in norm if c[0][k] == 0), n)

    def cost(k):
        lo = [a[k] for a, _ in norm if a[k] > 0]
        hi = [-a[k] for a, _ in norm if a[k] < 0]
        exact = all(x == 1 for x in lo) or all(x == 1 for x in hi)
        return (not exact, len(lo) * len(hi) - len(lo) - len(hi), k)

    k = min(active, key=cost)
    lowers = [(a, b) for a, b in norm if a[k] > 0]
    uppers = [(a, b) for a, b in norm if a[k] < 0]
    others = [c for c in norm if c[0][k] == 0]
    exact = all(a[k] == 1 for a, _ in lowers) or all(a[k] == -1 for a, _ in uppers)

    def shadow(dark: bool) -> list[Constraint]:
        out = list(others)
        for la, lb in lowers:
            p = la[k]
            for ua, ub in uppers:
                q = -ua[k]
                # q*(la.x - lb) + p*(ua.x - ub) >= 0 eliminates x_k
                coeffs = tuple(q * x + p * y for x, y in zip(la, ua))
                bound = q * lb + p * ub
                if dark:
                    bound += (p - 1) * (q - 1)
                out.append((coeffs, bound))
        return out

    if exact:
        return _feasible(tuple(shadow(False)), n)
    if not _feasible(tuple(shadow(False)), n):
        return False
    if _feasible(tuple(shadow(True)), n):
        return True
    qmax = max(-a[k] for a, _ in uppers)
    for la, lb in lowers:
        p = la[k]
        for i in range((qmax * p - p - qmax) // qmax + 1):
            neg = tuple(-x for x in la)
            if _feasible(tuple(norm + [(la, lb + i), (neg, -(lb + i))]), n):
                return True
    return False


def _fm_combine(cons: list[Constraint], k: int) -> list[Constraint]:
    pos = [c for c in cons if c[0][k] > 0]
    neg = [c for c in cons if c[0][k] < 0]
    out = [c for c in cons if c[0][k] == 0]
    for pa, pb in pos:
        for na, nb in neg:
            p, q = pa[k], -na[k]
            coeffs = tuple(q * x + p * y for x, y in zip(pa, na))
            out.append((coeffs, q * pb + p * nb))
    # rational normalisation: scale by the gcd of coefficients and bound, no rounding
    best: dict[tuple[int, ...], Fraction] = {}
    for a, b in out:
        g = 0
        for x in a:
            g = gcd(g, x)
        if g == 0:
            if b > 0:
                return [((0,) * len(a), 1)]
            continue
        a2 = tuple(x // g for x in a)
        b2 = Fraction(b, g)
        if a2 not in best or b2 > best[a2]:
            best[a2] = b2
    res = []
    for a, b in best.items():
        den = b.denominator
        res.append((tuple(x * den for x in a), b.numerator))
    return res


def _lp_max(cons: Sequence[Constraint], obj: Sequence[int], n: int) -> Fraction | None | str:
    """Rational max of obj.x; None if the relaxation is empty, 'inf' if unbounded."""
    rows = [(tuple(a) + (0,), b) for a, b in cons]
    rows.append((tuple(obj) + (-1,), 0))
    remaining = set(range(n))
    while remaining:
        def cost(k):
            p = sum(1 for a, _ in rows if a[k] > 0)
            q = sum(1 for a, _ in rows if a[k] < 0)
            return (p * q - p - q, k)
        k = min(remaining, key=cost)
        remaining.discard(k)
        rows = _fm_combine(rows, k)
        if any(not any(a) and b > 0 for a, b in rows):
            return None
    lo, hi = None, None
    for a, b in rows:
        t = a[n]
        if t > 0:
            v = Fraction(b, t)
            lo = v if lo is None or v > lo else lo
        elif t < 0:
            v = Fraction(b, t)
            hi = v if hi is None or v < hi else hi
        elif b > 0:
            return None
    if lo is not None and hi is not None and lo > hi:
        return None
    return "inf" if hi is None else hi


@lru_cache(maxsize=50_000)
def _lattice(cell: PresburgerCell) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]] | None:
    """Solve the congruences: x = x0 + B u.  Returns (x0, columns of B) or None."""
    r = cell.dim
    if not cell.congs:
        return (0,) * r, tuple(tuple(int(i == j) for i in range(r)) for j in range(r))
    c = len(cell.congs)
    rows = []
    for i, cg in enumerate(cell.congs):
        rows.append(list(cg.coeffs) + [-cg.modulus if j == i else 0 for j in range(c)])
    snf = smith_normal_form(IntMatrix.from_rows(rows, cols=r + c))
    rhs = snf.U.apply([cg.residue for cg in cell.congs])
    w = []
    for i, d in enumerate(snf.d):
        if d == 0:
            if rhs[i] != 0:
                return None
            w.append(0)
        else:
            if rhs[i] % d:
                return None
            w.append(rhs[i] // d)
    w += [0] * (r + c - len(w))
    y0 = snf.V.apply(w)
    rank = snf.rank
    vcols = snf.V.columns()
    gens = [col[:r] for col in vcols[rank:]]
    if not gens:
        return tuple(y0[:r]), ()
    basis = image_basis(IntMatrix.from_columns(gens, r)).columns()
    return tuple(y0[:r]), tuple(tuple(col) for col in basis)


def _reduced(cell: PresburgerCell) -> tuple[tuple[Constraint, ...], tuple[int, ...], tuple] | None:
    lat = _lattice(cell)
    if lat is None:
        return None
    x0, basis = lat
    cons = _substitute(((i.coeffs, i.bound) for i in cell.ineqs), x0, basis)
    return tuple(cons), x0, basis


@lru_cache(maxsize=100_000)
def _cell_empty(cell: PresburgerCell) -> bool:
    red = _reduced(cell)
    if red is None:
        return True
    cons, _, basis = red
    return not _feasible(cons, len(basis))


@lru_cache(maxsize=100_000)
def _cell_sup(cell: PresburgerCell, coeffs: tuple[int, ...]) -> ZBar:
    """sup of coeffs.x over the integer points of the cell (no offset)."""
    red = _reduced(cell)
    if red is None:
        return NEG_INF
    cons, x0, basis = red
    n = len(basis)
    if not _feasible(cons, n):
        return NEG_INF
    obj = tuple(sum(c * col[i] for i, c in enumerate(coeffs)) for col in basis)
    const = sum(c * x for c, x in zip(coeffs, x0))
    if not any(obj):
        return ZBar.fin(const)
    lp = _lp_max(cons, obj, n)
    if lp is None:  # pragma: no cover - feasible integer point implies feasible relaxation
        return NEG_INF
    if lp == "inf":
        return POS_INF

    def ok(k: int) -> bool:
        return _feasible(cons + ((obj, k),), n)

    hi_bad = floor(lp) + 1
    step, k = 1, floor(lp)
    while not ok(k):
        hi_bad = k
        k -= step
        step *= 2
    lo_ok = k
    while hi_bad - lo_ok > 1:
        mid = (lo_ok + hi_bad) // 2
        if ok(mid):
            lo_ok = mid
        else:
            hi_bad = mid
    return ZBar.fin(lo_ok + const)


# ---------------------------------------------------------------------------
# public operations

def is_empty(s: PresburgerSet) -> bool:
    return all(_cell_empty(c) for c in s.cells)


def sup_affine(s: PresburgerSet, f: AffineForm) -> ZBar:
    """sup over the integer points of ``s`` of ``f``, in Z-bar."""
    if f.dim != s.dim:
        raise ArityError(f"form of dim {f.dim} on a set of dim {s.dim}")
    if f.offset.is_neginf:
        return NEG_INF
    best = NEG_INF
    for cell in s.cells:
        if f.offset.is_posinf:
            if not _cell_empty(cell):
                return POS_INF
            continue
        v = _cell_sup(cell, f.coeffs)
        if not v.is_finite:
            best = max(best, v)
        else:
            best = max(best, ZBar.fin(v.value + f.offset.value))
        if best.is_posinf:
            return best
    return best


def _slice_cell(cell: PresburgerCell, assignments: Mapping[int, int], keep: list[int]
                ) -> PresburgerCell | None:
    ineqs, congs = [], []
    for c in cell.ineqs:
        shift = sum(c.coeffs[i] * v for i, v in assignments.items())
        coeffs = tuple(c.coeffs[i] for i in keep)
        bound = c.bound - shift
        if not any(coeffs):
            if bound > 0:
                return None
            continue
        ineqs.append(Ineq(coeffs, bound))
    for c in cell.congs:
        shift = sum(c.coeffs[i] * v for i, v in assignments.items())
        coeffs = tuple(c.coeffs[i] for i in keep)
        res = (c.residue - shift) % c.modulus
        if not any(x % c.modulus for x in coeffs):
            if res != 0:
                return None
            continue
        congs.append(Cong(coeffs, res, c.modulus))
    return PresburgerCell(len(keep), tuple(ineqs), tuple(congs))


def slice(s: PresburgerSet, assignments: Mapping[int, int]) -> PresburgerSet:
    """Substitute integer values for some variables; the rest keep their order."""
    for i in assignments:
        if not 0 <= i < s.dim:
            raise ArityError(f"variable index {i} out of range for dim {s.dim}")
    keep = [i for i in range(s.dim) if i not in assignments]
    cells = [c2 for c in s.cells if (c2 := _slice_cell(c, assignments, keep)) is not None]
    return PresburgerSet(len(keep), tuple(cells))


def product(a: PresburgerSet, b: PresburgerSet) -> PresburgerSet:
    """Cartesian product; a's variables come first."""
    za, zb = (0,) * a.dim, (0,) * b.dim
    cells = []
    for ca in a.cells:
        for cb in b.cells:
            ineqs = tuple(Ineq(i.coeffs + zb, i.bound) for i in ca.ineqs) + \
                tuple(Ineq(za + i.coeffs, i.bound) for i in cb.ineqs)
            congs = tuple(Cong(c.coeffs + zb, c.residue, c.modulus) for c in ca.congs) + \
                tuple(Cong(za + c.coeffs, c.residue, c.modulus) for c in cb.congs)
            cells.append(PresburgerCell(a.dim + b.dim, ineqs, congs))
    return PresburgerSet(a.dim + b.dim, tuple(cells))


def intersect(a: PresburgerSet, b: PresburgerSet) -> PresburgerSet:
    if a.dim != b.dim:
        raise ArityError("intersection of sets of different dimension")
    cells = [PresburgerCell(a.dim, ca.ineqs + cb.ineqs, ca.congs + cb.congs)
             for ca in a.cells for cb in b.cells]
    return PresburgerSet(a.dim, tuple(cells))


def add_constraints(s: PresburgerSet, ineqs: Iterable[tuple[Sequence[int], int]] = (),
                    congs: Iterable[tuple[Sequence[int], int, int]] = ()) -> PresburgerSet:
    extra_i = tuple(Ineq(tuple(a), b) for a, b in ineqs)
    extra_c = tuple(Cong(tuple(a), r, m) for a, r, m in congs)
    return PresburgerSet(s.dim, tuple(PresburgerCell(s.dim, c.ineqs + extra_i, c.congs + extra_c)
                                      for c in s.cells))


def permute(s: PresburgerSet, order: Sequence[int]) -> PresburgerSet:
    """New variable ``i`` is old variable ``order[i]``."""
    if sorted(order) != list(range(s.dim)):
        raise ArityError("not a permutation")

    def re(coeffs):
        return tuple(coeffs[j] for j in order)

    return PresburgerSet(s.dim, tuple(
        PresburgerCell(s.dim, tuple(Ineq(re(i.coeffs), i.bound) for i in c.ineqs),
                       tuple(Cong(re(g.coeffs), g.residue, g.modulus) for g in c.congs))
        for c in s.cells))


def insert_vars(s: PresburgerSet, position: int, count: int = 1) -> PresburgerSet:
    """Add ``count`` unconstrained variables before index ``position``."""
    pad = (0,) * count

    def re(coeffs):
        return coeffs[:position] + pad + coeffs[position:]

    d = s.dim + count
    return PresburgerSet(d, tuple(
        PresburgerCell(d, tuple(Ineq(re(i.coeffs), i.bound) for i in c.ineqs),
                       tuple(Cong(re(g.coeffs), g.residue, g.modulus) for g in c.congs))
        for c in s.cells))


def translate(s: PresburgerSet, shift: Sequence[int]) -> PresburgerSet:
    """The image ``s + shift``."""
    if len(shift) != s.dim:
        raise ArityError("shift length mismatch")

    def moved(coeffs):
        return sum(a * d for a, d in zip(coeffs, shift))

    return PresburgerSet(s.dim, tuple(
        PresburgerCell(s.dim, tuple(Ineq(i.coeffs, i.bound + moved(i.coeffs)) for i in c.ineqs),
                       tuple(Cong(g.coeffs, g.residue + moved(g.coeffs), g.modulus) for g in c.congs))
        for c in s.cells))


def unit_form(dim: int, index: int, sign: int = 1) -> AffineForm:
    return AffineForm(tuple(sign if i == index else 0 for i in range(dim)))


def bounds(s: PresburgerSet, index: int) -> tuple[ZBar, ZBar]:
    """Exact integer (min, max) of one coordinate; min is returned negated back."""
    hi = sup_affine(s, unit_form(s.dim, index))
    lo = sup_affine(s, unit_form(s.dim, index, -1))
    if lo.is_finite:
        lo = ZBar.fin(-lo.value)
    elif lo.is_posinf:
        lo = NEG_INF
    else:
        lo = POS_INF
    return lo, hi


def project_points(s: PresburgerSet, indices: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Distinct integer points of the projection onto ``indices``.

    The projection must be bounded; raises DomainError otherwise.
    """
    ranges = []
    for i in indices:
        lo, hi = bounds(s, i)
        if lo.is_posinf:  # empty
            return
        if not (lo.is_finite and hi.is_finite):
            raise DomainError(f"projection onto variable {i} is unbounded")
        ranges.append(range(lo.value, hi.value + 1))
    for pt in iproduct(*ranges):
        fiber = slice(s, dict(zip(indices, pt)))
        if not is_empty(fiber):
            yield pt


def points(s: PresburgerSet) -> Iterator[tuple[int, ...]]:
    """All integer points of a bounded set."""
    return project_points(s, list(range(s.dim)))


def find_point(s: PresburgerSet, search: int = 10_000) -> tuple[int, ...] | None:
    """Some integer point of ``s`` (deterministic), or None if empty."""
    for cell in s.cells:
        if _cell_empty(cell):
            continue
        cur = PresburgerSet(s.dim, (cell,))
        chosen: list[int] = []
        for _ in range(s.dim):
            lo, hi = bounds(cur, 0)
            if lo.is_finite:
                v = lo.value
            elif hi.is_finite:
                v = hi.value
            else:
                v = next(c for k in range(search) for c in ((k, -k) if k else (0,))
                         if not is_empty(slice(cur, {0: c})))
            chosen.append(v)
            cur = slice(cur, {0: v})
        return tuple(chosen)
    return None
