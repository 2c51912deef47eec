"""Base-change conductors of tori from Galois lattices.

A module is a homomorphism from a finite group (given faithfully by a
``GroupAction``) to GL_n(Z), plus a lower-numbering ramification filtration
G_0 = G > G_1 > ... > {1}.  The Artin conductor is

    a(V) = sum_i |G_i| / |G_0| * (n - dim V^{G_i})

and the base-change conductor of a torus is half the Artin conductor of its
cocharacter module.  The ramification index is taken to be |G_0|.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ClosureError, EquivarianceError, FiltrationError, InconsistencyError
from .intlat import (GroupAction, IntMatrix, cokernel_invariants, hstack, image_basis, kernel_basis,
                     rank, smith_normal_form, vstack)


@dataclass(frozen=True)
class RamifiedGaloisModule:
    group: GroupAction
    rep: tuple[IntMatrix, ...]
    filtration: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        g = self.group
        if len(self.rep) != g.order:
            raise FiltrationError("representation must give one matrix per group element")
        n = self.rep[0].rows
        for m in self.rep:
            if (m.rows, m.cols) != (n, n):
                raise EquivarianceError("representation matrices must all be n x n")
        for i, a in enumerate(g.elements):
            for j, b in enumerate(g.elements):
                k = g.index_of(a @ b)
                if (self.rep[i] @ self.rep[j]).key() != self.rep[k].key():
                    raise EquivarianceError("representation is not a group homomorphism")
        levels = [tuple(sorted(set(lv))) for lv in self.filtration]
        if not levels:
            raise FiltrationError("filtration is empty")
        if levels[0] != tuple(range(g.order)):
            raise FiltrationError("G_0 must be the whole group")
        for k, lv in enumerate(levels):
            try:
                g.check_subgroup(lv)
            except ClosureError as e:
                raise FiltrationError(f"level {k}: {e}") from None
            if k and not set(lv) <= set(levels[k - 1]):
                raise FiltrationError(f"level {k} is not contained in level {k - 1}")
        if levels[-1] != (g.identity_index(),):
            raise FiltrationError("filtration must end at the trivial group")
        object.__setattr__(self, "filtration", tuple(levels))

    @classmethod
    def faithful(cls, group: GroupAction, filtration: Sequence[Sequence[int]]) -> RamifiedGaloisModule:
        return cls(group, group.elements, tuple(tuple(lv) for lv in filtration))

    @classmethod
    def tame(cls, group: GroupAction, rep: Sequence[IntMatrix] | None = None) -> RamifiedGaloisModule:
        levels = (tuple(range(group.order)),)
        if group.order > 1:
            levels += ((group.identity_index(),),)
        return cls(group, tuple(rep) if rep is not None else group.elements, levels)

    @property
    def rank(self) -> int:
        return self.rep[0].rows

    @property
    def ramification_index(self) -> int:
        return len(self.filtration[0])

    def fixed_rank(self, level: Sequence[int]) -> int:
        ident = IntMatrix.identity(self.rank)
        if self.rank == 0:
            return 0
        return self.rank - rank(vstack([self.rep[i] - ident for i in level], self.rank))


def induced_rep(group: GroupAction, images: Sequence[IntMatrix]) -> tuple[IntMatrix, ...]:
    """Extend generator images to all elements (checked to be well defined)."""
    if len(images) != len(group.generators):
        raise EquivarianceError("need one image per generator")
    n = images[0].rows if images else 0
    rep: dict[int, IntMatrix] = {group.identity_index(): IntMatrix.identity(n)}
    frontier = [group.identity_index()]
    while frontier:
        nxt = []
        for i in frontier:
            for s, img in zip(group.generators, images):
                k = group.index_of(s @ group.elements[i])
                val = img @ rep[i]
                if k in rep:
                    if rep[k].key() != val.key():
                        raise EquivarianceError("generator images do not define a homomorphism")
                else:
                    rep[k] = val
                    nxt.append(k)
        frontier = nxt
    if len(rep) != group.order:
        raise ClosureError("generators do not generate the group")
    return tuple(rep[i] for i in range(group.order))


def artin_conductor(v: RamifiedGaloisModule) -> Fraction:
    g0 = len(v.filtration[0])
    return sum((Fraction(len(lv), g0) * (v.rank - v.fixed_rank(lv)) for lv in v.filtration), Fraction(0))


def torus_conductor(cochar: RamifiedGaloisModule) -> Fraction:
    c = artin_conductor(cochar) / 2
    e = cochar.ramification_index
    if e % c.denominator:
        raise InconsistencyError(f"conductor {c} has a denominator not dividing e = {e}")
    return c


@dataclass(frozen=True)
class TraceDecomposition:
    trace: IntMatrix
    b_part: IntMatrix          # columns: basis of ker(tr)
    split_basis: IntMatrix     # columns: basis of tr(X), isomorphic to X / ker(tr)
    fixed_basis: IntMatrix     # columns: basis of X^G
    isogeny_cokernel: list[int]

    @property
    def split_rank(self) -> int:
        return self.split_basis.cols


def trace_decomposition(x: RamifiedGaloisModule) -> TraceDecomposition:
    n = x.rank
    tr = IntMatrix.zeros(n, n)
    for m in x.rep:
        tr = IntMatrix(n, n, tuple(a + b for a, b in zip(tr.entries, m.entries)))
    ker = kernel_basis(tr)
    split = image_basis(tr)
    ident = IntMatrix.identity(n)
    fixed = kernel_basis(vstack([m - ident for m in x.rep], n))
    both = hstack([ker, fixed], n)
    coker = cokernel_invariants(both)
    return TraceDecomposition(tr, ker, split, fixed, coker.torsion)


def chai_combine(c_torus: Fraction, c_abelian: Fraction, gamma: int) -> Fraction:
    """c(G) = c(T) + c(A) + gamma; gamma must be an integer and the total non-negative."""
    if isinstance(gamma, bool) or not isinstance(gamma, int):
        if isinstance(gamma, Fraction) and gamma.denominator == 1:
            gamma = int(gamma)
        else:
            raise InconsistencyError(f"gamma must be an integer, got {gamma}")
    total = Fraction(c_torus) + Fraction(c_abelian) + gamma
    if total < 0:
        raise InconsistencyError(f"combined conductor {total} is negative")
    return total


def chai_gamma(c_total: Fraction, c_torus: Fraction, c_abelian: Fraction) -> int:
    """The gamma with c(G) = c(T) + c(A) + gamma; rejects non-integral values."""
    g = Fraction(c_total) - Fraction(c_torus) - Fraction(c_abelian)
    if g.denominator != 1:
        raise InconsistencyError(f"gamma = {g} is not an integer")
    return int(g)


@dataclass(frozen=True)
class AdditivityResult:
    sub: RamifiedGaloisModule
    quotient: RamifiedGaloisModule
    c_sub: Fraction
    c_middle: Fraction
    c_quotient: Fraction
    equal: bool


def split_sequence(middle: RamifiedGaloisModule, injection: IntMatrix
                   ) -> tuple[RamifiedGaloisModule, RamifiedGaloisModule]:
    """Sub and quotient modules of 0 -> Z^k -> middle -> Q -> 0 with the given injection."""
    n = middle.rank
    if injection.rows != n:
        raise EquivarianceError(f"injection has {injection.rows} rows, module rank is {n}")
    k = injection.cols
    snf = smith_normal_form(injection)
    if snf.rank != k:
        raise EquivarianceError("injection matrix is not injective")
    d = snf.d
    sub_rep, quot_rep = [], []
    for g in middle.rep:
        w = (snf.U @ g @ injection).to_rows()
        if any(any(row) for row in w[k:]):
            raise EquivarianceError("the image of the injection is not stable under the action")
        # M = V D^-1 W[:k]
        scaled = []
        for i in range(k):
            row = []
            for x in w[i]:
                if x % d[i]:
                    raise EquivarianceError("the action does not restrict to the sublattice")
                row.append(x // d[i])
            scaled.append(row)
        sub_rep.append(snf.V @ IntMatrix.from_rows(scaled, cols=k))
        conj = (snf.U @ g @ snf.U_inv).to_rows()
        quot_rep.append(IntMatrix.from_rows([r[k:] for r in conj[k:]], cols=n - k))
    for g, m in zip(middle.rep, sub_rep):
        if (g @ injection).key() != (injection @ m).key():
            raise EquivarianceError("injection is not equivariant")
    sub = RamifiedGaloisModule(middle.group, tuple(sub_rep), middle.filtration)
    quot = RamifiedGaloisModule(middle.group, tuple(quot_rep), middle.filtration)
    return sub, quot


def additivity_check(middle: RamifiedGaloisModule, injection: IntMatrix) -> AdditivityResult:
    sub, quot = split_sequence(middle, injection)
    cs, cm, cq = torus_conductor(sub), torus_conductor(middle), torus_conductor(quot)
    return AdditivityResult(sub, quot, cs, cm, cq, cm == cs + cq)
