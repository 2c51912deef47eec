from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tropivol import residue as rs
from tropivol.errors import ArityError, UnsupportedError
from tropivol.residue import (FREE, FREE_NONZERO, Fixed, Free, ResidueCell, ResidueSet, dimension,
                              integrate_residue, residue_fubini_check)
from tropivol.zbar import NEG_INF, POS_INF, ZBar, odot

markers = st.one_of(st.just(FREE), st.just(FREE_NONZERO), st.integers(-2, 2).map(Fixed))
values = st.one_of(st.integers(-9, 9).map(ZBar.fin), st.just(NEG_INF), st.just(POS_INF))


@st.composite
def residue_sets(draw, width=None, max_cells=4):
    w = draw(st.integers(0, 5)) if width is None else width
    cells = draw(st.lists(st.one_of(st.lists(markers, min_size=w, max_size=w).map(lambda m: ResidueCell(tuple(m))),
                                    st.integers(0, w).map(lambda d: ResidueCell.opaque(d, w))),
                          max_size=max_cells))
    return ResidueSet(w, tuple(cells))


def test_dimension_examples():
    assert dimension(ResidueSet.of([ResidueCell((FREE, Fixed(0)))])) == ZBar.fin(1)
    assert dimension(ResidueSet.empty(2)) == NEG_INF
    two = ResidueSet.of([ResidueCell((FREE, FREE_NONZERO)), ResidueCell((Fixed(1), Fixed(2)))])
    assert dimension(two) == ZBar.fin(2)


def test_integrate_examples():
    assert integrate_residue(ResidueSet.space(2), [ZBar.fin(-3)]) == ZBar.fin(-1)
    assert integrate_residue(ResidueSet.empty(2), []) == NEG_INF
    s = ResidueSet.of([ResidueCell((FREE,)), ResidueCell((Fixed(0),))])
    assert integrate_residue(s, [ZBar.fin(0), ZBar.fin(5)]) == ZBar.fin(5)
    with pytest.raises(ArityError):
        integrate_residue(s, [ZBar.fin(0)])


def test_product_examples():
    a = ResidueSet.space(1)
    b = ResidueSet.space(2)
    assert dimension(rs.product(a, b)) == ZBar.fin(3)
    assert rs.product(a, ResidueSet.empty(1)).is_empty()
    op = ResidueSet.of([ResidueCell.opaque(4)])
    assert dimension(rs.product(op, ResidueSet.point())) == ZBar.fin(4)


def test_fubini_examples():
    k = ResidueSet.space(1)
    r = residue_fubini_check(k, k, [[ZBar.fin(0)]])
    assert (r.iterated, r.joint, r.equal) == (ZBar.fin(2), ZBar.fin(2), True)
    x = ResidueSet.of([ResidueCell((Fixed(0),)), ResidueCell((FREE,))])
    r = residue_fubini_check(x, k, [[ZBar.fin(0)], [ZBar.fin(-2)]])
    assert (r.iterated, r.joint, r.equal) == (ZBar.fin(1), ZBar.fin(1), True)
    r = residue_fubini_check(ResidueSet.empty(1), k, [])
    assert (r.iterated, r.joint, r.equal) == (NEG_INF, NEG_INF, True)


def fubini_oracle(x, y, phi):
    """Max over pairs of cells of dim x_i + dim y_j + phi_ij, computed directly."""
    best = NEG_INF
    for i, cx in enumerate(x.cells):
        for j, cy in enumerate(y.cells):
            best = max(best, odot(ZBar.fin(cx.dim + cy.dim), phi[i][j]))
    return best


@settings(max_examples=200, deadline=None)
@given(residue_sets(), residue_sets(), st.data())
def test_residue_fubini_random(x, y, data):
    phi = [[data.draw(values) for _ in y.cells] for _ in x.cells]
    r = residue_fubini_check(x, y, phi)
    assert r.equal
    assert r.joint == fubini_oracle(x, y, phi)


@given(residue_sets(), residue_sets())
def test_dimension_of_product_adds(a, b):
    if a.cells and b.cells:
        assert dimension(rs.product(a, b)) == odot(dimension(a), dimension(b))


@given(residue_sets())
def test_zero_function_integrates_to_dimension(s):
    assert integrate_residue(s, [ZBar.fin(0)] * len(s.cells)) == dimension(s)


def test_markers_and_intersections():
    assert rs.intersect_markers(FREE, Fixed(3)) == Fixed(3)
    assert rs.intersect_markers(FREE_NONZERO, Fixed(0)) is None
    assert rs.intersect_markers(Free(frozenset({1})), FREE_NONZERO) == Free(frozenset({0, 1}))
    assert Free(frozenset({0, 1})).representative() == Fraction(2)
    a = ResidueSet.of([ResidueCell((FREE, Fixed(1)))])
    b = ResidueSet.of([ResidueCell((FREE_NONZERO, FREE))])
    assert rs.intersect(a, b).cells == (ResidueCell((FREE_NONZERO, Fixed(1))),)


def test_opaque_cells_are_generic():
    op = ResidueCell.opaque(1, 2)
    assert rs.intersect_cells(op, ResidueCell((FREE, FREE))) == op
    assert rs.intersect_cells(op, op) == op
    with pytest.raises(UnsupportedError):
        rs.intersect_cells(op, ResidueCell((FREE, Fixed(0))))
    assert ResidueSet.of([op]).contains(op.representative())


def test_width_mismatch():
    with pytest.raises(ArityError):
        ResidueSet(2, (ResidueCell((FREE,)),))
    with pytest.raises(ArityError):
        rs.intersect(ResidueSet.space(1), ResidueSet.space(2))
