from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tropivol import gen
from tropivol.cli import dsl
from tropivol.cli.sexp import Atom, ParseError, SList, lst, parse, pretty, render, render_doc
from tropivol.intlat import IntMatrix
from tropivol.motivic import Component, PoincareElement, WeakNeronData
from tropivol.presburger import sup_affine
from tropivol.vfcells import integrate, vol

symbols = st.from_regex(r"[a-z][a-z0-9\-]{0,6}", fullmatch=True)
atoms = st.one_of(
    st.integers(-10**12, 10**12).map(lambda v: Atom(v, "int")),
    st.fractions(max_denominator=50).filter(lambda q: q.denominator > 1).map(lambda q: Atom(q, "rat")),
    symbols.map(lambda s: Atom(s, "sym")),
)
trees = st.recursive(atoms, lambda kids: st.lists(kids, max_size=5).map(lambda xs: SList(tuple(xs))),
                     max_leaves=30)


@given(trees)
def test_render_parse_round_trip(t):
    assert parse(render(t)) == [t]
    assert parse(pretty(t, width=20)) == [t]


@given(st.lists(trees, min_size=1, max_size=3))
def test_document_round_trip(ts):
    assert parse(render_doc(ts)) == ts


def test_matrix_form():
    (node,) = parse("(mat (row 1 1) (row -1 1))")
    assert dsl.matrix(node) == IntMatrix.from_rows([[1, 1], [-1, 1]])


def test_locations_and_comments():
    (a, b) = parse("; comment\n(x 1)\n  (y 3/6 z)")
    assert (a.line, a.col) == (2, 1)
    assert (b.line, b.col) == (3, 3)
    assert b.items[1] == Atom(Fraction(1, 2), "rat")
    assert b.items[1].col == 6
    assert parse("(q 4/2)")[0].items[1] == Atom(2, "int")


@pytest.mark.parametrize("text, line, col, fragment", [
    ("(a\n (b 1)", 2, 7, "opened at 1:1"),
    ("(a))", 1, 4, "unexpected ')'"),
    ("(a 1/0)", 1, 4, "zero denominator"),
    ("(a #x)", 1, 4, "bad atom"),
    ("  ; only a comment\n", 2, 1, "empty document"),
])
def test_parse_errors(text, line, col, fragment):
    with pytest.raises(ParseError) as e:
        parse(text)
    assert (e.value.line, e.value.col) == (line, col)
    assert fragment in e.value.message


def test_duplicate_key_reports_both_positions():
    (node,) = parse("(vfcell (n 1)\n  (n 2))")
    with pytest.raises(dsl.DslError) as e:
        dsl.vfcell(node)
    assert (e.value.line, e.value.col) == (2, 3)
    assert "first at 1:9" in e.value.message


def test_large_coefficient_warns():
    seen = []
    ctx = dsl.Context(lambda msg, node: seen.append((msg, node.line, node.col)))
    (node,) = parse(f"(pset (r 1) (cell (ge (1) {2**33})))")
    dsl.pset(node, ctx)
    assert seen and seen[0][1:] == (1, 27)


def reread(writer, reader, obj, *args):
    text = render(writer(obj))
    (node,) = parse(text)
    return reader(node, *args)


def test_engine_objects_round_trip():
    rng = gen.rng_from(13)
    for _ in range(60):
        prof = (rng.randint(1, 2), rng.randint(0, 2), rng.randint(0, 1))
        cs = [gen.padic(rng) for _ in range(prof[0])]
        a = gen.definable_set(rng, prof, centers=cs, bounded=rng.random() < 0.5)
        phi = gen.dim_function(rng, prof, cs)
        a2 = reread(dsl.w_defset, dsl.defset, a)
        phi2 = reread(dsl.w_dimfun, dsl.dimfun, phi, prof)
        assert a2.profile == a.profile and vol(a2) == vol(a)
        assert integrate(a2, phi2) == integrate(a, phi)
        c = gen.padic(rng)
        assert reread(dsl.w_padic, lambda n: dsl.padic(n), c) == c
        s = gen.pset(rng, 2)
        s2 = reread(dsl.w_pset, dsl.pset, s)
        f = gen.form(rng, 2)
        assert sup_affine(s2, f) == sup_affine(s, f)
        r = gen.residue_set(rng, 2)
        assert reread(dsl.w_rset, lambda n: dsl.rset(n), r) == r


def test_galois_modules_round_trip():
    rng = gen.rng_from(4)
    for group in ("Z2", "Z3", "S3"):
        for _ in range(10):
            mid, _ = gen.exact_sequence(rng, group)
            back = reread(dsl.w_galmod, dsl.galmod, mid)
            assert [m.key() for m in back.rep] == [m.key() for m in mid.rep]
            assert back.filtration == mid.filtration


def test_weak_neron_round_trip():
    w = WeakNeronData(1, (Component(PoincareElement.of({2: 1, 0: -1}), 1, 3),
                          Component(PoincareElement.of({2: 2}), 1, -1)))
    assert reread(dsl.w_weak_neron, lambda n: dsl.weak_neron(n), w) == w


def test_builder_helpers():
    node = lst("cell", 1, Fraction(1, 3), lst("x"))
    assert render(node) == "(cell 1 1/3 (x))"
    assert node.head == "cell" and len(node.args) == 3
    assert SList((SList(()),)).head is None
