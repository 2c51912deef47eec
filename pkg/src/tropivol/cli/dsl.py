"""Translate parsed S-expressions into engine objects, and back."""
from __future__ import annotations

import sys
from fractions import Fraction
from typing import Callable, Sequence

from ..conductor import RamifiedGaloisModule, induced_rep
from ..errors import TropivolError, describe
from ..intlat import GroupAction, IntMatrix
from ..motivic import Component, PoincareElement, WeakNeronData
from ..presburger import AffineForm, Cong, Ineq, PresburgerCell, PresburgerSet
from ..residue import FREE, FREE_NONZERO, Fixed, Free, ResidueCell, ResidueSet
from ..vfcells import (FREE_UNIT, DefinableSet, DimFunction, FixedDigits, FreeUnit, PadicConstant, Piece,
                       VFCell)
from ..zbar import NEG_INF, POS_INF, ZBar
from .sexp import Atom, Node, SList, lst, num, sym

COEFF_WARN = 2 ** 32


class DslError(TropivolError):
    def __init__(self, message: str, node: Node | None):
        super().__init__(message)
        self.message = message
        self.line = node.line if node is not None else 0
        self.col = node.col if node is not None else 0

    @classmethod
    def wrap(cls, e: Exception, node: Node | None) -> DslError:
        return cls(describe(e), node)


class Context:
    """Collects warnings while building."""

    def __init__(self, warn: Callable[[str, Node], None] | None = None):
        self._warn = warn or (lambda msg, node: None)

    def warn(self, msg: str, node: Node) -> None:
        self._warn(msg, node)


# ---------------------------------------------------------------------------
# primitive readers

def expect_list(node: Node, head: str | None = None) -> SList:
    if not isinstance(node, SList):
        raise DslError(f"expected a list{f' ({head} ...)' if head else ''}, got {_show(node)}", node)
    if head is not None and node.head != head:
        raise DslError(f"expected ({head} ...), got ({node.head or '...'} ...)", node)
    return node


def _show(node: Node) -> str:
    from .sexp import render
    s = render(node)
    return s if len(s) < 40 else s[:37] + "..."


def integer(node: Node, ctx: Context | None = None) -> int:
    if not (isinstance(node, Atom) and node.kind == "int"):
        raise DslError(f"expected an integer, got {_show(node)}", node)
    if ctx is not None and abs(node.value) > COEFF_WARN:
        ctx.warn("coefficient magnitude exceeds 2^32", node)
    return node.value


def rational(node: Node) -> Fraction:
    if not (isinstance(node, Atom) and node.kind in ("int", "rat")):
        raise DslError(f"expected a rational number, got {_show(node)}", node)
    return Fraction(node.value)


def symbol(node: Node) -> str:
    if not (isinstance(node, Atom) and node.is_symbol):
        raise DslError(f"expected a symbol, got {_show(node)}", node)
    return node.value


def zbar(node: Node) -> ZBar:
    if isinstance(node, Atom) and node.is_symbol:
        if node.value == "-inf":
            return NEG_INF
        if node.value in ("+inf", "inf"):
            return POS_INF
    return ZBar.fin(integer(node))


def int_vector(node: Node, ctx: Context | None = None) -> tuple[int, ...]:
    lst_ = expect_list(node)
    return tuple(integer(x, ctx) for x in lst_.items)


class Fields:
    """Keyed sub-forms of a list: singleton keys may appear once."""

    def __init__(self, node: SList, singles: Sequence[str], multis: Sequence[str] = (),
                 positional_ok: bool = False):
        self.node = node
        self.one: dict[str, SList] = {}
        self.many: dict[str, list[SList]] = {k: [] for k in multis}
        self.positional: list[Node] = []
        for item in node.args:
            if isinstance(item, SList) and item.head in singles:
                if item.head in self.one:
                    prev = self.one[item.head]
                    raise DslError(f"duplicate key '{item.head}' (first at {prev.line}:{prev.col})", item)
                self.one[item.head] = item
            elif isinstance(item, SList) and item.head in self.many:
                self.many[item.head].append(item)
            elif positional_ok:
                self.positional.append(item)
            else:
                known = ", ".join(list(singles) + list(multis))
                raise DslError(f"unexpected {_show(item)} in ({node.head} ...); expected one of: {known}", item)

    def get(self, key: str) -> SList | None:
        return self.one.get(key)

    def need(self, key: str) -> SList:
        if key not in self.one:
            raise DslError(f"({self.node.head} ...) is missing ({key} ...)", self.node)
        return self.one[key]

    def int_of(self, key: str, default: int | None = None) -> int:
        f = self.get(key)
        if f is None:
            if default is None:
                self.need(key)
            return default
        if len(f.args) != 1:
            raise DslError(f"({key} ...) takes exactly one value", f)
        return integer(f.args[0])


# ---------------------------------------------------------------------------
# lattices and groups

def matrix(node: Node, ctx: Context | None = None) -> IntMatrix:
    m = expect_list(node, "mat")
    rows = []
    for r in m.args:
        r = expect_list(r, "row")
        rows.append([integer(x, ctx) for x in r.args])
    if not rows:
        raise DslError("empty matrix", m)
    if any(len(r) != len(rows[0]) for r in rows):
        raise DslError("rows of a matrix must have equal length", m)
    return IntMatrix.from_rows(rows)


def galmod(node: Node, ctx: Context | None = None) -> RamifiedGaloisModule:
    """A Galois lattice.

    The ``gen`` matrices generate the group and must act faithfully.  By
    default they are also the module; optional ``image`` matrices (one per
    generator) give a different representation of the same group.
    """
    g = expect_list(node, "galmod")
    f = Fields(g, ["rank", "filtration", "elements"], ["gen", "image"])
    n = f.int_of("rank")

    def square_list(key: str) -> list[IntMatrix]:
        mats = []
        for item in f.many[key]:
            if len(item.args) != 1:
                raise DslError(f"({key} ...) takes one matrix", item)
            m = matrix(item.args[0], ctx)
            if m.rows != m.cols or (mats and m.rows != mats[0].rows):
                raise DslError(f"{key} matrices must be square of one size", item)
            mats.append(m)
        return mats

    gens = square_list("gen")
    images = square_list("image")
    if not gens:
        raise DslError("(galmod ...) needs at least one (gen ...)", g)
    action_rank = gens[0].rows
    module = images or gens
    if module[0].rows != n:
        where = (f.many["image"] or f.many["gen"])[0]
        raise DslError(f"{'image' if images else 'generator'} is {module[0].rows}x{module[0].rows}, "
                       f"rank is {n}", where)
    if images and len(images) != len(gens):
        raise DslError(f"{len(images)} images for {len(gens)} generators", f.many["image"][0])
    el = f.get("elements")
    try:
        if el is not None:
            group = GroupAction(action_rank, tuple(gens), tuple(matrix(x, ctx) for x in el.args))
        else:
            group = GroupAction.generated_by(action_rank, gens)
        rep = induced_rep(group, images) if images else group.elements
    except TropivolError as e:
        raise DslError.wrap(e, el or g) from None
    filt = f.get("filtration")
    if filt is None:
        try:
            return RamifiedGaloisModule.tame(group, rep)
        except TropivolError as e:
            raise DslError.wrap(e, g) from None
    levels = []
    for k, lv in enumerate(filt.args):
        lv = expect_list(lv)
        if lv.head != f"g{k}":
            raise DslError(f"filtration level {k} must be written (g{k} ...)", lv)
        if len(lv.args) != 1:
            raise DslError("a filtration level takes one description: all, id, (gens i ...) "
                           "or (elements (mat ...) ...)", lv)
        spec = lv.args[0]
        if isinstance(spec, Atom) and spec.value == "all":
            levels.append(tuple(range(group.order)))
        elif isinstance(spec, Atom) and spec.value == "id":
            levels.append((group.identity_index(),))
        elif isinstance(spec, SList) and spec.head == "gens":
            idx = [integer(x) for x in spec.args]
            for i in idx:
                if not 0 <= i < len(gens):
                    raise DslError(f"generator index {i} out of range", spec)
            try:
                sub = GroupAction.generated_by(action_rank, [gens[i] for i in idx])
                levels.append(tuple(sorted(group.index_of(e) for e in sub.elements)))
            except TropivolError as e:
                raise DslError.wrap(e, spec) from None
        elif isinstance(spec, SList) and spec.head == "elements":
            try:
                levels.append(tuple(group.index_of(matrix(x, ctx)) for x in spec.args))
            except TropivolError as e:
                raise DslError.wrap(e, spec) from None
        else:
            raise DslError(f"bad filtration level {_show(spec)}", spec)
    try:
        return RamifiedGaloisModule(group, rep, tuple(levels))
    except TropivolError as e:
        raise DslError.wrap(e, filt) from None


# ---------------------------------------------------------------------------
# Presburger and residue sets

def pset(node: Node, ctx: Context | None = None) -> PresburgerSet:
    p = expect_list(node, "pset")
    f = Fields(p, ["r"], ["cell"])
    r = f.int_of("r")
    cells = []
    for c in f.many["cell"]:
        ineqs, congs = [], []
        for con in c.args:
            con = expect_list(con)
            kind = con.head
            if kind in ("ge", "le", "eq"):
                if len(con.args) != 2:
                    raise DslError(f"({kind} (coeffs...) bound)", con)
                a = int_vector(con.args[0], ctx)
                b = integer(con.args[1], ctx)
                if len(a) != r:
                    raise DslError(f"{len(a)} coefficients for r = {r}", con.args[0])
                neg = tuple(-x for x in a)
                if kind in ("ge", "eq"):
                    ineqs.append(Ineq(a, b))
                if kind in ("le", "eq"):
                    ineqs.append(Ineq(neg, -b))
            elif kind == "cong":
                if len(con.args) != 3:
                    raise DslError("(cong (coeffs...) residue modulus)", con)
                a = int_vector(con.args[0], ctx)
                if len(a) != r:
                    raise DslError(f"{len(a)} coefficients for r = {r}", con.args[0])
                mod = integer(con.args[2], ctx)
                if mod < 2:
                    raise DslError("congruence modulus must be >= 2", con.args[2])
                congs.append(Cong(a, integer(con.args[1], ctx) % mod, mod))
            else:
                raise DslError(f"unknown constraint ({kind} ...); use ge, le, eq or cong", con)
        cells.append(PresburgerCell(r, tuple(ineqs), tuple(congs)))
    return PresburgerSet(r, tuple(cells))


def rset(node: Node) -> ResidueSet:
    """Residue set; an opaque cell without explicit width takes the width of the set."""
    p = expect_list(node, "rset")
    f = Fields(p, ["width"], ["cell"])
    cells: list[ResidueCell | tuple[int, Node]] = []
    for c in f.many["cell"]:
        if len(c.args) == 1 and isinstance(c.args[0], SList) and c.args[0].head == "opaque":
            o = c.args[0]
            if len(o.args) not in (1, 2):
                raise DslError("(opaque dim [width])", o)
            d = integer(o.args[0])
            w = integer(o.args[1]) if len(o.args) == 2 else None
            if d < 0 or (w is not None and w < 0):
                raise DslError("opaque dimension and width must be non-negative", o)
            cells.append(ResidueCell.opaque(d, w) if w is not None else (d, o))
            continue
        marks = []
        for m in c.args:
            if isinstance(m, Atom) and m.value == "free":
                marks.append(FREE)
            elif isinstance(m, Atom) and m.value == "nonzero":
                marks.append(FREE_NONZERO)
            elif isinstance(m, SList) and m.head == "fixed" and len(m.args) == 1:
                marks.append(Fixed(rational(m.args[0])))
            elif isinstance(m, SList) and m.head == "except":
                marks.append(Free(frozenset(rational(x) for x in m.args)))
            else:
                raise DslError(f"bad residue coordinate {_show(m)}; use free, nonzero, (fixed q), "
                               "(except q ...) or (opaque d [w])", m)
        cells.append(ResidueCell(tuple(marks)))
    widths = {c.width for c in cells if isinstance(c, ResidueCell)}
    if f.get("width") is not None:
        widths.add(f.int_of("width"))
    if len(widths) > 1:
        raise DslError(f"residue cells have different widths {sorted(widths)}", p)
    if widths:
        width = widths.pop()
    else:
        pending = {c[0] for c in cells if not isinstance(c, ResidueCell)}
        if len(pending) > 1:
            raise DslError("opaque cells of different dimensions need an explicit width", p)
        width = pending.pop() if pending else 0
    out = []
    for c in cells:
        if isinstance(c, ResidueCell):
            out.append(c)
        else:
            d, o = c
            if d > width:
                raise DslError(f"opaque dimension {d} exceeds the width {width}", o)
            out.append(ResidueCell.opaque(d, width))
    return ResidueSet(width, tuple(out))


# ---------------------------------------------------------------------------
# valued-field objects

def padic(node: Node) -> PadicConstant:
    if isinstance(node, Atom) and node.kind == "int" and node.value == 0:
        return PadicConstant()
    lst_ = expect_list(node)
    coeffs: dict[int, Fraction] = {}
    for pair in lst_.items:
        pair = expect_list(pair)
        if len(pair.items) != 2:
            raise DslError("constant digits are (exponent digit) pairs", pair)
        e = integer(pair.items[0])
        d = rational(pair.items[1])
        if e in coeffs:
            raise DslError(f"exponent {e} repeated", pair)
        if d == 0:
            raise DslError("digits must be nonzero", pair.items[1])
        coeffs[e] = d
    return PadicConstant.from_dict(coeffs)


def vfcell(node: Node, ctx: Context | None = None) -> VFCell:
    c = expect_list(node, "vfcell")
    f = Fields(c, ["n", "r", "center", "acdepth", "ac", "ordset", "residue"])
    n = f.int_of("n", 1)
    centers = [PadicConstant()] * n
    if (cn := f.get("center")) is not None:
        if len(cn.args) != n:
            raise DslError(f"{len(cn.args)} centers for n = {n}", cn)
        centers = [padic(x) for x in cn.args]
    depths = [1] * n
    if (dn := f.get("acdepth")) is not None:
        if len(dn.args) != n:
            raise DslError(f"{len(dn.args)} depths for n = {n}", dn)
        depths = [integer(x) for x in dn.args]
        for x, d in zip(dn.args, depths):
            if d < 1:
                raise DslError("depth must be positive", x)
    acs: list = [FREE_UNIT] * n
    if (an := f.get("ac")) is not None:
        acs = []
        items = list(an.args)
        k = 0
        while k < len(items):
            it = items[k]
            if isinstance(it, Atom) and it.value == "free":
                acs.append(FREE_UNIT)
                k += 1
            elif isinstance(it, Atom) and it.value == "fixed" and k + 1 < len(items):
                digs = expect_list(items[k + 1])
                vals = tuple(rational(x) for x in digs.items)
                if not vals or vals[0] == 0:
                    raise DslError("fixed angular component needs a nonzero leading digit", digs)
                acs.append(FixedDigits(vals))
                k += 2
            else:
                raise DslError("angular components are 'free' or 'fixed (d ...)'", it)
        if len(acs) != n:
            raise DslError(f"{len(acs)} angular-component constraints for n = {n}", an)
    for j, (ac, d) in enumerate(zip(acs, depths)):
        if isinstance(ac, FixedDigits):
            if f.get("acdepth") is None:
                depths[j] = len(ac.digits)
            elif len(ac.digits) != depths[j]:
                raise DslError(f"coordinate {j}: {len(ac.digits)} fixed digits but depth {depths[j]}",
                               f.get("ac"))
    r_decl = f.get("r")
    if (on := f.get("ordset")) is not None:
        if len(on.args) != 1:
            raise DslError("(ordset (pset ...))", on)
        ordset = pset(on.args[0], ctx)
        r = ordset.dim - n
        if r < 0 or (r_decl is not None and f.int_of("r") != r):
            raise DslError(f"ordset has {ordset.dim} variables; expected n + r", on)
    else:
        r = f.int_of("r", 0)
        ordset = PresburgerSet.universe(n + r)
    residue = ResidueSet.point()
    if (rn := f.get("residue")) is not None:
        if len(rn.args) != 1:
            raise DslError("(residue (rset ...))", rn)
        residue = rset(rn.args[0])
    try:
        return VFCell(tuple(centers), tuple(depths), tuple(acs), ordset, residue)
    except TropivolError as e:
        raise DslError.wrap(e, c) from None


def defset(node: Node, ctx: Context | None = None) -> DefinableSet:
    s = expect_list(node)
    if s.head == "vfcell":
        return DefinableSet.of(vfcell(s, ctx))
    if s.head != "defset":
        raise DslError(f"expected (defset ...) or (vfcell ...), got ({s.head or '...'} ...)", s)
    f = Fields(s, ["n", "m", "r"], ["vfcell"])
    cells = [vfcell(x, ctx) for x in f.many["vfcell"]]
    if cells:
        prof = cells[0].profile
    else:
        prof = (f.int_of("n", 1), f.int_of("m", 0), f.int_of("r", 0))
    declared = (f.int_of("n", prof[0]), f.int_of("m", prof[1]), f.int_of("r", prof[2]))
    if declared != prof:
        raise DslError(f"declared profile {declared} differs from the cells' profile {prof}", s)
    for x, c in zip(f.many["vfcell"], cells):
        if c.profile != prof:
            raise DslError(f"cell profile {c.profile} differs from {prof}", x)
    return DefinableSet(prof, tuple(cells))


def form(node: Node, dim: int, ctx: Context | None = None) -> AffineForm:
    fn = expect_list(node)
    if fn.head == "const":
        if len(fn.args) != 1:
            raise DslError("(const value)", fn)
        return AffineForm.const(dim, zbar(fn.args[0]))
    if fn.head != "form" or len(fn.args) != 2:
        raise DslError("expected (form (coeffs ...) offset) or (const value)", fn)
    coeffs = int_vector(fn.args[0], ctx)
    if len(coeffs) != dim:
        raise DslError(f"form has {len(coeffs)} coefficients; the cell has n + r = {dim}", fn.args[0])
    return AffineForm(coeffs, zbar(fn.args[1]))


def dimfun(node: Node, profile: tuple[int, int, int] | None, ctx: Context | None = None) -> DimFunction:
    """Read a dimensional function; with profile None it is taken from the first piece."""
    d = expect_list(node, "dimfun")
    f = Fields(d, [], ["piece", "everywhere"])
    pieces = []
    for p in f.many["piece"]:
        if len(p.args) != 2:
            raise DslError("(piece (vfcell ...) FORM)", p)
        cell = vfcell(p.args[0], ctx)
        if profile is None:
            profile = cell.profile
        n, m, r = profile
        if cell.profile != profile:
            raise DslError(f"piece profile {cell.profile} differs from the expected {profile}", p.args[0])
        pieces.append(Piece(cell, form(p.args[1], n + r, ctx)))
    if profile is None:
        raise DslError("cannot infer the profile of a function without pieces", d)
    n, m, r = profile
    for e in f.many["everywhere"]:
        if len(e.args) != 1:
            raise DslError("(everywhere FORM)", e)
        pieces.extend(DimFunction.everywhere(profile, form(e.args[0], n + r, ctx)).pieces)
    return DimFunction(profile, tuple(pieces))


def affine_map(node: Node, n: int) -> tuple[list[PadicConstant], list[PadicConstant]]:
    mp = expect_list(node, "map")
    f = Fields(mp, ["scale", "offset"])
    scale = [padic(x) for x in f.need("scale").args]
    off_node = f.get("offset")
    offset = [padic(x) for x in off_node.args] if off_node is not None else [PadicConstant()] * n
    if len(scale) != n or len(offset) != n:
        raise DslError(f"map needs {n} scale and offset entries", mp)
    return scale, offset


# ---------------------------------------------------------------------------
# motivic

def poly(node: Node) -> PoincareElement:
    p = expect_list(node, "poly")
    terms = []
    for pair in p.args:
        pair = expect_list(pair)
        if len(pair.items) != 2:
            raise DslError("polynomial terms are (exponent coefficient) pairs", pair)
        terms.append((integer(pair.items[0]), integer(pair.items[1])))
    return PoincareElement(tuple(terms))


def weak_neron(node: Node) -> WeakNeronData:
    w = expect_list(node, "weak-neron")
    f = Fields(w, ["dimx"], ["comp"])
    comps = []
    for c in f.many["comp"]:
        cf = Fields(c, ["poly", "dim", "ord"])
        comps.append(Component(poly(cf.need("poly")), cf.int_of("dim"), cf.int_of("ord")))
    try:
        return WeakNeronData(f.int_of("dimx"), tuple(comps))
    except TropivolError as e:
        raise DslError.wrap(e, w) from None


# ---------------------------------------------------------------------------
# writers (objects -> S-expressions), used by `tropivol gen`

def w_zbar(z: ZBar) -> Atom:
    return sym(str(z)) if not z.is_finite else num(z.value)


def w_padic(c: PadicConstant) -> Node:
    if c.is_zero():
        return num(0)
    return SList(tuple(lst(e, d) for e, d in c.terms))


def w_pset(s: PresburgerSet) -> SList:
    cells = []
    for c in s.cells:
        cons = [lst("ge", lst(*i.coeffs), i.bound) for i in c.ineqs]
        cons += [lst("cong", lst(*g.coeffs), g.residue, g.modulus) for g in c.congs]
        cells.append(lst("cell", *cons))
    return lst("pset", lst("r", s.dim), *cells)


def w_rset(s: ResidueSet) -> SList:
    cells = []
    for c in s.cells:
        if c.is_opaque:
            cells.append(lst("cell", lst("opaque", c.declared_dim, c.width)))
            continue
        marks: list[Node] = []
        for mk in c.coords:
            if isinstance(mk, Fixed):
                marks.append(lst("fixed", mk.value))
            elif mk == FREE:
                marks.append(sym("free"))
            elif mk == FREE_NONZERO:
                marks.append(sym("nonzero"))
            else:
                marks.append(lst("except", *sorted(mk.excluded)))
        cells.append(lst("cell", *marks))
    return lst("rset", lst("width", s.width), *cells)


def w_vfcell(c: VFCell) -> SList:
    acs: list[Node] = []
    for ac in c.acs:
        if isinstance(ac, FreeUnit):
            acs.append(sym("free"))
        else:
            acs += [sym("fixed"), lst(*ac.digits)]
    return lst("vfcell", lst("n", c.n), lst("center", *(w_padic(x) for x in c.centers)),
               lst("acdepth", *c.depths), lst("ac", *acs), lst("ordset", w_pset(c.ordset)),
               lst("residue", w_rset(c.residue)))


def w_defset(a: DefinableSet) -> SList:
    n, m, r = a.profile
    return lst("defset", lst("n", n), lst("m", m), lst("r", r), *(w_vfcell(c) for c in a.cells))


def w_form(f: AffineForm) -> SList:
    return lst("form", lst(*f.coeffs), w_zbar(f.offset))


def w_dimfun(phi: DimFunction) -> SList:
    return lst("dimfun", *(lst("piece", w_vfcell(p.cell), w_form(p.form)) for p in phi.pieces))


def w_map(scale, offset) -> SList:
    return lst("map", lst("scale", *(w_padic(x) for x in scale)), lst("offset", *(w_padic(x) for x in offset)))


def w_matrix(m: IntMatrix) -> SList:
    return lst("mat", *(lst("row", *r) for r in m.to_rows()))


def w_galmod(v: RamifiedGaloisModule) -> SList:
    g = v.group
    levels = []
    for k, lv in enumerate(v.filtration):
        if len(lv) == g.order:
            spec: Node = sym("all")
        elif lv == (g.identity_index(),):
            spec = sym("id")
        else:
            spec = lst("elements", *(w_matrix(g.elements[i]) for i in lv))
        levels.append(lst(f"g{k}", spec))
    images = [] if v.rep == g.elements else [lst("image", w_matrix(v.rep[g.index_of(x)])) for x in g.generators]
    return lst("galmod", lst("rank", v.rank), *(lst("gen", w_matrix(x)) for x in g.generators), *images,
               lst("filtration", *levels))


def w_poly(p: PoincareElement) -> SList:
    return lst("poly", *(lst(e, c) for e, c in reversed(p.terms)))


def w_weak_neron(w: WeakNeronData) -> SList:
    return lst("weak-neron", lst("dimx", w.dim_x),
               *(lst("comp", w_poly(c.poincare), lst("dim", c.dim), lst("ord", c.ord_omega))
                 for c in w.components))
