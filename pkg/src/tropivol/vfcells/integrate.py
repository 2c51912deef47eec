"""Integrals of dimensional functions and the identities they satisfy:
threshold formula, Fubini, projection formula, change of variables."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .. import presburger as pb
from .. import residue as rs
from ..errors import ArityError, UnsupportedError
from ..presburger import AffineForm, PresburgerCell, PresburgerSet
from ..residue import ResidueSet
from ..zbar import NEG_INF, POS_INF, ZBar, odot, sup
from .cells import (DefinableSet, DimFunction, Piece, VFCell, VFPoint, apply_affine_map, coordinates,
                    evaluate, meet, product, pull_back_cell, sample_points)
from .padic import PadicConstant


def _check(a: DefinableSet, phi: DimFunction) -> None:
    if a.profile != phi.profile:
        raise ArityError(f"set has profile {a.profile} but the function has {phi.profile}")


def _pairs(a: DefinableSet, phi: DimFunction):
    for cell in a.cells:
        for p in phi.pieces:
            q = meet(cell, p.cell, p.form)
            if q is not None:
                yield q, p.form


def integrate(a: DefinableSet, phi: DimFunction) -> ZBar:
    """sup over the pieces of (density + form) odot dim(residue)."""
    _check(a, phi)
    out = NEG_INF
    for q, form in _pairs(a, phi):
        v = odot(pb.sup_affine(q.ordset, q.density().plus(form)), rs.dimension(q.residue))
        out = max(out, v)
        if out.is_posinf:
            break
    return out


def superlevel_set(a: DefinableSet, phi: DimFunction, alpha: int) -> DefinableSet:
    """{x in a : phi(x) >= alpha}."""
    _check(a, phi)
    cells = []
    for q, form in _pairs(a, phi):
        if form.offset.is_posinf:
            cells.append(q)
        elif form.offset.is_finite:
            cells.append(q.replace(ordset=pb.add_constraints(
                q.ordset, [(form.coeffs, alpha - form.offset.value)])))
    return DefinableSet(a.profile, tuple(cells))


def level_set(a: DefinableSet, phi: DimFunction, value: int) -> DefinableSet:
    """{x in a : some piece through x takes the value ``value``}."""
    _check(a, phi)
    cells = []
    for q, form in _pairs(a, phi):
        if form.offset.is_finite:
            neg = tuple(-c for c in form.coeffs)
            b = value - form.offset.value
            cells.append(q.replace(ordset=pb.add_constraints(q.ordset, [(form.coeffs, b), (neg, -b)])))
    return DefinableSet(a.profile, tuple(cells))


def integrate_threshold(a: DefinableSet, phi: DimFunction) -> ZBar:
    """sup over alpha in Z of alpha odot Vol({phi >= alpha}).

    The sup over alpha is taken symbolically: alpha becomes an extra integer
    variable constrained by form - alpha >= 0 and the objective is
    density + alpha.
    """
    _check(a, phi)
    out = NEG_INF
    for q, form in _pairs(a, phi):
        resdim = rs.dimension(q.residue)
        if form.offset.is_neginf:
            continue
        if form.offset.is_posinf:
            # every alpha qualifies: +inf as soon as the piece has a volume
            if odot(pb.sup_affine(q.ordset, q.density()), resdim) > NEG_INF:
                return POS_INF
            continue
        lifted = pb.insert_vars(q.ordset, q.ordset.dim)
        dim = lifted.dim
        lifted = pb.add_constraints(lifted, [(form.coeffs + (-1,), -form.offset.value)])
        dens = q.density()
        obj = AffineForm(dens.coeffs + (1,), dens.offset)
        out = max(out, odot(pb.sup_affine(lifted, obj), resdim))
    return out


# ---------------------------------------------------------------------------
# Fubini

@dataclass(frozen=True)
class CheckResult:
    lhs: ZBar
    rhs: ZBar
    equal: bool


def _split_residue(res: ResidueSet, mx: int) -> list[tuple[ResidueSet, ResidueSet]]:
    out = []
    my = res.width - mx
    for c in res.cells:
        if c.is_opaque:
            if my == 0:
                out.append((ResidueSet(mx, (c,)), ResidueSet.point()))
            elif mx == 0:
                out.append((ResidueSet.point(), ResidueSet(my, (c,))))
            else:
                raise UnsupportedError("an opaque residue cell spanning both factors cannot be split")
        else:
            out.append((ResidueSet(mx, (rs.ResidueCell(c.coords[:mx]),)),
                        ResidueSet(my, (rs.ResidueCell(c.coords[mx:]),))))
    return out


def _decoupled(cell: PresburgerCell, xvars: set[int]) -> bool:
    for c in (*cell.ineqs, *cell.congs):
        support = {k for k, a in enumerate(c.coeffs) if a}
        if support & xvars and support - xvars:
            return False
    return True


def _restrict(cell: PresburgerCell, keep: list[int]) -> PresburgerSet:
    keepset = set(keep)
    ineqs = tuple(pb.Ineq(tuple(i.coeffs[k] for k in keep), i.bound) for i in cell.ineqs
                  if {k for k, a in enumerate(i.coeffs) if a} <= keepset)
    congs = tuple(pb.Cong(tuple(g.coeffs[k] for k in keep), g.residue, g.modulus) for g in cell.congs
                  if {k for k, a in enumerate(g.coeffs) if a} <= keepset)
    return PresburgerSet(len(keep), (PresburgerCell(len(keep), ineqs, congs),))


def inner_function(ax: DefinableSet, ay: DefinableSet, phi: DimFunction) -> DimFunction:
    """F(x) = integral over y in ay of phi(x, y), as a dimensional function on ax."""
    nx, mx, rx = ax.profile
    ny, my, ry = ay.profile
    if phi.profile != (nx + ny, mx + my, rx + ry):
        raise ArityError(f"function profile {phi.profile} is not the product profile "
                         f"{(nx + ny, mx + my, rx + ry)}")
    xvars = list(range(nx)) + list(range(nx + ny, nx + ny + rx))
    yvars = list(range(nx, nx + ny)) + list(range(nx + ny + rx, nx + ny + rx + ry))
    xprof, yprof = ax.profile, ay.profile
    pieces: list[Piece] = []
    for q, form in _pairs(product(ax, ay), phi):
        fx = AffineForm(tuple(form.coeffs[k] for k in xvars), form.offset)
        fy_coeffs = tuple(form.coeffs[k] for k in yvars)
        for cell in q.ordset.cells:
            if pb._cell_empty(cell):
                continue
            cs = PresburgerSet(q.ordset.dim, (cell,))
            for rx_set, ry_set in _split_residue(q.residue, mx):
                def xcell(ordset):
                    return VFCell(q.centers[:nx], q.depths[:nx], q.acs[:nx], ordset, rx_set)

                def ycell(ordset):
                    return VFCell(q.centers[nx:], q.depths[nx:], q.acs[nx:], ordset, ry_set)

                bnds = [pb.bounds(cs, k) for k in xvars]
                if all(lo.is_finite and hi.is_finite for lo, hi in bnds):
                    for pt in pb.project_points(cs, xvars):
                        fiber = pb.slice(cs, dict(zip(xvars, pt)))
                        ycl = ycell(fiber)
                        off = odot(form.offset, ZBar.fin(sum(c * v for c, v in zip(fx.coeffs, pt))))
                        inner = integrate(DefinableSet(yprof, (ycl,)),
                                          DimFunction(yprof, (Piece(ycl, AffineForm(fy_coeffs, off)),)))
                        eqs = []
                        for k, v in enumerate(pt):
                            e = tuple(int(i == k) for i in range(len(xvars)))
                            eqs += [(e, v), (tuple(-x for x in e), -v)]
                        pin = pb.add_constraints(PresburgerSet.universe(len(xvars)), eqs)
                        pieces.append(Piece(xcell(pin), AffineForm.const(len(xvars), inner)))
                elif _decoupled(cell, set(xvars)):
                    ycl = ycell(_restrict(cell, yvars))
                    inner = integrate(DefinableSet(yprof, (ycl,)),
                                      DimFunction(yprof, (Piece(ycl, AffineForm(fy_coeffs, form.offset)),)))
                    pieces.append(Piece(xcell(_restrict(cell, xvars)),
                                        AffineForm(fx.coeffs, inner)))
                else:
                    raise UnsupportedError("fiber integral over an unbounded coupled value-group set")
    return DimFunction(xprof, tuple(pieces))


def fubini_check(ax: DefinableSet, ay: DefinableSet, phi: DimFunction) -> CheckResult:
    """lhs = integral over x of (integral over y of phi), rhs = integral over ax x ay."""
    joint = integrate(product(ax, ay), phi)
    iterated = integrate(ax, inner_function(ax, ay, phi))
    return CheckResult(iterated, joint, iterated == joint)


# ---------------------------------------------------------------------------
# projection formula

def fiber(phi: DimFunction, x: VFPoint, yprofile: tuple[int, int, int]) -> DimFunction:
    """y -> phi(x, y) as a dimensional function on the y-profile."""
    ny, my, ry = yprofile
    nx = len(x.ys)
    rx = len(x.zs)
    mx = len(x.residue.values)
    pieces: list[Piece] = []
    for p in phi.pieces:
        cell = p.cell
        gam = []
        ok = True
        for j in range(nx):
            xc = VFCell.build(1, centers=[cell.centers[j]], depths=[cell.depths[j]], acs=[cell.acs[j]])
            g = coordinates(xc, VFPoint((x.ys[j],)))
            if g is None:
                ok = False
                break
            gam.append(g[0])
        if not ok:
            continue
        xvars = list(range(nx)) + list(range(nx + ny, nx + ny + rx))
        xcoords = tuple(gam) + tuple(x.zs)
        sliced = pb.slice(cell.ordset, dict(zip(xvars, xcoords)))
        yvars = [k for k in range(cell.ordset.dim) if k not in xvars]
        off = odot(p.form.offset, ZBar.fin(sum(p.form.coeffs[k] * v for k, v in zip(xvars, xcoords))))
        form = AffineForm(tuple(p.form.coeffs[k] for k in yvars), off)
        for rxs, rys in _split_residue(cell.residue, mx):
            if not rxs.contains(x.residue):
                continue
            ycl = VFCell(cell.centers[nx:], cell.depths[nx:], cell.acs[nx:], sliced, rys)
            pieces.append(Piece(ycl, form))
    return DimFunction(yprofile, tuple(pieces))


@dataclass(frozen=True)
class ProjectionResult:
    equal: bool
    probes: int
    mismatches: tuple[tuple[VFPoint, ZBar, ZBar], ...]


def projection_check(ax: DefinableSet, ay: DefinableSet, psi: DimFunction, phi: DimFunction,
                     box: int = 3) -> ProjectionResult:
    """Check  integral_y psi(x) odot phi(x, y) = psi(x) odot integral_y phi(x, y)
    at representative points x of every gamma-slice of ax within the box."""
    _check(ax, psi)
    nx, mx, rx = ax.profile
    ny, my, ry = ay.profile
    if phi.profile != (nx + ny, mx + my, rx + ry):
        raise ArityError("phi must live on the product profile")
    bad = []
    probes = 0
    for cell in ax.cells:
        for x in sample_points(cell, box):
            probes += 1
            psi_x = evaluate(psi, x)
            fib = fiber(phi, x, ay.profile)
            lhs = integrate(ay, fib.shift(psi_x))
            rhs = odot(psi_x, integrate(ay, fib))
            if lhs != rhs:
                bad.append((x, lhs, rhs))
    return ProjectionResult(not bad, probes, tuple(bad))


# ---------------------------------------------------------------------------
# change of variables

@dataclass(frozen=True)
class CovResult:
    ordjac: int
    lhs: ZBar
    rhs: ZBar
    equal: bool


def pull_back(a: DefinableSet, scale: Sequence[PadicConstant], offset: Sequence[PadicConstant],
              phi: DimFunction, ordjac: int) -> DimFunction:
    """(phi o F) odot (-ord Jac F) as a function on ``a``."""
    n = a.n
    pieces = []
    for p in phi.pieces:
        centers = []
        for j in range(n):
            cands = [c.centers[j] for c in a.cells
                     if scale[j] * c.centers[j] + offset[j] == p.cell.centers[j]]
            if cands:
                centers.append(cands[0])
            elif p.cell.universal_in(j) and p.form.coeffs[j] == 0:
                centers.append(a.cells[0].centers[j] if a.cells else p.cell.centers[j])
            else:
                raise UnsupportedError(f"piece center {p.cell.centers[j]} is not the image of a source center")
        cell = pull_back_cell(p.cell, scale, centers)
        shift = sum(c * s.ord for c, s in zip(p.form.coeffs[:n], scale)) - ordjac
        pieces.append(Piece(cell, p.form.shift(shift)))
    return DimFunction(a.profile, tuple(pieces))


def cov_check(a: DefinableSet, scale: Sequence[PadicConstant], offset: Sequence[PadicConstant],
              phi: DimFunction) -> CovResult:
    """lhs = integral over a of (phi o F) odot (-ord Jac F); rhs = integral over F(a) of phi."""
    image, j = apply_affine_map(a, scale, offset)
    _check(image, phi)
    rhs = integrate(image, phi)
    lhs = integrate(a, pull_back(a, scale, offset, phi, j))
    return CovResult(j, lhs, rhs, lhs == rhs)
