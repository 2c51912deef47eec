"""Acceptance suite: fourteen end-to-end criteria, each an exact check with
an optional time budget.

Under pytest every criterion is its own test and a one-line PASS/FAIL
summary per criterion is printed at the end of the session (see
``conftest.py``).  ``python tests/test_acceptance.py`` runs the same checks
and prints the same lines.
"""
from __future__ import annotations

import itertools
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from tropivol import gen
from tropivol import residue as rs
from tropivol.conductor import (RamifiedGaloisModule, additivity_check, chai_combine, chai_gamma,
                                induced_rep, torus_conductor, trace_decomposition)
from tropivol.errors import InconsistencyError, UnsupportedError
from tropivol.intlat import GroupAction, IntMatrix
from tropivol.motivic import (Component, PoincareElement, WeakNeronData, compare_check, haar_integral,
                              motivic_integral, product_data, virtual_dim)
from tropivol.presburger import AffineForm, PresburgerSet
from tropivol.vfcells import (DefinableSet, DimFunction, FixedDigits, PadicConstant, Piece, VFCell,
                              apply_affine_map, cov_check, fubini_check, integrate, integrate_threshold,
                              product, product_cell, projection_check, vol, vol_truncation_oracle)
from tropivol.zbar import NEG_INF, POS_INF, ZBar, odot, oplus

sys.path.insert(0, str(Path(__file__).parent))
from test_cli import CASES, golden_text  # noqa: E402

RESULTS: dict[int, tuple[bool, str, float]] = {}
GM = PoincareElement.of({2: 1, 0: -1})


def sphere(g: int, n: int = 1, **kw) -> VFCell:
    ineqs = []
    for j in range(n):
        e = tuple(int(k == j) for k in range(n))
        ineqs += [(e, g), (tuple(-x for x in e), -g)]
    return VFCell.build(n, ordset=PresburgerSet.of(n, ineqs), **kw)


def ball(lo: int, n: int = 1) -> VFCell:
    return VFCell.build(n, ordset=PresburgerSet.of(n, [(tuple(int(k == j) for k in range(n)), lo)
                                                       for j in range(n)]))


# ---------------------------------------------------------------------------
# criteria; each returns a short detail string and raises AssertionError on failure

def c1_semiring_laws() -> str:
    rng = random.Random(1)
    special = [NEG_INF, POS_INF]

    def draw():
        x = rng.random()
        return special[int(x * 20) % 2] if x < 0.1 else ZBar.fin(rng.randint(-10**6, 10**6))

    for _ in range(10_000):
        a, b, c = draw(), draw(), draw()
        assert oplus(a, oplus(b, c)) == oplus(oplus(a, b), c)
        assert odot(a, odot(b, c)) == odot(odot(a, b), c)
        assert oplus(a, b) == oplus(b, a) and odot(a, b) == odot(b, a)
        assert odot(a, oplus(b, c)) == oplus(odot(a, b), odot(a, c))
        assert odot(a, NEG_INF) == NEG_INF and oplus(a, NEG_INF) == a
    table = {(NEG_INF, NEG_INF): NEG_INF, (NEG_INF, POS_INF): NEG_INF, (POS_INF, POS_INF): POS_INF}
    vals = [NEG_INF, ZBar.fin(0), POS_INF]
    for a, b in itertools.product(vals, repeat=2):
        expect = table.get((a, b)) or table.get((b, a))
        if expect is None:
            expect = NEG_INF if NEG_INF in (a, b) else POS_INF if POS_INF in (a, b) else ZBar.fin(0)
        assert odot(a, b) == expect and oplus(a, b) == max(a, b)
    return "10000 triples, 9 infinity pairs"


def c2_oracle_equivalence() -> str:
    rng = gen.rng_from(7)
    for _ in range(200):
        a = gen.oracle_cell(rng, rng.randint(1, 2), rng.randint(0, 1))
        o = vol_truncation_oracle(a, 5, 16)
        assert o.stabilized and o.value == vol(a), a
        for seq in o.ell_sequences:
            assert all(x >= y for x, y in zip(seq, seq[1:])), "truncation sequence increased"
        assert all(x <= y for x, y in zip(o.i_values, o.i_values[1:])), "shift sequence decreased"
    return "200 cells"


def c3_named_volumes() -> str:
    fixed = sphere(2, depths=[2], acs=[FixedDigits((Fraction(1), Fraction(5)))])
    got = [vol(DefinableSet.of(c)) for c in (ball(0), ball(3), VFCell.build(1), fixed)]
    assert got == [ZBar.fin(0), ZBar.fin(-3), POS_INF, ZBar.fin(-4)], got
    return "0, -3, +inf, -4"


def _instances(seed: int, count: int):
    rng = gen.rng_from(seed)
    for _ in range(count):
        prof = (rng.randint(1, 2), rng.randint(0, 1), rng.randint(0, 1))
        cs = [gen.padic(rng) for _ in range(prof[0])]
        a = gen.definable_set(rng, prof, centers=cs, bounded=rng.random() < 0.5)
        yield rng, prof, cs, a, gen.dim_function(rng, prof, cs)


def c4_threshold_and_monotonicity() -> str:
    n = 0
    for rng, prof, cs, a, phi in _instances(3, 200):
        assert integrate(a, phi) == integrate_threshold(a, phi)
        bigger = phi.oplus(gen.dim_function(rng, prof, cs))
        assert integrate(a, phi) <= integrate(a, bigger)
        assert integrate(a, phi) <= integrate(a, phi.shift(rng.randint(0, 3)))
        n += 1
    return f"{n} instances"


def c5_fubini() -> str:
    rng = gen.rng_from(3)
    checked = skipped = 0
    offsets = set()
    while checked < 100:
        inst = gen.product_instance(rng)
        try:
            r = fubini_check(inst.ax, inst.ay, inst.phi)
        except UnsupportedError:
            skipped += 1
            assert skipped < 200, "too many unsupported instances"
            continue
        assert r.equal, inst
        checked += 1
        offsets |= {p.form.offset for p in inst.phi.pieces if not p.form.offset.is_finite}
    assert offsets == {NEG_INF, POS_INF}, "generated pieces lack an infinite value"
    return f"{checked} instances, {skipped} skipped as unsupported"


def c6_change_of_variables() -> str:
    r = cov_check(DefinableSet.of(ball(0)), [PadicConstant.monomial(1)], [PadicConstant()],
                  DimFunction.constant((1, 0, 0), 0))
    assert (r.lhs, r.rhs, r.equal) == (ZBar.fin(-1), ZBar.fin(-1), True)
    rng = gen.rng_from(3)
    for _ in range(120):
        mi = gen.map_instance(rng)
        assert cov_check(mi.a, mi.scale, mi.offset, mi.phi).equal, mi
    return "120 maps; uniformizer scaling gives -1 = -1"


def c7_linearity_and_projection() -> str:
    for rng, _, _, a, phi in _instances(4, 150):
        d = gen.zbar(rng, -4, 4)
        chi = gen.dim_function(rng, a.profile, list(a.cells[0].centers))
        assert integrate(a, phi.shift(d)) == odot(d, integrate(a, phi))
        assert integrate(a, phi.oplus(chi)) == oplus(integrate(a, phi), integrate(a, chi))
    rng = gen.rng_from(12)
    probes = 0
    for _ in range(60):
        inst = gen.product_instance(rng)
        psi = gen.dim_function(rng, inst.ax.profile, list(inst.ax.cells[0].centers))
        r = projection_check(inst.ax, inst.ay, psi, inst.phi, box=2)
        assert r.equal, r.mismatches
        probes += r.probes
    return f"150 linearity instances, 60 projection instances ({probes} fibers)"


def c8_residue_fubini() -> str:
    rng = gen.rng_from(8)
    for _ in range(200):
        x = gen.residue_set(rng, rng.randint(0, 3))
        y = gen.residue_set(rng, rng.randint(0, 3))
        phi = [[gen.zbar(rng) for _ in y.cells] for _ in x.cells]
        r = rs.residue_fubini_check(x, y, phi)
        direct = max((odot(ZBar.fin(cx.dim + cy.dim), phi[i][j])
                      for i, cx in enumerate(x.cells) for j, cy in enumerate(y.cells)), default=NEG_INF)
        assert r.equal and r.joint == direct
    return "200 instances"


def _fiber_poly(rng: random.Random, g: int) -> PoincareElement:
    coeffs = {e: rng.randint(-3, 3) for e in range(-2, 2 * g)}
    coeffs[2 * g] = rng.randint(1, 4)
    return PoincareElement.of(coeffs)


def c9_haar() -> str:
    rng = random.Random(9)
    n = 0
    for g in (0, 1, 2):
        for gamma in range(-5, 6):
            for _ in range(5):
                r = haar_integral(_fiber_poly(rng, g), g, gamma)
                assert r.dim == -gamma and virtual_dim(r.integral) == -gamma
                n += 1
    return f"{n} fibers"


def c10_compare() -> str:
    unit = DefinableSet.of(sphere(0))
    for gamma in range(-3, 4):
        w = WeakNeronData(1, (Component(GM, 1, gamma),))
        r = compare_check(w, unit, DimFunction.constant(unit.profile, -gamma))
        assert r.equal and r.lhs == -gamma
    shifted = DefinableSet.of(ball(1))
    bad = compare_check(WeakNeronData(1, (Component(PoincareElement.monomial(2), 1, 0),)), shifted,
                        DimFunction.constant(shifted.profile, 0))
    assert not bad.equal
    return "gamma -3..3 equal, mismatch unequal"


def c11_swap_example() -> str:
    swap = IntMatrix.from_rows([[0, 1], [1, 0]])
    z2 = GroupAction.generated_by(2, [swap])
    g2 = RamifiedGaloisModule.tame(z2)
    t = trace_decomposition(g2)
    assert t.b_part.columns() in ([[1, -1]], [[-1, 1]])
    assert t.split_rank == 1 and t.split_basis.columns() in ([[1, 1]], [[-1, -1]])
    assert t.isogeny_cokernel == [2]
    g1 = RamifiedGaloisModule.tame(z2, induced_rep(z2, [IntMatrix.from_rows([[-1]])]))
    g3 = RamifiedGaloisModule.tame(z2, induced_rep(z2, [IntMatrix.identity(1)]))
    assert (torus_conductor(g1), torus_conductor(g2), torus_conductor(g3)) == (Fraction(1, 2), Fraction(1, 2), 0)
    r = additivity_check(g2, IntMatrix.from_rows([[1], [-1]]))
    assert r.equal and (r.c_sub, r.c_middle, r.c_quotient) == (Fraction(1, 2), Fraction(1, 2), 0)
    return "c(G1) = c(G2) = 1/2, c(G3) = 0"


def c12_chai() -> str:
    assert chai_combine(Fraction(1, 2), Fraction(0), 0) == Fraction(1, 2)
    rng = gen.rng_from(12)
    n = 0
    for group in ("Z2", "Z3", "S3"):
        for _ in range(40):
            mid, inj = gen.exact_sequence(rng, group)
            r = additivity_check(mid, inj)
            gamma = chai_gamma(r.c_middle, r.c_sub, r.c_quotient)
            assert gamma == 0 and chai_combine(r.c_sub, r.c_quotient, gamma) == r.c_middle
            try:
                chai_gamma(r.c_middle + Fraction(1, 2), r.c_sub, r.c_quotient)
            except InconsistencyError:
                pass
            else:
                raise AssertionError("non-integral gamma accepted")
            n += 1
    return f"{n} sequences"


def _torus_and_abelian(rng: random.Random):
    """Bounded cell models: a torus part (units in each coordinate) and an
    abelian part (a ring ball with a finite residue factor for the
    components), each moved by a random unit-scaled affine map."""
    nt, na = rng.randint(1, 2), rng.randint(0, 2)
    comps = rng.randint(1, 3)
    t_cell = sphere(0, nt)
    a_cell = ball(0, na).replace(residue=rs.ResidueSet.of(
        [rs.ResidueCell((rs.Fixed(k),)) for k in range(comps)]))
    t = DefinableSet.of(t_cell)
    a = DefinableSet.of(a_cell)
    unit = [PadicConstant.from_dict({0: rng.choice([-2, -1, 1, 3]), 1: rng.randint(-2, 2)}) for _ in range(nt)]
    t, _ = apply_affine_map(t, unit, [gen.padic(rng, lo=1, hi=3) for _ in range(nt)])
    if na:
        a, _ = apply_affine_map(a, [PadicConstant.monomial(0, rng.choice([1, 2])) for _ in range(na)],
                                 [gen.padic(rng, lo=0, hi=2) for _ in range(na)])
    w_t = WeakNeronData(nt, (Component(_power(GM, nt), nt, 0),))
    a_poly = _power(PoincareElement.monomial(2), na) if na else PoincareElement.const(1)
    w_a = WeakNeronData(na, tuple(Component(a_poly, na, 0) for _ in range(comps)))
    return t, a, w_t, w_a


def _power(p: PoincareElement, k: int) -> PoincareElement:
    out = PoincareElement.const(1)
    for _ in range(k):
        out = out * p
    return out


def c13_product_instance() -> str:
    rng = gen.rng_from(13)
    for _ in range(50):
        t, a, w_t, w_a = _torus_and_abelian(rng)
        # density -ord of the invariant forms: 0 for the normalized forms
        phi_t = DimFunction.constant(t.profile, 0)
        phi_a = DimFunction.constant(a.profile, 0)
        g = product(t, a)
        phi_g = DimFunction(g.profile, tuple(Piece(product_cell(p.cell, q.cell),
                                                   AffineForm(p.form.coeffs + q.form.coeffs,
                                                              odot(p.form.offset, q.form.offset)))
                                             for p in phi_t.pieces for q in phi_a.pieces))
        whole = integrate(g, phi_g)
        assert whole == odot(integrate(t, phi_t), integrate(a, phi_a)) == ZBar.fin(0)
        assert fubini_check(t, a, phi_g).equal
        assert virtual_dim(motivic_integral(product_data(w_t, w_a))) == whole
    return "50 instances, dim 0"


def c14_golden_corpus() -> str:
    bad = [c.stem for c in CASES if golden_text(c) != c.with_suffix(".out").read_text()]
    assert not bad, f"mismatched goldens: {bad}"
    assert len(CASES) >= 40
    return f"{len(CASES)} golden files byte-exact"


CRITERIA = [
    (1, "semiring laws", c1_semiring_laws, 1.0),
    (2, "closed-form volume equals truncation oracle", c2_oracle_equivalence, 10.0),
    (3, "named volumes", c3_named_volumes, None),
    (4, "threshold formula and monotonicity", c4_threshold_and_monotonicity, None),
    (5, "Fubini on product instances", c5_fubini, 10.0),
    (6, "change of variables", c6_change_of_variables, None),
    (7, "linearity and projection formula", c7_linearity_and_projection, None),
    (8, "residue Fubini", c8_residue_fubini, None),
    (9, "Haar integral dimension", c9_haar, None),
    (10, "motivic versus dimensional integral", c10_compare, None),
    (11, "swap lattice example", c11_swap_example, 1.0),
    (12, "conductor combinator and integrality", c12_chai, None),
    (13, "torus times abelian product instance", c13_product_instance, None),
    (14, "CLI golden corpus", c14_golden_corpus, None),
]

SUITE_BUDGET = 60.0


def run_criterion(num: int, name: str, fn, budget: float | None) -> tuple[bool, str, float]:
    t0 = time.perf_counter()
    try:
        detail = fn()
        ok = True
    except AssertionError as e:
        detail, ok = f"assertion failed: {e}", False
    elapsed = time.perf_counter() - t0
    if ok and budget is not None and elapsed > budget:
        ok, detail = False, f"{detail}; took {elapsed:.2f}s, budget {budget:.0f}s"
    RESULTS[num] = (ok, detail, elapsed)
    return RESULTS[num]


def summary_line(num: int, name: str) -> str:
    ok, detail, elapsed = RESULTS[num]
    return f"{'PASS' if ok else 'FAIL'} criterion {num:2d} {name}: {detail} [{elapsed:.2f}s]"


@pytest.mark.parametrize("num, name, fn, budget", CRITERIA, ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(num, name, fn, budget):
    ok, detail, _ = run_criterion(num, name, fn, budget)
    print(summary_line(num, name))
    assert ok, detail


def main() -> int:
    t0 = time.perf_counter()
    for num, name, fn, budget in CRITERIA:
        run_criterion(num, name, fn, budget)
        print(summary_line(num, name), flush=True)
    total = time.perf_counter() - t0
    print(f"total {total:.2f}s")
    return 0 if all(r[0] for r in RESULTS.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
