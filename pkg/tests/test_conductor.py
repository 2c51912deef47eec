from __future__ import annotations

from fractions import Fraction

import pytest

from tropivol import gen
from tropivol.conductor import (RamifiedGaloisModule, additivity_check, artin_conductor, chai_combine, chai_gamma,
                                induced_rep, split_sequence, torus_conductor, trace_decomposition)
from tropivol.errors import EquivarianceError, FiltrationError, InconsistencyError
from tropivol.intlat import GroupAction, IntMatrix, cokernel_invariants

SWAP = IntMatrix.from_rows([[0, 1], [1, 0]])
Z2 = GroupAction.generated_by(2, [SWAP])
SWAP_MODULE = RamifiedGaloisModule.tame(Z2)


def sign_module() -> RamifiedGaloisModule:
    return RamifiedGaloisModule.tame(Z2, induced_rep(Z2, [IntMatrix.from_rows([[-1]])]))


def trivial_module(n: int) -> RamifiedGaloisModule:
    return RamifiedGaloisModule.tame(Z2, induced_rep(Z2, [IntMatrix.identity(n)]))


def trace(m: IntMatrix) -> int:
    return sum(m[i, i] for i in range(m.rows))


def fixed_rank_by_characters(v: RamifiedGaloisModule) -> Fraction:
    # multiplicity of the trivial character: (1/|G|) sum of traces
    return Fraction(sum(trace(m) for m in v.rep), len(v.rep))


def direct_sum(a: RamifiedGaloisModule, b: RamifiedGaloisModule) -> RamifiedGaloisModule:
    reps = tuple(gen._block_diag([x, y]) for x, y in zip(a.rep, b.rep))
    return RamifiedGaloisModule(a.group, reps, a.filtration)


def test_artin_examples():
    assert artin_conductor(SWAP_MODULE) == 1
    assert artin_conductor(trivial_module(3)) == 0
    wild = RamifiedGaloisModule.faithful(Z2, [[0, 1], [0, 1], [Z2.identity_index()]])
    assert artin_conductor(wild) == 2


def test_torus_conductor_examples():
    assert torus_conductor(sign_module()) == Fraction(1, 2)
    assert torus_conductor(trivial_module(2)) == 0
    assert torus_conductor(SWAP_MODULE) == Fraction(1, 2)


def test_trace_decomposition_examples():
    t = trace_decomposition(SWAP_MODULE)
    assert t.b_part.columns() in ([[1, -1]], [[-1, 1]])
    assert t.split_rank == 1 and t.isogeny_cokernel == [2]
    t = trace_decomposition(trivial_module(1))
    assert t.b_part.cols == 0 and t.split_rank == 1
    t = trace_decomposition(sign_module())
    assert t.b_part.cols == 1 and t.split_rank == 0 and t.isogeny_cokernel == []


def test_chai_examples():
    assert chai_combine(Fraction(1, 2), Fraction(0), 0) == Fraction(1, 2)
    assert chai_combine(Fraction(0), Fraction(0), 0) == 0
    assert chai_combine(Fraction(1, 2), Fraction(1, 3), 2) == Fraction(17, 6)
    with pytest.raises(InconsistencyError):
        chai_combine(Fraction(1, 2), Fraction(0), -1)
    with pytest.raises(InconsistencyError):
        chai_combine(Fraction(0), Fraction(0), Fraction(1, 2))
    assert chai_gamma(Fraction(17, 6), Fraction(1, 2), Fraction(1, 3)) == 2
    with pytest.raises(InconsistencyError):
        chai_gamma(Fraction(1), Fraction(1, 2), Fraction(0))


def test_additivity_examples():
    r = additivity_check(SWAP_MODULE, IntMatrix.from_rows([[1], [-1]]))
    assert (r.c_middle, r.c_sub, r.c_quotient, r.equal) == (Fraction(1, 2), Fraction(1, 2), 0, True)
    r = additivity_check(SWAP_MODULE, IntMatrix.from_rows([[1], [1]]))
    assert (r.c_sub, r.c_quotient, r.equal) == (0, Fraction(1, 2), True)
    with pytest.raises(EquivarianceError):
        additivity_check(SWAP_MODULE, IntMatrix.from_rows([[1], [0]]))
    with pytest.raises(EquivarianceError):
        additivity_check(SWAP_MODULE, IntMatrix.from_rows([[2], [2], [0]]))


def test_split_sequence_is_equivariant():
    rng = gen.rng_from(2)
    for group in ("Z2", "Z3", "S3"):
        for _ in range(20):
            mid, inj = gen.exact_sequence(rng, group)
            sub, quot = split_sequence(mid, inj)
            assert sub.rank + quot.rank == mid.rank
            for g, s in zip(mid.rep, sub.rep):
                assert (g @ inj).key() == (inj @ s).key()


@pytest.mark.parametrize("group", ["Z2", "Z3", "S3"])
def test_tame_closed_form(group):
    rng = gen.rng_from(31)
    for _ in range(30):
        mid, _ = gen.exact_sequence(rng, group)
        assert fixed_rank_by_characters(mid) == mid.fixed_rank(range(mid.group.order))
        assert torus_conductor(mid) == (mid.rank - fixed_rank_by_characters(mid)) / 2


@pytest.mark.parametrize("group", ["Z2", "Z3", "S3"])
def test_additivity_on_random_sequences(group):
    rng = gen.rng_from(17)
    for _ in range(100):
        mid, inj = gen.exact_sequence(rng, group)
        assert additivity_check(mid, inj).equal


@pytest.mark.parametrize("group", ["Z2", "Z3", "S3"])
def test_artin_is_additive_on_direct_sums(group):
    rng = gen.rng_from(40)
    for _ in range(20):
        a, _ = gen.exact_sequence(rng, group)
        b, _ = gen.exact_sequence(rng, group)
        assert artin_conductor(direct_sum(a, b)) == artin_conductor(a) + artin_conductor(b)


@pytest.mark.parametrize("group", ["Z2", "Z3", "S3"])
def test_trace_decomposition_ranks(group):
    rng = gen.rng_from(9)
    for _ in range(30):
        mid, _ = gen.exact_sequence(rng, group)
        t = trace_decomposition(mid)
        order = mid.group.order
        assert t.b_part.cols + t.split_rank == mid.rank
        assert t.split_rank == mid.fixed_rank(range(order))
        for d in t.isogeny_cokernel:
            assert order ** mid.rank % d == 0
        assert cokernel_invariants(t.fixed_basis).free_rank == mid.rank - t.split_rank


def test_filtration_validation():
    ident = Z2.identity_index()
    with pytest.raises(FiltrationError):
        RamifiedGaloisModule.faithful(Z2, [[ident]])
    with pytest.raises(FiltrationError):
        RamifiedGaloisModule.faithful(Z2, [[0, 1]])
    with pytest.raises(FiltrationError):
        RamifiedGaloisModule.faithful(Z2, [])
    s3 = gen.faithful_group("S3")
    e = s3.identity_index()
    three_cycle = s3.index_of(s3.generators[0])
    with pytest.raises(FiltrationError):
        RamifiedGaloisModule.faithful(s3, [range(6), [e, three_cycle], [e]])


def test_denominator_must_divide_ramification_index():
    z3 = gen.faithful_group("Z3")
    v = RamifiedGaloisModule.tame(z3, induced_rep(z3, [IntMatrix.from_rows([[0, -1], [1, -1]])]))
    assert artin_conductor(v) == 2 and torus_conductor(v) == 1
    sign = sign_module()
    assert torus_conductor(sign).denominator == 2 == sign.ramification_index


def test_induced_rep_rejects_non_homomorphisms():
    with pytest.raises(EquivarianceError):
        induced_rep(Z2, [IntMatrix.from_rows([[2]])])
    with pytest.raises(EquivarianceError):
        induced_rep(Z2, [])
