from __future__ import annotations

import random
from fractions import Fraction
from math import ceil

import pytest

import oracles
from skewrec import (
    CellSpace,
    FiberConjugator,
    Perm,
    PreconditionError,
    RecurrenceCertificate,
    SimplePartition,
    SkewProduct,
    build_tower,
    certify_recurrence,
    cocycle,
    compose,
    conjugate,
    inverse,
    period,
    product_distance,
    product_perm,
    recurrence_set,
    recurrentize,
    simple_cocycle,
    trivialize_on_tower,
    verify_certificate,
)
from skewrec.sampling import (
    random_aperiodic,
    random_conjugator,
    random_extension,
    random_partition,
    random_perm,
    random_subset,
)
from skewrec.towers import coboundary_conjugator, partition_of

X4, Y4 = CellSpace(4), CellSpace(4)


def cycle_perm(n):
    return Perm.from_cycles(CellSpace(n), [range(n)])


def integer_partitions(n, least=1):
    if n == 0:
        yield ()
        return
    for first in range(least, n + 1):
        for rest in integer_partitions(n - first, first):
            yield (first,) + rest


def of_cycle_type(lengths):
    cycs, at = [], 0
    for n in lengths:
        cycs.append(range(at, at + n))
        at += n
    return Perm.from_cycles(CellSpace(at), cycs)


# towers

def test_tower_on_8_cycle_height_3():
    t = build_tower(cycle_perm(8), 3, Fraction(1, 2))
    assert t.base_set == (0, 3)
    assert t.levels == ((0, 3), (1, 4), (2, 5))
    assert t.residual == (6, 7)
    assert t.coverage == Fraction(3, 4)
    assert t.to_dict() == {"base_set": [0, 3], "height": 3, "residual": [6, 7]}


def test_height_one_tower_covers_everything():
    t = build_tower(cycle_perm(16), 1, Fraction(1, 2))
    assert t.base_set == tuple(range(16))
    assert t.coverage == 1 and t.residual == ()


def test_two_8_cycles_height_3():
    S = of_cycle_type((8, 8))
    t = build_tower(S, 3, Fraction(1, 2))
    assert t.coverage == Fraction(12, 16)
    assert len(t.residual) == 4


def test_tower_rejects_short_cycles():
    S = of_cycle_type((3, 5))
    with pytest.raises(PreconditionError, match=r"\(0, 1, 2\)"):
        build_tower(S, 4, Fraction(1, 2))


def test_tower_reports_achievable_eps():
    with pytest.raises(PreconditionError, match="smallest admissible eps is 1/2"):
        build_tower(cycle_perm(8), 4, Fraction(1, 4))
    with pytest.raises(ValueError):
        build_tower(cycle_perm(8), 2, Fraction(1))


@pytest.mark.parametrize("nx", [4, 8, 16])
def test_tower_levels_disjoint_images(nx):
    rng = random.Random(nx)
    for _ in range(20):
        S = random_perm(CellSpace(nx), rng)
        h = rng.randint(1, 4)
        try:
            t = build_tower(S, h)
        except PreconditionError:
            continue
        seen = set()
        for lo, hi in zip(t.levels, t.levels[1:]):
            assert set(hi) == {S(c) for c in lo}
        for lv in t.levels:
            assert not seen & set(lv)
            seen |= set(lv)
        assert seen | set(t.residual) == set(range(nx))
        assert t.coverage + Fraction(len(t.residual), nx) == 1


# conjugation

def test_conjugate_by_identity_and_inverse():
    rng = random.Random(1)
    R = random_extension(random_perm(X4, rng), Y4, rng)
    assert conjugate(R, FiberConjugator.identity(X4, Y4)) == R
    J = random_conjugator(X4, Y4, rng)
    assert conjugate(conjugate(R, J), J.inverse()) == R


@pytest.mark.parametrize("seed", range(6))
def test_conjugate_is_J_R_Jinv_pointwise(seed):
    rng = random.Random(seed)
    R = random_extension(random_perm(X4, rng), Y4, rng)
    J = random_conjugator(X4, Y4, rng)
    Jp = product_perm(SkewProduct(Perm.identity(X4), J.fibers))
    assert product_perm(conjugate(R, J)) == compose(Jp, compose(product_perm(R), inverse(Jp)))


@pytest.mark.parametrize("seed", range(6))
def test_cocycle_transforms_telescopically(seed):
    rng = random.Random(seed)
    R = random_extension(random_perm(X4, rng), Y4, rng)
    J = random_conjugator(X4, Y4, rng)
    RJ = conjugate(R, J)
    for x in range(4):
        for n in range(9):
            end = oracles.iterate(R.base.forward, x, n)
            expected = compose(J.fibers[end], compose(cocycle(R, x, n), inverse(J.fibers[x])))
            assert cocycle(RJ, x, n) == expected


@pytest.mark.parametrize("seed", range(6))
def test_conjugation_is_a_group_action(seed):
    rng = random.Random(seed)
    R = random_extension(random_perm(X4, rng), Y4, rng)
    J1, J2 = random_conjugator(X4, Y4, rng), random_conjugator(X4, Y4, rng)
    assert conjugate(R, J1 * J2) == conjugate(conjugate(R, J2), J1)


def test_conjugate_rejects_mismatched_spaces():
    R = SkewProduct.trivial(cycle_perm(4), Y4)
    with pytest.raises(ValueError):
        conjugate(R, FiberConjugator.identity(CellSpace(8), Y4))


# simple cocycles

def test_simple_cocycle_examples(four):
    S, part, R = four
    swap = Perm.transposition(Y4, 0, 1)
    ident = Perm.identity(Y4)
    assert R.fibers == (ident, swap, ident, swap)
    assert cocycle(R, 0, 4) == ident
    one = SimplePartition(((0, 1, 2, 3),), (swap,))
    assert simple_cocycle(S, one) == SkewProduct.trivial(S, Y4)


def test_simple_partition_validation():
    ident = Perm.identity(Y4)
    with pytest.raises(ValueError):
        SimplePartition(((0, 1), (1, 2, 3)), (ident, ident))
    with pytest.raises(ValueError):
        SimplePartition(((0, 1), (3,)), (ident, ident))
    with pytest.raises(ValueError):
        SimplePartition(((0, 1, 2, 3),), (ident, ident))
    with pytest.raises(ValueError):
        simple_cocycle(cycle_perm(8), SimplePartition(((0, 1, 2, 3),), (ident,)))


@pytest.mark.parametrize("seed", range(8))
def test_simple_cocycle_telescope(seed):
    rng = random.Random(seed)
    S = random_perm(X4, rng)
    part = random_partition(X4, Y4, rng.randint(1, 4), rng)
    R = simple_cocycle(S, part)
    k = part.block_of
    for x in range(4):
        for n in range(13):
            end = oracles.iterate(S.forward, x, n)
            assert cocycle(R, x, n) == compose(inverse(part.block_perms[k[end]]), part.block_perms[k[x]])


# certificates

def test_certificate_for_four_cell_example(four):
    S, part, R = four
    cert = certify_recurrence(S, part, 5)
    # smallest n > 5 with B_0 & S^-n B_0 nonempty is 7 (cell 1 -> 0)
    assert cert == RecurrenceCertificate(0, 7, (1,))
    assert cert.to_dict() == {"block": 0, "n": 7, "witness": [1]}
    assert verify_certificate(R, cert)
    at8 = certify_recurrence(S, part, 7)
    assert at8 == RecurrenceCertificate(0, 8, (0, 1))


def test_certificate_for_one_block_partition():
    S = random_aperiodic(CellSpace(8), 3, random.Random(2))
    part = SimplePartition((tuple(range(8)),), (random_perm(CellSpace(4), random.Random(3)),))
    for floor in (1, 4, 9):
        cert = certify_recurrence(S, part, floor)
        assert cert.n == floor + 1 and cert.witness == tuple(range(8))


def test_certificate_relative_to_subset(four):
    S, part, R = four
    cert = certify_recurrence(S, part, 5, within=[2, 3])
    assert cert.block == 1 and set(cert.witness) <= {2, 3}
    assert verify_certificate(R, cert, within=[2, 3])
    assert not verify_certificate(R, cert, within=[0])


@pytest.mark.parametrize("seed", range(10))
def test_certificate_cross_validates_with_recurrence_set(seed):
    rng = random.Random(seed)
    X, Y = CellSpace(8), CellSpace(8)
    S = random_perm(X, rng)
    part = random_partition(X, Y, rng.randint(1, 5), rng)
    R = simple_cocycle(S, part)
    for floor in range(1, 20):
        cert = certify_recurrence(S, part, floor)
        assert cert.n > floor
        block = part.blocks[cert.block]
        assert set(cert.witness) == {x for x in block if oracles.iterate(S.forward, x, cert.n) in block}
        for m in (1, 10, 100):
            rep = recurrence_set(R, m, cert.n, block)
            assert rep.measure >= Fraction(len(cert.witness), 8)


def test_bad_certificate_is_rejected(four):
    R = four[2]
    assert not verify_certificate(R, RecurrenceCertificate(0, 6, (0,)))
    assert not verify_certificate(R, RecurrenceCertificate(0, 4, ()))


# trivialization

def test_trivialize_trivial_extension():
    S = cycle_perm(8)
    R = SkewProduct.trivial(S, Y4)
    J, disc = trivialize_on_tower(R, build_tower(S, 3, Fraction(1, 2)))
    assert disc == 0
    assert all(j.is_identity() for j in J.fibers)


@pytest.mark.parametrize("seed", range(10))
def test_trivialize_full_tower_coboundary(seed):
    rng = random.Random(seed)
    S = random_aperiodic(CellSpace(8), 8, rng)
    R = conjugate(SkewProduct.trivial(S, CellSpace(8)), random_conjugator(CellSpace(8), CellSpace(8), rng))
    tower = build_tower(S, 4, Fraction(1, 2))
    assert tower.residual == ()
    J, disc = trivialize_on_tower(R, tower)
    assert disc <= Fraction(1, 4)
    # mismatch only on the top level
    RJ = conjugate(R, J)
    bad = {x for x in range(8) if not RJ.fibers[x].is_identity()}
    assert bad <= set(tower.top)


@pytest.mark.parametrize("seed", range(10))
def test_trivialize_bound_eps_plus_one_over_height(seed):
    rng = random.Random(seed)
    X, Y = CellSpace(16), CellSpace(16)
    S = random_aperiodic(X, 16, rng)
    R = random_extension(S, Y, rng)
    tower = build_tower(S, 4, Fraction(1, 4))
    J, disc = trivialize_on_tower(R, tower)
    assert disc < Fraction(1, 2)
    assert disc <= Fraction(len(tower.top) + len(tower.residual), 16)


def test_trivialize_rejects_foreign_tower():
    S = cycle_perm(8)
    tower = build_tower(S, 2, Fraction(1, 2))
    other = Perm.from_cycles(CellSpace(8), [(0, 2, 4, 6, 1, 3, 5, 7)])
    with pytest.raises(PreconditionError):
        trivialize_on_tower(SkewProduct.trivial(other, Y4), tower)


# recurrentize

def test_recurrentize_keeps_simple_cocycles(four):
    S, part, R = four
    R2, cert, dist = recurrentize(R, Fraction(3, 4), 5)
    assert R2 == R and dist == 0
    assert verify_certificate(R, cert)


def test_recurrentize_trivial_extension():
    S = cycle_perm(16)
    R = SkewProduct.trivial(S, CellSpace(16))
    for delta in (Fraction(1, 2), Fraction(1, 4)):
        res = recurrentize(R, delta, 3)
        assert res.extension == R and res.distance == 0
        assert len(res.partition.blocks) == 1
        assert res.certificate.witness == tuple(range(16))


def test_recurrentize_single_defect_on_16_cycle():
    S = cycle_perm(16)
    Y = CellSpace(16)
    fibers = [Perm.identity(Y)] * 16
    fibers[5] = Perm.from_cycles(Y, [(0, 7, 3)])
    R = SkewProduct(S, tuple(fibers))
    res = recurrentize(R, Fraction(1, 2), 1)
    assert res.tower is not None
    assert res.distance < Fraction(1, 2)
    assert res.distance == product_distance(R, res.extension)
    assert res.extension == simple_cocycle(S, res.partition)
    assert verify_certificate(res.extension, res.certificate)


def test_recurrentize_precondition_names_min_cycle():
    R = random_extension(cycle_perm(8), CellSpace(8), random.Random(0))
    with pytest.raises(PreconditionError, match="min cycle length >= 16"):
        recurrentize(R, Fraction(1, 8))


@pytest.mark.parametrize("delta", [Fraction(1, 2), Fraction(1, 4)])
def test_recurrentize_succeeds_on_every_admissible_cycle_type(delta):
    rng = random.Random(7)
    need = ceil(2 / delta)
    Y = CellSpace(4)
    for lengths in integer_partitions(16, need):
        S = of_cycle_type(lengths)
        R = random_extension(S, Y, rng)
        res = recurrentize(R, delta, 1)
        assert res.distance < delta


@pytest.mark.parametrize("seed", range(5))
def test_recurrentize_certifies_up_to_half_the_period(seed):
    rng = random.Random(seed)
    X, Y = CellSpace(16), CellSpace(4)
    R = random_extension(random_aperiodic(X, 4, rng), Y, rng)
    res = recurrentize(R, Fraction(1, 2), 1)
    assert res.distance < Fraction(1, 2)
    for floor in range(1, period(res.extension) // 2 + 1):
        cert = certify_recurrence(R.base, res.partition, floor)
        assert cert.n > floor and verify_certificate(res.extension, cert)


@pytest.mark.parametrize("seed", range(5))
def test_coboundary_detection(seed):
    rng = random.Random(seed)
    X, Y = CellSpace(8), CellSpace(4)
    S = random_perm(X, rng)
    R = conjugate(SkewProduct.trivial(S, Y), random_conjugator(X, Y, rng))
    J = coboundary_conjugator(R)
    assert J is not None
    assert conjugate(R, J) == SkewProduct.trivial(S, Y)
    assert simple_cocycle(S, partition_of(J)) == R


def test_random_subset_relative_recurrentize():
    rng = random.Random(11)
    X, Y = CellSpace(16), CellSpace(16)
    R = random_extension(random_aperiodic(X, 16, rng), Y, rng)
    A = random_subset(X, 4, rng)
    res = recurrentize(R, Fraction(1, 4), 10, within=A)
    assert set(res.certificate.witness) <= set(A)
    assert verify_certificate(res.extension, res.certificate, within=A)
