"""Rokhlin towers, fiberwise conjugation and simple cocycles.

This is the constructive side of recurrence: any extension is trivialized
on a tall tower, the resulting conjugator is read off as a piecewise
constant family, and the simple cocycle it defines carries a checkable
certificate ``C(x, n) = Id`` on ``B_k & S^-n B_k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Iterable, Sequence

from .measure import (
    CellSpace,
    Perm,
    SpaceMismatchError,
    compose,
    cycles,
    inverse,
    min_cycle_length,
)
from .skew import SkewProduct, cocycle, holonomy, product_distance


class PreconditionError(ValueError):
    """An operation's input does not meet its stated precondition."""


@dataclass(frozen=True)
class RokhlinTower:
    """Disjoint levels ``B, SB, ..., S^{h-1}B`` plus the uncovered residual."""

    space: CellSpace
    base_set: tuple[int, ...]
    height: int
    levels: tuple[tuple[int, ...], ...]
    residual: tuple[int, ...]

    @property
    def coverage(self) -> Fraction:
        return Fraction(self.height * len(self.base_set), self.space.cells)

    @property
    def top(self) -> tuple[int, ...]:
        return self.levels[-1]

    def to_dict(self) -> dict:
        return {"base_set": list(self.base_set), "height": self.height, "residual": list(self.residual)}


def build_tower(S: Perm, height: int, eps: Fraction | None = None) -> RokhlinTower:
    """Tower of the given height over ``S`` covering more than ``1 - eps``.

    Walks each cycle from its smallest cell and puts every ``height``-th cell
    into the base while a full column still fits, so a cycle of length ``L``
    leaves ``L mod height`` cells uncovered.  With ``eps=None`` no coverage
    guarantee is demanded and only aperiodicity at scale ``height`` is
    required.
    """
    if height < 1:
        raise ValueError(f"height must be positive, got {height}")
    cycs = cycles(S)
    short = min(cycs, key=len)
    if len(short) < height:
        raise PreconditionError(
            f"cycle {short} of length {len(short)} is shorter than the tower height {height}"
        )
    if eps is not None:
        eps = Fraction(eps)
        if not 0 < eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {eps}")
        if len(short) * eps < height:
            achievable = Fraction(height, len(short))
            hint = f"smallest admissible eps is {achievable}" if achievable < 1 else "no eps < 1 is admissible"
            raise PreconditionError(
                f"coverage > 1 - {eps} needs min cycle length >= {height / eps}, "
                f"got {len(short)}; {hint}"
            )
    base = []
    for cyc in cycs:
        base.extend(cyc[i] for i in range(0, len(cyc) - height + 1, height))
    base.sort()
    levels = []
    level = base
    for _ in range(height):
        levels.append(tuple(level))
        level = sorted(S.forward[c] for c in level)
    covered = {c for lv in levels for c in lv}
    residual = tuple(c for c in range(S.space.cells) if c not in covered)
    tower = RokhlinTower(S.space, tuple(base), height, tuple(levels), residual)
    # strict because each cycle leaves fewer than height <= eps * L cells out
    assert eps is None or tower.coverage > 1 - eps
    return tower


def _check_tower(S: Perm, tower: RokhlinTower) -> None:
    if tower.space != S.space:
        raise SpaceMismatchError("tower and base permutation live on different spaces")
    for lo, hi in zip(tower.levels, tower.levels[1:]):
        if sorted(S.forward[c] for c in lo) != list(hi):
            raise PreconditionError("tower levels are not successive images under the base")


@dataclass(frozen=True)
class FiberConjugator:
    """The fiberwise map ``(x, y) -> (x, J_x y)``; fixes every slice ``A x Y``."""

    fibers: tuple[Perm, ...]

    def __post_init__(self) -> None:
        fibers = tuple(self.fibers)
        if not fibers or any(j.space != fibers[0].space for j in fibers):
            raise SpaceMismatchError("conjugator fibers must share one Y space")
        object.__setattr__(self, "fibers", fibers)

    @classmethod
    def identity(cls, x_space: CellSpace, y_space: CellSpace) -> FiberConjugator:
        return cls((Perm.identity(y_space),) * x_space.cells)

    def inverse(self) -> FiberConjugator:
        return FiberConjugator(tuple(inverse(j) for j in self.fibers))

    def __mul__(self, other: FiberConjugator) -> FiberConjugator:
        return FiberConjugator(tuple(compose(a, b) for a, b in zip(self.fibers, other.fibers, strict=True)))


def conjugate(R: SkewProduct, J: FiberConjugator) -> SkewProduct:
    """``J R J^-1``: same base, fibers ``J_{Sx} o T_x o J_x^-1``."""
    if len(J.fibers) != R.x_space.cells or J.fibers[0].space != R.y_space:
        raise SpaceMismatchError("conjugator does not match the skew product's spaces")
    S = R.base
    return SkewProduct(
        S,
        tuple(compose(J.fibers[S.forward[x]], compose(T, inverse(J.fibers[x]))) for x, T in enumerate(R.fibers)),
    )


@dataclass(frozen=True)
class SimplePartition:
    """X split into blocks ``B_k`` with one Y permutation ``J_k`` per block."""

    blocks: tuple[tuple[int, ...], ...]
    block_perms: tuple[Perm, ...]

    def __post_init__(self) -> None:
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        perms = tuple(self.block_perms)
        if len(blocks) != len(perms):
            raise ValueError("need exactly one permutation per block")
        if not perms or any(j.space != perms[0].space for j in perms):
            raise SpaceMismatchError("block permutations must share one Y space")
        cells = [c for b in blocks for c in b]
        if sorted(cells) != list(range(len(cells))):
            raise ValueError("blocks must partition the X cells exactly")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "block_perms", perms)

    @classmethod
    def from_labels(cls, labels: Sequence[int], block_perms: Sequence[Perm]) -> SimplePartition:
        """Block ``k`` is ``{x : labels[x] == k}``."""
        blocks = tuple(tuple(x for x, k in enumerate(labels) if k == b) for b in range(len(block_perms)))
        return cls(blocks, tuple(block_perms))

    @property
    def block_of(self) -> tuple[int, ...]:
        out = [0] * sum(len(b) for b in self.blocks)
        for k, b in enumerate(self.blocks):
            for x in b:
                out[x] = k
        return tuple(out)

    def conjugator(self) -> FiberConjugator:
        """``x -> J_{k(x)}``."""
        return FiberConjugator(tuple(self.block_perms[k] for k in self.block_of))


def simple_cocycle(S: Perm, part: SimplePartition) -> SkewProduct:
    """``J^-1 (S x Id) J`` for the simple conjugator of ``part``.

    Fibers are ``T_x = J_{k(Sx)}^-1 o J_{k(x)}``.
    """
    if len(part.block_of) != S.space.cells:
        raise ValueError("partition does not cover the X space of S")
    J = part.conjugator()
    return conjugate(SkewProduct.trivial(S, J.fibers[0].space), J.inverse())


@dataclass(frozen=True)
class RecurrenceCertificate:
    """``C(x, n) = Id`` for every ``x`` in ``witness`` (block ``block``)."""

    block: int
    n: int
    witness: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"block": self.block, "n": self.n, "witness": list(self.witness)}


def verify_certificate(R: SkewProduct, cert: RecurrenceCertificate, within: Iterable[int] | None = None) -> bool:
    """Recheck a certificate against ``R``, optionally requiring ``witness`` inside ``within``."""
    if not cert.witness or cert.n < 1:
        return False
    if within is not None and not set(cert.witness) <= set(within):
        return False
    return all(cocycle(R, x, cert.n).is_identity() for x in cert.witness)


def certify_recurrence(
    S: Perm,
    part: SimplePartition,
    floor: int,
    within: Iterable[int] | None = None,
) -> RecurrenceCertificate:
    """Find ``n > floor`` and block ``k`` with ``B_k & S^-n B_k`` nonempty, and check it.

    With ``within`` the blocks are first cut down to ``B_k & A``, which gives
    the relative form.  Ties go to the smallest ``k``, then the smallest ``n``;
    ``n`` never exceeds ``floor`` plus the base period of a block cell.
    """
    if floor < 0:
        raise ValueError(f"floor must be nonnegative, got {floor}")
    A = None if within is None else set(S.space.subset(within))
    R = simple_cocycle(S, part)
    for k, block in enumerate(part.blocks):
        piece = set(block) if A is None else set(block) & A
        if not piece:
            continue
        bound = floor + min(len(c) for c in cycles(S) if piece & set(c))
        for n in range(floor + 1, bound + 1):
            land = _iterate(S, n)
            witness = tuple(sorted(x for x in piece if land[x] in piece))
            if witness:
                cert = RecurrenceCertificate(k, n, witness)
                if not verify_certificate(R, cert):
                    raise AssertionError(f"cocycle is not the identity on {witness} at n={n}")
                return cert
    raise PreconditionError("every block is empty" + ("" if A is None else " inside the subset"))


def _iterate(S: Perm, n: int) -> tuple[int, ...]:
    out = list(range(S.space.cells))
    for cyc in cycles(S):
        for i, c in enumerate(cyc):
            out[c] = cyc[(i + n) % len(cyc)]
    return tuple(out)


def trivialize_on_tower(R: SkewProduct, tower: RokhlinTower) -> tuple[FiberConjugator, Fraction]:
    """Conjugator straightening ``R`` up the tower, and the leftover discrepancy.

    ``J_x = C(b, i)^-1`` for ``x = S^i b`` on level ``i``, the identity on the
    residual.  ``J R J^-1`` then agrees with ``S x Id`` except on the top
    level and the residual; the discrepancy is the mass of product cells
    where they differ.
    """
    _check_tower(R.base, tower)
    ident = Perm.identity(R.y_space)
    J = [ident] * R.x_space.cells
    for b in tower.base_set:
        x = b
        for i in range(tower.height):
            J[x] = inverse(cocycle(R, b, i))
            x = R.base.forward[x]
    conj = FiberConjugator(tuple(J))
    trivial = SkewProduct.trivial(R.base, R.y_space)
    return conj, product_distance(conjugate(R, conj), trivial)


def coboundary_conjugator(R: SkewProduct) -> FiberConjugator | None:
    """``J`` with ``J R J^-1 = S x Id`` exactly, or ``None`` if some holonomy is nontrivial."""
    ident = Perm.identity(R.y_space)
    J = [ident] * R.x_space.cells
    for cyc in cycles(R.base):
        if not holonomy(R, cyc[0]).is_identity():
            return None
        for i, x in enumerate(cyc):
            J[x] = inverse(cocycle(R, cyc[0], i))
    return FiberConjugator(tuple(J))


def partition_of(J: FiberConjugator) -> SimplePartition:
    """Group X cells by equal ``J_x``, blocks ordered by their first cell."""
    slot: dict[Perm, int] = {}
    blocks: list[list[int]] = []
    for x, j in enumerate(J.fibers):
        if j not in slot:
            slot[j] = len(blocks)
            blocks.append([])
        blocks[slot[j]].append(x)
    return SimplePartition(tuple(tuple(b) for b in blocks), tuple(slot))


@dataclass(frozen=True)
class Recurrentized:
    """A certified-recurrent simple cocycle close to a given extension."""

    extension: SkewProduct
    certificate: RecurrenceCertificate
    distance: Fraction
    partition: SimplePartition
    tower: RokhlinTower | None

    def __iter__(self):
        return iter((self.extension, self.certificate, self.distance))


def required_min_cycle(delta: Fraction) -> int:
    return ceil(2 / Fraction(delta))


def recurrentize(
    R: SkewProduct,
    delta: Fraction,
    floor: int = 1,
    within: Iterable[int] | None = None,
) -> Recurrentized:
    """Simple cocycle within product distance ``delta`` of ``R``, with a certificate.

    Coboundaries are returned unchanged.  Otherwise every admissible tower
    height is tried; the one with the smallest top level plus residual is
    used to trivialize ``R``, and the conjugator is read off as a simple
    partition.  Raises :class:`PreconditionError` when the base has cycles
    shorter than ``ceil(2/delta)`` or no tower gets under ``delta``.
    """
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    S = R.base
    need = required_min_cycle(delta)
    shortest = min_cycle_length(S)
    if shortest < need:
        raise PreconditionError(
            f"base must be aperiodic at scale {need} (min cycle length >= {need}), got min cycle length {shortest}"
        )

    J = coboundary_conjugator(R)
    tower = None
    if J is None:
        best = None
        for h in range(1, shortest + 1):
            t = build_tower(S, h)
            loose = Fraction(len(t.base_set) + len(t.residual), S.space.cells)
            if best is None or loose < best[0]:
                best = (loose, t)
        loose, tower = best
        if loose >= delta:
            raise PreconditionError(
                f"best tower leaves mass {loose} >= delta {delta} uncovered or on top; "
                f"min cycle length >= {ceil(4 / delta**2)} guarantees success"
            )
        J, _ = trivialize_on_tower(R, tower)

    part = partition_of(J)
    R2 = simple_cocycle(S, part)
    dist = product_distance(R, R2)
    assert dist < delta
    cert = certify_recurrence(S, part, floor, within)
    return Recurrentized(R2, cert, dist, part, tower)
