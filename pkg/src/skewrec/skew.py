"""Skew products ``R(x, y) = (Sx, T_x y)`` over a base permutation.

A :class:`SkewProduct` stores the base ``S`` on the X cells and one fiber
permutation ``T_x`` of the Y cells per X cell.  Distinct fibers are pooled.

The cocycle ``C(x, n) = T_{S^{n-1}x} ... T_{Sx} T_x`` applies ``T_x`` first.
It is evaluated from per-orbit prefix products and the holonomy around each
base cycle, so ``cocycle`` costs a constant number of compositions for any
``n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .measure import (
    CellSpace,
    DyadicFamily,
    Perm,
    SpaceMismatchError,
    compose,
    cycles,
    dyadic_family,
    halmos_distance,
    inverse,
    order,
    power,
)


@dataclass(frozen=True)
class SkewProduct:
    """The extension ``(S, T_x)`` of ``base`` by ``fibers``."""

    base: Perm
    fibers: tuple[Perm, ...]
    pool: tuple[Perm, ...] = field(init=False, repr=False, compare=False)
    fiber_index: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        fibers = tuple(self.fibers)
        if len(fibers) != self.base.space.cells:
            raise ValueError(f"need one fiber per X cell ({self.base.space.cells}), got {len(fibers)}")
        y_space = fibers[0].space
        slot: dict[Perm, int] = {}
        pool: list[Perm] = []
        index = []
        for t in fibers:
            if t.space != y_space:
                raise SpaceMismatchError("all fibers must act on the same Y space")
            if t not in slot:
                slot[t] = len(pool)
                pool.append(t)
            index.append(slot[t])
        object.__setattr__(self, "fibers", tuple(pool[i] for i in index))
        object.__setattr__(self, "pool", tuple(pool))
        object.__setattr__(self, "fiber_index", tuple(index))

    @classmethod
    def trivial(cls, base: Perm, y_space: CellSpace) -> SkewProduct:
        """``S x Id``."""
        ident = Perm.identity(y_space)
        return cls(base, (ident,) * base.space.cells)

    @classmethod
    def from_pool(cls, base: Perm, pool: Sequence[Perm], fiber_index: Sequence[int]) -> SkewProduct:
        return cls(base, tuple(pool[i] for i in fiber_index))

    @property
    def x_space(self) -> CellSpace:
        return self.base.space

    @property
    def y_space(self) -> CellSpace:
        return self.pool[0].space

    def __call__(self, x: int, y: int) -> tuple[int, int]:
        return apply(self, x, y)

    def to_dict(self) -> dict:
        return {
            "base": self.base.to_dict(),
            "fibers": list(self.fiber_index),
            "pool": [t.to_dict() for t in self.pool],
        }

    @classmethod
    def from_dict(cls, data: dict) -> SkewProduct:
        pool = [Perm.from_dict(t) for t in data["pool"]]
        return cls.from_pool(Perm.from_dict(data["base"]), pool, data["fibers"])

    @cached_property
    def _orbit_table(self) -> tuple[dict[int, tuple[int, int]], dict[int, tuple[tuple[Perm, ...], Perm]]]:
        # position of each x on its base cycle, and per cycle the prefix
        # products C(x0, j) for j < L together with the holonomy C(x0, L)
        where: dict[int, tuple[int, int]] = {}
        prefixes: dict[int, tuple[tuple[Perm, ...], Perm]] = {}
        ident = Perm.identity(self.y_space)
        for cyc in cycles(self.base):
            acc = ident
            pref = []
            for j, x in enumerate(cyc):
                where[x] = (cyc[0], j)
                pref.append(acc)
                acc = compose(self.fibers[x], acc)
            prefixes[cyc[0]] = (tuple(pref), acc)
        return where, prefixes


def _check_x(R: SkewProduct, x: int) -> int:
    if not 0 <= x < R.x_space.cells:
        raise IndexError(f"X cell {x} out of range for {R.x_space.cells} cells")
    return x


def apply(R: SkewProduct, x: int, y: int) -> tuple[int, int]:
    _check_x(R, x)
    if not 0 <= y < R.y_space.cells:
        raise IndexError(f"Y cell {y} out of range for {R.y_space.cells} cells")
    return R.base.forward[x], R.fibers[x].forward[y]


def cocycle(R: SkewProduct, x: int, n: int) -> Perm:
    """``C(x, n) = T_{S^{n-1}x} o ... o T_{Sx} o T_x``; ``n = 0`` gives the identity."""
    _check_x(R, x)
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    where, prefixes = R._orbit_table
    start, j = where[x]
    pref, hol = prefixes[start]
    turns, r = divmod(j + n, len(pref))
    # C(x, n) = C(x0, j + n) o C(x0, j)^-1 and C(x0, qL + r) = C(x0, r) o hol^q
    head = pref[r] if turns == 0 else compose(pref[r], power(hol, turns))
    return compose(head, inverse(pref[j]))


def holonomy(R: SkewProduct, x: int) -> Perm:
    """Cocycle once around the base cycle through ``x``."""
    where, prefixes = R._orbit_table
    start, j = where[_check_x(R, x)]
    return cocycle(R, x, len(prefixes[start][0]))


def product_perm(R: SkewProduct) -> Perm:
    """``R`` as a permutation of the product cells, ``(x, y) -> x * N_Y + y``."""
    ny = R.y_space.cells
    fwd = []
    for x in range(R.x_space.cells):
        sx = R.base.forward[x] * ny
        fwd.extend(sx + y for y in R.fibers[x].forward)
    return Perm(CellSpace(R.x_space.cells * ny), tuple(fwd))


def product_distance(R1: SkewProduct, R2: SkewProduct) -> Fraction:
    """Mass of product cells where ``R1`` and ``R2`` disagree."""
    if R1.x_space != R2.x_space or R1.y_space != R2.y_space:
        raise SpaceMismatchError("skew products live on different product spaces")
    ny = R1.y_space.cells
    bad = 0
    for x in range(R1.x_space.cells):
        if R1.base.forward[x] != R2.base.forward[x]:
            bad += ny
        else:
            bad += sum(a != b for a, b in zip(R1.fibers[x].forward, R2.fibers[x].forward))
    return Fraction(bad, R1.x_space.cells * ny)


def period(R: SkewProduct) -> int:
    """Order of ``R`` on the product space; ``R**period`` is the identity."""
    return order(product_perm(R))


@dataclass(frozen=True)
class RecurrenceReport:
    """``D(m, n, R, A)``: cells ``x`` of ``A`` with ``rho(C(x, n), Id) < 1/m``."""

    m: int
    n: int
    subset: tuple[int, ...]
    hit_set: tuple[int, ...]
    measure: Fraction


class _Closeness:
    """Memoized test ``rho(C, Id) < 1/m`` keyed by the cocycle value."""

    def __init__(self, y_space: CellSpace, fam: DyadicFamily | None):
        self.ident = Perm.identity(y_space)
        self.fam = fam if fam is not None else dyadic_family(y_space)
        if self.fam.space != y_space:
            raise SpaceMismatchError("distance family must live on the Y space")
        self._dist: dict[tuple[int, ...], Fraction] = {}

    def distance(self, c: Perm) -> Fraction:
        d = self._dist.get(c.forward)
        if d is None:
            d = halmos_distance(c, self.ident, self.fam)
            self._dist[c.forward] = d
        return d

    def hits(self, R: SkewProduct, n: int, subset: Iterable[int], threshold: Fraction) -> tuple[int, ...]:
        return tuple(x for x in subset if self.distance(cocycle(R, x, n)) < threshold)


def _validate(R: SkewProduct, m: int, subset: Iterable[int] | None) -> tuple[int, ...]:
    if m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    A = R.x_space.subset(subset)
    if not A:
        raise ValueError("subset A must be nonempty")
    return A


def recurrence_set(
    R: SkewProduct,
    m: int,
    n: int,
    subset: Iterable[int] | None = None,
    fam: DyadicFamily | None = None,
) -> RecurrenceReport:
    """Measure ``D(m, n, R, A)``; ``subset=None`` means all of X.

    The comparison with ``1/m`` is strict and exact.
    """
    A = _validate(R, m, subset)
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    hit = _Closeness(R.y_space, fam).hits(R, n, A, Fraction(1, m))
    return RecurrenceReport(m, n, A, hit, Fraction(len(hit), R.x_space.cells))


def recurrence_profile(
    R: SkewProduct,
    m: int,
    n_range: Iterable[int],
    subset: Iterable[int] | None = None,
    fam: DyadicFamily | None = None,
) -> list[tuple[int, Fraction]]:
    """``(n, mu(D(m, n, R, A)))`` for each ``n`` of ``n_range``, in order."""
    A = _validate(R, m, subset)
    ns = list(n_range)
    if not ns:
        raise ValueError("n_range must be nonempty")
    if min(ns) < 1:
        raise ValueError("n values must be positive")
    close = _Closeness(R.y_space, fam)
    threshold = Fraction(1, m)
    return [(n, Fraction(len(close.hits(R, n, A, threshold)), R.x_space.cells)) for n in ns]


@dataclass(frozen=True)
class WitnessSearch:
    """Outcome of a bounded search for ``n`` in ``(floor, horizon]``.

    ``n`` is ``None`` when the horizon was exhausted.  In the finite model a
    witness always exists somewhere, so exhaustion only means the horizon was
    too short.
    """

    m: int
    floor: int
    horizon: int
    n: int | None
    measure: Fraction = Fraction(0)

    @property
    def exhausted(self) -> bool:
        return self.n is None


def find_recurrence_witness(
    R: SkewProduct,
    m: int,
    floor: int,
    horizon: int,
    subset: Iterable[int] | None = None,
    fam: DyadicFamily | None = None,
) -> WitnessSearch:
    """Smallest ``n`` with ``floor < n <= horizon`` and ``mu(D(m, n, R, A)) > 0``."""
    if horizon <= floor:
        raise ValueError(f"horizon {horizon} must exceed floor {floor}")
    A = _validate(R, m, subset)
    close = _Closeness(R.y_space, fam)
    threshold = Fraction(1, m)
    for n in range(max(floor, 0) + 1, horizon + 1):
        hit = close.hits(R, n, A, threshold)
        if hit:
            return WitnessSearch(m, floor, horizon, n, Fraction(len(hit), R.x_space.cells))
    return WitnessSearch(m, floor, horizon, None)
