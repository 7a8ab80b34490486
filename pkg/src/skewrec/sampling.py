"""Seeded random instances.

Every generator takes a :class:`random.Random`, i.e. CPython's MT19937
Mersenne Twister seeded from an integer.  Draws go through ``shuffle``,
``randint`` and ``sample``, whose algorithms are fixed across CPython 3
releases and platforms, so a seed reproduces the same instance everywhere.
"""

from __future__ import annotations

import random

from .measure import CellSpace, Perm
from .skew import SkewProduct
from .towers import FiberConjugator, SimplePartition


def make_rng(seed: int) -> random.Random:
    return random.Random(int(seed))


def random_perm(space: CellSpace, rng: random.Random) -> Perm:
    fwd = list(range(space.cells))
    rng.shuffle(fwd)
    return Perm(space, tuple(fwd))


def random_cycle_type(total: int, min_cycle: int, rng: random.Random) -> list[int]:
    """Cycle lengths summing to ``total``, each at least ``min_cycle``.

    Lengths are drawn left to right, uniformly among the values that keep
    the remainder splittable (zero or at least ``min_cycle``).
    """
    if not 1 <= min_cycle <= total:
        raise ValueError(f"cannot split {total} cells into cycles of length >= {min_cycle}")
    out = []
    left = total
    while left:
        choices = [n for n in range(min_cycle, left + 1) if left - n == 0 or left - n >= min_cycle]
        n = choices[rng.randint(0, len(choices) - 1)]
        out.append(n)
        left -= n
    return out


def random_aperiodic(space: CellSpace, min_cycle: int, rng: random.Random) -> Perm:
    """Uniformly relabelled permutation whose cycles all have length >= ``min_cycle``."""
    lengths = random_cycle_type(space.cells, min_cycle, rng)
    cells = list(range(space.cells))
    rng.shuffle(cells)
    cycs = []
    at = 0
    for n in lengths:
        cycs.append(cells[at:at + n])
        at += n
    return Perm.from_cycles(space, cycs)


def random_extension(base: Perm, y_space: CellSpace, rng: random.Random) -> SkewProduct:
    return SkewProduct(base, tuple(random_perm(y_space, rng) for _ in range(base.space.cells)))


def random_conjugator(x_space: CellSpace, y_space: CellSpace, rng: random.Random) -> FiberConjugator:
    return FiberConjugator(tuple(random_perm(y_space, rng) for _ in range(x_space.cells)))


def random_partition(x_space: CellSpace, y_space: CellSpace, blocks: int, rng: random.Random) -> SimplePartition:
    """``blocks`` nonempty blocks (assignment uniform after seeding one cell per block)."""
    if not 1 <= blocks <= x_space.cells:
        raise ValueError(f"block count must lie in [1, {x_space.cells}], got {blocks}")
    cells = list(range(x_space.cells))
    rng.shuffle(cells)
    labels = [0] * x_space.cells
    for i, x in enumerate(cells):
        labels[x] = i if i < blocks else rng.randint(0, blocks - 1)
    perms = [random_perm(y_space, rng) for _ in range(blocks)]
    return SimplePartition.from_labels(labels, perms)


def random_subset(space: CellSpace, size: int, rng: random.Random) -> tuple[int, ...]:
    return tuple(sorted(rng.sample(range(space.cells), size)))
