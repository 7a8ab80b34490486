"""Finite model of a Lebesgue probability space and its automorphisms.

The space is ``N`` cells of mass ``1/N`` each (``N`` a power of two).  An
automorphism is a bijection of cells.  Two distances are provided:

* :func:`halmos_distance`, the weighted symmetric-difference metric over a
  fixed family of dyadic blocks;
* :func:`uniform_distance`, the mass of the set where two maps disagree.

All values are exact :class:`~fractions.Fraction` instances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Iterable, Sequence


class SpaceMismatchError(ValueError):
    """Objects defined on different cell spaces were combined."""


@dataclass(frozen=True)
class CellSpace:
    """``cells`` equal-mass cells, ``cells`` a power of two and at least 2."""

    cells: int

    def __post_init__(self) -> None:
        n = self.cells
        if isinstance(n, bool) or not isinstance(n, int) or n < 2 or n & (n - 1):
            raise ValueError(f"cell count must be a power of two >= 2, got {n!r}")

    @property
    def depth(self) -> int:
        """``k`` with ``cells == 2**k``."""
        return self.cells.bit_length() - 1

    def check_cell(self, c: int) -> int:
        if not 0 <= c < self.cells:
            raise IndexError(f"cell {c} out of range for {self.cells} cells")
        return c

    def subset(self, cells: Iterable[int] | None) -> tuple[int, ...]:
        """Sorted, deduplicated, range-checked cell subset; ``None`` is everything."""
        if cells is None:
            return tuple(range(self.cells))
        return tuple(sorted({self.check_cell(int(c)) for c in cells}))

    def measure(self, cells: Iterable[int]) -> Fraction:
        return Fraction(len(self.subset(cells)), self.cells)

    def to_dict(self) -> dict:
        return {"cells": self.cells}

    @classmethod
    def from_dict(cls, data: dict) -> CellSpace:
        return cls(int(data["cells"]))


@dataclass(frozen=True)
class Perm:
    """A measure-preserving bijection of the cells of ``space``.

    ``forward[c]`` is the image of cell ``c``; ``inverse`` is derived and kept
    consistent.  Instances are immutable and hashable.
    """

    space: CellSpace
    forward: tuple[int, ...]
    inverse: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        fwd = tuple(int(c) for c in self.forward)
        n = self.space.cells
        if len(fwd) != n:
            raise ValueError(f"expected {n} images, got {len(fwd)}")
        inv = [-1] * n
        for c, img in enumerate(fwd):
            if not 0 <= img < n or inv[img] != -1:
                raise ValueError(f"{list(fwd)} is not a bijection of {n} cells")
            inv[img] = c
        object.__setattr__(self, "forward", fwd)
        object.__setattr__(self, "inverse", tuple(inv))

    @classmethod
    def _trusted(cls, space: CellSpace, forward: tuple[int, ...], inverse: tuple[int, ...]) -> Perm:
        # skips validation; callers guarantee forward/inverse are mutually inverse
        self = object.__new__(cls)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "forward", forward)
        object.__setattr__(self, "inverse", inverse)
        return self

    @classmethod
    def identity(cls, space: CellSpace) -> Perm:
        ids = tuple(range(space.cells))
        return cls._trusted(space, ids, ids)

    @classmethod
    def from_cycles(cls, space: CellSpace, cycles: Iterable[Sequence[int]]) -> Perm:
        """Build from disjoint cycles; ``(0, 1, 2)`` sends 0 to 1, 1 to 2, 2 to 0."""
        fwd = list(range(space.cells))
        seen: set[int] = set()
        for cyc in cycles:
            for c in cyc:
                space.check_cell(c)
                if c in seen:
                    raise ValueError(f"cell {c} appears in more than one cycle")
                seen.add(c)
            for a, b in zip(cyc, list(cyc[1:]) + list(cyc[:1])):
                fwd[a] = b
        return cls(space, tuple(fwd))

    @classmethod
    def transposition(cls, space: CellSpace, a: int, b: int) -> Perm:
        return cls.from_cycles(space, [(a, b)] if a != b else [])

    def __call__(self, c: int) -> int:
        return self.forward[c]

    def __mul__(self, other: Perm) -> Perm:
        return compose(self, other)

    def __len__(self) -> int:
        return self.space.cells

    def is_identity(self) -> bool:
        return all(i == c for i, c in enumerate(self.forward))

    def image(self, cells: Iterable[int]) -> frozenset[int]:
        return frozenset(self.forward[c] for c in cells)

    def to_dict(self) -> dict:
        return {"forward": list(self.forward)}

    @classmethod
    def from_dict(cls, data: dict) -> Perm:
        fwd = data["forward"]
        return cls(CellSpace(len(fwd)), tuple(fwd))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> Perm:
        return cls.from_dict(json.loads(text))


def _same_space(*objs) -> CellSpace:
    space = objs[0].space
    for o in objs[1:]:
        if o.space != space:
            raise SpaceMismatchError(f"{o.space} differs from {space}")
    return space


def compose(p: Perm, q: Perm) -> Perm:
    """``p`` after ``q``: the map ``c -> p(q(c))``."""
    space = _same_space(p, q)
    pf, qf = p.forward, q.forward
    pi, qi = p.inverse, q.inverse
    return Perm._trusted(space, tuple(pf[c] for c in qf), tuple(qi[c] for c in pi))


def inverse(p: Perm) -> Perm:
    return Perm._trusted(p.space, p.inverse, p.forward)


def cycles(p: Perm) -> list[tuple[int, ...]]:
    """Cycle decomposition, each cycle starting at its smallest cell.

    Cycles are listed by increasing smallest cell and traversed along ``p``,
    so ``cyc[i + 1] == p(cyc[i])``.  Fixed points are cycles of length one.
    """
    seen = [False] * p.space.cells
    out = []
    for start in range(p.space.cells):
        if seen[start]:
            continue
        cyc = []
        c = start
        while not seen[c]:
            seen[c] = True
            cyc.append(c)
            c = p.forward[c]
        out.append(tuple(cyc))
    return out


def min_cycle_length(p: Perm) -> int:
    return min(len(c) for c in cycles(p))


def order(p: Perm) -> int:
    return lcm(*(len(c) for c in cycles(p)))


def power(p: Perm, k: int) -> Perm:
    """``p`` composed with itself ``k`` times; negative ``k`` uses the inverse.

    Walks each cycle once, so the cost is linear in the cell count
    whatever the size of ``k``.
    """
    fwd = [0] * p.space.cells
    for cyc in cycles(p):
        n = len(cyc)
        shift = k % n
        for i, c in enumerate(cyc):
            fwd[c] = cyc[(i + shift) % n]
    inv = [0] * p.space.cells
    for c, img in enumerate(fwd):
        inv[img] = c
    return Perm._trusted(p.space, tuple(fwd), tuple(inv))


@dataclass(frozen=True)
class DyadicFamily:
    """Proper dyadic blocks of a cell space with weights ``2**-i``.

    Blocks are enumerated breadth first by level, left to right: the first
    block is the left half of the space and the last ones are singletons,
    ``2**(k+1) - 2`` blocks in all.  The family separates cells.
    """

    space: CellSpace
    blocks: tuple[range, ...]

    @classmethod
    def of(cls, space: CellSpace) -> DyadicFamily:
        blocks = []
        for level in range(1, space.depth + 1):
            size = space.cells >> level
            blocks.extend(range(j * size, (j + 1) * size) for j in range(1 << level))
        return cls(space, tuple(blocks))

    @property
    def weights(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(1, 2 ** i) for i in range(1, len(self.blocks) + 1))

    def to_dict(self) -> dict:
        return {"cells": self.space.cells, "blocks": [list(b) for b in self.blocks]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


@lru_cache(maxsize=None)
def dyadic_family(space: CellSpace) -> DyadicFamily:
    return DyadicFamily.of(space)


def halmos_distance(p: Perm, q: Perm, fam: DyadicFamily | None = None) -> Fraction:
    """Halmos distance between ``p`` and ``q`` over the block family ``fam``.

    Sums ``2**-i * (mu(pA_i ^ qA_i) + mu(p^-1 A_i ^ q^-1 A_i))`` over the
    family.  Defaults to the dyadic family of the shared space.
    """
    space = _same_space(p, q)
    if fam is None:
        fam = dyadic_family(space)
    elif fam.space != space:
        raise SpaceMismatchError(f"family lives on {fam.space}, permutations on {space}")
    # |pA & qA| = #{c in A : q^-1 p c in A}, |p^-1 A & q^-1 A| = #{c in A : q p^-1 c in A}
    fwd = tuple(q.inverse[c] for c in p.forward)
    bwd = tuple(q.forward[c] for c in p.inverse)
    total = len(fam.blocks)
    num = 0
    for i, block in enumerate(fam.blocks, start=1):
        kept = sum(1 for c in block if fwd[c] in block) + sum(1 for c in block if bwd[c] in block)
        moved = 2 * len(block) - kept
        if moved:
            num += (2 * moved) << (total - i)
    return Fraction(num, space.cells << total)


def uniform_distance(p: Perm, q: Perm) -> Fraction:
    """Mass of the set of cells where ``p`` and ``q`` disagree."""
    space = _same_space(p, q)
    return Fraction(sum(a != b for a, b in zip(p.forward, q.forward)), space.cells)
