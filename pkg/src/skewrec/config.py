"""Experiment configuration files.

A config is flat ``key = value`` text; ``#`` starts a comment.  See the
README for the full key list.  Example::

    nx = 4
    ny = 4
    base = cycle
    extension = simple
    partition = 0 0 1 1
    block_perms = 0 1 2 3 ; 1 0 2 3
    m = 10
    n = 1..8
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .measure import CellSpace, Perm
from .sampling import (
    make_rng,
    random_aperiodic,
    random_extension,
    random_partition,
    random_subset,
)
from .skew import SkewProduct
from .towers import SimplePartition, simple_cocycle

BASES = ("cycle", "cycles", "explicit", "random")
EXTENSIONS = ("trivial", "simple", "explicit", "random")
KEYS = {
    "nx", "ny", "base", "base_perm", "base_cycles", "base_min_cycle",
    "extension", "partition", "blocks", "block_perms", "fibers",
    "m", "n", "subset", "subset_size", "seed",
}


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending key."""


@dataclass(frozen=True)
class ExperimentConfig:
    nx: int
    ny: int
    base: str = "cycle"
    base_perm: tuple[int, ...] | None = None
    base_cycles: tuple[int, ...] | None = None
    base_min_cycle: int | None = None
    extension: str = "trivial"
    partition: tuple[int, ...] | str | None = None
    blocks: int | None = None
    block_perms: tuple[tuple[int, ...], ...] | None = None
    fibers: tuple[tuple[int, ...], ...] | None = None
    m: tuple[int, ...] = (1,)
    n: tuple[int, ...] = tuple(range(1, 9))
    subset: tuple[int, ...] | str = "all"
    subset_size: int | None = None
    seed: int | None = None

    @property
    def uses_random(self) -> bool:
        return (
            self.base == "random"
            or self.extension == "random"
            or self.partition == "random"
            or self.subset == "random"
        )


@dataclass(frozen=True)
class Instance:
    base: Perm
    extension: SkewProduct
    subset: tuple[int, ...] | None
    partition: SimplePartition | None


def _int(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def _ints(key: str, text: str) -> tuple[int, ...]:
    return tuple(_int(key, t) for t in text.replace(",", " ").split())


def _perm_list(key: str, text: str) -> tuple[tuple[int, ...], ...]:
    return tuple(_ints(key, part) for part in text.split(";") if part.strip())


def _n_range(text: str) -> tuple[int, ...]:
    if ".." in text:
        lo, _, hi = text.partition("..")
        lo_i, hi_i = _int("n", lo.strip()), _int("n", hi.strip())
        if hi_i < lo_i:
            raise ConfigError(f"n: empty range {text!r}")
        return tuple(range(lo_i, hi_i + 1))
    return _ints("n", text)


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#",), comment_prefixes=("#",), interpolation=None
    )
    try:
        parser.read_string("[config]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"syntax: {exc}") from None
    raw = dict(parser["config"])
    unknown = sorted(set(raw) - KEYS)
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown key")
    for key in ("nx", "ny"):
        if key not in raw:
            raise ConfigError(f"{key}: required")

    kw: dict = {"nx": _int("nx", raw["nx"]), "ny": _int("ny", raw["ny"])}
    for key in ("base_min_cycle", "blocks", "subset_size", "seed"):
        if key in raw:
            kw[key] = _int(key, raw[key])
    for key, allowed in (("base", BASES), ("extension", EXTENSIONS)):
        if key in raw:
            if raw[key] not in allowed:
                raise ConfigError(f"{key}: must be one of {', '.join(allowed)}, got {raw[key]!r}")
            kw[key] = raw[key]
    if "base_perm" in raw:
        kw["base_perm"] = _ints("base_perm", raw["base_perm"])
    if "base_cycles" in raw:
        kw["base_cycles"] = _ints("base_cycles", raw["base_cycles"])
    if "partition" in raw:
        kw["partition"] = "random" if raw["partition"] == "random" else _ints("partition", raw["partition"])
    if "block_perms" in raw:
        kw["block_perms"] = _perm_list("block_perms", raw["block_perms"])
    if "fibers" in raw:
        kw["fibers"] = _perm_list("fibers", raw["fibers"])
    if "m" in raw:
        kw["m"] = _ints("m", raw["m"])
        if not kw["m"] or min(kw["m"]) < 1:
            raise ConfigError("m: values must be positive integers")
    if "n" in raw:
        kw["n"] = _n_range(raw["n"])
        if not kw["n"] or min(kw["n"]) < 1:
            raise ConfigError("n: values must be positive integers")
    if "subset" in raw:
        kw["subset"] = raw["subset"] if raw["subset"] in ("all", "random") else _ints("subset", raw["subset"])
    cfg = ExperimentConfig(**kw)
    if cfg.uses_random and cfg.seed is None:
        raise ConfigError("seed: required when any random spec is used")
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def _space(key: str, n: int) -> CellSpace:
    try:
        return CellSpace(n)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def _perm(key: str, space: CellSpace, images: tuple[int, ...]) -> Perm:
    try:
        return Perm(space, images)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def build_instance(cfg: ExperimentConfig) -> Instance:
    """Materialize the config; random draws happen in the order base, extension, subset."""
    X = _space("nx", cfg.nx)
    Y = _space("ny", cfg.ny)
    rng = make_rng(cfg.seed if cfg.seed is not None else 0)

    if cfg.base == "cycle":
        base = Perm.from_cycles(X, [tuple(range(X.cells))])
    elif cfg.base == "cycles":
        if not cfg.base_cycles or sum(cfg.base_cycles) != X.cells or min(cfg.base_cycles) < 1:
            raise ConfigError(f"base_cycles: lengths must be positive and sum to {X.cells}")
        cycs, at = [], 0
        for n in cfg.base_cycles:
            cycs.append(tuple(range(at, at + n)))
            at += n
        base = Perm.from_cycles(X, cycs)
    elif cfg.base == "explicit":
        if cfg.base_perm is None:
            raise ConfigError("base_perm: required for base = explicit")
        base = _perm("base_perm", X, cfg.base_perm)
    else:
        floor = cfg.base_min_cycle if cfg.base_min_cycle is not None else X.cells
        if not 1 <= floor <= X.cells:
            raise ConfigError(f"base_min_cycle: must lie in [1, {X.cells}]")
        base = random_aperiodic(X, floor, rng)

    partition = None
    if cfg.extension == "trivial":
        R = SkewProduct.trivial(base, Y)
    elif cfg.extension == "random":
        R = random_extension(base, Y, rng)
    elif cfg.extension == "explicit":
        if cfg.fibers is None or len(cfg.fibers) != X.cells:
            raise ConfigError(f"fibers: need {X.cells} ';'-separated Y permutations")
        R = SkewProduct(base, tuple(_perm("fibers", Y, f) for f in cfg.fibers))
    else:
        if cfg.partition == "random":
            if cfg.blocks is None:
                raise ConfigError("blocks: required for partition = random")
            try:
                partition = random_partition(X, Y, cfg.blocks, rng)
            except ValueError as exc:
                raise ConfigError(f"blocks: {exc}") from None
        else:
            labels = cfg.partition
            if labels is None or len(labels) != X.cells:
                raise ConfigError(f"partition: need one block label per X cell ({X.cells})")
            count = max(labels) + 1
            if min(labels) < 0 or cfg.block_perms is None or len(cfg.block_perms) != count:
                raise ConfigError(f"block_perms: need {count} ';'-separated Y permutations")
            perms = [_perm("block_perms", Y, p) for p in cfg.block_perms]
            try:
                partition = SimplePartition.from_labels(labels, perms)
            except ValueError as exc:
                raise ConfigError(f"partition: {exc}") from None
        R = simple_cocycle(base, partition)

    if cfg.subset == "all":
        subset = None
    elif cfg.subset == "random":
        size = cfg.subset_size
        if size is None or not 1 <= size <= X.cells:
            raise ConfigError(f"subset_size: must lie in [1, {X.cells}] for subset = random")
        subset = random_subset(X, size, rng)
    else:
        if not cfg.subset or min(cfg.subset) < 0 or max(cfg.subset) >= X.cells:
            raise ConfigError(f"subset: cells must lie in [0, {X.cells})")
        subset = tuple(sorted(set(cfg.subset)))
    return Instance(base, R, subset, partition)

