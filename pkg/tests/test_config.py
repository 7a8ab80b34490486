from __future__ import annotations

from pathlib import Path

import pytest

from skewrec import Perm, SkewProduct, min_cycle_length
from skewrec.config import ConfigError, build_instance, load_config, parse_config

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def test_simple4_config(four):
    S, part, R = four
    inst = build_instance(load_config(CONFIGS / "simple4.cfg"))
    assert inst.base == S
    assert inst.extension == R
    assert inst.partition == part
    assert inst.subset is None


def test_ranges_lists_and_comments():
    cfg = parse_config("nx = 4  # cells\nny = 2\nm = 1, 10 100\nn = 3..5\nsubset = 0 2\n")
    assert cfg.m == (1, 10, 100)
    assert cfg.n == (3, 4, 5)
    assert build_instance(cfg).subset == (0, 2)


def test_random_config_is_seeded():
    text = (CONFIGS / "random16.cfg").read_text()
    a, b = build_instance(parse_config(text)), build_instance(parse_config(text))
    assert a == b
    assert min_cycle_length(a.base) >= 4
    assert len(a.subset) == 4
    c = build_instance(parse_config(text.replace("20261016", "7")))
    assert c != a


@pytest.mark.parametrize(
    "text, key",
    [
        ("ny = 4\n", "nx"),
        ("nx = 3\nny = 4\n", "nx"),
        ("nx = 4\nny = 4\ncolour = red\n", "colour"),
        ("nx = 4\nny = 4\nbase = spiral\n", "base"),
        ("nx = 4\nny = 4\nextension = random\n", "seed"),
        ("nx = 4\nny = 4\nm = 0\n", "m"),
        ("nx = 4\nny = 4\nn = 5..2\n", "n"),
        ("nx = 4\nny = 4\nbase = explicit\n", "base_perm"),
        ("nx = 4\nny = 4\nbase = explicit\nbase_perm = 0 0 1 2\n", "base_perm"),
        ("nx = 4\nny = 4\nbase = cycles\nbase_cycles = 1 2\n", "base_cycles"),
        ("nx = 4\nny = 4\nextension = explicit\nfibers = 0 1 2 3\n", "fibers"),
        ("nx = 4\nny = 4\nextension = simple\npartition = 0 1\n", "partition"),
        ("nx = 4\nny = 4\nextension = simple\npartition = 0 0 1 1\nblock_perms = 0 1 2 3\n", "block_perms"),
        ("nx = 4\nny = 4\nsubset = 0 9\n", "subset"),
        ("nx = 4\nny = 4\nsubset = random\nseed = 1\n", "subset_size"),
        ("nx = x\nny = 4\n", "nx"),
    ],
)
def test_invalid_configs_name_the_field(text, key):
    with pytest.raises(ConfigError, match=rf"^{key}:"):
        build_instance(parse_config(text))


def test_cycle_type_base():
    inst = build_instance(parse_config("nx = 8\nny = 2\nbase = cycles\nbase_cycles = 3 5\n"))
    assert inst.base == Perm.from_cycles(inst.base.space, [(0, 1, 2), (3, 4, 5, 6, 7)])
    assert inst.extension == SkewProduct.trivial(inst.base, inst.extension.y_space)
