"""Command-line front end: ``skewrec <subcommand> ...``.

Outputs go to stdout unless ``--out`` is given.  Relative ``--out`` and
``--plot`` paths are resolved against ``$SKEWREC_OUTPUT_DIR`` when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .config import ConfigError, Instance, build_instance, load_config
from .measure import CellSpace, Perm, halmos_distance, uniform_distance
from .report import emit_plot, profile_csv
from .skew import find_recurrence_witness, recurrence_profile
from .towers import PreconditionError, build_tower, certify_recurrence, recurrentize

OUTPUT_DIR_ENV = "SKEWREC_OUTPUT_DIR"


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _perm_arg(text: str) -> Perm:
    try:
        images = tuple(int(t) for t in text.replace(",", " ").split())
        return Perm(CellSpace(len(images)), images)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _out_path(path: str) -> Path:
    p = Path(path)
    root = os.environ.get(OUTPUT_DIR_ENV)
    if root and not p.is_absolute():
        p = Path(root) / p
    return p


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        dest = _out_path(out)
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(text, encoding="utf-8")


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _instance(path: str) -> Instance:
    return build_instance(load_config(path))


def cmd_metric(args) -> int:
    p, q = args.p, args.q
    _emit(
        _json({
            "cells": p.space.cells,
            "halmos": str(halmos_distance(p, q)),
            "uniform": str(uniform_distance(p, q)),
        }),
        args.out,
    )
    return 0


def cmd_tower(args) -> int:
    S = args.perm if args.perm is not None else _instance(args.config).base
    tower = build_tower(S, args.height, args.eps)
    _emit(_json(tower.to_dict()), args.out)
    return 0


def run_profile(inst: Instance, ms: Sequence[int], ns: Sequence[int]) -> str:
    rows = []
    for m in ms:
        rows.extend((m, n, mu) for n, mu in recurrence_profile(inst.extension, m, ns, inst.subset))
    return profile_csv(rows)


def cmd_profile(args) -> int:
    cfg = load_config(args.config)
    text = run_profile(build_instance(cfg), cfg.m, cfg.n)
    _emit(text, args.out)
    if args.plot:
        emit_plot(text, _out_path(args.plot))
    return 0


def cmd_witness(args) -> int:
    inst = _instance(args.config)
    found = find_recurrence_witness(inst.extension, args.m, args.floor, args.horizon, inst.subset)
    _emit(
        _json({
            "m": found.m,
            "floor": found.floor,
            "horizon": found.horizon,
            "n": found.n,
            "exhausted": found.exhausted,
            "measure": str(found.measure),
        }),
        args.out,
    )
    return 0


def cmd_recurrentize(args) -> int:
    inst = _instance(args.config)
    res = recurrentize(inst.extension, args.delta, args.floor, inst.subset)
    _emit(
        _json({
            "delta": str(args.delta),
            "distance": str(res.distance),
            "extension": res.extension.to_dict(),
            "certificate": res.certificate.to_dict(),
            "tower": None if res.tower is None else res.tower.to_dict(),
        }),
        args.out,
    )
    return 0 if res.distance < args.delta else 1


def cmd_certify(args) -> int:
    inst = _instance(args.config)
    if inst.partition is None:
        raise ConfigError("extension: certify needs extension = simple")
    cert = certify_recurrence(inst.base, inst.partition, args.floor, inst.subset)
    _emit(_json(cert.to_dict()), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skewrec", description="Recurrence experiments for finite skew products.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metric", help="Halmos and uniform distance between two permutations")
    p.add_argument("--p", type=_perm_arg, required=True, help="images, e.g. '1 0 2 3'")
    p.add_argument("--q", type=_perm_arg, required=True)
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("tower", help="Rokhlin tower over a base permutation")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--perm", type=_perm_arg)
    src.add_argument("--config")
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--eps", type=_rational, required=True)
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("profile", help="measure of D(m, n, R, A) over the configured m and n")
    p.add_argument("config")
    p.add_argument("--plot", help="also write an SVG plot here")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("witness", help="first n past the floor with mu(D) > 0")
    p.add_argument("config")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--floor", type=int, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("recurrentize", help="certified recurrent simple cocycle within delta")
    p.add_argument("config")
    p.add_argument("--delta", type=_rational, required=True)
    p.add_argument("--floor", type=int, default=1)
    p.set_defaults(func=cmd_recurrentize)

    p = sub.add_parser("certify", help="recurrence certificate for a simple cocycle")
    p.add_argument("config")
    p.add_argument("--floor", type=int, default=1)
    p.set_defaults(func=cmd_certify)

    for name in ("metric", "tower", "profile", "witness", "recurrentize", "certify"):
        sub.choices[name].add_argument("--out", help="output file (default stdout)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, PreconditionError, ValueError, OSError) as exc:
        print(f"skewrec {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
