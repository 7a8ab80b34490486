"""Profile CSV documents and their plots.

Rows are ``m,n,measure_num,measure_den``; the measure is an exact rational
split over two integer columns.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from pathlib import Path
from typing import Iterable

HEADER = ("m", "n", "measure_num", "measure_den")


def profile_csv(rows: Iterable[tuple[int, int, Fraction]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(HEADER)
    for m, n, mu in rows:
        writer.writerow((m, n, mu.numerator, mu.denominator))
    return out.getvalue()


def read_profile_csv(text: str) -> list[tuple[int, int, Fraction]]:
    """Parse a profile document; ``ValueError`` messages carry the line number."""
    if not text.strip():
        raise ValueError("line 1: missing header")
    rows = []
    reader = csv.reader(io.StringIO(text))
    for lineno, rec in enumerate(reader, start=1):
        if lineno == 1:
            if tuple(rec) != HEADER:
                raise ValueError(f"line 1: expected header {','.join(HEADER)}, got {','.join(rec)!r}")
            continue
        if not rec:
            continue
        if len(rec) != 4:
            raise ValueError(f"line {lineno}: expected 4 fields, got {len(rec)}")
        try:
            m, n, num, den = (int(v) for v in rec)
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer field in {rec!r}") from None
        if den <= 0:
            raise ValueError(f"line {lineno}: denominator must be positive")
        rows.append((m, n, Fraction(num, den)))
    return rows


def emit_plot(text: str, path: str | Path) -> Path:
    """Write an SVG line plot of measure against n, one series per m.

    The file depends only on ``text``: SVG ids are salted with a constant
    and the date metadata is dropped.
    """
    rows = read_profile_csv(text)
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series: dict[int, list[tuple[int, Fraction]]] = {}
    for m, n, mu in rows:
        series.setdefault(m, []).append((n, mu))
    with matplotlib.rc_context({"svg.hashsalt": "skewrec", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        for m in sorted(series):
            pts = sorted(series[m])
            ax.plot([n for n, _ in pts], [float(mu) for _, mu in pts], marker="o", label=f"m = {m}")
        ax.set_xlabel("n")
        ax.set_ylabel("measure of D(m, n, R, A)")
        ax.set_ylim(-0.05, 1.05)
        if series:
            ax.legend()
        path = Path(path)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
