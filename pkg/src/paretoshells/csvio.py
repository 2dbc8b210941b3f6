"""Point sets as CSV: one row per point, columns x_1..x_n, f_1..f_k, feasible, violation."""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Sequence

import numpy as np

from .dominance import Candidate
from .errors import ParseError
from .problem import ProblemSpec, evaluate_many

__all__ = ["header", "points_to_csv", "write_points", "read_points"]


def header(n: int, k: int) -> list[str]:
    return [f"x_{i + 1}" for i in range(n)] + [f"f_{l + 1}" for l in range(k)] + ["feasible", "violation"]


def points_to_csv(points: Sequence[Candidate], p: ProblemSpec) -> str:
    """CSV text with freshly evaluated objective values (maximization sense)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header(p.n, p.k))
    if points:
        ev = evaluate_many(p, np.vstack([c.x for c in points]))
        for x, f, ok, v in zip(ev.X, ev.F, ev.feasible, ev.violation):
            w.writerow([repr(float(t)) for t in x] + [repr(float(t)) for t in f] + [int(ok), repr(float(v))])
    return buf.getvalue()


def write_points(path, points: Sequence[Candidate], p: ProblemSpec) -> Path:
    path = Path(path)
    path.write_text(points_to_csv(points, p))
    return path


def read_points(path, p: ProblemSpec) -> list[Candidate]:
    """Read decision vectors from a CSV and re-evaluate them under ``p``.

    Only the ``x_i`` columns are used; stored objective values are ignored.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(f"{path}: empty CSV", 1, 1)
    head = rows[0]
    cols = []
    for i in range(p.n):
        name = f"x_{i + 1}"
        if name not in head:
            raise ParseError(f"{path}: missing column {name}", 1, 1)
        cols.append(head.index(name))
    X = []
    for r, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            X.append([float(row[c]) for c in cols])
        except (ValueError, IndexError):
            raise ParseError(f"{path}: bad number in row", r, 1) from None
    if not X:
        return []
    return evaluate_many(p, np.array(X)).candidates()
