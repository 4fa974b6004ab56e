"""Report rows and their CSV / JSON serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import IoFailure

HEADER = (
    "q", "chi", "r", "H", "P", "J", "lhs", "rhs", "ratio",
    "m1_ratio", "m3_ratio", "m4_ratio", "n_ratio", "total_ratio", "flags",
)


@dataclass(frozen=True)
class ReportRow:
    q: int
    chi: int
    r: int
    H: int
    P: int
    J: int
    lhs: float
    rhs: float
    ratio: float
    m1_ratio: float | None = None
    m3_ratio: float | None = None
    m4_ratio: float | None = None
    n_ratio: float | None = None
    total_ratio: float | None = None
    flags: tuple[str, ...] = ()

    @property
    def chain_ratios(self):
        return (self.m1_ratio, self.m3_ratio, self.m4_ratio, self.n_ratio, self.total_ratio)

    def values(self) -> tuple:
        return tuple(getattr(self, k) for k in HEADER)


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, tuple):
        return ";".join(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _json_cell(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, tuple):
        return list(v)
    return v


def render_report(rows: Sequence[ReportRow], fmt: str = "csv") -> str:
    rows = sorted(rows, key=lambda row: (row.q, row.chi))
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(HEADER)
        for row in rows:
            w.writerow([_csv_cell(v) for v in row.values()])
        return buf.getvalue()
    if fmt == "json":
        objs = [dict(zip(HEADER, map(_json_cell, row.values()))) for row in rows]
        return json.dumps(objs, indent=1, allow_nan=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(rows: Sequence[ReportRow], fmt: str, path) -> None:
    """Write rows sorted by (q, chi); identical rows give identical bytes."""
    text = render_report(rows, fmt)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write report to {path}: {exc}") from exc


def read_report_csv(path) -> list[ReportRow]:
    def num(s, cast):
        return None if s == "" else cast(s)

    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(fh):
            out.append(
                ReportRow(
                    int(rec["q"]), int(rec["chi"]), int(rec["r"]), int(rec["H"]), int(rec["P"]), int(rec["J"]),
                    float(rec["lhs"]), float(rec["rhs"]), float(rec["ratio"]),
                    *(num(rec[k], float) for k in ("m1_ratio", "m3_ratio", "m4_ratio", "n_ratio", "total_ratio")),
                    tuple(rec["flags"].split(";")) if rec["flags"] else (),
                )
            )
    return out
