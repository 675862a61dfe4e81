"""Report serialization and plot-ready (x, y) tables.

CSV floats are written with ``repr`` so output never depends on the locale
and round-trips exactly. Booleans are ``true``/``false``; missing values are
empty cells.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .blocks import GrowthReport
from .cantor import walk_mean
from .riesz import WitnessReport


@dataclass
class WalkReport:
    rows: list[tuple[int, float, float]]

    COLUMNS = ("N", "mean_abs", "ratio")


def walk_report(ns: Iterable[int]) -> WalkReport:
    return WalkReport([(n, *walk_mean(n)) for n in ns])


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def witness_csv(report: WitnessReport, timing: bool = True) -> str:
    rows = (
        (r.n, r.linf_norm, r.l2_norm, r.mho_l1, r.bound_b1, r.bound_b2, r.pass_b1, r.pass_b2, r.seconds if timing else 0.0)
        for r in report.rows
    )
    return to_csv(WitnessReport.COLUMNS, rows)


def walk_csv(report: WalkReport) -> str:
    return to_csv(WalkReport.COLUMNS, report.rows)


def growth_csv(report: GrowthReport) -> str:
    rows = ((r.k, r.c_k, r.n_k, r.delta_lower_k, r.q_sampled) for r in report.rows)
    return to_csv(GrowthReport.COLUMNS, rows)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False, default=_fallback) + "\n"


def _fallback(obj):
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _curves(report) -> dict[str, list[tuple[float, float]]]:
    if isinstance(report, WitnessReport):
        out = {
            "witness_mho_l1": [(math.log(r.n), r.mho_l1) for r in report.rows],
            "witness_bound_b1": [(math.log(r.n), r.bound_b1) for r in report.rows],
        }
        b2 = [(math.log(r.n), r.bound_b2) for r in report.rows if r.bound_b2 is not None]
        if b2:
            out["witness_bound_b2"] = b2
        return out
    if isinstance(report, WalkReport):
        return {"walk_ratio": [(float(n), ratio) for n, _, ratio in report.rows]}
    if isinstance(report, GrowthReport):
        return {"blocks_delta": [(float(r.k), r.delta_lower_k) for r in report.feasible]}
    raise TypeError(f"no plot data for {type(report).__name__}")


def emit_plot_data(report, out_dir: str | Path) -> list[Path]:
    """Write one two-column ``x,y`` CSV per curve; returns the paths written."""
    curves = _curves(report)
    if not any(curves.values()):
        raise ValueError("report has no rows to plot")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, points in curves.items():
        path = out / f"{name}.csv"
        path.write_text(to_csv(("x", "y"), points))
        paths.append(path)
    return paths
