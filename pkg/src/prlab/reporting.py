"""Machine-readable outputs: canonical JSON reports, CSV tables, SVG barcodes.

The JSON report is the canonical record: serialization sorts keys and
contains no timestamps, so identical configs and seeds produce
byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np
from jsonschema import validate as _validate_schema

from prlab.persistence import Barcode

REPORT_SCHEMA = {
    "type": "object",
    "required": ["config", "checks", "passed"],
    "properties": {
        "config": {"type": "object"},
        "passed": {"type": "boolean"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "claim", "status"],
                "properties": {
                    "id": {"type": "string"},
                    "claim": {"type": "string"},
                    "status": {"enum": ["pass", "fail", "skip", "info"]},
                    "details": {"type": "object"},
                },
            },
        },
    },
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def canonical_json(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def validate_report(report: dict) -> None:
    _validate_schema(_jsonable(report), REPORT_SCHEMA)


def write_report_json(report: dict, path) -> Path:
    validate_report(report)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(report))
    return path


def barcode_to_json_obj(barcode: Barcode) -> list[dict]:
    """Bars grouped into {birth, death, degree, multiplicity} records."""
    grouped = barcode.as_multiset()
    out = []
    for (birth, death, degree), mult in sorted(
        grouped.items(), key=lambda kv: (kv[0][2], kv[0][0], kv[0][1])
    ):
        out.append(
            {
                "birth": float(birth),
                "death": "inf" if math.isinf(death) else float(death),
                "degree": int(degree),
                "multiplicity": int(mult),
            }
        )
    return out


def barcode_svg(barcode: Barcode, width: int = 640, row_height: int = 10) -> str:
    """Horizontal-segment diagram, one line per bar, sorted by (degree, birth)."""
    bars = sorted(barcode, key=lambda b: (b.degree, b.birth, b.death))
    births = [b.birth for b in bars]
    finite_deaths = [b.death for b in bars if b.finite]
    lo = min(births, default=0.0)
    hi = max(finite_deaths + births, default=1.0)
    span = (hi - lo) or 1.0
    lo, hi = lo - 0.05 * span, hi + 0.05 * span
    margin, legend = 40, 18
    height = legend + row_height * (len(bars) + 1)

    def sx(v: float) -> float:
        return margin + (width - 2 * margin) * (v - lo) / (hi - lo)

    rows = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{margin}" y="12" font-size="10">bars: {len(bars)} '
        f"(range {lo:.6g} .. {hi:.6g}, arrowheads = no death)</text>",
    ]
    for i, b in enumerate(bars):
        y = legend + row_height * (i + 1)
        x0 = sx(b.birth)
        x1 = width - margin if not b.finite else sx(b.death)
        rows.append(
            f'<line x1="{x0:.2f}" y1="{y}" x2="{x1:.2f}" y2="{y}" '
            f'stroke="{_degree_color(b.degree)}" stroke-width="3"/>'
        )
        if not b.finite:
            rows.append(
                f'<polygon points="{x1:.2f},{y - 3} {x1 + 6:.2f},{y} {x1:.2f},{y + 3}" '
                f'fill="{_degree_color(b.degree)}"/>'
            )
    rows.append("</svg>")
    return "\n".join(rows) + "\n"


def _degree_color(degree: int) -> str:
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]
    return palette[degree % len(palette)]


def write_text(text: str, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def trajectory_csv(times: np.ndarray, states: np.ndarray) -> str:
    """CSV dump with header t,coord_0..coord_{d-1}."""
    dim = states.shape[1]
    lines = ["t," + ",".join(f"coord_{i}" for i in range(dim))]
    for t, row in zip(times, states):
        lines.append(",".join([repr(float(t))] + [repr(float(v)) for v in row]))
    return "\n".join(lines) + "\n"


def monodromy_json(matrix: np.ndarray) -> str:
    """Row-major JSON dump of a monodromy matrix."""
    return json.dumps(
        {"rows": matrix.shape[0], "cols": matrix.shape[1],
         "data": [float(v) for v in np.asarray(matrix).ravel()]},
        sort_keys=True,
    ) + "\n"


def scan_csv(report) -> str:
    """fixed-level scan as CSV: one row per sample with its displacements."""
    k = report.k
    header = ["index", "theta", "alpha_slope", "on_level"] + [
        f"disp_k{j + 1}" for j in range(k)
    ] + ["disp_min", "disp_max"]
    lines = [",".join(header)]
    for i, s in enumerate(report.samples):
        row = [str(i), repr(float(s.theta)), repr(float(s.alpha_slope)), str(int(s.on_level))]
        row += [repr(float(d)) for d in s.displacements]
        row += [repr(float(np.min(s.displacements))), repr(float(np.max(s.displacements)))]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def checks_csv(report: dict) -> str:
    lines = ["id,claim,status"]
    for c in report["checks"]:
        lines.append(f'{c["id"]},{c["claim"]},{c["status"]}')
    return "\n".join(lines) + "\n"


def emit_report(report: dict, out_dir, formats=("json",), extras: dict | None = None) -> list[Path]:
    """Write the report in the requested formats; returns written paths.

    ``extras`` may carry a Barcode under "barcode" (for the SVG route)
    and a ScanReport under "scan" (for the CSV route).
    """
    out_dir = Path(out_dir)
    written = []
    extras = extras or {}
    for fmt in formats:
        if fmt == "json":
            written.append(write_report_json(report, out_dir / "report.json"))
        elif fmt == "csv":
            written.append(write_text(checks_csv(report), out_dir / "checks.csv"))
            if "scan" in extras:
                written.append(write_text(scan_csv(extras["scan"]), out_dir / "fixed_set_scan.csv"))
        elif fmt == "svg":
            if "barcode" in extras:
                written.append(
                    write_text(barcode_svg(extras["barcode"]), out_dir / "barcode.svg")
                )
        else:
            raise ValueError(f"unknown format {fmt!r}")
    return written


def csv_rows(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
