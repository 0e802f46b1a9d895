"""Writers (and readers, for round trips) for sweep results."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from ..zeno_static import ConvergenceRecord
from .sweep import ExperimentResult

CSV_HEADER = ("n", "error", "norm_kind")
FORMATS = ("csv", "json", "svg")


def result_to_json(result: ExperimentResult) -> dict:
    return {
        "scenario": result.scenario,
        "records": [{"n": r.n, "error": r.error, "norm_kind": r.norm_kind} for r in result.records],
        "slope": result.slope,
        "final_error": result.final_error,
        "metadata": result.metadata,
    }


def result_from_json(data: dict) -> ExperimentResult:
    return ExperimentResult(
        scenario=data["scenario"],
        records=tuple(ConvergenceRecord(int(r["n"]), float(r["error"]), r["norm_kind"])
                      for r in data["records"]),
        slope=data["slope"],
        final_error=data["final_error"],
        metadata=data.get("metadata", {}),
    )


def csv_text(result: ExperimentResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in result.records:
        w.writerow((r.n, repr(float(r.error)), r.norm_kind))
    return buf.getvalue()


def read_csv(path) -> list[ConvergenceRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [ConvergenceRecord(int(r["n"]), float(r["error"]), r["norm_kind"]) for r in rows]


def svg_text(result: ExperimentResult) -> str:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    pts = [(r.n, r.error) for r in result.records if r.error > 0]
    with matplotlib.rc_context({"svg.hashsalt": "zenolab", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5, 4))
        if pts:
            n, e = np.array(pts, dtype=float).T
            ax.loglog(n, e, "o", label="error")
            if result.slope is not None:
                c = np.polyfit(np.log(n), np.log(e), 1)
                ax.loglog(n, np.exp(np.polyval(c, np.log(n))), "-", lw=1,
                          label=f"fit, slope {result.slope:.3f}")
            ax.legend()
        kind = result.records[0].norm_kind if result.records else ""
        ax.set_xlabel("n (interceptions)")
        ax.set_ylabel(f"error ({kind})")
        ax.set_title(result.scenario)
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    return buf.getvalue()


def emit(result: ExperimentResult, fmt: str, out) -> None:
    """Write ``result`` as CSV (n,error,norm_kind), JSON, or a log-log SVG plot."""
    if fmt == "csv":
        text = csv_text(result)
    elif fmt == "json":
        text = json.dumps(result_to_json(result), indent=2) + "\n"
    elif fmt == "svg":
        text = svg_text(result)
    else:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    Path(out).write_text(text)
