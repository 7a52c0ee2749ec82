"""CSV and SVG output for Monte-Carlo results."""

import csv
import math
from itertools import groupby
from pathlib import Path
from typing import Iterable, List, Union

import matplotlib
from loguru import logger
from matplotlib.figure import Figure

from ..types import AggregateRow, RunRecord

RECORD_HEADER = ["scenario", "directed", "n", "method", "replicate", "seed", "ari", "accuracy", "exact", "elapsed_ms"]
AGGREGATE_HEADER = [
    "scenario",
    "directed",
    "n",
    "method",
    "replicates",
    "errors",
    "mean_ari",
    "sd_ari",
    "exact_rate",
    "mean_elapsed_ms",
]

# Fixed so that identical aggregates give byte-identical SVG files.
SVG_HASHSALT = "sdsbm-lab"

PathLike = Union[str, Path]


def _decimal(value: float) -> str:
    """Six fractional digits; NaN becomes an empty field."""
    return "" if math.isnan(value) else f"{value:.6f}"


def _flag(value: bool) -> str:
    return "1" if value else "0"


def _write_rows(path: PathLike, header: List[str], rows: Iterable[List[str]]) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise OSError(f"Failed to write {path}: {e}") from e


def write_csv(rows: Iterable[RunRecord], path: PathLike) -> None:
    """Per-replicate records in canonical order; error rows leave ari and accuracy empty."""
    records = sorted(rows, key=RunRecord.sort_key)
    _write_rows(
        path,
        RECORD_HEADER,
        (
            [
                r.scenario,
                _flag(r.directed),
                str(r.n),
                r.method,
                str(r.replicate),
                str(r.seed),
                _decimal(r.ari),
                _decimal(r.accuracy),
                _flag(r.exact),
                str(r.elapsed_ms),
            ]
            for r in records
        ),
    )
    logger.info(f"Wrote {len(records)} records to {path}")


def write_aggregates_csv(rows: Iterable[AggregateRow], path: PathLike) -> None:
    rows = list(rows)
    _write_rows(
        path,
        AGGREGATE_HEADER,
        (
            [
                r.scenario,
                _flag(r.directed),
                str(r.n),
                r.method,
                str(r.replicates),
                str(r.errors),
                _decimal(r.mean_ari),
                _decimal(r.sd_ari),
                _decimal(r.exact_rate),
                _decimal(r.mean_elapsed_ms),
            ]
            for r in rows
        ),
    )
    logger.info(f"Wrote {len(rows)} aggregate rows to {path}")


def _parse_flag(value: str, field: str, lineno: int) -> bool:
    if value not in ("0", "1"):
        raise ValueError(f"line {lineno}: {field} must be 0 or 1, got {value!r}")
    return value == "1"


def read_records_csv(path: PathLike) -> List[RunRecord]:
    """Read a file written by :func:`write_csv`; rows with an empty ari are error rows."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header != RECORD_HEADER:
                raise ValueError(f"{path}: unexpected header {header}")
            records = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(RECORD_HEADER):
                    raise ValueError(f"{path}:{lineno}: expected {len(RECORD_HEADER)} fields, got {len(row)}")
                fields = dict(zip(RECORD_HEADER, row))
                failed = fields["ari"] == ""
                try:
                    records.append(
                        RunRecord(
                            scenario=fields["scenario"],
                            directed=_parse_flag(fields["directed"], "directed", lineno),
                            n=int(fields["n"]),
                            method=fields["method"],
                            replicate=int(fields["replicate"]),
                            seed=int(fields["seed"]),
                            ari=math.nan if failed else float(fields["ari"]),
                            accuracy=math.nan if fields["accuracy"] == "" else float(fields["accuracy"]),
                            exact=_parse_flag(fields["exact"], "exact", lineno),
                            elapsed_ms=int(fields["elapsed_ms"]),
                            error="method failed" if failed else None,
                        )
                    )
                except ValueError as e:
                    raise ValueError(f"{path}:{lineno}: {e}") from e
    except OSError as e:
        raise OSError(f"Failed to read {path}: {e}") from e
    logger.debug(f"Read {len(records)} records from {path}")
    return records


def _panel_key(row: AggregateRow):
    return (row.scenario, row.directed)


def emit_svg(aggregates: Iterable[AggregateRow], path_prefix: PathLike) -> List[Path]:
    """One SVG per (scenario, directedness): mean ARI against n per method with a +-1 sd band.

    Files are named ``<path_prefix><scenario>_<directed|undirected>.svg``.
    """
    rows = sorted(aggregates, key=lambda r: (r.scenario, r.directed, r.method, r.n))
    written = []
    for (scenario, directed), panel in groupby(rows, key=_panel_key):
        direction = "directed" if directed else "undirected"
        fig = Figure(figsize=(6.0, 4.0))
        ax = fig.add_subplot()
        for method, series in groupby(panel, key=lambda r: r.method):
            points = [r for r in series if not math.isnan(r.mean_ari)]
            if not points:
                continue
            ns = [r.n for r in points]
            means = [r.mean_ari for r in points]
            sds = [r.sd_ari for r in points]
            (line,) = ax.plot(ns, means, marker="o", linewidth=1.5, label=method)
            ax.fill_between(
                ns,
                [m - s for m, s in zip(means, sds)],
                [m + s for m, s in zip(means, sds)],
                color=line.get_color(),
                alpha=0.2,
            )
        ax.set_ylim(-0.1, 1.05)
        ax.set_xlabel("n")
        ax.set_ylabel("ARI")
        ax.set_title(f"{scenario} ({direction})")
        ax.grid(True, alpha=0.3)
        if ax.get_legend_handles_labels()[0]:
            ax.legend(loc="lower right")

        path = Path(f"{path_prefix}{scenario}_{direction}.svg")
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with matplotlib.rc_context({"svg.hashsalt": SVG_HASHSALT}):
                fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as e:
            raise OSError(f"Failed to write {path}: {e}") from e
        written.append(path)
        logger.info(f"Wrote figure {path}")
    return written
