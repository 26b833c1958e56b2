# Copyright (c) 2025 The planbench developers
# All rights reserved.
#
#   Redistribution and use in source and binary forms, with or
#   without modification, are permitted provided that the following
#   conditions are met:
#
#    1. Redistributions of source code must retain the above copyright
#       notice, this list of conditions and the following disclaimer.
#    2. Redistributions in binary form must reproduce the above
#       copyright notice, this list of conditions and the following
#       disclaimer in the documentation and/or other materials provided
#       with the distribution.
#
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS
# "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT
# LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS
# FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE
# COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT,
# INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING,
# BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES;
# LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER
# CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT
# LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN
# ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE
# POSSIBILITY OF SUCH DAMAGE.

"""Benchmark reports: JSON, CSV and markdown renditions.

JSON keeps every field at full precision and is the only format that can be
loaded back. On load, the stored aggregates are checked against aggregates
recomputed from the stored records.
"""

from plankit.core import FormatError, InvalidDataError
from plankit.metrics import TrialRecord, AggregateRow, aggregate

from dataclasses import dataclass, field
from enum import Enum, unique
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union
import csv
import io
import json
import logging

logger = logging.getLogger(__name__)


REPORT_VERSION = 1

# Fields that vary between otherwise identical runs.
VOLATILE_FIELDS = ("planning_time_s", "peak_memory_kib", "preprocess_time_s")

CSV_COLUMNS = (
    "planner",
    "success_rate_pct",
    "mean_path_length",
    "mean_planning_time_s",
    "mean_distance_left",
    "mean_path_deviation",
    "mean_smoothness",
    "mean_clearance",
    "mean_peak_memory_kib",
    "n_trials",
    "dataset_name",
    "min_peak_memory_kib",
    "max_peak_memory_kib",
    "std_peak_memory_kib",
    "min_smoothness",
    "max_smoothness",
    "std_smoothness",
    "min_clearance",
    "max_clearance",
    "std_clearance",
)


@unique
class REPORT_FORMAT(str, Enum):
    CSV = "csv"
    JSON = "json"
    MARKDOWN = "markdown"


@dataclass
class BenchmarkReport:
    config: Dict[str, Any]
    records: List[TrialRecord]
    aggregates: List[AggregateRow]
    fingerprint: Dict[str, str] = field(default_factory=dict)

    @property
    def datasets(self) -> List[str]:
        return sorted({r.dataset_name for r in self.aggregates})

    def is_consistent(self) -> bool:
        recomputed = [r.to_dict() for r in aggregate(self.records)]
        return recomputed == [r.to_dict() for r in self.aggregates]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": REPORT_VERSION,
            "config": self.config,
            "fingerprint": self.fingerprint,
            "records": [r.to_dict() for r in self.records],
            "aggregates": [r.to_dict() for r in self.aggregates],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BenchmarkReport":
        if data.get("version") != REPORT_VERSION:
            raise InvalidDataError(f"Unsupported report version {data.get('version')}")
        return cls(
            config=data["config"],
            records=[TrialRecord.from_dict(r) for r in data["records"]],
            aggregates=[AggregateRow.from_dict(r) for r in data["aggregates"]],
            fingerprint=data.get("fingerprint", {}),
        )


def mask_volatile(record: Dict[str, Any]) -> Dict[str, Any]:
    """Copy of a serialized record with timing and memory readings zeroed."""
    masked = json.loads(json.dumps(record))
    for section in (masked, masked["result"]):
        for name in VOLATILE_FIELDS:
            if name in section:
                section[name] = 0.0
    return masked


def format_records(records: Sequence[TrialRecord], mask: bool = False) -> str:
    """JSON lines, one record per line."""
    lines = []
    for r in records:
        data = r.to_dict()
        if mask:
            data = mask_volatile(data)
        lines.append(json.dumps(data, sort_keys=True))
    return "".join(line + "\n" for line in lines)


def parse_records(text: str, path=None) -> List[TrialRecord]:
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            records.append(TrialRecord.from_dict(json.loads(line)))
        except (ValueError, KeyError, TypeError) as e:
            raise FormatError(f"Invalid record: {e}", path, lineno)
    return records


def format_csv(rows: Sequence[AggregateRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        data = row.to_dict()
        data["planner"] = data.pop("planner_kind")
        writer.writerow([data[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def format_json(report: BenchmarkReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


def _best(rows: Sequence[AggregateRow], attr: str) -> float:
    values = [getattr(r, attr) for r in rows if r.success_rate_pct == 100.0]
    return min(values) if values else float("nan")


def format_markdown(report: BenchmarkReport) -> str:
    """One table per dataset.

    Among planners with a 100% success rate, the shortest mean path is bold and
    the fastest mean planning time is underlined.
    """
    lines = ["# Benchmark results", ""]
    budget = report.config.get("budget_s")
    if budget is not None:
        lines += [f"Planning budget: {budget} s per map.", ""]
    for dataset in report.datasets:
        rows = [r for r in report.aggregates if r.dataset_name == dataset]
        shortest = _best(rows, "mean_path_length")
        fastest = _best(rows, "mean_planning_time_s")
        lines.append(f"## {dataset}")
        lines.append("")
        lines.append(
            "| Planner | SR (%) | Path length | Planning time (s) | Dist. left "
            "| Deviation | Smoothness (rad) | Clearance | Memory (KiB) | Trials |"
        )
        lines.append("|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|")
        for r in rows:
            length = f"{r.mean_path_length:.2f}"
            if r.success_rate_pct == 100.0 and r.mean_path_length == shortest:
                length = f"**{length}**"
            elapsed = f"{r.mean_planning_time_s:.3f}"
            if r.success_rate_pct == 100.0 and r.mean_planning_time_s == fastest:
                elapsed = f"<u>{elapsed}</u>"
            lines.append(
                f"| {r.planner_kind.value} | {round(r.success_rate_pct)} | {length} "
                f"| {elapsed} | {r.mean_distance_left:.2f} "
                f"| {r.mean_path_deviation:.2f} | {r.mean_smoothness:.3f} "
                f"| {r.mean_clearance:.2f} | {r.mean_peak_memory_kib:.1f} "
                f"| {r.n_trials} |"
            )
        lines.append("")
    lines.append(
        "Bold: shortest, underlined: fastest, among planners with 100% success rate."
    )
    return "\n".join(lines) + "\n"


def render(report: BenchmarkReport, fmt: REPORT_FORMAT) -> str:
    fmt = REPORT_FORMAT(fmt)
    if fmt == REPORT_FORMAT.CSV:
        return format_csv(report.aggregates)
    if fmt == REPORT_FORMAT.JSON:
        return format_json(report)
    return format_markdown(report)


def emit_report(
    report: BenchmarkReport, fmt: REPORT_FORMAT, destination: Union[str, Path]
) -> None:
    path = Path(destination)
    try:
        path.write_text(render(report, fmt))
    except OSError as e:
        raise OSError(e.errno, f"Unable to write report {path}: {e.strerror}")
    logger.info("Wrote %s report to %s", REPORT_FORMAT(fmt).value, path)


def load_report(path: Union[str, Path]) -> BenchmarkReport:
    """Load a JSON report, rejecting it if its aggregates don't match its records."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as e:
        raise FormatError(f"Unable to read report: {e.strerror}", path)
    except ValueError as e:
        raise FormatError(f"Invalid report JSON: {e}", path)
    try:
        report = BenchmarkReport.from_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"Invalid report: {e}", path)
    if not report.is_consistent():
        raise FormatError("Stored aggregates do not match the stored records", path)
    return report
