"""Experiment reports: rows, CSV and text summaries."""
from __future__ import annotations

import csv
import io
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

CSV_COLUMNS = ("quantity", "school", "t_or_epsilon", "estimate", "stderr", "bound", "pass")


@dataclass
class ReportRow:
    """One line of a report.

    ``bound`` holds whatever the estimate is compared against: a theoretical
    upper bound for tail rows, an exact value or reference constant
    elsewhere. ``passed`` is None for rows that are informational only.
    """

    quantity: str
    school: int | None
    t_or_epsilon: float | None
    estimate: float
    stderr: float
    bound: float | None
    passed: bool | None = None

    def as_strings(self):
        return (
            self.quantity,
            "" if self.school is None else str(self.school),
            _fmt(self.t_or_epsilon),
            _fmt(self.estimate),
            _fmt(self.stderr),
            _fmt(self.bound),
            "" if self.passed is None else str(self.passed).lower(),
        )


def _fmt(x):
    if x is None:
        return ""
    return repr(float(x))


def build_id() -> str:
    from . import __version__

    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=5,
            cwd=Path(__file__).resolve().parent,
        )
        desc = out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        desc = ""
    return f"rsdlab-{__version__}" + (f"+{desc}" if desc else "")


@dataclass
class ExperimentReport:
    name: str
    rows: list[ReportRow]
    replications: int
    master_seed: int
    wall_clock: float = 0.0
    summary: dict = field(default_factory=dict)
    build: str = field(default_factory=build_id)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows if r.passed is not None)

    def failing_rows(self) -> list[ReportRow]:
        return [r for r in self.rows if r.passed is False]

    def select(self, quantity: str, school: int | None = None) -> list[ReportRow]:
        return [r for r in self.rows
                if r.quantity == quantity and (school is None or r.school == school)]

    def provenance(self, config_hash: str = "") -> dict:
        return {
            "experiment": self.name,
            "master_seed": self.master_seed,
            "replications": self.replications,
            "config_hash": config_hash,
            "build_id": self.build,
        }

    def to_csv(self, config_hash: str = "") -> str:
        buf = io.StringIO()
        for key, value in self.provenance(config_hash).items():
            buf.write(f"# {key}={value}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in self.rows:
            w.writerow(row.as_strings())
        return buf.getvalue()

    def summary_text(self, config_hash: str = "", include_timing: bool = False) -> str:
        lines = [f"{k}: {v}" for k, v in self.provenance(config_hash).items()]
        for k, v in self.summary.items():
            lines.append(f"{k}: {v}")
        if include_timing:
            lines.append(f"wall_clock_s: {self.wall_clock:.3f}")
        lines.append(f"passed: {str(self.passed).lower()}")
        for r in self.failing_rows():
            lines.append("failing: " + ",".join(r.as_strings()))
        lines.append("")
        lines.append("rows: " + ",".join(CSV_COLUMNS))
        for r in self.rows:
            lines.append("  " + ",".join(r.as_strings()))
        return "\n".join(lines) + "\n"
