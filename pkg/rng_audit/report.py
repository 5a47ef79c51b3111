"""
Run reports

Assembles the machine-readable report every command emits and renders it
as JSON, CSV (distribution only) or a rich text summary.

Report schema (JSON object, keys in this order):
    manifest      RunManifest fields
    distribution  sparse list of {m, p, e, probability}, lexicographic,
                  probability above the floor only
    audit         AuditReport fields, a mapping of named AuditReports, or null
    checks        named residuals / check values
    samples       list of {m, p, e} (only when sampling was requested
                  outside an audit)
Apart from manifest.timestamp, identical inputs give byte-identical JSON.
"""

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence

from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from rng_audit.__version__ import __version__
from rng_audit.models import INDEX_CONVENTION
from rng_audit.prng import prng_description
from rng_audit.simulator import JointDistribution, OutcomeTriple


FORMATS = ("json", "csv", "text")

TEXT_DISTRIBUTION_ROWS = 64


def content_digest(data: bytes) -> str:
    """Stable content hash of input bytes"""
    return "sha256:" + hashlib.sha256(data).hexdigest()


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class RunManifest:
    """Provenance of one command invocation"""
    command: str
    input_digest: Optional[str]
    seed: Optional[int]
    tool_version: str = __version__
    index_convention: str = INDEX_CONVENTION
    prng: str = ""
    timestamp: str = ""

    @classmethod
    def create(cls, command: str, input_digest: Optional[str], seed: Optional[int]) -> "RunManifest":
        return cls(command=command, input_digest=input_digest, seed=seed,
                   prng=prng_description(), timestamp=utc_timestamp())

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def distribution_entries(distribution: Optional[JointDistribution]) -> List[Dict[str, Any]]:
    if distribution is None:
        return []
    return [{"m": t.m, "p": t.p, "e": t.e, "probability": prob} for t, prob in distribution.entries()]


def build_report(manifest: RunManifest, distribution: Optional[JointDistribution] = None,
                 audit: Optional[Dict[str, Any]] = None, checks: Optional[Dict[str, Any]] = None,
                 samples: Optional[Sequence[OutcomeTriple]] = None) -> Dict[str, Any]:
    """Assemble a report dictionary in schema order"""
    report: Dict[str, Any] = {
        "manifest": manifest.to_dict(),
        "distribution": distribution_entries(distribution),
        "audit": audit,
        "checks": checks or {},
    }
    if samples is not None:
        report["samples"] = [{"m": t.m, "p": t.p, "e": t.e} for t in samples]
    return report


def render_json(report: Any) -> str:
    """JSON with fixed key order; floats use the shortest round-trip repr"""
    return json.dumps(report, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def render_csv(report: Dict[str, Any]) -> str:
    """Distribution only: one m,p,e,probability row per nonzero outcome"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["m", "p", "e", "probability"])
    for entry in report["distribution"]:
        writer.writerow([entry["m"], entry["p"], entry["e"], repr(entry["probability"])])
    return buffer.getvalue()


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, dict):
        return ", ".join(f"{k}={_format_value(v)}" for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return ",".join(str(v) for v in value)
    return str(value)


def _audit_table(title: str, audit: Dict[str, Any]) -> Table:
    table = Table(title=title, show_header=True, header_style="bold magenta")
    table.add_column("Field", style="cyan")
    table.add_column("Value", justify="right")
    for key, value in audit.items():
        table.add_row(key, _format_value(value))
    return table


def render_text(report: Dict[str, Any], width: int = 100) -> str:
    """Human-readable summary built with rich tables"""
    console = Console(file=io.StringIO(), width=width, color_system=None,
                      force_terminal=False, highlight=False)

    manifest = report["manifest"]
    header = Text()
    header.append(f"rngaudit {manifest['command']}\n", style="bold blue")
    header.append(f"version {manifest['tool_version']} | {manifest['index_convention']} | "
                  f"{manifest['prng']} | seed {manifest['seed']}\n")
    header.append(f"input {manifest['input_digest']} | {manifest['timestamp']}", style="dim")
    console.print(Panel(header, title="Run manifest", border_style="blue"))

    audit = report.get("audit")
    if audit:
        if "success_probability" in audit:
            console.print(_audit_table("Audit", audit))
        else:
            for name, row in audit.items():
                console.print(_audit_table(f"Audit: {name}", row))

    if report.get("checks"):
        checks = Table(title="Checks", show_header=True, header_style="bold magenta")
        checks.add_column("Check", style="cyan")
        checks.add_column("Value", justify="right")
        for name, value in report["checks"].items():
            checks.add_row(name, _format_value(value))
        console.print(checks)

    entries = report["distribution"]
    if entries:
        table = Table(title="Distribution", show_header=True, header_style="bold magenta")
        for column in ("m", "p", "e"):
            table.add_column(column, justify="right")
        table.add_column("probability", justify="right")
        for entry in entries[:TEXT_DISTRIBUTION_ROWS]:
            table.add_row(str(entry["m"]), str(entry["p"]), str(entry["e"]), f"{entry['probability']:.12g}")
        console.print(table)
        if len(entries) > TEXT_DISTRIBUTION_ROWS:
            console.print(f"... {len(entries) - TEXT_DISTRIBUTION_ROWS} more outcome(s); use --format json for all")

    for sample in report.get("samples", []):
        console.print(f"{sample['m']} {sample['p']} {sample['e']}")

    return console.file.getvalue()


def render(report: Dict[str, Any], fmt: str) -> str:
    """Render a report in one of FORMATS"""
    if fmt == "json":
        return render_json(report)
    if fmt == "csv":
        return render_csv(report)
    if fmt == "text":
        return render_text(report)
    raise ValueError(f"unknown format '{fmt}', expected one of {', '.join(FORMATS)}")
