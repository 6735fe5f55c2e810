#!/usr/bin/env python3
"""
Scan report files: CSV and JSON writers, the run manifest, and a verifier
that re-checks a written report.

CSV files open with ``# key: value`` manifest lines followed by the fixed
header. JSON files hold the same fields plus the config echo and each point's
two-copy witness at full double precision, so the verifier can re-evaluate it.
"""

import csv
import dataclasses
import datetime
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from dense_hermitian import Field, ProductAnsatz, kron, product_expectation
from gme_config import __version__, get_config, tolerances
from gme_errors import InvalidParameterError
from multiplicativity_lab import ScanRecord, family_state, is_violation

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "x",
    "y",
    "mode",
    "local_gme",
    "local_gme_sq",
    "two_copy_gme",
    "gap",
    "violation",
    "separable",
    "branch",
    "converged",
]

# Slack for comparing quantities that were each rounded to 12 significant digits.
ROUNDING_SLACK = 5e-12


@dataclasses.dataclass(frozen=True)
class RunManifest:
    command: str
    seed: int
    code_version: str
    schema_version: str
    started_at: str
    config: Dict[str, Any]
    wall_time_seconds: Optional[float] = None
    truncated: bool = False
    started_monotonic: float = dataclasses.field(default=0.0, repr=False, compare=False)

    @classmethod
    def create(cls, argv: Sequence[str], seed: int, config: Dict[str, Any]) -> "RunManifest":
        return cls(
            command=" ".join(argv),
            seed=int(seed),
            code_version=__version__,
            schema_version=get_config().scan.schema_version,
            started_at=datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
            config=dict(config),
            started_monotonic=time.perf_counter(),
        )

    def finish(self, truncated: bool = False) -> "RunManifest":
        return dataclasses.replace(
            self,
            wall_time_seconds=round(time.perf_counter() - self.started_monotonic, 3),
            truncated=truncated,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "seed": self.seed,
            "code_version": self.code_version,
            "schema_version": self.schema_version,
            "started_at": self.started_at,
            "wall_time_seconds": self.wall_time_seconds,
            "truncated": self.truncated,
            "config": self.config,
        }


def format_float(value: float, digits: Optional[int] = None) -> str:
    digits = get_config().scan.float_digits if digits is None else digits
    if value is None or not np.isfinite(value):
        return "nan"
    return f"{value:.{digits}g}"


def _format_bool(value: Optional[bool]) -> str:
    if value is None:
        return ""
    return "true" if value else "false"


def record_row(record: ScanRecord) -> List[str]:
    return [
        format_float(record.x),
        format_float(record.y),
        record.mode,
        format_float(record.local_gme),
        format_float(record.local_gme_squared),
        format_float(record.two_copy_gme),
        format_float(record.gap),
        _format_bool(record.violation),
        _format_bool(record.separable),
        record.branch,
        _format_bool(record.converged),
    ]


def write_csv(records: Sequence[ScanRecord], path, manifest: RunManifest) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        for key, value in manifest.to_dict().items():
            if isinstance(value, dict):
                value = json.dumps(value, sort_keys=True)
            f.write(f"# {key}: {value}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for record in records:
            writer.writerow(record_row(record))
    logger.info("Wrote %d records to %s", len(records), path)


def _witness_dict(ansatz: Optional[ProductAnsatz]) -> Optional[Dict[str, Any]]:
    if ansatz is None:
        return None
    return {
        "field": ansatz.field.value,
        "grouping": [list(g) for g in ansatz.grouping] if ansatz.grouping else None,
        "parties": [[[float(z.real), float(z.imag)] for z in p.entries] for p in ansatz.parties],
    }


def witness_from_dict(data: Dict[str, Any]) -> ProductAnsatz:
    arrays = [np.array([complex(re, im) for re, im in party]) for party in data["parties"]]
    field = Field(data.get("field", "complex"))
    if field is Field.REAL:
        arrays = [a.real for a in arrays]
    return ProductAnsatz.from_arrays(arrays, data.get("grouping"), field)


def record_dict(record: ScanRecord) -> Dict[str, Any]:
    return {
        "x": record.x,
        "y": record.y,
        "mode": record.mode,
        "local_gme": record.local_gme,
        "local_gme_sq": record.local_gme_squared,
        "two_copy_gme": record.two_copy_gme,
        "gap": record.gap,
        "violation": record.violation,
        "separable": record.separable,
        "branch": record.branch,
        "converged": record.converged,
        "family": record.family,
        "d": record.d,
        "error": record.error,
        "witness": _witness_dict(record.witness),
    }


def write_json(records: Sequence[ScanRecord], path, manifest: RunManifest, config: Optional[Dict[str, Any]] = None) -> None:
    document = {
        "manifest": manifest.to_dict(),
        "config": config if config is not None else manifest.config,
        "columns": CSV_COLUMNS,
        "records": [record_dict(r) for r in records],
    }
    with open(path, "w", encoding="utf-8") as f:
        # NaN is written as the bare token; readers here use json, which accepts it.
        json.dump(document, f, indent=2)
        f.write("\n")
    logger.info("Wrote %d records to %s", len(records), path)


def read_csv(path) -> Tuple[Dict[str, Any], List[Dict[str, str]]]:
    manifest: Dict[str, Any] = {}
    body: List[str] = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.startswith("# "):
                key, _, value = line[2:].rstrip("\n").partition(": ")
                if key == "config":
                    value = json.loads(value)
                manifest[key] = value
            else:
                body.append(line)
    reader = csv.DictReader(body)
    if reader.fieldnames != CSV_COLUMNS:
        raise InvalidParameterError(f"Unexpected CSV header {reader.fieldnames}")
    return manifest, list(reader)


def read_json(path) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def _parse_bool(value: Any, name: str) -> Optional[bool]:
    if isinstance(value, bool) or value is None:
        return value
    if value == "":
        return None
    if value in ("true", "false"):
        return value == "true"
    raise InvalidParameterError(f"Field {name} holds {value!r}, expected true/false")


def _parse_row(row: Dict[str, Any]) -> Dict[str, Any]:
    parsed = dict(row)
    for name in ("x", "y", "local_gme", "local_gme_sq", "two_copy_gme", "gap"):
        parsed[name] = float(row[name])
    for name in ("violation", "separable", "converged"):
        parsed[name] = _parse_bool(row[name], name)
    return parsed


def verify_report(path) -> Dict[str, Any]:
    """Re-check a CSV or JSON scan report and return counts, errors and warnings."""
    results: Dict[str, Any] = {
        "valid": True,
        "path": str(path),
        "format": None,
        "total_records": 0,
        "flagged": 0,
        "separable_flagged": 0,
        "unconverged": 0,
        "witnesses_checked": 0,
        "max_witness_deviation": 0.0,
        "errors": [],
        "warnings": [],
    }
    path = Path(path)
    try:
        if path.suffix == ".json":
            results["format"] = "json"
            document = read_json(path)
            manifest = document.get("manifest", {})
            config = document.get("config") or manifest.get("config", {})
            rows = document.get("records", [])
        else:
            results["format"] = "csv"
            manifest, rows = read_csv(path)
            config = manifest.get("config", {})
    except FileNotFoundError:
        results["valid"] = False
        results["errors"].append(f"File not found: {path}")
        return results
    except (ValueError, KeyError) as e:
        results["valid"] = False
        results["errors"].append(f"Unreadable report: {e}")
        return results

    if manifest.get("schema_version") != get_config().scan.schema_version:
        results["warnings"].append(f"Schema version {manifest.get('schema_version')!r} differs from the current one")
    if str(manifest.get("truncated", False)).lower() == "true":
        results["warnings"].append("Report is truncated")
    threshold = float(config.get("threshold", get_config().scan.threshold))
    tol = tolerances()

    for index, raw in enumerate(rows, 1):
        results["total_records"] = index
        label = f"Record {index}"
        try:
            missing = [c for c in CSV_COLUMNS if c not in raw]
            if missing:
                results["errors"].append(f"{label}: missing fields {missing}")
                continue
            row = _parse_row(raw)
        except (ValueError, TypeError) as e:
            results["errors"].append(f"{label}: {e}")
            continue

        if raw.get("error"):
            results["warnings"].append(f"{label}: point failed: {raw['error']}")
            continue
        local, local_sq, two, gap = row["local_gme"], row["local_gme_sq"], row["two_copy_gme"], row["gap"]
        if abs(local_sq - local**2) > ROUNDING_SLACK:
            results["errors"].append(f"{label}: local_gme_sq {local_sq} is not local_gme squared")
        if abs(gap - (two - local_sq)) > ROUNDING_SLACK:
            results["errors"].append(f"{label}: gap {gap} is not two_copy_gme - local_gme_sq")
        if row["violation"] and gap <= 0:
            results["errors"].append(f"{label}: flagged with nonpositive gap {gap}")
        elif row["violation"] != is_violation(gap, local_sq, threshold):
            results["warnings"].append(f"{label}: violation flag disagrees with the criterion at printed precision")

        if row["violation"]:
            results["flagged"] += 1
            if row["separable"]:
                results["separable_flagged"] += 1
                if row["mode"] == "complex":
                    results["warnings"].append(
                        f"{label}: separable point ({row['x']}, {row['y']}) flagged in complex mode: counterexample candidate"
                    )
        if row["converged"] is False:
            results["unconverged"] += 1

        witness = raw.get("witness")
        if witness:
            try:
                state = family_state(raw.get("family", config.get("family", "omega")), row["x"], row["y"], int(raw.get("d", 3)))
                value = product_expectation(kron(state, state), witness_from_dict(witness))
            except (ValueError, ArithmeticError) as e:
                results["errors"].append(f"{label}: witness could not be evaluated: {e}")
                continue
            deviation = abs(value - two)
            results["witnesses_checked"] += 1
            results["max_witness_deviation"] = max(results["max_witness_deviation"], deviation)
            if deviation > tol.witness:
                results["errors"].append(f"{label}: witness attains {value!r}, report says {two!r}")

    if results["unconverged"]:
        results["warnings"].append(f"{results['unconverged']} unconverged points")
    results["valid"] = not results["errors"]
    return results


def print_verification_results(results: Dict[str, Any], out=None) -> None:
    out = out or sys.stdout
    print("REPORT VERIFICATION", file=out)
    print("=" * 60, file=out)
    print(f"File: {results['path']} ({results['format']})", file=out)
    print(f"Status: {'VALID' if results['valid'] else 'INVALID'}", file=out)
    print(f"  Records: {results['total_records']}", file=out)
    print(f"  Flagged: {results['flagged']} (separable: {results['separable_flagged']})", file=out)
    print(f"  Unconverged: {results['unconverged']}", file=out)
    if results["witnesses_checked"]:
        print(
            f"  Witnesses re-evaluated: {results['witnesses_checked']}, "
            f"max deviation {results['max_witness_deviation']:.3e}",
            file=out,
        )
    for title, items in (("Errors", results["errors"]), ("Warnings", results["warnings"])):
        if items:
            print(f"\n{title} ({len(items)}):", file=out)
            for item in items[:10]:
                print(f"  - {item}", file=out)
            if len(items) > 10:
                print(f"  ... and {len(items) - 10} more", file=out)
