# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
import sys
from typing import TYPE_CHECKING, Any, Sequence

import numpy as np
from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from lipcert.errors import ParseError, ValidationError
from lipcert.zoo import json_path

if TYPE_CHECKING:
    from lipcert.interface import LipCertProtocol as LipCert

SCHEMA_VERSION = 1
COMMANDS = ("ball", "tune", "modulus", "classify", "verify", "certseq", "zoo", "cover", "convexity", "constancy", "subgrad")

REPORT_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "tool_version": {"type": "string"},
        "command": {"enum": list(COMMANDS)},
        "inputs": {"type": "object"},
        "outputs": {"type": "object"},
        "timing_ms": {"type": "number", "minimum": 0},
    },
    "required": ["schema_version", "tool_version", "command", "inputs", "outputs", "timing_ms"],
    "additionalProperties": False,
}
_report_validator = Draft202012Validator(REPORT_SCHEMA)


def plain(value: Any) -> Any:
    """JSON-ready copy: numpy scalars and arrays unwrapped, non-finite floats as "inf"/"-inf"/"nan"."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        number = float(value)
        if math.isfinite(number):
            return number
        return "nan" if math.isnan(number) else ("inf" if number > 0 else "-inf")
    return value


def csv_cell(value: Any) -> str:
    if value is None:
        return ""
    cell = plain(value)
    # repr is the shortest decimal that round-trips, the same text json writes
    return repr(cell) if isinstance(cell, float) else str(cell)


class PublishMixin:

    # Reports -------------------------------------------------------------------------------------

    def build_report(self: LipCert, inputs: dict[str, Any], outputs: dict[str, Any]) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": self.config["version"],
            "command": self.command,
            "inputs": plain(inputs),
            "outputs": plain(outputs),
            "timing_ms": round(self.elapsed_ms(), 3),
        }

    def report_json(self: LipCert, report: dict[str, Any]) -> str:
        return json.dumps(plain(report), indent=2, allow_nan=False) + "\n"

    def rows_csv(self: LipCert, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([csv_cell(v) for v in row])
        return buffer.getvalue()

    def emit(self: LipCert, report: dict[str, Any], table: tuple[Sequence[str], Sequence[Sequence[Any]]] | None = None) -> None:
        """Write the report (or its table, for --format csv) to --out or stdout."""
        fmt = getattr(self.args, "format", None) or "json"
        if fmt == "csv":
            if table is None:
                raise ValidationError(f"csv output is only available for modulus and certseq, not {self.command}", "--format")
            text = self.rows_csv(*table)
        else:
            text = self.report_json(report)

        out = getattr(self.args, "out", None)
        if out:
            try:
                Path(out).write_text(text, encoding="utf-8")
            except OSError as err:
                raise ValidationError(f"cannot write report: {err.strerror}", str(out)) from err
            self.logger.info(f"wrote {self.command} {fmt} report to {out}")
        else:
            sys.stdout.write(text)
            sys.stdout.flush()

    # Reading -------------------------------------------------------------------------------------

    def read_json_file(self: LipCert, path: str | Path, what: str) -> Any:
        file = Path(path)
        try:
            text = file.read_text(encoding="utf-8")
        except OSError as err:
            raise ParseError(f"cannot read {what} {file}: {err.strerror}", str(file)) from err
        except UnicodeDecodeError as err:
            raise ParseError(f"{what} {file} is not valid UTF-8: {err.reason} at byte {err.start}", str(file)) from err
        try:
            return json.loads(text)
        except json.JSONDecodeError as err:
            raise ParseError(f"{what} is not valid JSON: {err.msg} at line {err.lineno} column {err.colno}", str(file)) from err

    def validate_report(self: LipCert, data: Any) -> dict[str, Any]:
        error = best_match(_report_validator.iter_errors(data))
        if error is not None:
            raise ParseError(error.message, json_path(error.absolute_path))
        return dict(data)

    def unwrap(self: LipCert, data: Any, key: str, commands: Sequence[str]) -> Any:
        """`data` itself, or outputs[key] when `data` is a report from one of `commands`."""
        if isinstance(data, dict) and "schema_version" in data:
            report = self.validate_report(data)
            if report["command"] not in commands or key not in report["outputs"]:
                raise ParseError(f"a {report['command']} report holds no {key}", "$.outputs")
            return report["outputs"][key]
        return data
