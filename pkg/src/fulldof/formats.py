"""JSON file formats: matrices, random variables and reports."""
from __future__ import annotations

import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from .channel import ChannelMatrix
from .entropy import DiscreteRV
from .exactnum import PolyRatio, UniPoly, parse_rational

SCHEMA_VERSION = 1
TIMESTAMP_FIELD = "timestamp"


class InputError(ValueError):
    """A malformed input file; the message names the field and, when known, the line."""


def _line_of(text: str, needle: str) -> int | None:
    for n, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return n
    return None


def _fail(path, text: str, field: str, msg: str, needle: str | None = None):
    line = _line_of(text, needle) if needle else None
    where = f"{path}: field {field}" + (f" (line {line})" if line else "")
    raise InputError(f"{where}: {msg}")


def _load_json(path) -> tuple[Any, str]:
    text = Path(path).read_text()
    try:
        return json.loads(text), text
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: line {e.lineno}: invalid JSON ({e.msg})") from None


def _rational(value, path, text, field):
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        _fail(path, text, field, f"expected a 'p/q' string, got {value!r}", json.dumps(value))
    try:
        return parse_rational(str(value))
    except (ValueError, ZeroDivisionError) as e:
        _fail(path, text, field, str(e), json.dumps(value))


def parse_matrix(data, path="<matrix>", text="") -> ChannelMatrix:
    if not isinstance(data, dict) or "entries" not in data:
        _fail(path, text, "entries", "matrix file must be an object with an 'entries' array")
    rows = data["entries"]
    if not isinstance(rows, list) or not rows:
        _fail(path, text, "entries", "must be a nonempty array of rows", '"entries"')
    parsed = []
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            _fail(path, text, f"entries[{i}]", "row must be an array")
        parsed.append([_rational(x, path, text, f"entries[{i}][{j}]") for j, x in enumerate(row)])
    K = data.get("K", len(parsed))
    if K != len(parsed):
        _fail(path, text, "K", f"K = {K} but {len(parsed)} rows given", '"K"')
    for i, row in enumerate(parsed):
        if len(row) != K:
            _fail(path, text, f"entries[{i}]", f"has {len(row)} entries, expected {K}")
    return ChannelMatrix.from_rows(parsed)


def load_matrix(path) -> ChannelMatrix:
    data, text = _load_json(path)
    return parse_matrix(data, path, text)


def parse_rv(data, path="<rv>", text="", field="") -> DiscreteRV:
    pre = f"{field}." if field else ""
    if not isinstance(data, dict) or "support" not in data or "probs" not in data:
        _fail(path, text, field or "<root>", "random variable needs 'support' and 'probs'")
    sup = [_rational(x, path, text, f"{pre}support[{k}]") for k, x in enumerate(data["support"])]
    probs = [_rational(x, path, text, f"{pre}probs[{k}]") for k, x in enumerate(data["probs"])]
    try:
        return DiscreteRV(tuple(sup), tuple(probs))
    except ValueError as e:
        _fail(path, text, field or "<root>", str(e), '"probs"')


def load_rvs(path) -> list[DiscreteRV]:
    """One variable object, a list of them, or ``{"rvs": [...]}``."""
    data, text = _load_json(path)
    if isinstance(data, dict) and "rvs" in data:
        data = data["rvs"]
        prefix = "rvs"
    else:
        prefix = ""
    if isinstance(data, dict):
        return [parse_rv(data, path, text)]
    if not isinstance(data, list) or not data:
        _fail(path, text, prefix or "<root>", "expected a variable object or a nonempty list")
    return [parse_rv(d, path, text, f"{prefix}[{k}]") for k, d in enumerate(data)]


def parse_poly(text: str) -> UniPoly:
    """``"1,2"`` or ``"[1, 2]"`` -> 1 + 2h (constant term first)."""
    s = text.strip().strip("[]")
    if not s:
        return UniPoly()
    try:
        return UniPoly(tuple(int(x) for x in s.split(",")))
    except ValueError:
        raise InputError(f"polynomial coefficients must be integers: {text!r}") from None


def parse_poly_ratio(text: str) -> PolyRatio:
    """``"1,2;1,1"`` -> (1 + 2h)/(1 + h)."""
    num, sep, den = text.partition(";")
    if not sep:
        raise InputError(f"expected 'num;den' coefficient lists, got {text!r}")
    return PolyRatio(parse_poly(num), parse_poly(den))


def report_header(command: str) -> dict:
    return {"schema": SCHEMA_VERSION, "command": command,
            TIMESTAMP_FIELD: datetime.now(timezone.utc).isoformat(timespec="seconds")}


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def write_report(report: dict, path) -> None:
    """Write atomically: temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(dumps_report(report))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def strip_timestamp(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != TIMESTAMP_FIELD}
