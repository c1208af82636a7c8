"""Instance files: JSON ``{"M", "B", "G", "days"}`` or a CSV with one ``N`` column."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .errors import InstanceFormatError, InvalidInstance, InvalidParams
from .model import Instance, ProblemParams


def _as_int(value, where: str) -> int:
    if isinstance(value, bool):
        raise InstanceFormatError(f"{where}: expected an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError:
            pass
    raise InstanceFormatError(f"{where}: expected an integer, got {value!r}")


def _check_days(days: list[int], where) -> Instance:
    for i, n in enumerate(days):
        if n < 1:
            raise InstanceFormatError(f"{where(i)}: active days must be >= 1, got {n}")
        if i and n < days[i - 1]:
            raise InstanceFormatError(
                f"{where(i)}: days must be sorted ascending ({days[i - 1]} > {n})")
    try:
        return Instance(tuple(days))
    except InvalidInstance as exc:
        raise InstanceFormatError(str(exc)) from exc


def parse_json_instance(text: str) -> tuple[ProblemParams, Instance]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from exc
    if not isinstance(data, dict):
        raise InstanceFormatError("line 1: top-level value must be an object")
    for key in ("M", "B", "G", "days"):
        if key not in data:
            raise InstanceFormatError(f"field '{key}': missing")
    M, B, G = (_as_int(data[k], f"field '{k}'") for k in ("M", "B", "G"))
    try:
        params = ProblemParams(M, B, G)
    except InvalidParams as exc:
        raise InstanceFormatError(f"field 'G': {exc}") from exc
    raw = data["days"]
    if not isinstance(raw, list) or not raw:
        raise InstanceFormatError("field 'days': must be a non-empty list")
    days = [_as_int(v, f"field 'days[{i}]'") for i, v in enumerate(raw)]
    instance = _check_days(days, lambda i: f"field 'days[{i}]'")
    if len(instance) != params.M:
        raise InstanceFormatError(f"field 'days': has {len(instance)} entries, M={params.M}")
    return params, instance


def parse_csv_instance(text: str, params: ProblemParams | None = None) -> Instance:
    rows = list(csv.reader(text.splitlines()))
    if not rows or not any(cell.strip() for cell in rows[0]):
        raise InstanceFormatError("line 1: empty file, expected header with column 'N'")
    header = [h.strip() for h in rows[0]]
    if "N" not in header:
        raise InstanceFormatError(f"line 1: field 'N': missing from header {header}")
    col = header.index("N")
    days = []
    lines = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        if col >= len(row):
            raise InstanceFormatError(f"line {lineno}: field 'N': missing value")
        days.append(_as_int(row[col], f"line {lineno}: field 'N'"))
        lines.append(lineno)
    if not days:
        raise InstanceFormatError("line 2: no agents listed")
    instance = _check_days(days, lambda i: f"line {lines[i]}: field 'N'")
    if params is not None and len(instance) != params.M:
        raise InstanceFormatError(f"line {lines[-1]}: {len(instance)} agents listed, M={params.M}")
    return instance


def load_instance(path: str | Path, params: ProblemParams | None = None
                  ) -> tuple[ProblemParams, Instance]:
    path = Path(path)
    text = path.read_text()
    if not text.strip():
        raise InstanceFormatError(f"line 1: {path} is empty")
    if path.suffix.lower() == ".csv":
        if params is None:
            raise InstanceFormatError("CSV instances need --params M,B,G")
        return params, parse_csv_instance(text, params)
    file_params, instance = parse_json_instance(text)
    if params is not None and params != file_params:
        raise InstanceFormatError(
            f"field 'M': file params {file_params.as_tuple()} disagree with --params {params.as_tuple()}")
    return file_params, instance


def dump_json_instance(params: ProblemParams, instance: Instance) -> str:
    return json.dumps({"M": params.M, "B": params.B, "G": params.G, "days": list(instance.days)})
