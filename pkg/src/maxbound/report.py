"""Suite configuration and canonical report serialization."""

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError

__all__ = ["SCHEMA", "CSV_COLUMNS", "SuiteConfig", "load_config_file", "resolve_config", "emit_report", "write_reports"]

SCHEMA = 1
CSV_COLUMNS = ("id", "constant", "max_ratio", "pass", "seed", "grid_hash")


@dataclass(frozen=True)
class SuiteConfig:
    """Effective settings for one suite run."""

    suite: str = "certify-all"
    N: int = 3
    ell: int = 2
    p: float = None
    seed: int = 0
    grid_scale: float = 1.0
    out: str = "reports"
    format: str = "json"
    family: str = "gaussian"
    config: str = "2"

    def __post_init__(self):
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.format!r}")
        if not (isinstance(self.N, int) and self.N >= 1 and isinstance(self.ell, int) and self.ell >= 1):
            raise ConfigError("N and ell must be positive integers")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise ConfigError("seed must be a non-negative 64-bit integer")
        if not (math.isfinite(self.grid_scale) and self.grid_scale > 0):
            raise ConfigError("grid_scale must be positive")
        if self.p is not None and not self.p >= 1:
            raise ConfigError("p must be at least 1")
        parts = self.config.split("+")
        if not all(s.isdigit() and int(s) > 0 for s in parts):
            raise ConfigError(f"config must look like '2' or '2+2', got {self.config!r}")

    def to_dict(self):
        return asdict(self)


_FIELDS = {f.name for f in fields(SuiteConfig)}


def load_config_file(path):
    """Read a JSON object of overrides; unknown keys are rejected."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    unknown = sorted(set(data) - _FIELDS)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {unknown}")
    return data


def resolve_config(cli=None, file=None):
    """Defaults, then file values, then CLI values (``None`` means unset)."""
    merged = {}
    for layer in (file or {}, cli or {}):
        unknown = sorted(set(layer) - _FIELDS)
        if unknown:
            raise ConfigError(f"unknown keys {unknown}")
        merged.update({k: v for k, v in layer.items() if v is not None})
    try:
        return replace(SuiteConfig(), **merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _report_dict(report, config):
    d = report if isinstance(report, dict) else report.to_dict()
    d = dict(d)
    if config is not None:
        d["config"] = config.to_dict() if isinstance(config, SuiteConfig) else dict(config)
    d["schema"] = SCHEMA
    return d


def emit_report(reports, fmt="json", config=None):
    """Serialize reports as text; output is sorted by id and canonical.

    JSON is an array of objects with the key order of the report followed
    by ``config`` and ``schema``. Parsing and re-emitting gives the same bytes.
    """
    rows = sorted((_report_dict(r, config) for r in reports), key=lambda d: d["id"])
    if fmt == "json":
        return json.dumps(rows, indent=2, ensure_ascii=True, allow_nan=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for d in rows:
            writer.writerow(["" if d[c] is None else (str(d[c]).lower() if isinstance(d[c], bool) else d[c]) for c in CSV_COLUMNS])
        return buf.getvalue()
    raise ConfigError(f"unknown format {fmt!r}")


def _safe_name(id_):
    return "".join(c if c.isalnum() or c in "._-" else "_" for c in id_)


def write_reports(reports, out, fmt="json", config=None):
    """One file per report plus ``summary.<fmt>``; returns the written paths."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for r in sorted(reports, key=lambda r: r.id):
        path = out / f"{_safe_name(r.id)}.{fmt}"
        path.write_text(emit_report([r], fmt, config))
        paths.append(path)
    summary = out / f"summary.{fmt}"
    summary.write_text(emit_report(reports, fmt, config))
    paths.append(summary)
    return paths
