"""Run reports: typed tables, verdicts and metadata with deterministic JSON."""
from __future__ import annotations

import hashlib
import json
import platform
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from .errors import IoError
from .io import write_csv

SCHEMA = 1


def _plain(v):
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    return v


def _type_of(values):
    kinds = {type(v) for v in values if v is not None}
    if kinds <= {bool}:
        return "bool"
    if kinds <= {int}:
        return "int"
    if kinds <= {int, float}:
        return "float"
    return "str"


@dataclass
class Table:
    name: str
    columns: list
    rows: list
    types: list = field(default_factory=list)

    def __post_init__(self):
        self.rows = [[_plain(v) for v in r] for r in self.rows]
        if not self.types:
            self.types = [_type_of([r[i] for r in self.rows]) for i in range(len(self.columns))]

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_dict(self):
        return {"columns": list(self.columns), "types": list(self.types), "rows": self.rows}

    @classmethod
    def from_dict(cls, name, d):
        return cls(name, d["columns"], d["rows"], d["types"])


@dataclass
class Verdict:
    name: str
    passed: bool
    source: str
    constant: float | None = None

    def to_dict(self):
        return {"passed": bool(self.passed), "constant": _plain(self.constant), "source": self.source}


@dataclass
class Report:
    command: str
    config: dict
    tables: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    wall_time: float | None = None

    def table(self, name, columns, rows):
        self.tables[name] = Table(name, columns, rows)
        return self.tables[name]

    def verdict(self, name, passed, source, constant=None):
        self.verdicts[name] = Verdict(name, bool(passed), source, constant)
        return self.verdicts[name]

    @property
    def ok(self):
        return all(v.passed for v in self.verdicts.values())

    @property
    def config_hash(self):
        blob = json.dumps(_plain(self.config), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def to_dict(self, normalized=False):
        from . import __version__

        return {
            "schema": SCHEMA,
            "command": self.command,
            "config": _plain(self.config),
            "config_hash": self.config_hash,
            "versions": {
                "cwdlab": __version__,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "python": platform.python_version(),
            },
            "wall_time": None if normalized else self.wall_time,
            "tables": {k: t.to_dict() for k, t in sorted(self.tables.items())},
            "verdicts": {k: v.to_dict() for k, v in sorted(self.verdicts.items())},
            "artifacts": sorted(self.artifacts),
            "notes": list(self.notes),
        }

    def to_json(self, normalized=False):
        return json.dumps(self.to_dict(normalized), indent=2, sort_keys=True)

    def write(self, out_dir, csv_tables=False, normalized=False):
        out = Path(out_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise IoError(f"cannot create {out}: {exc}") from exc
        if csv_tables:
            for name, t in self.tables.items():
                write_csv(out / f"{name}.csv", t.columns, t.rows)
                self.artifacts.append(f"{name}.csv")
        self.artifacts = sorted(set(self.artifacts))
        path = out / "report.json"
        try:
            path.write_text(self.to_json(normalized) + "\n")
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc
        return path


def load_report(path):
    d = json.loads(Path(path).read_text())
    rep = Report(d["command"], d["config"], wall_time=d.get("wall_time"))
    rep.tables = {k: Table.from_dict(k, t) for k, t in d["tables"].items()}
    rep.verdicts = {
        k: Verdict(k, v["passed"], v["source"], v["constant"]) for k, v in d["verdicts"].items()
    }
    rep.artifacts = list(d["artifacts"])
    rep.notes = list(d.get("notes", []))
    return rep
