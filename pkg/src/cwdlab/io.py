"""CSV ingestion for point sets, 1-D densities and weighted graphs."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import InvariantError, IoError, MetricInvariantError, ParseError
from .harnack import GraphForm, WeightedMeasure1D
from .metric_core import FiniteMetricSpace


def _read_rows(path):
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ParseError(str(path), 1, 1, "file is empty")
    return str(path), [[c.strip() for c in r] for r in rows]


def _is_number(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


def _split_header(rows):
    """(header or None, data rows, 1-based row number of the first data row)."""
    if not all(_is_number(c) for c in rows[0]):
        return rows[0], rows[1:], 2
    return None, rows, 1


def _float(path, row, col, text):
    try:
        v = float(text)
    except ValueError:
        raise ParseError(path, row, col, f"not a number: {text!r}") from None
    if not np.isfinite(v):
        raise ParseError(path, row, col, f"non-finite value {text!r}")
    return v


def ingest_points(path):
    """Coordinates (id, x1, x2, ...) or a distance matrix whose header repeats the row ids."""
    path, rows = _read_rows(path)
    header, data, first = _split_header(rows)
    ids = [r[0] for r in data]
    width = len(data[0]) if data else 0
    for i, r in enumerate(data):
        if len(r) != width:
            raise ParseError(path, first + i, len(r), f"expected {width} columns, found {len(r)}")
    if width < 2:
        raise ParseError(path, first, 1, "need an id column and at least one value column")
    values = np.array(
        [[_float(path, first + i, j + 2, c) for j, c in enumerate(r[1:])] for i, r in enumerate(data)]
    )
    if header is not None and header[1:] == ids:
        d = values
        n = len(ids)
        for i in range(n):
            if d[i, i] != 0:
                raise InvariantError(path, first + i, i + 2, f"d({ids[i]},{ids[i]}) must be 0")
            for j in range(i + 1, n):
                if d[i, j] != d[j, i]:
                    raise InvariantError(
                        path, first + i, j + 2,
                        f"asymmetric entry d({ids[i]},{ids[j]}) = {d[i, j]} but d({ids[j]},{ids[i]}) = {d[j, i]}",
                    )
                if d[i, j] <= 0:
                    raise InvariantError(path, first + i, j + 2, f"d({ids[i]},{ids[j]}) must be positive")
        try:
            return FiniteMetricSpace.from_matrix(d, ids=ids)
        except MetricInvariantError as exc:
            raise InvariantError(path, 0, 0, str(exc)) from exc
    return FiniteMetricSpace.from_coords(values, ids=ids)


def ingest_density(path):
    """Two columns (x, g(x)) with strictly increasing x and g >= 0."""
    path, rows = _read_rows(path)
    _, data, first = _split_header(rows)
    xs, gs = [], []
    for i, r in enumerate(data):
        row = first + i
        if len(r) != 2:
            raise ParseError(path, row, len(r), "expected two columns (x, g)")
        x, g = _float(path, row, 1, r[0]), _float(path, row, 2, r[1])
        if g < 0:
            raise InvariantError(path, row, 2, f"negative density {g}")
        if xs and x <= xs[-1]:
            raise InvariantError(path, row, 1, "x must be strictly increasing")
        xs.append(x)
        gs.append(g)
    if len(xs) < 2:
        raise ParseError(path, first, 1, "need at least two samples")
    return WeightedMeasure1D(np.array(xs), np.array(gs))


def ingest_graph(path, measure_path=None):
    """Edge list (u, v, conductance) plus an optional (id, mass) file; unit mass by default.

    Vertex ids are assigned in order of first appearance: the measure file if
    given, otherwise the edge list.
    """
    path, rows = _read_rows(path)
    _, data, first = _split_header(rows)
    index = {}
    masses = []
    if measure_path is not None:
        mpath, mrows = _read_rows(measure_path)
        _, mdata, mfirst = _split_header(mrows)
        for i, r in enumerate(mdata):
            row = mfirst + i
            if len(r) != 2:
                raise ParseError(mpath, row, len(r), "expected two columns (id, mass)")
            if r[0] in index:
                raise InvariantError(mpath, row, 1, f"duplicate vertex {r[0]}")
            m = _float(mpath, row, 2, r[1])
            if m <= 0:
                raise InvariantError(mpath, row, 2, f"vertex mass must be positive, got {m}")
            index[r[0]] = len(index)
            masses.append(m)
    edges, cond = [], []
    for i, r in enumerate(data):
        row = first + i
        if len(r) != 3:
            raise ParseError(path, row, len(r), "expected three columns (u, v, conductance)")
        c = _float(path, row, 3, r[2])
        if c < 0:
            raise InvariantError(path, row, 3, f"negative conductance {c}")
        if r[0] == r[1]:
            raise InvariantError(path, row, 2, f"self-loop at {r[0]}")
        ends = []
        for col, label in ((1, r[0]), (2, r[1])):
            if label not in index:
                if measure_path is not None:
                    raise InvariantError(path, row, col, f"vertex {label} missing from the measure file")
                index[label] = len(index)
                masses.append(1.0)
            ends.append(index[label])
        edges.append(ends)
        cond.append(c)
    ids = tuple(sorted(index, key=index.get))
    return GraphForm(len(ids), np.array(edges, dtype=np.int64).reshape(-1, 2), np.array(cond), np.array(masses), ids)


def write_csv(path, columns, rows):
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow([_fmt(v) for v in r])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return path


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v
