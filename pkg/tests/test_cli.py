import json
import subprocess
import sys

import numpy as np
import pytest

from cwdlab import harnack as hk
from cwdlab.cli import main, run
from cwdlab.errors import ConfigError, InvariantError, ParseError
from cwdlab.io import ingest_density, ingest_graph, ingest_points
from cwdlab.report import Report, Table, load_report


def write(path, text):
    path.write_text(text)
    return str(path)


@pytest.fixture
def path_graph(tmp_path):
    rows = "\n".join(f"{i},{i + 1},10" for i in range(10))
    return write(tmp_path / "g.csv", "u,v,c\n" + rows + "\n")


# --- examples ----------------------------------------------------------------


def test_spectrum_sg3():
    rep, code, _ = run(["pcf", "spectrum", "--fractal", "sg", "--dim", "3"])
    vals = sorted(rep.tables["spectrum"].column("eigenvalue"))
    assert np.allclose(vals, [1 / 6, 1 / 6, 4 / 6, 1])
    assert code == 0


def test_vicsek_verdict():
    rep, code, _ = run(["pcf", "vicsek", "--r", "0.25", "--level", "6"])
    assert rep.verdicts["off_diagonal_mass_zero"].passed and code == 0


def test_g1d_const(tmp_path):
    x = np.linspace(0, 1, 33)
    dens = write(tmp_path / "const.csv", "x,g\n" + "\n".join(f"{float(v)!r},1.0" for v in x) + "\n")
    rep, code, _ = run(["diag", "g1d", "--density", dens])
    assert rep.verdicts["admissible"].constant == pytest.approx(1.0)
    assert code == 0


def test_g1d_half_indicator_fails(tmp_path):
    x = np.linspace(0, 1, 65)
    body = "\n".join(f"{float(v)!r},{1.0 if v <= 0.5 else 0.0}" for v in x)
    dens = write(tmp_path / "half.csv", "x,g\n" + body + "\n")
    assert main(["diag", "g1d", "--density", dens]) == 1


def test_cap_matches_library(path_graph):
    rep, code, _ = run(["diag", "cap", "--graph", path_graph, "--A", "0", "--B", "10"])
    form = ingest_graph(path_graph)
    direct = hk.capacity(form, [0], [10]).value
    assert rep.verdicts["connected"].constant == pytest.approx(direct)
    assert direct == pytest.approx(1.0)


def test_config_file_and_flag_override(tmp_path, path_graph):
    cfg = write(tmp_path / "run.ini", "[diag cap]\nA = 0\nB = 5\n")
    rep, _, _ = run(["diag", "cap", "--config", cfg, "--graph", path_graph])
    assert rep.verdicts["connected"].constant == pytest.approx(2.0)
    rep, _, _ = run(["diag", "cap", "--config", cfg, "--graph", path_graph, "--B", "10"])
    assert rep.verdicts["connected"].constant == pytest.approx(1.0)


def test_config_rejects_unknown_key(tmp_path, path_graph):
    cfg = write(tmp_path / "bad.ini", "[diag cap]\nnonsense = 1\n")
    with pytest.raises(ConfigError):
        run(["diag", "cap", "--config", cfg, "--graph", path_graph])
    assert main(["diag", "cap", "--config", cfg, "--graph", path_graph]) == 2


def test_bad_domain_exit_code():
    assert main(["pcf", "vicsek", "--r", "0.7"]) == 2


def test_filling_weights_compliant(tmp_path):
    out = tmp_path / "run"
    argv = ["filling", "weights", "--a", "192", "--lambda", "8", "--max-level", "2", "--gamma", "0.5"]
    rep, code, _ = run(argv + ["--out", str(out), "--csv"])
    assert code == 0
    assert {"report.json", "weights.csv", "diagnostics.csv"} <= {p.name for p in out.iterdir()}


# --- determinism and persistence -------------------------------------------------


def test_normalized_reports_are_byte_identical(tmp_path):
    texts = []
    for name in ("a", "b"):
        out = tmp_path / name
        run(["pcf", "energy", "--level", "3", "--seed", "7", "--out", str(out), "--normalized"])
        texts.append((out / "report.json").read_bytes())
    assert texts[0] == texts[1]
    doc = json.loads(texts[0])
    assert doc["schema"] == 1 and doc["wall_time"] is None
    assert all(v["source"] for v in doc["verdicts"].values())


def test_report_round_trip(tmp_path):
    rep = Report("x y", {"a": 1.5})
    rep.table("t", ["i", "v", "ok", "name"], [[1, 0.1, True, "p"], [2, 1e-300, False, "q"]])
    rep.verdict("v", True, "op", 2.0)
    rep.write(tmp_path, csv_tables=True)
    back = load_report(tmp_path / "report.json")
    assert back.tables["t"].rows == rep.tables["t"].rows
    assert back.tables["t"].types == ["int", "float", "bool", "str"]
    assert back.to_json() == rep.to_json()
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "i,v,ok,name"


def test_table_from_dict_lossless():
    t = Table("t", ["x"], [[0.1 + 0.2]])
    assert Table.from_dict("t", json.loads(json.dumps(t.to_dict()))).rows[0][0] == 0.1 + 0.2


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "cwdlab", "pcf", "spectrum", "--dim", "2", "--json"],
        capture_output=True, text=True, check=True,
    )
    assert json.loads(out.stdout)["command"] == "pcf spectrum"


# --- ingestion ----------------------------------------------------------------------


def test_ingest_distance_matrix(tmp_path):
    p = write(tmp_path / "d.csv", "id,a,b,c\na,0,1,2\nb,1,0,1.5\nc,2,1.5,0\n")
    s = ingest_points(p)
    assert s.n == 3 and s.dist[0, 2] == 2


def test_ingest_asymmetric_matrix_names_entry(tmp_path):
    p = write(tmp_path / "d.csv", "id,a,b,c\na,0,1,2\nb,1,0,1.5\nc,2,1.4,0\n")
    with pytest.raises(InvariantError) as exc:
        ingest_points(p)
    assert exc.value.row == 3 and exc.value.column == 4
    assert "d(b,c)" in str(exc.value)


def test_ingest_coordinates_and_parse_error(tmp_path):
    s = ingest_points(write(tmp_path / "p.csv", "id,x,y\np,0,0\nq,3,4\n"))
    assert s.dist[0, 1] == 5
    with pytest.raises(ParseError):
        ingest_points(write(tmp_path / "bad.csv", "id,x\np,0\nq,abc\n"))


def test_ingest_negative_density(tmp_path):
    with pytest.raises(InvariantError):
        ingest_density(write(tmp_path / "g.csv", "x,g\n0,1\n1,-0.5\n"))
    with pytest.raises(InvariantError):
        ingest_density(write(tmp_path / "g2.csv", "x,g\n0,1\n0,1\n"))


def test_ingest_graph_with_measure(tmp_path):
    m = write(tmp_path / "m.csv", "id,mass\nb,2\na,1\n")
    g = write(tmp_path / "g.csv", "u,v,c\na,b,3\n")
    form = ingest_graph(g, m)
    assert form.ids == ("b", "a")
    assert list(form.measure) == [2.0, 1.0]
    assert list(form.edges[0]) == [1, 0]
    with pytest.raises(InvariantError):
        ingest_graph(write(tmp_path / "g2.csv", "u,v,c\na,z,1\n"), m)
