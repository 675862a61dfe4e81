import csv
import io
import math

import numpy as np
import pytest

from twisted_lab import blocks as B
from twisted_lab import centralizer as K
from twisted_lab import riesz as R
from twisted_lab import reports as P


def read(path):
    return list(csv.reader(io.StringIO(path.read_text())))


def test_cells_and_csv():
    text = P.to_csv(("a", "b", "c", "d"), [(1, 0.1, True, None), (2, 1e-17, False, "x")])
    assert text == "a,b,c,d\n1,0.1,true,\n2,1e-17,false,x\n"
    v = 0.1 + 0.2
    assert float(P.to_csv(("v",), [(v,)]).splitlines()[1]) == v


def test_dumps_rejects_nan_and_handles_numpy():
    assert P.dumps({"x": np.float64(0.5), "n": np.int64(3)}) == '{\n  "x": 0.5,\n  "n": 3\n}\n'
    with pytest.raises(ValueError):
        P.dumps({"x": math.nan})
    with pytest.raises(TypeError):
        P.dumps({"x": object()})


def test_witness_plot_data(tmp_path):
    rep = R.witness(K.IDENTITY, 2.0, [1, 2, 4])
    paths = P.emit_plot_data(rep, tmp_path / "w")
    assert {p.stem for p in paths} == {"witness_mho_l1", "witness_bound_b1", "witness_bound_b2"}
    mho = read(tmp_path / "w" / "witness_mho_l1.csv")
    assert mho[0] == ["x", "y"]
    assert [float(r[0]) for r in mho[1:]] == [math.log(n) for n in (1, 2, 4)]
    assert [float(r[1]) for r in mho[1:]] == [r.mho_l1 for r in rep.rows]


def test_witness_plot_data_without_b2(tmp_path):
    paths = P.emit_plot_data(R.witness(K.LOG1P, 2.0, [1, 2]), tmp_path)
    assert {p.stem for p in paths} == {"witness_mho_l1", "witness_bound_b1"}


def test_walk_plot_data(tmp_path):
    rep = P.walk_report([2, 4, 64])
    assert rep.rows[1][:2] == (4, 1.5)
    (path,) = P.emit_plot_data(rep, tmp_path)
    table = read(path)
    assert [float(r[0]) for r in table[1:]] == [2.0, 4.0, 64.0]
    assert P.walk_csv(rep).splitlines()[0] == "N,mean_abs,ratio"


def test_growth_plot_data(tmp_path):
    rep = B.default_growth_report(K.IDENTITY, trials=10)
    (path,) = P.emit_plot_data(rep, tmp_path)
    table = read(path)
    assert len(table) == 1 + len(rep.feasible)
    lines = P.growth_csv(rep).splitlines()
    assert lines[0] == "k,c_k,n_k,delta_lower_k,q_sampled"
    assert lines[2] == "2,0.25,,,"


def test_witness_csv_timing_switch():
    rep = R.witness(K.IDENTITY, 2.0, [1, 2])
    rows = [line.split(",") for line in P.witness_csv(rep, timing=False).splitlines()[1:]]
    assert all(r[-1] == "0.0" for r in rows)
    assert P.witness_csv(rep).splitlines()[0].split(",") == list(R.WitnessReport.COLUMNS)


def test_empty_and_unknown_reports(tmp_path):
    empty = B.default_growth_report(K.LOG1P, trials=4)
    assert not empty.feasible
    with pytest.raises(ValueError):
        P.emit_plot_data(empty, tmp_path)
    with pytest.raises(ValueError):
        P.emit_plot_data(P.WalkReport([]), tmp_path)
    with pytest.raises(TypeError):
        P.emit_plot_data({"rows": []}, tmp_path)
