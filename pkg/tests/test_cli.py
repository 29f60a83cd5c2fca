import csv
import io
import json

import pytest

from congest_mds.cli import BENCH_HEADER, main
from congest_mds.graph_model import read_graph


@pytest.fixture
def gen(tmp_path):
    def _gen(*flags):
        out = tmp_path / ("g%d.txt" % len(list(tmp_path.iterdir())))
        assert main(["generate", *flags, "-o", str(out)]) == 0
        return out

    return _gen


def test_generate_path(gen):
    g = read_graph(gen("--kind", "path", "--n", "4").read_text())
    assert g.edges == ((0, 1), (1, 2), (2, 3))


def test_generate_deterministic(gen):
    a = gen("--kind", "forest-union", "--n", "64", "--alpha", "2", "--seed", "7")
    b = gen("--kind", "forest-union", "--n", "64", "--alpha", "2", "--seed", "7")
    assert a.read_bytes() == b.read_bytes()


def test_generate_subdivided_clique_and_certificate(tmp_path):
    out, cert = tmp_path / "sc.g", tmp_path / "sc.json"
    assert main(["generate", "--kind", "subdivided-clique", "--k", "4", "-o", str(out), "--certificate", str(cert)]) == 0
    g = read_graph(out.read_text())
    assert (g.n, g.m) == (10, 12)
    assert len(json.loads(cert.read_text())["forests"]) == 2


def test_generate_from_config(tmp_path):
    cfg = tmp_path / "spec.json"
    cfg.write_text(json.dumps({"kind": "grid", "rows": 3, "cols": 3}))
    out = tmp_path / "grid.g"
    assert main(["generate", "--config", str(cfg), "-o", str(out)]) == 0
    assert read_graph(out.read_text()).m == 12


def test_generate_bad_params(capsys):
    assert main(["generate", "--kind", "path", "--n", "0"]) == 2
    assert "n" in capsys.readouterr().err


def test_run_star(gen, tmp_path, capsys):
    g = gen("--kind", "star", "--n", "6")
    out = tmp_path / "r.json"
    trace = tmp_path / "t.json"
    rec = tmp_path / "r.csv"
    assert main(["run", str(g), "--alpha", "1", "--oracle", "--json", str(out), "--trace", str(trace),
                 "--csv", str(rec), "--graph-id", "star6"]) == 0
    res = json.loads(out.read_text())
    assert res["size"] == 1 and res["valid"] and res["opt"] == 1
    rows = list(csv.reader(io.StringIO(rec.read_text())))
    assert rows[0] == ["graph", "n", "m", "alpha", "mode", "size", "opt", "ratio", "rounds", "max_bits"]
    assert rows[1][:7] == ["star6", "6", "5", "1", "standard", "1", "1"]
    assert set(json.loads(trace.read_text())) == {"peel_levels", "orient_and_assign", "dist_setcover"}


def test_run_exports(gen, tmp_path):
    g = gen("--kind", "forest-union", "--n", "20", "--alpha", "2", "--seed", "1")
    fd, inst, duals = tmp_path / "fd.json", tmp_path / "inst.json", tmp_path / "duals.json"
    assert main(["run", str(g), "--alpha", "2", "--json", str(tmp_path / "o.json"), "--decomposition", str(fd),
                 "--instance", str(inst), "--duals", str(duals)]) == 0
    assert len(json.loads(fd.read_text())["nodes"]) == 20
    assert main(["oracle", str(inst), "--setcover"]) == 0
    exported = json.loads(duals.read_text())
    assert exported["size"] == json.loads((tmp_path / "o.json").read_text())["size"]
    assert len(exported["snapshots"]) == exported["phases"]
    assert sorted(exported["snapshots"][-1]["covered"], key=int) == [str(v) for v in range(20)]


def test_run_twice_identical(gen, tmp_path):
    g = gen("--kind", "forest-union", "--n", "100", "--alpha", "3", "--seed", "2")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["run", str(g), "--alpha", "3", "--json", str(a)])
    main(["run", str(g), "--alpha", "3", "--json", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_exit_codes(gen, tmp_path):
    k5 = gen("--kind", "complete", "--n", "5")
    assert main(["run", str(k5), "--alpha", "1"]) == 3
    bad = tmp_path / "bad.g"
    bad.write_text("2 1\n1 1\n")
    assert main(["run", str(bad), "--alpha", "1"]) == 2
    assert main(["run", str(tmp_path / "missing.g"), "--alpha", "1"]) == 2
    big = gen("--kind", "forest-union", "--n", "300", "--alpha", "2")
    assert main(["run", str(big), "--alpha", "2", "--round-cap", "1"]) == 4
    assert main(["run", str(big), "--alpha", "2", "--bandwidth", "0"]) == 5


def _bench(tmp_path, *args):
    out = tmp_path / "bench.csv"
    assert main(["bench", *args, "-o", str(out)]) == 0
    return list(csv.reader(io.StringIO(out.read_text())))


def test_bench_empty(tmp_path):
    assert _bench(tmp_path) == [list(BENCH_HEADER)]


def test_bench_rows_and_determinism(tmp_path):
    args = ("--sizes", "16,32,64,128", "--alpha", "2", "--modes", "standard,fast", "--oracle")
    rows = _bench(tmp_path, *args)
    assert len(rows) == 1 + 8
    body = [dict(zip(rows[0], r)) for r in rows[1:]]
    assert [int(r["n"]) for r in body] == sorted(int(r["n"]) for r in body)
    for r in body:
        assert r["error"] == ""
        assert float(r["rounds_per_log2n"]) < 10
        if r["opt"]:
            assert r["mode"] == "fast" or float(r["ratio"]) <= float(r["bound"])
    assert _bench(tmp_path, *args) == rows
    assert _bench(tmp_path, *args, "--jobs", "2") == rows


def test_bench_config_records_errors(tmp_path):
    cfg = tmp_path / "bench.json"
    cfg.write_text(json.dumps({
        "graphs": [{"kind": "complete", "n": 6}, {"kind": "star", "n": 10}],
        "pipeline": {"alpha": 1},
        "modes": ["standard"],
        "oracle": True,
    }))
    rows = _bench(tmp_path, "--config", str(cfg))
    body = {r[0]: dict(zip(rows[0], r)) for r in rows[1:]}
    assert body["complete-n6"]["error"] == "3"
    assert body["star-n10"]["size"] == "1" and body["star-n10"]["ratio"] == "1.0000"


def test_verify_and_oracle(gen, capsys):
    g = gen("--kind", "forest-union", "--n", "18", "--alpha", "2", "--seed", "11")
    assert main(["verify", str(g), "--alpha", "2"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "PASS existence_bound" in out and "INFO ratio" in out
    assert main(["oracle", str(g)]) == 0
    assert json.loads(capsys.readouterr().out)["size"] >= 1
