import json

import pytest

from halfgap import cli
from halfgap.bench import bench_scaling, loglog_slope, svg_chart
from halfgap.ksum import dump_instance, gen_instance
from halfgap.reduction import GapViolation


@pytest.fixture
def instances(tmp_path):
    yes, no = tmp_path / "yes.json", tmp_path / "no.json"
    dump_instance(gen_instance(3, 3, True, 4), yes)
    dump_instance(gen_instance(3, 3, False, 4), no)
    return str(yes), str(no)


def test_decide_yes(instances, capsys):
    assert cli.run(["decide", "--ksum", instances[0], "--solver", "exact"]) == 0
    assert capsys.readouterr().out.strip() == "YES"


def test_decide_no_still_exits_zero(instances, capsys):
    assert cli.run(["decide", "--ksum", instances[1]]) == 0
    assert capsys.readouterr().out.strip() == "NO"


def test_verify_gap_no(instances, capsys):
    assert cli.run(["verify-gap", "--ksum", instances[1]]) == 0
    out = capsys.readouterr().out
    assert "exact distance" in out and "NO side" in out


def test_gap_violation_exit_3(instances, monkeypatch):
    def boom(red):
        raise GapViolation("forced")

    monkeypatch.setattr(cli, "verify_gap", boom)
    assert cli.run(["verify-gap", "--ksum", instances[0]]) == 3


def test_conflicting_dataset_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"d": 1, "points": [["0"], ["0"]], "labels": [0, 1], "weights": [["1", "2"], ["1", "2"]]}))
    assert cli.run(["dist-exact", "--dataset", str(bad)]) == 2


def test_usage_errors_exit_2(tmp_path):
    assert cli.run(["nope"]) == 2
    assert cli.run(["decide"]) == 2
    assert cli.run(["solve-ksum", "--ksum", str(tmp_path / "missing.json")]) == 2


def test_dist_commands(tmp_path, capsys):
    ds = tmp_path / "xor.json"
    ds.write_text(json.dumps({
        "d": 2,
        "points": [["0", "0"], ["1", "1"], ["0", "1"], ["1", "0"]],
        "labels": [1, 1, 0, 0],
        "weights": [["1", "4"]] * 4,
    }))
    assert cli.run(["dist-exact", "--dataset", str(ds), "--method", "sep"]) == 0
    assert capsys.readouterr().out.strip() == "1/4"
    assert cli.run(["dist-est", "--dataset", str(ds), "--eps", "1/2", "--delta", "1/2"]) == 0
    out = capsys.readouterr().out
    assert "samples 1123" in out


def test_seeded_outputs_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert cli.run(["gen-ksum", "--n", "5", "--k", "4", "--seed", "9", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    for p in (a, b):
        assert cli.run(["sq-pack", "--d", "3", "--m", "3", "--threshold", "0.502", "--trials", "5",
                        "--seed", "2", "--format", "csv", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == "trial,value,bound,pass"


def test_sq_commands(tmp_path):
    for argv in (
        ["sq-f0", "--m", "200", "--queries", "3"],
        ["sq-adversary", "--s", "16", "--trials", "2"],
        ["sq-angles", "--n", "20", "--trials", "20"],
    ):
        out = tmp_path / "o.csv"
        assert cli.run(argv + ["--format", "csv", "--out", str(out)]) == 0
        rows = out.read_text().splitlines()
        assert rows[0] == "trial,value,bound,pass" and len(rows) > 1


def test_reduce_and_solve(instances, tmp_path, capsys):
    out = tmp_path / "red.json"
    assert cli.run(["reduce", "--ksum", instances[0], "--out", str(out)]) == 0
    red = json.loads(out.read_text())
    assert red["d"] == 2 and len(red["points"]) == 18 and red["meta"]["eps"] == ["1", "45"]
    assert cli.run(["solve-ksum", "--ksum", instances[0], "--method", "brute"]) == 0
    assert capsys.readouterr().out.strip() == "YES"


def test_bench_single_point_slope_undefined():
    res = bench_scaling("mitm", [8], seed=0)
    assert res.fit("mitm").slope is None
    assert loglog_slope([5], [100]) == (None, None)


def test_bench_tasks_and_outputs(tmp_path):
    res = bench_scaling("exact_cand", [10, 20], seed=1)
    assert {f.series for f in res.fits} == {"exact_sweep", "exact_cand"}
    assert res.to_csv().splitlines()[0].startswith("command,d,n,k,eps,seed,wall_time_ns")
    assert svg_chart(res).startswith("<svg")
    e2e = bench_scaling("reduction_e2e", [1, 2], seed=0)
    assert all(r.result in ("YES", "NO") for r in e2e.records)
    with pytest.raises(ValueError):
        bench_scaling("mitm", [10 ** 6])
    with pytest.raises(ValueError):
        bench_scaling("nope", [4])


def test_bench_cli_svg(tmp_path):
    svg, csv = tmp_path / "b.svg", tmp_path / "b.csv"
    assert cli.run(["bench", "--task", "mitm", "--grid", "16,32", "--out", str(csv), "--svg", str(svg)]) == 0
    assert svg.read_text().startswith("<svg") and csv.read_text().count("\n") == 3
