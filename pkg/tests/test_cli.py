import csv
import io
import math

import pytest

from transnet import cli


def run(argv, capsys=None):
    spec = cli.parse_spec(argv)
    out = io.StringIO()
    assert cli.run(spec, out) == 0
    return out.getvalue()


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_header_constant():
    assert ",".join(cli.CSV_HEADER) == (
        "experiment,scheme,n,m,K,seed,repetition,algorithm,mean_hops,p95_hops,max_hops,"
        "success_rate,mean_distinct_entries,load_metric_A,jump_rate"
    )


def test_lookup_perf_with_chord(tmp_path):
    out = tmp_path / "lp.csv"
    text = run(
        ["lookup-perf", "--n", "7", "--m", "100,200", "--baseline", "chord", "--seed", "42",
         "--repetitions", "2", "--initiators", "5", "--lookups", "5", "--output", str(out)]
    )
    assert "chord m=100" in text and "chord m=200" in text
    header = out.read_text().splitlines()[0]
    assert header == ",".join(cli.CSV_HEADER)
    rs = rows(out)
    assert len(rs) == 8
    assert {(r["m"], r["seed"]) for r in rs} == {("100", "42"), ("200", "43")}
    greedy = [r for r in rs if r["algorithm"] == "greedy"]
    chord = [r for r in rs if r["algorithm"] == "chord"]
    assert len(greedy) == len(chord) == 4
    for r in greedy:
        assert r["scheme"] == "B" and r["K"] == "1"
        assert r["mean_distinct_entries"] == "" and r["load_metric_A"] == ""
        assert float(r["mean_hops"]) > 0 and r["jump_rate"] != ""
        assert "." in r["mean_hops"] and "," not in r["mean_hops"]
    for r in chord:
        assert r["scheme"] == "" and r["jump_rate"] == ""


def test_byte_identical(tmp_path):
    args = ["lookup-perf", "--n", "6", "--m", "50", "--repetitions", "2", "--initiators", "4", "--lookups", "4"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(args + ["--output", str(a)])
    run(args + ["--output", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_table_size_and_env_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path))
    run(["table-size", "--n", "4", "--m", "24", "--repetitions", "1"])
    (r,) = rows(tmp_path / "table-size.csv")
    assert r["mean_distinct_entries"] == "6.000000"
    assert r["algorithm"] == "" and r["mean_hops"] == ""


def test_load_balance(tmp_path):
    out = tmp_path / "lb.csv"
    run(["load-balance", "--n", "5", "--count", "120,10", "--repetitions", "2", "--output", str(out)])
    rs = rows(out)
    assert [r["load_metric_A"] for r in rs[:2]] == ["0.000000", "0.000000"]
    assert all(r["m"] == "10" for r in rs[2:])


def test_graph_props():
    assert run(["graph-props", "--n", "4"]).strip() == (
        "n=4 nodes=24 degree=6 diameter=3 vertex_connectivity=6"
    )


def test_fixture():
    text = run(["fixture", "fig2"])
    assert "365241 -> 365421 -> 413562" in text
    assert "465231" in text


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.conf"
    cfg.write_text("# experiment settings\nscheme = A\nn = 6\nm = 30, 40\nrepetitions = 3\nseed = 7\n")
    spec = cli.parse_spec(["table-size", "--config", str(cfg), "--repetitions", "1"])
    assert (spec.scheme, spec.n, spec.m, spec.repetitions, spec.seed) == ("A", 6, [30, 40], 1, 7)


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.conf"
    bad.write_text("colour = blue\n")
    with pytest.raises(cli.UsageError):
        cli.parse_spec(["table-size", "--config", str(bad)])
    bad.write_text("just words\n")
    with pytest.raises(cli.UsageError):
        cli.parse_spec(["table-size", "--config", str(bad)])


@pytest.mark.parametrize(
    "argv",
    [
        ["lookup-perf", "--n", "5", "--m", str(math.factorial(5) + 1)],
        ["lookup-perf", "--scheme", "A", "--K", "2"],
        ["lookup-perf", "--K", "0"],
        ["lookup-perf", "--m", "10,x"],
        ["lookup-perf", "--repetitions", "0"],
        ["load-balance", "--count", "1"],
        ["fixture", "fig9"],
    ],
)
def test_invalid_specs(argv, capsys):
    assert cli.main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_argparse_rejects_unknown_choice(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["lookup-perf", "--algorithm", "dfs"])
    assert exc.value.code == 2


def test_unwritable_output(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code = cli.main(["table-size", "--n", "4", "--m", "5", "--repetitions", "1", "--output", str(blocker / "x.csv")])
    assert code == 1
    assert "I/O error" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    import subprocess
    import sys

    res = subprocess.run(
        [sys.executable, "-m", "transnet", "graph-props", "--n", "3"],
        capture_output=True, text=True, check=True,
    )
    assert res.stdout.strip() == "n=3 nodes=6 degree=3 diameter=2 vertex_connectivity=3"
