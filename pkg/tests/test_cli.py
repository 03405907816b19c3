import csv
import json
import math
import subprocess
import sys

import pytest

from ordstat.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_mi(capsys):
    assert run(capsys, "mi", "--n", "2", "--r", "1", "--m", "2")[:2] == (0, "0.306852819440055\n")
    assert run(capsys, "mi", "--n", "5", "--r", "3", "--m", "3")[1] == "inf\n"
    code, out, _ = run(capsys, "mi", "--n", "4", "--subsets", "1,2", "3,4")
    assert code == 0 and float(out) == pytest.approx(0.5415738641052784, rel=1e-14)


def test_mi_domain_error(capsys):
    code, _, err = run(capsys, "mi", "--n", "3", "--r", "4", "--m", "1")
    assert code == 2 and "r must lie in [1, 3]" in err
    code, _, err = run(capsys, "mi", "--n", "3")
    assert code == 2


def test_kl(capsys):
    assert float(run(capsys, "kl", "--n", "10", "--minmax")[1]) == pytest.approx(math.log(0.9) + 1 / 9, rel=1e-13)
    assert float(run(capsys, "kl", "--n", "10", "--subset", "1,10")[1]) == pytest.approx(math.log(0.9) + 1 / 9, rel=1e-10)
    assert float(run(capsys, "kl", "--n", "3", "--whole")[1]) == pytest.approx(3 - 2 * math.log(3), rel=1e-13)
    assert run(capsys, "kl", "--n", "7", "--subset", "4")[1] == "0\n"


def test_limit(capsys):
    assert run(capsys, "limit", "--case", "quantile-vs-max", "--alpha", "0.5")[1] == "0.5\n"
    assert float(run(capsys, "limit", "--case", "k-step", "--k", "1")[1]) == pytest.approx(0.5772156649, abs=1e-10)
    code, _, err = run(capsys, "limit", "--case", "quantile-pair", "--alpha", "0.7", "--beta", "0.2")
    assert code == 2


def test_limit_sweep(capsys, tmp_path):
    out = tmp_path / "sweep.csv"
    assert run(capsys, "limit", "--case", "median-vs-max", "--sweep", "2..100", "--out", str(out))[0] == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["n", "scaled_exact", "limit", "gap"]
    assert rows[1][0] == "2" and float(rows[1][1]) == pytest.approx(0.613705638880109, rel=1e-14)
    assert len(rows) == 100
    assert run(capsys, "verify", "--csv", str(out))[0] == 0


def test_discrete(capsys, tmp_path):
    assert run(capsys, "discrete", "--n", "2", "--r", "1", "--m", "2", "--bernoulli", "0.5")[1] == "0.0849495183976987\n"
    code, out, _ = run(capsys, "--json", "discrete", "--n", "10", "--r", "9", "--m", "10", "--bernoulli", "0.5", "--check-bound")
    rec = json.loads(out)
    assert code == 0 and rec["bound"]["holds"] is True and rec["bound"]["margin"] > 0
    tri = tmp_path / "tri.json"
    tri.write_text(json.dumps({"support": [0, 1, 2], "probs": [0.2, 0.3, 0.5]}))
    code, out, _ = run(capsys, "discrete", "--n", "5", "--r", "2", "--m", "4", "--dist", str(tri))
    from ordstat.oracles import enum_mi_discrete
    from ordstat.discrete import DiscreteDist

    enum = enum_mi_discrete(5, DiscreteDist.from_json(tri), 2, 4).oracle
    assert float(out) == pytest.approx(enum, abs=1e-14)


def test_discrete_bad_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"support": [0, 1], "probs": [0.5 0.5]}')
    code, _, err = run(capsys, "discrete", "--n", "5", "--r", "2", "--m", "4", "--dist", str(bad))
    assert code == 2 and "line 1" in err


def test_log_base(capsys):
    nats = float(run(capsys, "mi", "--n", "7", "--r", "2", "--m", "6")[1])
    bits = float(run(capsys, "--log-base", "2", "mi", "--n", "7", "--r", "2", "--m", "6")[1])
    dits = float(run(capsys, "mi", "--log-base", "10", "--n", "7", "--r", "2", "--m", "6")[1])
    assert bits == pytest.approx(nats / math.log(2), rel=1e-14)
    assert dits == pytest.approx(nats / math.log(10), rel=1e-14)


def test_json_record(capsys):
    rec = json.loads(run(capsys, "mi", "--json", "--n", "5", "--r", "3", "--m", "3")[1])
    assert rec["value"] == "inf" and rec["infinite"] is True and rec["method"] == "closed-form"


def _load(path):
    rows = list(csv.reader(open(path)))
    return rows[0], [[float(x) for x in r] for r in rows[1:]]


def test_figures_match_fixtures(capsys, tmp_path, fig1_table, fig3_table):
    f1, f3 = tmp_path / "fig1.csv", tmp_path / "fig3.csv"
    assert run(capsys, "figure", "fig1", "--out", str(f1))[0] == 0
    assert run(capsys, "figure", "fig3", "--out", str(f3))[0] == 0
    head, rows = _load(f1)
    assert head == fig1_table[0] and len(rows) == len(fig1_table[1])
    for got, want in zip(rows, fig1_table[1]):
        assert got[0] == want[0] and got[1] == pytest.approx(want[1], rel=1e-9) and got[2] == want[2]
    head, rows = _load(f3)
    assert head == fig3_table[0] and len(rows) == len(fig3_table[1])
    for got, want in zip(rows, fig3_table[1]):
        assert got[0] == want[0]
        assert got[1] == pytest.approx(want[1], rel=1e-6, abs=0)
        assert got[2] == pytest.approx(want[2], rel=1e-9, abs=0)
    assert f1.read_bytes().count(b"\r") == 0
    code, out, _ = run(capsys, "verify", "--csv", str(f1), str(f3))
    assert code == 0 and json.loads(out)["pass"] is True


def test_verify_csv_detects_tampering(capsys, tmp_path):
    f1 = tmp_path / "fig1.csv"
    run(capsys, "figure", "fig1", "--out", str(f1))
    lines = f1.read_text().splitlines()
    lines[5] = lines[5].split(",")[0] + ",0.9,0.5"
    f1.write_text("\n".join(lines) + "\n")
    assert run(capsys, "verify", "--csv", str(f1))[0] == 1


def test_figure_unwritable(capsys, tmp_path):
    code, _, err = run(capsys, "figure", "fig1", "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 3


def test_fig2_sweep(capsys):
    code, out, _ = run(capsys, "figure", "fig2", "--n-values", "2,10")
    lines = out.splitlines()
    assert lines[0] == "p,mi_bernoulli_n2_step1,mi_bernoulli_n10_step1"
    assert len(lines) == 100
    p50 = [l for l in lines if l.startswith("0.5,")][0].split(",")
    assert float(p50[1]) == pytest.approx(0.0849495183976987, rel=1e-14)


def test_verify_suites(capsys):
    code, out, err = run(capsys, "verify", "bound", "--seed", "42")
    rep = json.loads(out)
    assert code == 0 and rep["pass"] and rep["suites"][0]["checks"] == 200
    code, out, _ = run(capsys, "verify", "quadrature")
    assert code == 0
    code, out, _ = run(capsys, "verify", "lemma1", "--budget", "2000")
    assert code == 0


def test_verify_needs_something(capsys):
    assert run(capsys, "verify")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ordstat", "mi", "--n", "50", "--r", "49", "--m", "50"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert float(proc.stdout) == pytest.approx(0.567182332901297, rel=1e-12)
