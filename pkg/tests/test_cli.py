import csv
import io
import json
import math
import subprocess
import sys

import pytest

from horolab.cli import main, render, resolve_config, run


def run_cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_weyl_row(capsys):
    code, out = run_cli(capsys, "weyl", "--q", "1009", "--b", "505", "--test", "eisenstein")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.out)))
    assert list(rows[0]) == ["q", "b", "s", "value_re", "value_im", "target", "abs_error", "seconds"]
    assert float(rows[0]["s"]) == pytest.approx(math.sqrt(5))
    assert out.out.splitlines()[0] == "q,b,s,value_re,value_im,target,abs_error,seconds"
    assert "\r\n" in out.out


def test_cmaudit_json(capsys):
    code, out = run_cli(capsys, "cmaudit", "--out", "json")
    assert code == 0
    rep = json.loads(out.out)
    assert set(rep) == {"config", "results", "runtime_seconds"}
    assert all(r["result"] for r in rep["results"]) and len(rep["results"]) >= 6


@pytest.mark.parametrize("argv", [["weyl", "--q", "0"], ["nosuch"], ["lattice", "--q", "x"],
                                  ["weyl", "--q", "12", "--b", "4"], ["weyl", "--test", "bogus"]])
def test_usage_errors(capsys, argv):
    assert main(argv) == 2


def test_falsified_claim_exit_code(capsys):
    # an absurd sieve constant makes the bound fail, which the CLI reports as exit 1
    code, out = run_cli(capsys, "sieve", "--C", "1e-9", "--out", "json")
    assert code == 1
    assert json.loads(out.out)["results"][0]["witness"] is not None


def test_config_precedence(tmp_path):
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text("# experiment\nq = 101\nrandom-b = 3\nseed=5\n")
    cfg = resolve_config(["weyl", "--config", str(cfg_file), "--q", "211"])
    assert cfg["q"] == 211 and cfg["random_b"] == 3 and cfg["seed"] == 5
    cfg = resolve_config(["weyl", "--config", str(cfg_file)])
    assert cfg["q"] == 101 and cfg["test"] == "eisenstein"
    cfg_file.write_text("nonsense = 3\n")
    assert main(["weyl", "--config", str(cfg_file)]) == 2


def test_thread_env_fallback(monkeypatch):
    monkeypatch.setenv("HOROLAB_THREADS", "3")
    from horolab.parallel import ParallelMap

    assert ParallelMap().threads == 3


def test_same_seed_same_report():
    a = run(resolve_config(["lattice", "--q", "1009,10007", "--seed", "9"]))[1]
    b = run(resolve_config(["lattice", "--q", "1009,10007", "--seed", "9"]))[1]
    assert a["results"] == b["results"] and a["config"] == b["config"]


def test_output_file(tmp_path):
    path = tmp_path / "k.csv"
    assert main(["kloosterman", "--q", "3", "--output", str(path)]) == 0
    rows = list(csv.DictReader(path.open(newline="")))
    assert float(rows[0]["value"]) == pytest.approx(-1.0, abs=1e-12)


def test_fifteen_digits():
    rep = {"config": {}, "results": [{"x": 1 / 3}], "runtime_seconds": 0.0}
    assert render(rep, "csv").splitlines()[1] == "0.333333333333333"


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "horolab", "quadforms", "--disc=-23,-47"],
                         capture_output=True, text=True, check=True)
    rows = list(csv.DictReader(io.StringIO(out.stdout)))
    assert [int(r["class_number"]) for r in rows] == [3, 5]
