import csv
import json
import math

import numpy as np
import pytest

import apoint_lab.cli as cli
from apoint_lab import _parallel
from apoint_lab.cli import RunConfig, export_plotdata, main, run
from apoint_lab.errors import ConvergenceError, DomainError
from apoint_lab.special_fn import hardy_z, primes_up_to
from apoint_lab.stats import char_fn_samples, dist_log_zeta, pair_correlation
from apoint_lab.zeros_apoints import find_zeros


def test_expsum_x_one_exit_2(tmp_path, capsys):
    assert main(["expsum", "--x", "1", "--out", str(tmp_path / "e.json")]) == 2
    assert "x != 1" in capsys.readouterr().err
    assert not (tmp_path / "e.json").exists()


@pytest.mark.parametrize("argv", [
    ["zeros", "--T", "5"],
    ["gram", "--T", "-3"],
    ["paircorr", "--T", "100", "--alpha", "1", "--beta", "0.5"],
    ["gram", "--T", "1e4", "--T2", "5e3"],
    ["apoints", "--T", "500", "--a-re", "0"],
    ["gram"],
])
def test_validation_exit_2(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path / "o.json")]) == 2


def test_numerical_failure_exit_3(tmp_path, monkeypatch, capsys):
    def boom(cfg):
        raise ConvergenceError("synthetic")
    monkeypatch.setitem(cli._PIPELINES, "gram", boom)
    assert main(["gram", "--T", "1e4", "--out", str(tmp_path / "g.json")]) == 3
    assert "ConvergenceError" in capsys.readouterr().err


def test_unwritable_output_exit_3(tmp_path):
    assert main(["expsum", "--T", "1e3", "--x", "2", "--out", str(tmp_path / "no" / "x.json")]) == 3


def test_gram_csv_and_manifest(tmp_path):
    out = tmp_path / "g.csv"
    assert main(["gram", "--T", "1e4", "--T2", "1.01e4", "--format", "csv", "--out", str(out)]) == 0
    raw = out.read_bytes()
    assert b"\r\n" not in raw
    rows = list(csv.reader(raw.decode("utf-8").splitlines()))
    assert rows[0] == ["n", "t", "residual", "seed_gap"]
    assert all(1e4 < float(r[1]) <= 1.01e4 for r in rows[1:])
    man = json.loads((tmp_path / "g.csv.manifest.json").read_text())
    assert man["rows"] == len(rows) - 1
    assert man["config"]["command"] == "gram" and man["config"]["seed"] == 0
    assert "wall_time_s" in man and "X" in man["deviations"] and "Y" in man["deviations"]
    assert man["version"]


def test_apoints_json_count(tmp_path):
    out = tmp_path / "a.json"
    assert main(["apoints", "--T", "500", "--a-re", "1", "--a-im", "0", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    s = doc["manifest"]["summary"]
    x = 500 / (2 * math.pi)
    assert s["main_term"] == pytest.approx(x * math.log(x) - x - math.log(2) * x)
    assert abs(s["count"] - s["main_term"]) <= 3 * math.log(500)
    assert len(doc["data"]) == s["located"]
    assert set(doc["data"][0]) == {"beta", "gamma", "residual", "seed_kind"}
    assert "wall_time_s" not in doc["manifest"]


def test_dist_csv_columns(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["dist", "--T", "1e4", "--sample-cap", "1000", "--seed", "1", "--format", "csv",
                 "--out", str(out)]) == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0] == ["index", "g", "log_abs_zeta", "normalized"]
    g, v = float(rows[5][1]), float(rows[5][2])
    assert v == pytest.approx(math.log(abs(hardy_z(g))))
    man = json.loads((tmp_path / "d.csv.manifest.json").read_text())
    assert 0 <= man["summary"]["ks_distance"] <= 1


@pytest.mark.parametrize("argv", [
    ["dist", "--T", "1e4", "--sample-cap", "1500", "--seed", "3"],
    ["moments", "--T", "2e3", "--m", "3"],
    ["hyps", "--T", "2e3"],
])
def test_byte_identical_reruns(argv, tmp_path):
    out = tmp_path / "r.json"
    assert main(argv + ["--out", str(out)]) == 0
    first = out.read_bytes()
    assert main(argv + ["--out", str(out)]) == 0
    assert out.read_bytes() == first


def test_thread_count_does_not_change_output(tmp_path, monkeypatch):
    argv = ["dist", "--T", "1e4", "--sample-cap", "1200", "--seed", "5", "--format", "csv"]
    monkeypatch.setenv("APOINT_LAB_THREADS", "1")
    assert _parallel.worker_count() == 1
    out = tmp_path / "d.csv"
    assert main(argv + ["--out", str(out)]) == 0
    first = out.read_bytes()
    monkeypatch.setenv("APOINT_LAB_THREADS", "4")
    assert main(argv + ["--out", str(out)]) == 0
    assert out.read_bytes() == first


def test_worker_count_parsing(monkeypatch):
    monkeypatch.setenv("APOINT_LAB_THREADS", "junk")
    assert _parallel.worker_count() >= 1
    monkeypatch.setenv("APOINT_LAB_THREADS", "2")
    assert _parallel.worker_count() <= 2


def test_default_output_path(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(RunConfig(command="expsum", T=1e3, x=2.0)) == 0
    assert (tmp_path / "expsum.json").exists()


class TestExport:
    def test_dist(self, tmp_path):
        d = dist_log_zeta(1e4, 0.0, 1000, 0)
        p = export_plotdata(d, tmp_path / "d.txt")
        lines = p.read_text().splitlines()
        assert lines[0] == "# v ecdf normal_cdf" and len(lines) == d.sample_count + 1
        v, e, c = map(float, lines[-1].split())
        assert e == 1.0 and v == pytest.approx(d.values[-1], rel=1e-11)

    def test_charfn(self, tmp_path):
        d = dist_log_zeta(1e4, 0.0, 1000, 0)
        s = char_fn_samples([0.0, 0.5, 1.0], d, 100, primes_up_to(100))
        lines = export_plotdata(s, tmp_path / "c.txt").read_text().splitlines()
        assert lines[0].split()[1:] == ["u", "empirical_re", "empirical_im", "model_j0", "gaussian"]
        assert float(lines[3].split()[4]) == pytest.approx(math.exp(-0.5), rel=1e-11)

    def test_paircorr(self, tmp_path):
        zl = find_zeros(10, 500)
        s = [pair_correlation(zl, 500, 0.5, 1.0), pair_correlation(zl, 500, 1.0, 2.0)]
        lines = export_plotdata(s, tmp_path / "p.txt").read_text().splitlines()
        assert len(lines) == 3

    def test_twelve_digits(self, tmp_path):
        from apoint_lab.stats import CharFnSample
        s = [CharFnSample(1 / 3, complex(2 / 3, 0.0), 0.1, 0.2)]
        row = export_plotdata(s, tmp_path / "x.txt").read_text().splitlines()[1]
        assert row.split()[0] == "0.333333333333"

    def test_empty_rejected(self, tmp_path):
        with pytest.raises(DomainError):
            export_plotdata([], tmp_path / "e.txt")
