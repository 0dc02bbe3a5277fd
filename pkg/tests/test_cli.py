import json
import math
import subprocess
import sys

import numpy as np
import pytest

from phaseamp import __version__
from phaseamp.cli import main, parse_k_expression, parse_size
from phaseamp.schedule import read_trace
from phaseamp.state import read_snapshot


@pytest.fixture
def outdir(tmp_path, monkeypatch):
    monkeypatch.setenv("PHASEAMP_OUTPUT_DIR", str(tmp_path))
    return tmp_path


class TestParsers:
    @pytest.mark.parametrize("text,value", [("pi/225", math.pi / 225), ("0.001", 0.001), ("2*pi/3", 2 * math.pi / 3),
                                            ("pi", math.pi), ("-pi/2", -math.pi / 2), ("1e-3", 1e-3),
                                            (" 0.5 * PI / 4 ", 0.5 * math.pi / 4)])
    def test_k_expression(self, text, value):
        assert parse_k_expression(text) == pytest.approx(value, rel=1e-15)

    @pytest.mark.parametrize("text", ["pi/0", "2pi", "pi/", "sqrt(2)", "", "1/2", "pi*3"])
    def test_malformed(self, text):
        with pytest.raises(ValueError):
            parse_k_expression(text)

    @pytest.mark.parametrize("text,n", [("2^20", 2**20), ("2**4", 16), ("10^3", 1000), ("1000", 1000)])
    def test_size(self, text, n):
        assert parse_size(text) == n

    @pytest.mark.parametrize("text", ["1", "0", "two", "2^"])
    def test_bad_size(self, text):
        with pytest.raises(ValueError):
            parse_size(text)


class TestCommands:
    def test_run_record_count(self, outdir, capsys):
        rc = main(["run", "--objective", "normal", "--sigma", "10", "--n", "2^12", "--k", "0.002",
                   "--iters", "300", "--seed", "7", "--out", "trace.csv"])
        assert rc == 0
        lines = (outdir / "trace.csv").read_text().splitlines()
        data = [ln for ln in lines if not ln.startswith("#")]
        assert data[0] == "iter,k,p_solution,p_worst,mean_re,mean_im,norm_err,amplifying"
        assert len(data) - 1 == 301
        assert lines[0] == f"# phaseamp {__version__}"
        assert lines[1].startswith("# config: ")
        cfg = json.loads(lines[1][len("# config: "):])
        assert cfg["seed"] == 7 and cfg["n"] == 4096 and "threads" not in cfg
        desc = json.loads((outdir / "trace.json").read_text())
        assert desc["iterations"] == 300 and desc["header"].startswith("phaseamp")
        out = capsys.readouterr().out
        assert "peak p_solution=" in out and "t_star=" in out and "speedup=" in out

    def test_snapshot_top_state_on_negative_axis(self, outdir):
        assert main(["snapshot", "--objective", "quadratic", "--n", "16", "--k", "pi/225", "--iters", "1",
                     "--out", "snap.csv"]) == 0
        cols = read_snapshot(outdir / "snap.csv")
        assert cols["x"].size == 16
        assert abs(abs(np.angle(cols["amplitude"][15])) - math.pi) < 1e-12
        assert "# mean: " in (outdir / "snap.csv").read_text()

    def test_snapshot_final_stage(self, outdir):
        assert main(["snapshot", "--objective", "quadratic", "--n", "16", "--k", "pi/225", "--iters", "1",
                     "--stage", "final", "--representation", "compressed", "--out", "s.csv"]) == 0
        cols = read_snapshot(outdir / "s.csv")
        assert "multiplicity" in cols
        assert np.sum(cols["multiplicity"] * np.abs(cols["amplitude"]) ** 2) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("argv,flag", [
        (["run", "--objective", "normal", "--sigma", "0", "--n", "64", "--k", "0.1"], "--sigma"),
        (["run", "--objective", "exponential", "--lambda", "-1", "--n", "64", "--k", "0.1"], "--lambda"),
        (["run", "--objective", "normal", "--n", "64", "--k", "pi/"], "--k"),
        (["run", "--objective", "normal", "--n", "1", "--k", "0.1"], "--n"),
        (["run", "--objective", "cubic", "--n", "2^27", "--k", "0.1"], "--n"),
        (["run", "--n", "64", "--k", "0.1"], "--objective"),
        (["run", "--objective", "normal", "--objective-file", "x.txt", "--n", "64", "--k", "0.1"], "--objective"),
        (["run", "--objective", "normal", "--n", "64", "--k", "0.1", "--iters", "0"], "--iters"),
        (["scan-k", "--objective", "normal", "--n", "64", "--k-min", "0.2", "--k-max", "0.1"], "--k-max"),
        (["alternate", "--objective", "linear", "--n", "64", "--k", "0.1", "--iters", "1"], "--iters"),
        (["study-size", "--objective", "normal", "--sizes", "64,128", "--k-scale", "1"], "--objective"),
        (["study-size", "--objective", "linear", "--sizes", "128,64", "--k-scale", "1"], "--sizes"),
        (["run", "--objective", "normal", "--n", "64", "--k", "0.1", "--threads", "0"], "--threads"),
    ])
    def test_config_errors_exit_2(self, outdir, capsys, argv, flag):
        assert main(argv) == 2
        assert flag in capsys.readouterr().err

    def test_runtime_error_exit_1(self, outdir, capsys):
        bad = outdir / "bad.txt"
        bad.write_text("0\nNaN\n")
        assert main(["run", "--objective-file", str(bad), "--k", "0.1"]) == 1
        assert "line 2" in capsys.readouterr().err

    def test_argparse_error_exit_2(self, outdir):
        assert main(["run", "--objective", "normal"]) == 2

    def test_byte_identical_outputs(self, tmp_path, monkeypatch):
        argv = ["scan-k", "--objective", "skew-normal", "--alpha", "5", "--n", "2^10", "--seed", "3",
                "--k-min", "0.05", "--k-max", "0.2", "--grid-points", "5", "--iters", "80", "--out", "scan.csv", "--report", "rep.json"]
        texts = []
        for sub in ("a", "b"):
            d = tmp_path / sub
            d.mkdir()
            monkeypatch.setenv("PHASEAMP_OUTPUT_DIR", str(d))
            assert main(argv) == 0
            texts.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
        assert texts[0] == texts[1]
        assert set(texts[0]) == {"scan.csv", "scan.json", "scan.curve.csv", "rep.json", "rep.csv"}

    def test_threads_do_not_change_results(self, tmp_path, monkeypatch):
        outs = []
        for threads in ("1", "2"):
            monkeypatch.setenv("PHASEAMP_OUTPUT_DIR", str(tmp_path))
            name = f"t{threads}.csv"
            assert main(["run", "--objective", "exponential", "--n", "2^13", "--k", "0.9", "--iters", "50",
                         "--threads", threads, "--out", name]) == 0
            outs.append([ln for ln in (tmp_path / name).read_text().splitlines() if not ln.startswith("#")])
        assert outs[0] == outs[1]

    def test_greedy_and_report(self, outdir):
        assert main(["greedy", "--objective", "quadratic", "--n", "200", "--iters", "50", "--out", "g.csv"]) == 0
        trace = read_trace(outdir / "g.csv")
        assert trace.tuning_queries == 50 * 65
        assert main(["report", "--trace", str(outdir / "g.csv"), "--out", "g.report.json"]) == 0
        rep = json.loads((outdir / "g.report.json").read_text())
        assert rep["tuning_queries"] == 50 * 65 and rep["e_c"] == 200

    def test_greedy_custom_grid(self, outdir):
        assert main(["greedy", "--objective", "linear", "--n", "64", "--iters", "5", "--k-grid", "0,pi/63",
                     "--out", "g.csv"]) == 0
        assert read_trace(outdir / "g.csv").tuning_queries == 10

    def test_alternate(self, outdir):
        assert main(["alternate", "--objective", "exponential", "--n", "256", "--k", "0.4", "--iters", "6",
                     "--out", "alt.csv"]) == 0
        trace = read_trace(outdir / "alt.csv")
        assert trace.schedule.entries == (0.4, -0.4) * 3
        assert trace.imag_mean[2] < 1e-12

    def test_study_size(self, outdir):
        assert main(["study-size", "--objective", "quadratic", "--sizes", "2^8,2^10", "--k-scale", "1.81",
                     "--iters", "40", "--out", "ss.csv"]) == 0
        rows = [ln for ln in (outdir / "ss.csv").read_text().splitlines() if not ln.startswith("#")]
        assert rows[0] == "iter,ratio_256,ratio_1024"
        assert len(rows) == 42
        assert rows[1].split(",")[1:] == ["1", "1"]

    def test_objective_file_and_tune(self, outdir):
        vals = np.random.default_rng(0).exponential(size=2048)
        f = outdir / "vals.txt"
        f.write_text("# sampled\n" + "\n".join(repr(float(v)) for v in vals) + "\n")
        assert main(["scan-k", "--objective-file", str(f), "--tune", "--grid-points", "3", "--out", "tuned.csv"]) == 0
        curve = (outdir / "tuned.curve.csv").read_text().splitlines()
        assert "k,peak_p_solution" in curve

    def test_module_entry_point(self, outdir):
        res = subprocess.run([sys.executable, "-m", "phaseamp.cli", "--version"], capture_output=True, text=True)
        assert res.returncode == 0 and __version__ in res.stdout
