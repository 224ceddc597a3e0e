import csv
import json
import math

import pytest

from ladderqca import cli


def run(tmp_path, *argv):
    return cli.main([*argv, "--out", str(tmp_path)])


def header(path):
    with open(path) as fh:
        return next(csv.reader(fh))


def rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_evolve_writes_series_and_manifest(tmp_path):
    assert run(tmp_path, "evolve", "--cells", "4", "--J", "0.2", "--gbar", "1", "--steps", "6") == 0
    assert header(tmp_path / "series.csv") == ["t", "S_half", "S_B", "logneg", "lambda_min"]
    assert header(tmp_path / "magnetization.csv") == ["t", "site", "exp_x"]
    first = rows(tmp_path / "series.csv")[0]
    assert float(first["S_half"]) == pytest.approx(2.0, abs=1e-10)
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["config"]["cells"] == [4] and man["seed"] == 0
    assert {"version", "wall_time_s", "result"} <= set(man)


def test_rerun_is_byte_identical(tmp_path):
    args = ["spectra", "--cells", "4", "--J", "0.3", "--g", "0.5", "--steps", "8"]
    assert run(tmp_path / "a", *args) == 0
    assert run(tmp_path / "b", *args) == 0
    for name in ("series.csv", "magnetization.csv", "spectra.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert header(tmp_path / "a" / "spectra.csv") == ["t", "tag", "partition", "eigenvalue"]
    assert {r["tag"] for r in rows(tmp_path / "a" / "spectra.csv")} == {"ent", "neg"}


def test_numbers_use_seventeen_digits():
    assert cli.fmt(0.1) == "0.10000000000000001"
    assert float(cli.fmt(math.pi)) == math.pi


def test_meanfield_and_critical(tmp_path, capsys):
    assert run(tmp_path, "meanfield", "--points", "40", "--k-points", "16", "--critical") == 0
    assert "gbar_c = 0.42" in capsys.readouterr().out
    assert header(tmp_path / "sb.csv") == ["gbar", "branch", "s_B"]
    assert header(tmp_path / "bands.csv") == ["gbar", "branch", "k", "epsilon"]


def test_meanfield_empty_range(tmp_path):
    assert run(tmp_path, "meanfield", "--gbar-min", "1", "--gbar-max", "0") == 2


@pytest.mark.parametrize("mode,extra", [("full", []), ("coherent", []),
                                        ("lindblad", ["--dt", "0.005", "--time", "0.5",
                                                      "--record-every", "20"])])
def test_channel_modes(tmp_path, mode, extra):
    code = run(tmp_path, "channel", "--mode", mode, "--cells", "4", "--J", "0.3", "--g", "0.6",
               "--steps", "5", *extra)
    assert code == 0
    r = rows(tmp_path / "channel.csv")
    assert header(tmp_path / "channel.csv") == ["t", "trace", "purity", "entropy", "logneg",
                                                "lambda_min", "weight"]
    assert all(abs(float(x["trace"]) - 1) < 1e-10 for x in r)


def test_channel_coherent_zero_g_is_config_error(tmp_path):
    assert run(tmp_path, "channel", "--mode", "coherent", "--cells", "4", "--J", "0.3", "--g", "0") == 2


def test_size_guards(tmp_path):
    assert run(tmp_path, "channel", "--cells", "7", "--J", "0.3", "--g", "0.6", "--steps", "1") == 3
    assert run(tmp_path, "evolve", "--cells", "14", "--J", "0.3", "--g", "0.6", "--steps", "1") == 3


@pytest.mark.parametrize("argv", [
    ["evolve", "--cells", "4", "--J", "0.2"],
    ["evolve", "--cells", "4", "--J", "0.2", "--g", "0.1", "--gbar", "1"],
    ["evolve", "--cells", "5", "--J", "0.2", "--g", "0.1"],
    ["evolve", "--cells", "4", "--J", "nan", "--g", "0.1"],
    ["evolve", "--cells", "4", "--J", "0.2", "--g", "0.1", "--cadence", "0"],
    ["sweep", "--cells", "4", "--J", "0.2", "--g", "0.1", "--trials", "2"],
])
def test_config_errors(tmp_path, argv):
    assert run(tmp_path, *argv) == 2


def test_string_order_outputs(tmp_path):
    assert run(tmp_path, "string-order", "--boundary", "open", "--cells", "4", "--J", "0.2",
               "--gbar", "0.25", "2.5", "--steps", "4") == 0
    assert header(tmp_path / "w.csv") == ["gbar", "2L", "t", "W"]
    w_inf = rows(tmp_path / "w_inf.csv")
    assert [float(r["gbar"]) for r in w_inf] == pytest.approx([0.25, 2.5])
    first = [r for r in rows(tmp_path / "w.csv") if r["t"] == "0"]
    assert all(abs(float(r["W"]) - 1) < 1e-10 for r in first)


def test_sweep_and_mstar(tmp_path):
    assert run(tmp_path / "s", "sweep", "--cells", "4", "--J", "0.2", "0.3", "--gbar", "1",
               "--steps", "10") == 0
    assert len(rows(tmp_path / "s" / "sweep.csv")) == 2
    assert run(tmp_path / "m", "mstar", "--cells", "4", "--J", "0.3", "--gbar", "0.5", "5",
               "--steps", "20") == 0
    assert header(tmp_path / "m" / "mstar.csv") == ["gbar", "lambda", "m", "m_low", "m_high"]
    assert (tmp_path / "m" / "lambda_curve.csv").exists()


def test_presets_resolve():
    parser = cli.build_parser()
    for name in cli.PRESETS:
        cfg = cli.resolve(parser.parse_args(["preset", name]))
        assert cfg.preset == name
    cfg = cli.resolve(parser.parse_args(["preset", "fig4-row1"]))
    assert (cfg.cells, cfg.J, cfg.gbar) == ([8], [0.2], [0.5])
    cfg = cli.resolve(parser.parse_args(["preset", "fig6-product"]))
    assert cfg.init == "plus-plus" and cfg.couplings() == [(0.3, 0.1)]
    cfg = cli.resolve(parser.parse_args(["preset", "fig4-row1", "--g", "0.3"]))
    assert cfg.gbar is None and cfg.g == [0.3]


def test_preset_runs_with_override(tmp_path):
    assert run(tmp_path, "preset", "fig4-row2", "--cells", "4", "--steps", "3") == 0
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["config"]["preset"] == "fig4-row2"


def test_worker_env(monkeypatch, tmp_path):
    monkeypatch.setenv(cli.WORKERS_ENV, "2")
    args = ["sweep", "--cells", "4", "--J", "0.2", "0.3", "--gbar", "1", "--steps", "6"]
    assert run(tmp_path / "par", *args) == 0
    monkeypatch.setenv(cli.WORKERS_ENV, "1")
    assert run(tmp_path / "seq", *args) == 0
    assert (tmp_path / "par" / "sweep.csv").read_bytes() == (tmp_path / "seq" / "sweep.csv").read_bytes()
    monkeypatch.setenv(cli.WORKERS_ENV, "many")
    assert run(tmp_path / "bad", *args) == 2
