import pytest
from click.testing import CliRunner

from llps.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def test_rates_csv(runner):
    res = runner.invoke(main, ["rates", "--snr", "0:1:2", "--fixed-q", "0.6037"])
    assert res.exit_code == 0, res.output
    lines = res.output.splitlines()
    assert lines[0] == "snr_db,awgn_capacity,r_int_as_noise,r_dpc,q_opt,r_dpc_fixed_q"
    assert len(lines) == 4


def test_rates_to_file(runner, tmp_path):
    out = tmp_path / "r.csv"
    res = runner.invoke(main, ["rates", "--snr", "1", "--out", str(out)])
    assert res.exit_code == 0
    assert out.read_text().startswith("snr_db,")


def test_optimize_default_operating_point(runner):
    res = runner.invoke(main, ["optimize"])
    assert res.exit_code == 0
    kv = dict(line.split("=") for line in res.output.splitlines())
    assert set(kv) >= {"gain_db", "q_opt", "snr_dpc_db", "r_dpc"}
    assert 0.5 <= float(kv["q_opt"]) < 1


def test_fer_repeatable(runner, tmp_path):
    args = ["fer", "--scheme", "reference", "--snr", "40", "--max-frames", "10", "--seed", "5"]
    a = runner.invoke(main, args + ["--out", str(tmp_path / "a.csv")])
    b = runner.invoke(main, args + ["--out", str(tmp_path / "b.csv")])
    assert a.exit_code == b.exit_code == 0
    rows_a = (tmp_path / "a.csv").read_text().splitlines()
    rows_b = (tmp_path / "b.csv").read_text().splitlines()
    strip = lambda row: row.split(",")[:6] + row.split(",")[7:]
    assert [strip(r) for r in rows_a] == [strip(r) for r in rows_b]
    assert rows_a[1].split(",")[:3] == ["40", "10", "0"]


def test_fer_with_config(runner, tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("scheme = llps-dpc\nsnr_grid = 40\nmax_frames = 5\n")
    res = runner.invoke(main, ["fer", "--config", str(cfg)])
    assert res.exit_code == 0, res.output
    assert res.output.splitlines()[1].split(",")[:3] == ["40", "5", "0"]


def test_fer_bad_config(runner, tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("nonsense = 1\n")
    res = runner.invoke(main, ["fer", "--config", str(cfg)])
    assert res.exit_code != 0
    assert "unknown config key" in res.output


@pytest.mark.parametrize("cost", ["hamming", "cross-entropy", "pattern"])
def test_sdm_demo(runner, cost):
    res = runner.invoke(main, ["sdm-demo", "--cost", cost])
    assert res.exit_code == 0
    assert "oracle agreement: 64/64 syndromes" in res.output


def test_code_info(runner):
    res = runner.invoke(main, ["code-info", "--z", "48", "--shorten", "66"])
    assert res.exit_code == 0
    assert "n=1152 k=576" in res.output
    assert "effective_rate=0.469613" in res.output


def test_code_info_rejects_bad_z(runner):
    assert runner.invoke(main, ["code-info", "--z", "5"]).exit_code != 0


def test_unknown_subcommand(runner):
    assert runner.invoke(main, ["frobnicate"]).exit_code != 0
