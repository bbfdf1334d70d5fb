import pytest

from primeperiod import cli
from primeperiod.csvio import read_csv


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_primes_count(capsys):
    code, out, _ = run(capsys, "primes", "--count", "6")
    assert code == 0 and out.strip() == "2 3 5 7 11 13"


def test_primes_limit_csv(capsys, tmp_path):
    code, _, _ = run(capsys, "primes", "--limit", "1e1", "--out", str(tmp_path / "p.csv"))
    assert code == 0
    _, header, rows = read_csv(tmp_path / "p.csv")
    assert header == ["value"] and [r[0] for r in rows] == ["2", "3", "5", "7"]


def test_lnseq(capsys):
    code, out, err = run(capsys, "lnseq", "--count", "8")
    assert code == 0 and out.split() == ["7", "14", "28", "35", "49", "55"]
    assert "discarded below 1: 1" in err


def test_unknown_flag_is_usage_error(capsys):
    code, _, err = run(capsys, "primes", "--bogus", "3")
    assert code == 1 and "--count" in err and "--limit" in err


def test_missing_command(capsys):
    assert run(capsys)[0] == 1


def test_computation_error_exit_code(capsys):
    code, _, err = run(capsys, "acf", "--count", "100", "--interval", "9e4:1e5")
    assert code == 2 and "InsufficientPrimesError" in err


def test_acf_headline(capsys, tmp_path):
    code, out, _ = run(capsys, "acf", "--interval", "9e4:1e5", "--out", str(tmp_path / "a.csv"))
    assert code == 0
    t0 = [float(line.rsplit("=", 1)[1]) for line in out.splitlines() if "T0" in line]
    assert any(7 <= v <= 9 for v in t0)
    _, header, rows = read_csv(tmp_path / "a.csv")
    assert header == ["tau", "c"] and len(rows) == 151


def test_reproduce_fig3(capsys, tmp_path):
    out_dir = tmp_path / "d"
    code, out, _ = run(capsys, "reproduce", "--figure", "3", "--seed", "42", "--realizations", "300", "--out", str(out_dir))
    assert code == 0 and (out_dir / "fig3.csv").exists()
    first = (out_dir / "fig3.csv").read_text(encoding="utf-8").splitlines()[0]
    assert first.startswith("# config-hash: ")
    again = tmp_path / "e"
    run(capsys, "reproduce", "--figure", "3", "--seed", "42", "--realizations", "300", "--out", str(again))
    assert (again / "fig3.csv").read_bytes() == (out_dir / "fig3.csv").read_bytes()


def test_reproduce_interval_needs_single_figure(capsys, tmp_path):
    code, _, _ = run(capsys, "reproduce", "--figure", "3", "--interval", "1:100", "--out", str(tmp_path))
    assert code == 1


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# primes\ncount = 8  # eight\n", encoding="utf-8")
    code, out, _ = run(capsys, "primes", "--config", str(cfg))
    assert code == 0 and out.split()[-1] == "19"
    code, out, _ = run(capsys, "primes", "--config", str(cfg), "--count", "3")
    assert out.split() == ["2", "3", "5"]


def test_config_scientific_notation(capsys, tmp_path):
    cfg = tmp_path / "k2.cfg"
    cfg.write_text("interval = 6e3:6.6e3\nmax_lag = 40\n", encoding="utf-8")
    code, out, _ = run(capsys, "k2", "--config", str(cfg))
    assert code == 0 and "linear decay endpoint: 7" in out


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = red\n", encoding="utf-8")
    code, _, err = run(capsys, "primes", "--config", str(cfg))
    assert code == 1 and "colour" in err


def test_model_command(capsys):
    code, out, _ = run(capsys, "model", "--q", "0.25", "--realizations", "500", "--max-lag", "30")
    assert code == 0 and "flip probability = 0.75" in out


def test_telegraph_command(capsys, tmp_path):
    code, out, _ = run(capsys, "telegraph", "--count", "100", "--interval", "10:200", "--out", str(tmp_path / "v.csv"))
    assert code == 0 and "189 points" in out
    _, header, rows = read_csv(tmp_path / "v.csv")
    assert header == ["n", "v"] and rows[0][0] == "11"


def test_rossler_command(capsys, tmp_path):
    code, out, _ = run(capsys, "rossler", "--t-end", "400", "--transient", "50", "--out", str(tmp_path))
    assert code == 0 and "upward crossings" in out
    assert (tmp_path / "trajectory.csv").exists() and (tmp_path / "crossings.csv").exists()


@pytest.mark.parametrize(
    "command, snippets",
    [
        ("acf", ["(default: 10.0)", "(default: 90000:100000)", "(default: 150)"]),
        ("rossler", ["(default: 7.0)", "(default: 0.01)", "(default: 5200.0)", "(default: 200.0)"]),
        ("model", ["(default: 0.25)", "(default: 10000)", "(default: 42)"]),
        ("reproduce", ["(default: all)"]),
    ],
)
def test_help_documents_defaults(capsys, command, snippets):
    code, out, _ = run(capsys, command, "--help")
    assert code == 0
    flat = " ".join(out.split())
    for s in snippets:
        assert s in flat
