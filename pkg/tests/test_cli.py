import json

import pytest

from risklattice.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_check_exponential_feasible(capsys):
    code, out, _ = run(capsys, "check", "--loss", "exp:1")
    assert code == 0
    assert "feasible" in out and "lambda interval" in out


def test_check_expectile_infeasible(capsys):
    code, out, _ = run(capsys, "check", "--loss", "expectile:1", "--lo", "-5", "--hi", "5",
                       "--step", "0.01")
    assert code == 0
    assert "infeasible" in out


def test_check_json_format(capsys):
    code, out, _ = run(capsys, "--format", "json", "check", "--loss", "poly2exp")
    payload = json.loads(out)
    assert code == 0
    assert payload["feasible"] and payload["sufficient_condition_holds"]


def test_sweep_es_clean_exit_zero(capsys):
    code, out, _ = run(capsys, "sweep", "--measure", "es:0.95", "--atoms", "20",
                       "--trials", "500", "--seed", "7")
    assert code == 0
    assert "violations: 0 / 500" in out


def test_sweep_deterministic_stdout(capsys):
    argv = ("sweep", "--measure", "var:0.8", "--atoms", "10", "--trials", "300", "--seed", "5")
    _, out_a, _ = run(capsys, *argv)
    _, out_b, _ = run(capsys, *argv)
    assert out_a == out_b


def test_sweep_var_violations_allowed(capsys):
    code, out, _ = run(capsys, "sweep", "--measure", "var:0.5", "--atoms", "6",
                       "--trials", "2000", "--seed", "5")
    assert code == 0  # VaR promises nothing, so violations are findings, not failures


def test_counterexample_shortfall_jump(capsys):
    code, out, _ = run(capsys, "counterexample", "--family", "shortfall-jump",
                       "--sminus", "1", "--splus", "2", "--h", "0.001")
    assert code == 0
    assert "-0.05" in out


def test_counterexample_aes(capsys):
    code, out, _ = run(capsys, "counterexample", "--family", "aes", "--atoms", "2000")
    assert code == 0
    assert "violated" in out


def test_counterexample_mmd(capsys):
    code, out, _ = run(capsys, "counterexample", "--family", "mmd", "--atoms", "10")
    assert code == 0
    assert "violated" in out


def test_usage_error_exit_two(capsys):
    assert main(["sweep", "--measure", "es:0.95"]) == 2  # missing required flags
    assert main(["no-such-command"]) == 2
    assert main(["sweep", "--measure", "banana:1", "--atoms", "5", "--trials", "5",
                 "--seed", "1"]) == 2


def test_unknown_flag_rejected(capsys):
    assert main(["check", "--loss", "exp:1", "--frobnicate"]) == 2


def test_selftest_filtered(capsys):
    code, out, _ = run(capsys, "selftest", "--only", "lattice.identity")
    assert code == 0
    assert "ok" in out and "lattice.identity" in out


def test_pipeline_end_to_end(tmp_path, capsys):
    import risklattice.pipeline as pl

    panel = pl.synth_prices(seed=42, n_days=40, n_assets=3, vol=0.02, jump_prob=0.1)
    prices = tmp_path / "prices.csv"
    lines = ["date,ticker,adj_close"]
    for i, d in enumerate(panel.dates):
        for j, t in enumerate(panel.tickers):
            lines.append(f"{d.isoformat()},{t},{panel.closes[i, j]:.12f}")
    prices.write_text("\n".join(lines) + "\n")
    cfg = tmp_path / "run.cfg"
    cfg.write_text("window = 15\nlevels = 0.9\nepsilon = 1e-8\nseed = 42\n")
    out_dir = tmp_path / "report"

    code, out, _ = run(capsys, "pipeline", "--prices", str(prices), "--config", str(cfg),
                       "--out", str(out_dir))
    assert code == 0
    assert (out_dir / "violations.csv").exists()
    assert (out_dir / "summary.json").exists()
    assert "ES(0.9)/submodularity: mean daily rate 0.0000" in out
