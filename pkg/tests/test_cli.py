import csv
import io
import subprocess
import sys

import pytest

from simulqkd.cli import main
from simulqkd.config import ConfigError, SweepAxis, build_run_config, read_config_file


def parse_csv(text):
    meta = [line for line in text.splitlines() if line.startswith("#")]
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    rows = list(csv.DictReader(io.StringIO(body)))
    return meta, rows


def budget_values(text):
    out = {}
    for line in text.splitlines():
        if line.startswith("#") or line.startswith("quantity"):
            continue
        name, value, _unit = line.split()
        out[name] = float(value)
    return out


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_budget_defaults(capsys):
    code, out, _ = run(["budget"], capsys)
    assert code == 0
    values = budget_values(out)
    assert values["eps_d"] == pytest.approx(3.8147e-4, rel=1e-4)
    assert values["alpha"] == pytest.approx(7.465, abs=1e-3)


def test_budget_at_50_km(capsys):
    code, out, _ = run(["budget", "--L", "50"], capsys)
    assert code == 0
    assert budget_values(out)["alpha"] == pytest.approx(15.29, abs=1e-2)


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# link\nL = 50   # km\nV_A = 4\n", encoding="utf-8")
    _, out, _ = run(["budget", "--config", str(cfg)], capsys)
    assert budget_values(out)["T_ch"] == pytest.approx(0.1)
    _, out, _ = run(["budget", "--config", str(cfg), "--L", "0"], capsys)
    assert budget_values(out)["T_ch"] == 1.0


@pytest.mark.parametrize("content", ["L = \n", "Lenght = 5\n", "just words\n", "L = fifty\n", "eta = 2\n"])
def test_malformed_config_exits_one_without_output(tmp_path, capsys, content):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(content, encoding="utf-8")
    out_path = tmp_path / "out.txt"
    code, out, err = run(["budget", "--config", str(cfg), "--output", str(out_path)], capsys)
    assert code == 1
    assert not out_path.exists()
    assert "error" in err


def test_unknown_flag_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["budget", "--bogus", "1"])
    assert exc.value.code == 1


def test_alpha_sweep_rows(capsys):
    code, out, _ = run(["alpha-sweep", "--sweep", "L:0:50:1"], capsys)
    assert code == 0
    meta, rows = parse_csv(out)
    assert len(rows) == 51
    assert list(rows[0]) == ["L_km", "alpha", "alpha_prime", "eps_c", "eps_d", "eps_p", "ber_check"]
    alphas = [float(r["alpha"]) for r in rows]
    assert all(b > a for a, b in zip(alphas, alphas[1:]))
    assert any(line.startswith("# simulqkd") for line in meta)
    assert "# V_A = 4" in meta


def test_alpha_sweep_single_point(capsys):
    _, out, _ = run(["alpha-sweep", "--sweep", "L:0"], capsys)
    _, rows = parse_csv(out)
    assert len(rows) == 1
    assert float(rows[0]["alpha"]) == pytest.approx(7.465, abs=1e-3)


@pytest.mark.parametrize("sweep", ["L:0:50:0", "L:0:50:-1", "alpha:1:2:0.5", "nope:0:1:1", "L"])
def test_bad_sweep_is_usage_error(capsys, sweep):
    code, _, _ = run(["alpha-sweep", "--sweep", sweep], capsys)
    assert code == 1


def test_sweep_required(capsys):
    assert run(["alpha-sweep"], capsys)[0] == 1


def test_keyrate_sweep_ordering(capsys):
    code, out, _ = run(["keyrate-sweep", "--sweep", "L:0:60:5", "--sigma_phi_list", "1e-3,1e-4,1e-5,1e-6"], capsys)
    assert code == 0
    _, rows = parse_csv(out)
    cols = [c for c in rows[0] if c.startswith("R_")]
    assert len(cols) == 4
    for row in rows:
        rates = [float(row[c]) for c in cols]
        assert rates == sorted(rates)
        for c in cols:
            flag = row["positive_rate_" + c[2:]]
            assert flag == ("true" if float(row[c]) > 0 else "false")
    assert float(rows[1]["R_sigma_phi_1e-06"]) > 0


def test_keyrate_floor_flag(capsys):
    _, out, _ = run(["keyrate-sweep", "--sweep", "L:30", "--sigma_phi_list", "1e-3", "--floor_rate", "true"], capsys)
    _, rows = parse_csv(out)
    assert float(rows[0]["R_sigma_phi_0.001"]) == 0.0
    assert rows[0]["positive_rate_sigma_phi_0.001"] == "false"


def test_empty_sigma_list_is_usage_error(capsys):
    assert run(["keyrate-sweep", "--sweep", "L:0:10:5", "--sigma_phi_list", ","], capsys)[0] == 1


def test_numbers_keep_nine_significant_digits(capsys):
    _, out, _ = run(["alpha-sweep", "--sweep", "L:7"], capsys)
    _, rows = parse_csv(out)
    digits = rows[0]["alpha"].replace(".", "").lstrip("0")
    assert len(digits) >= 9


def test_simulate_output_file_is_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.txt", tmp_path / "b.txt"]
    for p in paths:
        code, _, _ = run(["simulate", "--n_pulses", "50000", "--master_seed", "7", "--workers", "2", "--output", str(p)], capsys)
        assert code == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    text = paths[0].read_text()
    assert "# master_seed = 7" in text and "# workers = 2" in text
    assert "ber_hat = " in text and "eps_hat = " in text


def test_simulate_records(tmp_path, capsys):
    rec = tmp_path / "rec.csv"
    code, _, _ = run(["simulate", "--n_pulses", "20000", "--records", str(rec), "--chunk_size", "7000"], capsys)
    assert code == 0
    _, rows = parse_csv(rec.read_text())
    assert len(rows) == 20000
    assert rows[-1]["index"] == "19999"
    assert set(r["basis"] for r in rows) == {"X", "P"}


def test_simulate_zero_pulses_is_usage_error(capsys):
    assert run(["simulate", "--n_pulses", "0"], capsys)[0] == 1


def test_numerical_domain_error_exit_code(capsys, monkeypatch):
    import simulqkd.security as sec

    monkeypatch.setattr(sec.SecurityInputs, "__post_init__", lambda self: None)
    monkeypatch.setattr(sec, "total_excess_noise", lambda *args, **kw: -3.0)
    assert run(["keyrate-sweep", "--sweep", "L:0"], capsys)[0] == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "simulqkd", "budget", "--M", "zero"], capture_output=True, text=True)
    assert res.returncode == 1
    assert "M" in res.stderr


def test_sweep_axis_parsing():
    assert SweepAxis.parse("L:0:1:0.25").values == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert SweepAxis.parse("eta:0.3,0.6").values == (0.3, 0.6)
    assert SweepAxis.parse("L:0:1:0.1").values[3] == 0.3
    with pytest.raises(ConfigError):
        SweepAxis.parse("L:1:0:1")


def test_read_config_file_rejects_unknown(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("sigma_phy = 1e-4\n")
    with pytest.raises(ConfigError, match="sigma_phy"):
        read_config_file(cfg)


def test_run_config_alpha_auto():
    cfg = build_run_config("budget", {"alpha": "auto", "L": "10"})
    assert cfg.params.alpha is None and cfg.params.L == 10.0
