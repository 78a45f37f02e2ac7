import json
import subprocess
import sys

import pytest

from cvacomplete.cli import main
from cvacomplete.snapshot import read_table
from cvacomplete.study import FUNDING_CHANGE_COLUMNS, FUNDING_COLUMNS, GOODWILL_COLUMNS


@pytest.fixture
def cds_file(tmp_path):
    path = tmp_path / "cds.csv"
    path.write_text("maturity_years,spread_bps\n1,262\n5,196\n10,196\n")
    return path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_bootstrap_from_snapshot(capsys):
    code, out, err = run(capsys, "bootstrap", "--snapshot", "2008YE")
    assert code == 0
    assert out.splitlines()[0] == "time_years,hazard,survival"
    assert len(out.splitlines()) == 11
    assert "recovery=0.4 (meta.json)" in err


def test_bootstrap_recovery_flag_reported(capsys, cds_file):
    code, _, err = run(capsys, "bootstrap", "--cds", str(cds_file), "--recovery", "0.3")
    assert code == 0
    assert "recovery=0.3 (flag)" in err


def test_goodwill_single_value(capsys, cds_file):
    code, out, _ = run(capsys, "goodwill-cva", "--cds", str(cds_file), "--model", "stock", "--horizon", "1000",
                       "--goodwill", "26e9")
    assert code == 0
    summary = json.loads(out)
    assert summary["cva_fraction"] == pytest.approx(1.0, abs=1e-6)
    assert summary["cva"] == pytest.approx(26e9, rel=1e-6)


def test_goodwill_sweep_csv(tmp_path, capsys):
    code, _, _ = run(capsys, "goodwill-cva", "--snapshot", "2009Q1", "--sweep", "5:10:1", "--out", str(tmp_path))
    assert code == 0
    rows = read_table(tmp_path / "goodwill_cva.csv", ("maturity_years", "cva_fraction"))
    assert [r["maturity_years"] for r in rows] == [5.0, 6.0, 7.0, 8.0, 9.0, 10.0]
    assert json.loads((tmp_path / "goodwill_summary.json").read_text())["amortization"] == 10.0


@pytest.mark.parametrize("command", ["swap-funding", "swap-cva"])
def test_swap_report_round_trip(command, tmp_path, capsys):
    code, _, _ = run(capsys, command, "--snapshot", "2008YE", "--sweep-maturities", "2,10", "--out", str(tmp_path))
    assert code == 0
    name = "swap_funding.csv" if command == "swap-funding" else "swap_cva.csv"
    rows = read_table(tmp_path / name, FUNDING_COLUMNS, text_columns=("side",))
    assert [(r["maturity"], r["side"]) for r in rows] == [(2.0, "payer"), (2.0, "receiver"),
                                                         (10.0, "payer"), (10.0, "receiver")]


def test_swap_change_report(capsys):
    code, out, _ = run(capsys, "swap-funding", "--snapshot-old", "2008YE", "--snapshot-new", "2009Q1",
                       "--maturity", "10", "--side", "payer", "--funding", "constant:100,370")
    assert code == 0
    header, row = out.splitlines()
    assert tuple(header.split(",")) == FUNDING_CHANGE_COLUMNS
    assert row.startswith("10.0,payer,")


def test_scarcity_command(capsys):
    code, out, _ = run(capsys, "scarcity", "--deposit", "0.03", "--overnight", "0.005",
                       "--bank-cds", "90,100,110,500")
    assert code == 0
    tenor, funding, credit, scarcity = (float(x) for x in out.splitlines()[1].split(","))
    assert credit == pytest.approx(105.0)
    assert scarcity == pytest.approx(145.0)


def test_validate_json(capsys):
    code, out, _ = run(capsys, "validate", "--paths", "5000", "--maturity", "5")
    assert code == 0
    assert set(json.loads(out)) == {"eq5_value", "eq2_mc", "std_error", "discrepancy_pct"}


@pytest.mark.parametrize("argv", [
    ["bootstrap"],
    ["bootstrap", "--snapshot", "no-such-snapshot"],
    ["goodwill-cva", "--snapshot", "2008YE", "--model", "constant"],
    ["swap-funding", "--snapshot", "2008YE", "--tenor", "0.5", "--roll", "0.25"],
    ["swap-funding", "--snapshot", "2008YE", "--maturity", "0"],
    ["scarcity", "--deposit", "0.03"],
])
def test_input_errors_exit_one(argv, capsys):
    assert main(argv) == 1
    assert capsys.readouterr().err


def test_usage_errors_exit_one():
    for argv in (["frobnicate"], ["swap-funding", "--funding", "euribor"]):
        with pytest.raises(SystemExit) as err:
            main(argv)
        assert err.value.code == 1


def test_numerical_failure_exits_two(tmp_path, capsys):
    # an inverted term structure no non-negative hazard can reproduce
    path = tmp_path / "cds.csv"
    path.write_text("maturity_years,spread_bps\n1,900\n2,50\n")
    code, _, err = run(capsys, "bootstrap", "--cds", str(path))
    assert code == 2
    assert "2.0" in err


def test_deterministic_outputs(tmp_path, capsys):
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["paper-study", "--out", str(out), "--sweep", "5:12:1", "--sweep-maturities", "2,5"]) == 0
        outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    capsys.readouterr()
    assert outputs[0] == outputs[1]
    assert set(outputs[0]) == {"figure1_goodwill.csv", "funding_flat.csv", "funding_constant-average.csv",
                               "funding_decomposed.csv", "summary.json"}


def test_paper_study_outputs_parse(tmp_path, capsys):
    assert main(["paper-study", "--out", str(tmp_path), "--sweep", "5:30:5", "--sweep-maturities", "2,20"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["net_pnl"] == pytest.approx(2.5e9 - summary["goodwill_cva_change"])
    read_table(tmp_path / "figure1_goodwill.csv", GOODWILL_COLUMNS)
    for name in summary["files"]["funding"].values():
        read_table(tmp_path / name, FUNDING_CHANGE_COLUMNS, text_columns=("side",))


def test_paper_study_identical_snapshots(tmp_path, capsys):
    assert main(["paper-study", "--out", str(tmp_path), "--snapshot-old", "2008YE", "--snapshot-new", "2008YE",
                 "--sweep", "5:10:5", "--sweep-maturities", "2"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["goodwill_cva_change"] == 0.0
    assert summary["net_pnl"] == 2.5e9


def test_paper_study_stock_note(tmp_path, capsys):
    assert main(["paper-study", "--out", str(tmp_path), "--model", "stock", "--sweep", "5:10:5",
                 "--sweep-maturities", "2"]) == 0
    captured = capsys.readouterr()
    summary = json.loads(captured.out)
    assert abs(summary["goodwill_cva_change_fraction"]) < 1e-6
    assert summary["net_pnl"] == pytest.approx(2.5e9, rel=1e-5)
    assert "note: STOCK" in captured.err


def test_console_script():
    result = subprocess.run([sys.executable, "-m", "cvacomplete.cli", "--version"], capture_output=True, text=True)
    assert result.returncode == 0
    assert "0.1.0" in result.stdout
