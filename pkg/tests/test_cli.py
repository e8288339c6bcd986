import json
import subprocess
import sys

import pytest

from marketfunc.cli import main

HEADER = "country;period;m0;m1;m2;m3;q_sm;q_tr;gdp;pi;omega_si;omega_l;k_inv"
HEALTHY = "\n".join([
    HEADER,
    "XX;2020;100;200;500;-;50;1000;5000;2;20;10;1",
    "XX;2021;90;300;560;-;80;1200;5800;2;21;11;1,1",
])


def run(argv, capsysbinary):
    code = main([str(a) for a in argv])
    out, err = capsysbinary.readouterr()
    return code, out.decode(), err.decode()


def test_indicators_table(russia_csv, capsysbinary):
    code, out, _ = run(["indicators", "--input", russia_csv, "--country", "RU"], capsysbinary)
    assert code == 0
    rows = [line.split(" | ") for line in out.splitlines()[2:]]
    fe_col = out.splitlines()[0].split(" | ").index("fe_sm")
    assert [r[fe_col] for r in rows] == ["2.3", "2.4"]


def test_indicators_json(russia_csv, capsysbinary):
    code, out, _ = run(["indicators", "--input", russia_csv, "--format", "json"], capsysbinary)
    assert code == 0
    records = json.loads(out)
    assert [r["period"] for r in records] == [2017, 2018]


def test_missing_file_is_usage_error(tmp_path, capsysbinary):
    code, _, err = run(["indicators", "--input", tmp_path / "nope.csv"], capsysbinary)
    assert code == 2 and "not found" in err


def test_non_nested_is_validation_error(tmp_path, capsysbinary):
    path = tmp_path / "bad.csv"
    path.write_text(HEADER + "\nXX;2020;5;3;10;-;1;1;1;1;-;-;-\n")
    code, _, err = run(["indicators", "--input", path], capsysbinary)
    assert code == 1
    assert "NonNestedAggregates" in err and "m0=5 exceeds m1=3" in err


def test_assess_writes_reports(russia_csv, tmp_path, capsysbinary):
    code, _, _ = run(["assess", "--input", russia_csv, "--out", tmp_path,
                      "--format", "json", "--format", "markdown"], capsysbinary)
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["report_RU_2017_2018.json", "report_RU_2017_2018.md"]
    doc = json.loads((tmp_path / "report_RU_2017_2018.json").read_text())
    assert doc["verdicts"]["accumulation"]["performed"] is False
    assert doc["verdicts"]["redistribution"]["performed"] is False


def test_assess_performing_market(tmp_path, capsysbinary):
    path = tmp_path / "healthy.csv"
    path.write_text(HEALTHY)
    code, out, _ = run(["assess", "--input", path], capsysbinary)
    assert code == 0
    assert json.loads(out)["verdicts"]["accumulation"]["performed"] is True


def test_assess_single_period(russia_csv, capsysbinary):
    code, _, err = run(["assess", "--input", russia_csv, "--to", "2017"], capsysbinary)
    assert code == 1 and "InsufficientPeriods" in err


def test_period_range_must_be_ordered(russia_csv, capsysbinary):
    code, _, _ = run(["assess", "--input", russia_csv, "--from", "2018", "--to", "2017"], capsysbinary)
    assert code == 2


def test_plotdata(russia_csv, tmp_path, capsysbinary):
    code, _, _ = run(["plotdata", "--input", russia_csv, "--out", tmp_path], capsysbinary)
    assert code == 0
    assert len(list(tmp_path.iterdir())) == 3


def test_plotdata_one_period(russia_csv, tmp_path, capsysbinary):
    code, _, _ = run(["plotdata", "--input", russia_csv, "--out", tmp_path, "--from", "2018"], capsysbinary)
    assert code == 1


def test_plotdata_rejects_format(russia_csv, capsysbinary):
    with pytest.raises(SystemExit) as exc:
        main(["plotdata", "--input", str(russia_csv), "--format", "json"])
    assert exc.value.code == 2


def test_strict_turns_warnings_into_failure(tmp_path, capsysbinary):
    path = tmp_path / "w.csv"
    path.write_text("\n".join([
        HEADER + ";futures",
        "XX;2020;100;200;500;-;50;1000;5000;2;20;10;1;7",
        "XX;2021;90;300;560;-;80;1200;5800;2;21;11;1,1;8",
    ]))
    assert run(["assess", "--input", path], capsysbinary)[0] == 0
    code, _, err = run(["assess", "--input", path, "--strict"], capsysbinary)
    assert code == 1 and "UnknownColumn" in err


def test_profiles_list(capsysbinary):
    code, out, _ = run(["profiles", "list"], capsysbinary)
    assert code == 0
    assert len(out.splitlines()) == 15
    assert "KZ\tKazakhstan" in out


def test_console_script_deterministic(russia_csv, tmp_path):
    outputs = []
    for i in range(2):
        out = tmp_path / f"run{i}"
        proc = subprocess.run(
            [sys.executable, "-m", "marketfunc.cli", "assess", "--input", str(russia_csv), "--out", str(out),
             "--format", "json", "--format", "markdown"],
            capture_output=True,
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append({p.name: p.read_bytes() for p in out.iterdir()})
    assert outputs[0] == outputs[1]
