import csv
import subprocess
import sys

from relaysim.cli import main, parse_float_grid, parse_int_range


def test_range_parsers():
    assert parse_int_range("1..4") == [1, 2, 3, 4]
    assert parse_int_range("3,5,10") == [3, 5, 10]
    assert parse_float_grid("0:12:4") == [0.0, 4.0, 8.0, 12.0]
    assert parse_float_grid("1.5,3") == [1.5, 3.0]


def test_complexity_command(tmp_path):
    out = tmp_path / "cx.csv"
    assert main(["complexity", "--m", "1..3", "--n", "3", "--w", "1", "--out", str(out)]) == 0
    rows = list(csv.DictReader(open(out)))
    row = next(r for r in rows if r["m"] == "2")
    assert (row["x"], row["mmd_add"], row["mmd_mul"], row["qn_add"], row["qn_mul"]) == \
        ("4", "36", "48", "18", "24")


def test_complexity_default_w_for_qpsk(capsys):
    main(["complexity", "--m", "2", "--constellation", "qpsk"])
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[1].split(",")[:4] == ["2", "3", "3", "24"]


def test_pep_command(tmp_path):
    out = tmp_path / "pep.csv"
    rc = main(["pep", "--n", "3", "--snr", "0,12", "--slots", "100", "--out", str(out),
               "--plot-data", str(tmp_path / "plots")])
    assert rc == 0
    rows = list(csv.DictReader(open(out)))
    assert [r["criterion"] for r in rows] == ["mmd", "qn", "mmd", "qn"]
    assert (tmp_path / "plots" / "pep_mmd_N3.dat").exists()


def test_run_command(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("N: 2\nM: 2\nJ: 4\nsnr_db: [6]\npackets: 20\nsymbols_per_packet: 10\n"
                   "variants: [mmd-switched, mimo-direct]\nseed: 3\n")
    out = tmp_path / "ber.csv"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--plot-data", str(tmp_path / "p")]) == 0
    rows = list(csv.DictReader(open(out)))
    assert [r["variant"] for r in rows] == ["mmd-switched", "mimo-direct"]
    assert sorted(p.name for p in (tmp_path / "p").iterdir()) == \
        ["ber_mimo-direct.dat", "ber_mmd-switched.dat"]


def test_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("N: 2\nbogus: 1\n")
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 2
    assert "unknown config keys" in capsys.readouterr().err


def test_console_script_module_entry():
    res = subprocess.run([sys.executable, "-m", "relaysim.cli", "complexity", "--m", "1"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.splitlines()[1] == "1,3,1,1,0,6,0,6"
