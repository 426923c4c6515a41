"""Command-line surface: formats, defaults, round trips and exit codes."""

import json

import numpy as np
import pytest

from cellsearch.cli import main
from cellsearch.zc import generate_pss


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_zc_dump(capsys):
    code, out, _ = run_cli(capsys, "zc", "--root", "25")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,re,im"
    assert len(lines) == 64
    seq = generate_pss(25)
    for line in lines[1:]:
        n_s, re_s, im_s = line.split(",")
        expected = seq.at(int(n_s))
        assert float(re_s) + 1j * float(im_s) == expected  # 17 digits round-trip


def test_zc_to_file(tmp_path, capsys):
    path = tmp_path / "seq.csv"
    code, out, _ = run_cli(capsys, "zc", "--root", "34", "--out", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("n,re,im\n34"[:8])


def test_flops_prints_units(capsys):
    code, out, _ = run_cli(capsys, "flops", "--kind", "ammse", "--nnu", "7", "--p", "5")
    assert code == 0 and out.strip() == "60393"


def test_flops_missing_rank_is_domain_error(capsys):
    code, _, err = run_cli(capsys, "flops", "--kind", "ammse", "--nnu", "7")
    assert code == 1
    assert "error" in err


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["zc", "--root", "26"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["zc", "--bogus"])
    assert exc.value.code == 2


def test_simulate_detect_round_trip(tmp_path, capsys):
    win = tmp_path / "win.csv"
    code, _, _ = run_cli(capsys, "simulate", "--snr", "20", "--theta", "12",
                         "--nu", "2", "--root", "29", "--seed", "5",
                         "--out", str(win))
    assert code == 0
    meta = json.loads((tmp_path / "win.csv.meta.json").read_text())
    assert meta["nu"] == 2 and meta["root"] == 29
    truth = meta["truth"]

    code, out, _ = run_cli(capsys, "detect", "--window", str(win),
                           "--kind", "ammse", "--p", "5")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "q,root,nu,metric"
    q, root, nu, metric = row.split(",")
    assert [int(q), int(root), int(nu)] == [truth["q"], truth["root"], truth["nu"]]
    assert 0.0 < float(metric) <= 1.0


def test_detect_table_dump(tmp_path, capsys):
    win = tmp_path / "win.csv"
    run_cli(capsys, "simulate", "--snr", "10", "--seed", "1", "--nq", "8",
            "--out", str(win))
    table = tmp_path / "table.csv"
    code, out, _ = run_cli(capsys, "detect", "--window", str(win),
                           "--kind", "cfdc", "--table", str(table))
    assert code == 0
    lines = table.read_text().strip().splitlines()
    assert lines[0] == "q,u,nu,metric"
    assert len(lines) == 1 + 8 * 3 * 7
    best = max(lines[1:], key=lambda s: float(s.split(",")[3]))
    assert best.split(",")[:3] == out.strip().splitlines()[1].split(",")[:3]


def test_detect_every_kind_runs(tmp_path, capsys):
    win = tmp_path / "win.csv"
    run_cli(capsys, "simulate", "--snr", "30", "--theta", "0", "--seed", "2",
            "--nq", "6", "--out", str(win))
    for kind in ("ammse", "prr", "pcrr", "cfdc", "dd", "mmse"):
        code, out, _ = run_cli(capsys, "detect", "--window", str(win), "--kind", kind)
        assert code == 0
        assert out.startswith("q,root,nu,metric")


def test_basis_mse_monotone(capsys):
    code, out, _ = run_cli(capsys, "basis-mse", "--kind", "ammse", "--p-range", "2..5")
    assert code == 0
    lines = [l for l in out.strip().splitlines() if not l.startswith("#")]
    assert lines[0] == "kind,P,mse"
    values = [float(l.split(",")[2]) for l in lines[1:]]
    assert len(values) == 4
    assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))


def test_sweep_p_smoke(tmp_path, capsys):
    out_path = tmp_path / "sweep.csv"
    args = ("sweep-p", "--snr", "25", "--theta", "5", "--p", "1,5",
            "--trials", "12", "--nq", "8", "--seed", "3", "--jobs", "1",
            "--detectors", "ammse", "--out", str(out_path))
    code, _, _ = run_cli(capsys, *args)
    assert code == 0
    first = out_path.read_text()
    rows = [l for l in first.strip().splitlines() if not l.startswith("#")]
    assert rows[0] == "axis,detector,P,p_q,p_u,p_nu,p_f,ci95,trials,seed"
    assert len(rows) == 3
    code, _, _ = run_cli(capsys, *args)
    assert out_path.read_text() == first  # identical bytes across runs


def test_sweep_snr_stdout(capsys):
    code, out, _ = run_cli(capsys, "sweep-snr", "--snr", "25", "--trials", "6",
                           "--nq", "6", "--detectors", "cfdc,dd", "--jobs", "1")
    assert code == 0
    assert "# axis=snr" in out
    rows = [l for l in out.strip().splitlines() if not l.startswith("#")]
    assert len(rows) == 3


def test_help_lists_defaults(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert "default 40" in out and "default 2048" in out and "etu" in out
