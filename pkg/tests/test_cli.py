import json
import math
import subprocess
import sys

import pytest

from gafault import cli


def run(*argv):
    return cli.main([str(a) for a in argv])


def synth_record(path, fault="none", severity=0.0, **extra):
    args = ["synth", "-o", path, "--fault", fault, "--severity", severity]
    for k, v in extra.items():
        args += [f"--{k.replace('_', '-')}", v]
    assert run(*args) == 0


def test_synth_then_analyze_ag(tmp_path):
    rec = tmp_path / "ag.csv"
    synth_record(rec, "AG", 0.5, fault_time=0.05, duration=0.1)
    assert run("analyze", rec, "-o", tmp_path / "out", "--hop", 5) == 0
    summary = json.loads((tmp_path / "out_summary.json").read_text())
    v = summary["channels"]["voltage"]
    assert summary["schema"] == 1
    assert v["label"] == "AG"
    assert abs(v["onset"] - 0.05) <= 50 / 1e4
    rows = (tmp_path / "out_voltage.csv").read_text().splitlines()
    assert rows[0] == ",".join(cli.WINDOW_COLUMNS)
    assert len(rows) - 1 == v["windows"]


def test_balanced_record_has_no_onset(tmp_path):
    rec = tmp_path / "ok.csv"
    synth_record(rec, duration=0.03)
    assert run("analyze", rec, "-o", tmp_path / "ok") == 0
    v = json.loads((tmp_path / "ok_summary.json").read_text())["channels"]["voltage"]
    assert v["label"] == "None" and v["onset"] is None


def test_ab_with_phase_shift_gives_pi_over_4(tmp_path):
    rec = tmp_path / "ab.csv"
    synth_record(rec, "AB", 0.4, phase_shift=0.2, fault_time=0.0, duration=0.02)
    assert run("analyze", rec, "-o", tmp_path / "ab", "--hop", 10) == 0
    rows = (tmp_path / "ab_voltage.csv").read_text().splitlines()[1:]
    thetas = [float(r.split(",")[7]) for r in rows]
    assert all(abs(t - math.pi / 4) < 1e-9 for t in thetas)


def test_synth_is_byte_identical(tmp_path):
    for name in ("a.csv", "b.csv"):
        synth_record(tmp_path / name, "CA", 0.3, noise=0.01, seed=7, duration=0.02)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    synth_record(tmp_path / "c.csv", "CA", 0.3, noise=0.01, seed=8, duration=0.02)
    assert (tmp_path / "a.csv").read_bytes() != (tmp_path / "c.csv").read_bytes()


def test_current_channels_go_to_parallel_file(tmp_path):
    rec = tmp_path / "vi.csv"
    lines = ["t,va,vb,vc,ia,ib,ic"]
    for k in range(120):
        u = 2 * math.pi * 50 * k / 1e4
        v = [math.cos(u - j * 2 * math.pi / 3) for j in range(3)]
        lines.append(",".join(repr(x) for x in [k / 1e4, *v, *(10 * x for x in v)]))
    rec.write_text("\n".join(lines) + "\n")
    assert run("analyze", rec, "-o", tmp_path / "vi", "--current-amplitude", 10) == 0
    summary = json.loads((tmp_path / "vi_summary.json").read_text())
    assert set(summary["channels"]) == {"voltage", "current"}
    assert (tmp_path / "vi_current.csv").exists()


@pytest.mark.parametrize(
    "body, line",
    [
        ("t,va,vb,vc\n0,1,2,3\n0.0001,nan,2,3\n", 3),
        ("t,va,vb,vc\n0,1,2,3\n0.0001,1,2\n", 3),
        ("t,va,vb,vc\n0,1,2,3\n0.0001,1,x,3\n0.0002,1,2,3\n", 3),
        ("time,a,b,c\n0,1,2,3\n", 1),
        ("t,va,vb,vc\n0,1,2,3\n0.0001,1,2,3\n0.0001,1,2,3\n", 4),
    ],
)
def test_malformed_csv_reports_line(tmp_path, capsys, body, line):
    rec = tmp_path / "bad.csv"
    rec.write_text(body)
    assert run("analyze", rec, "-o", tmp_path / "bad") == 2
    assert f"line {line}:" in capsys.readouterr().err
    assert not (tmp_path / "bad_summary.json").exists()


def test_usage_errors_exit_1(tmp_path, capsys):
    assert run("synth", "-o", tmp_path / "x.csv", "--fault", "AG", "--phase-shift", 0.3) == 1
    assert run("synth", "-o", tmp_path / "x.csv", "--fault", "none", "--severity", 0.5) == 1
    assert run("synth", "-o", tmp_path / "x.csv", "--fault", "QQ") == 1
    assert run("synth", "-o", tmp_path / "x.csv", "--fault", "AB", "--severity", 2) == 1
    assert run("frobnicate") == 1
    assert run("study-fit", "-o", tmp_path / "f.csv", "--fractions", "0,0.5") == 1
    assert not (tmp_path / "x.csv").exists()


def test_nonuniform_sampling_is_a_data_error(tmp_path):
    rec = tmp_path / "jit.csv"
    rows = ["t,va,vb,vc"] + [f"{k / 1e4 + (3e-5 if k == 60 else 0)},1,-0.5,-0.5" for k in range(120)]
    rec.write_text("\n".join(rows) + "\n")
    assert run("analyze", rec, "-o", tmp_path / "jit", "--fs", 10000) == 2


def test_studies_write_csv(tmp_path):
    out = tmp_path / "biv.csv"
    assert run("study-bivector", "-o", out, "--trials", 50) == 0
    header = out.read_text().splitlines()[0].split(",")
    assert header[0] == "angle_rad" and len(header) == 6
    out = tmp_path / "fit.csv"
    assert run("study-fit", "-o", out, "--trials", 5, "--fractions", "0.25,1.0", "--noise", "0,0.01") == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "arc_fraction,noise_0%,noise_1%"
    assert len(lines) == 3 and float(lines[2].split(",")[1]) < 1e-9


def test_corpus_command(tmp_path, capsys):
    out = tmp_path / "corpus.csv"
    assert run("corpus", "-o", out) == 0
    text = capsys.readouterr().out
    assert "all" in text and "1.0000" in text
    assert out.read_text().splitlines()[0] == "type,cases,accuracy,severity_mae"


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "gafault.cli", "synth", "-o", str(tmp_path / "s.csv"), "--duration", "0.001"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    proc = subprocess.run([sys.executable, "-m", "gafault.cli"], capture_output=True, text=True)
    assert proc.returncode == 1 and "usage" in proc.stderr
