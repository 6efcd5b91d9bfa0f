import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import DATA
from crnext.cli import CONSISTENT_MESSAGE, UsageError, main, parse_rate_flag
from crnext.dynamics import Trajectory
from crnext.model import RateAssignment


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_example(capsys):
    code, out, _ = run(capsys, "analyze", DATA / "funnel.crn", "--json")
    assert code == 0
    rep = json.loads(out)
    assert list(rep) == ["network", "graph", "deficiency", "consistency", "conservative", "lyapunov", "extinction"]
    assert rep["deficiency"]["deficiency"] == 1
    assert rep["graph"]["weakly_reversible"] is False
    assert rep["consistency"] == {"verdict": "Inconsistent", "separator": [-1, 1, 1], "edge_dots": [-2, -2, -2]}
    assert rep["conservative"] == [1, 1, 1]
    assert rep["lyapunov"]["method"] == "separator"
    assert rep["extinction"]["weak_certificate"]["kind"] == "WeakGuaranteed"


def test_analyze_triangle_text(capsys):
    code, out, _ = run(capsys, "analyze", DATA / "triangle.crn")
    assert code == 0
    assert "weakly reversible: yes" in out
    assert "Consistent, lambda = (1, 1, 1)" in out
    assert "weak extinction certificate: None" in out


def test_json_is_byte_identical(capsys):
    first = run(capsys, "analyze", DATA / "ivanova_modified.crn", "--json")[1]
    second = run(capsys, "analyze", DATA / "ivanova_modified.crn", "--json")[1]
    assert first == second


def test_malformed_exit_2(capsys):
    code, _, err = run(capsys, "analyze", DATA / "malformed.crn")
    assert code == 2
    assert "malformed.crn:1:5" in err


def test_missing_file_exit_2(capsys, tmp_path):
    assert run(capsys, "analyze", tmp_path / "nope.crn")[0] == 2


def test_lyapunov_commands(capsys):
    code, out, _ = run(capsys, "lyapunov", DATA / "feeder.crn", "--json")
    sec = json.loads(out)
    assert code == 0 and sec["method"] == "deficiency_zero" and sec["w"] == [2, -1, -1]
    assert sec["trace"]["terminal_scc"] == [1, 2] and sec["trace"]["component"] == [0]
    out = run(capsys, "lyapunov", DATA / "funnel.crn")[1]
    assert "lyapunov (separator)" in out
    out = run(capsys, "lyapunov", DATA / "triangle.crn")[1]
    assert CONSISTENT_MESSAGE in out


def test_simulate_ivanova(capsys, tmp_path):
    csv = tmp_path / "iv.csv"
    code, out, _ = run(capsys, "simulate", DATA / "ivanova_modified.crn", "--x0", "0.4,0.3,0.3", "--t-end", "500", "--out", csv)
    assert code == 0 and "conservation drift" in out
    traj = Trajectory.read_csv(csv)
    totals = traj.states.sum(axis=1)
    assert np.max(np.abs(totals - 1)) <= 1e-6


def test_simulate_example_to_stdout(capsys):
    code, out, err = run(capsys, "simulate", DATA / "funnel.crn", "--x0", "0.4,0.3,0.3", "--t-end", "200")
    assert code == 0 and out.startswith("t,X1,X2,X3\n") and "final state" in err
    last = [float(v) for v in out.strip().splitlines()[-1].split(",")]
    assert np.max(np.abs(np.array(last[1:]) - [1, 0, 0])) < 1e-4


@pytest.mark.parametrize(
    "flags",
    [["--x0", "1,2"], ["--x0", "1,0,1"], ["--x0", "a,b,c"], ["--t-end", "-1"], ["--k", "e9=1"], ["--k", "0"]],
)
def test_simulate_bad_flags(capsys, flags):
    assert run(capsys, "simulate", DATA / "funnel.crn", *flags)[0] == 2


def test_missing_rates_need_k(capsys, tmp_path):
    p = tmp_path / "norates.crn"
    p.write_text("A -> B\n")
    assert run(capsys, "simulate", p, "--t-end", "1")[0] == 2
    assert run(capsys, "simulate", p, "--t-end", "1", "--k", "2")[0] == 0


def test_rate_flag():
    assert parse_rate_flag("2", 3, None).k == (2.0, 2.0, 2.0)
    assert parse_rate_flag("1,e1=1/2", 2, None).k == (1.0, 0.5)
    assert parse_rate_flag("e0=3", 2, RateAssignment((1.0, 1.0))).k == (3.0, 1.0)
    with pytest.raises(UsageError):
        parse_rate_flag("e0=3", 2, None)
    with pytest.raises(UsageError):
        parse_rate_flag("x1=3", 2, None)


def test_extinction_chain(capsys):
    code, out, _ = run(capsys, "extinction", DATA / "chain.crn", "--simulate", "--x0", "1,1,1", "--t-end", "60", "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["strong"]["species"] == ["A", "B"] and rep["strong"]["layers"] == [["B"], ["A"]]
    flags = {f["species"]: f["strong_candidate"] for f in rep["simulation"]["species"]}
    assert flags == {"A": True, "B": True, "C": False}


def test_extinction_ivanova(capsys):
    code, out, _ = run(capsys, "extinction", DATA / "ivanova_modified.crn", "--simulate", "--x0", "0.4,0.3,0.3",
                       "--t-end", "2000", "--rtol", "1e-9", "--atol", "1e-13", "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["weak_certificate"]["kind"] == "None"
    assert rep["weak_certificate"]["hypotheses"]["consistent"] is True
    sp = rep["simulation"]["species"]
    assert all(f["weak_candidate"] and not f["strong_candidate"] for f in sp)


def test_extinction_text_weakly_reversible(capsys):
    code, out, _ = run(capsys, "extinction", DATA / "triangle.crn")
    assert code == 0 and "not applicable (NotApplicable" in out


def test_plot(capsys, tmp_path):
    csv = tmp_path / "iv.csv"
    run(capsys, "simulate", DATA / "ivanova_modified.crn", "--x0", "0.4,0.3,0.3", "--t-end", "50", "--out", csv)
    svg = tmp_path / "iv.svg"
    assert run(capsys, "plot", csv, "--svg", svg, "--projection", "simplex")[0] == 0
    text = svg.read_text()
    assert text.startswith("<svg") and "<polyline" in text and 'width="600"' in text
    assert run(capsys, "plot", csv)[0] == 0
    assert (tmp_path / "iv.svg").exists()


def test_plot_rejections(capsys, tmp_path):
    four = tmp_path / "four.csv"
    four.write_text("t,A,B,C,D\n0,1,1,1,1\n1,1,1,1,1\n")
    assert run(capsys, "plot", four, "--projection", "simplex")[0] == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("time,A\n0,1\n")
    assert run(capsys, "plot", bad)[0] == 2


def test_plot_decimates_long_series(tmp_path):
    from crnext.svg import MAX_POINTS, timeseries_svg

    t = np.linspace(0, 1, 10 * MAX_POINTS)
    svg = timeseries_svg(Trajectory(t, np.c_[t, 1 - t], ("A", "B")))
    pts = svg.split('points="')[1].split('"')[0].split()
    assert len(pts) <= MAX_POINTS


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "crnext", "analyze", str(DATA / "feeder.crn")], capture_output=True, text=True)
    assert proc.returncode == 0 and "deficiency: 0" in proc.stdout
