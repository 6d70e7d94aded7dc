import json
from pathlib import Path

import pytest

from plugkit.cli import main

GOLDEN = Path(__file__).resolve().parent.parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def body(text):
    return [line for line in text.splitlines() if not line.startswith("# ")]


def test_symbolic_counts(capsys):
    code, out, _ = run(capsys, "symbolic", "6")
    assert code == 0 and body(out)[-1] == "(1,4)" and len(body(out)) == 6
    assert body(run(capsys, "symbolic", "1")[1]) == ["(1,2)"]
    assert body(run(capsys, "symbolic", "24")[1]) == (GOLDEN / "symbolic_24.txt").read_text().splitlines()


def test_provenance_header(capsys):
    out = run(capsys, "symbolic", "3", "--seed", "7")[1].splitlines()
    assert out[0].startswith("# plugkit ") and out[1].startswith("# config_hash ") and out[2] == "# seed 7"


def test_asymptotics_matches_golden(capsys):
    code, out, _ = run(capsys, "asymptotics", "100")
    lines = [l for l in out.splitlines() if not l.startswith(("# plugkit", "# config_hash", "# seed"))]
    assert code == 0 and lines == (GOLDEN / "asymptotics_100.csv").read_text().splitlines()
    row0 = lines[1].split(",")
    assert abs(float(row0[1]) + 0.54390) < 1e-4


def test_trace_closed_circle(capsys):
    code, out, _ = run(capsys, "trace", "0,0,-3/2", "--plug", "v9", "--inserted", "false")
    assert code == 0
    assert "t,r,theta,z,half,depth" in out and "# event,closed_up," in out


def test_trace_stopped_point(capsys):
    code, out, _ = run(capsys, "trace", "0,2", "--max_transitions", "40")
    rows = [l.split(",") for l in body(out)[1:]]
    depths = [int(r[5]) for r in rows]
    assert code == 0 and "budget_exhausted" in out
    # the stack falls back between bursts but keeps reaching new heights
    assert min(depths) >= 1 and max(depths) > 2
    peaks = [max(depths[: i + 1]) for i in range(len(depths))]
    assert peaks[-1] > peaks[len(peaks) // 4]


@pytest.mark.parametrize("start", ["x,1", "1", "1,2,3,4", ""])
def test_malformed_start(capsys, start):
    assert run(capsys, "trace", start)[0] == 2


def test_verify_radius_pass(capsys, tmp_path):
    dest = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "--suite", "radius", "--plug", "w3", "--out", str(dest))
    rep = json.loads(dest.read_text())
    assert code == 0 and rep["pass"] and rep["suite"] == "radius" and rep["plug"] == "w3"
    assert {"name", "pass", "detail"} <= set(rep["checks"][0])
    assert rep["provenance"]["seed"] == 0


def test_verify_uninserted_fails_with_circle(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "aperiodic", "--inserted", "false",
                       "--grid_r", "10", "--grid_theta", "4")
    rep = json.loads(out)
    assert code == 1 and not rep["pass"]
    assert rep["data"]["candidates"][0]["start"][0] == 0.0


def test_inapplicable_pair(capsys):
    assert run(capsys, "verify", "--suite", "stackbound", "--plug", "v9")[0] == 2
    assert run(capsys, "verify", "--suite", "bogus")[0] == 2


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# experiment\nplug = v9\nk_max = 2\nn_max = 3\n")
    code, out, _ = run(capsys, "verify", "--suite", "hierarchy", "--config", str(cfg), "--n_max", "4")
    rep = json.loads(out)
    assert code == 0 and rep["parameters"]["n_max"] == 4 and rep["parameters"]["k_max"] == 2
    cfg.write_text("nonsense = 1\n")
    assert run(capsys, "verify", "--suite", "radius", "--config", str(cfg))[0] == 2


def test_reports_are_reproducible(capsys):
    a = run(capsys, "verify", "--suite", "matching", "--histories", "5", "--seed", "11")[1]
    b = run(capsys, "verify", "--suite", "matching", "--histories", "5", "--seed", "11")[1]
    assert a == b


def test_bad_tolerance(capsys):
    assert run(capsys, "verify", "--suite", "radius", "--tol", "0")[0] == 2
