import io

import numpy as np
import pytest

from purify import bipartite as bp
from purify.cli import EXIT_CONFIG, EXIT_OK, EXIT_THRESHOLD, main


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), stdout=buf)
    return code, buf.getvalue()


def table(text):
    header = [ln for ln in text.splitlines() if ln.startswith("#")]
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    cols = body[0].split(",")
    return header, cols, [dict(zip(cols, ln.split(","))) for ln in body[1:]]


def zero_crossings(rows):
    F = np.array([float(r["F_in"]) for r in rows])
    gain = np.array([float(r["gain"]) for r in rows])
    idx = np.flatnonzero(np.sign(gain[:-1]) != np.sign(gain[1:]))
    return F, gain, idx


def test_curve_default_has_four_curves():
    code, out = run("curve")
    assert code == EXIT_OK
    header, cols, rows = table(out)
    assert cols == ["p", "F_in", "F_out", "gain", "p_success"]
    assert sorted({float(r["p"]) for r in rows}) == [0.97, 0.98, 0.99, 1.0]
    assert len(rows) == 4 * 151
    assert "# command=curve" in header and "# protocol=bbpssw" in header


def test_curve_noiseless_zero_gain_at_fixed_points():
    _, out = run("curve", "--p", "1", "points=101", "f_lo=0")
    _, _, rows = table(out)
    assert len(rows) == 101
    F, gain, _ = zero_crossings(rows)
    assert gain[F == 0.5][0] == pytest.approx(0.0, abs=1e-15)
    assert gain[-1] == 0.0
    inside = (F > 0.5) & (F < 1)
    assert np.all(gain[inside] > 0)


def test_curve_noisy_crossings_match_fixed_points():
    _, out = run("curve", "--p", "0.97", "points=301", "f_lo=0.3")
    _, _, rows = table(out)
    F, gain, idx = zero_crossings(rows)
    step = F[1] - F[0]
    xm, xp = bp.bbpssw_fixed_points(0.97)
    expect = [(3 * xm + 1) / 4, (3 * xp + 1) / 4]
    assert len(idx) == 2
    for i, e in zip(idx, expect):
        assert abs(F[i] - e) <= step


def test_threshold_summary_row():
    code, out = run("threshold", "--protocol", "bbpssw", "--p", "0.97,0.98,0.99")
    assert code == EXIT_OK
    _, cols, rows = table(out)
    assert cols == ["kind", "p", "F_min", "F_max"]
    assert len(rows) == 4
    assert float(rows[1]["F_min"]) == pytest.approx(0.575016, abs=1e-4)
    assert rows[-1]["kind"] == "p_min:bbpssw"
    assert float(rows[-1]["p"]) == pytest.approx(0.9628, abs=5e-4)


def test_threshold_empty_range_is_nan():
    _, out = run("threshold", "--protocol", "bbpssw", "--p", "0.95")
    _, _, rows = table(out)
    assert rows[0]["F_min"] == "nan" and rows[0]["F_max"] == "nan"


def test_repeater_columns_and_below_threshold():
    code, out = run("repeater", "--levels", "2")
    assert code == EXIT_OK
    _, cols, rows = table(out)
    assert cols == ["level", "distance", "fidelity_after_swap", "fidelity_after_purify", "pairs_total",
                    "time_steps"]
    assert [r["distance"] for r in rows] == ["1", "2", "4"]
    code, _ = run("repeater", "--p", "0.9")
    assert code == EXIT_THRESHOLD


def test_multipartite_graph_file(tmp_path):
    f = tmp_path / "tri.txt"
    f.write_text("# triangle\nvertices 3\n0 1\n1 2\n2 0\n")
    code, out = run("multipartite", "--graph", str(f), "rounds=2", "q=0.95")
    assert code == EXIT_OK
    _, cols, rows = table(out)
    assert [r["subprotocol"] for r in rows[1:]] == ["V0", "V1", "V2"] * 2
    assert float(rows[-1]["fidelity"]) > float(rows[0]["fidelity"])
    f.write_text("0 1\n0 0\n")
    assert run("multipartite", "--graph", str(f))[0] == EXIT_CONFIG


def test_hashing_rows():
    _, out = run("hashing", "points=3")
    _, _, rows = table(out)
    root = [r for r in rows if r["kind"] == "breeding_threshold"][0]
    assert 0.805 < float(root["F"]) < 0.815
    assert [r["entropy"] for r in rows if r["kind"] == "werner"][-1] == "0"


def test_oracle_certify_small():
    code, out = run("oracle-certify", "cases=2")
    assert code == EXIT_OK
    _, _, rows = table(out)
    assert all(r["pass"] == "1" for r in rows)


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nprotocol = dejmps\np = 0.98\npoints = 3\n")
    _, out = run("curve", "--config", str(cfg), "p=0.97", "--p", "0.99")
    header, _, rows = table(out)
    assert "# p=0.99" in header and "# protocol=dejmps" in header and len(rows) == 3
    _, out = run("curve", "--config", str(cfg), "p=0.97")
    assert "# p=0.97" in table(out)[0]


@pytest.mark.parametrize("argv", [["curve", "bogus=1"], ["curve", "points=x"], ["curve", "--protocol", "nope"],
                                  ["curve", "notakeyvalue"], ["curve", "--config", "/nonexistent"], [],
                                  ["curve", "--p", "1.5"]])
def test_config_errors(argv):
    assert run(*argv)[0] == EXIT_CONFIG


def test_out_file_and_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("repeater", "--levels", "2", "mode=monte_carlo", "trials=5", "--seed", "3", "--out", str(a))[0] == 0
    run("repeater", "--levels", "2", "mode=monte_carlo", "trials=5", "--seed", "3", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_worker_pool_preserves_order():
    seq = run("curve", "points=5")[1]
    par = run("curve", "points=5", "workers=2")[1]
    assert seq == par
