"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""
import io
import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from purify import analysis as an
from purify import bipartite as bp
from purify import certify
from purify import repeater as rp
from purify.cli import main
from purify.graphs import Graph
from purify.multipartite import ghz_toy_threshold
from purify.states import depolarizing, werner_from_fidelity


def report(k, name, ok, detail):
    line = f"#{k} {'PASS' if ok else 'FAIL'} {name}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def timed(fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t


def test_01_bbpssw_threshold():
    p_min, dt = timed(an.threshold_p, "bbpssw")
    report(1, "BBPSSW threshold", abs(p_min - 0.9628) <= 5e-4 and dt < 1.0,
           f"p_min={p_min:.6f} (target 0.9628 +/- 5e-4), {dt:.3f}s (< 1s)")


def test_02_noiseless_fixed_points():
    # F' - F = 0  <=>  F^2 + e^2 - F (F^2 + 2 F e + 5 e^2) = 0 with e = (1 - F)/3
    F = np.polynomial.Polynomial([0, 1])
    e = (1 - F) / 3
    roots = np.sort((F**2 + e**2 - F * (F**2 + 2 * F * e + 5 * e**2)).roots().real)
    in_domain = [r for r in roots if 0.5 - 1e-12 <= r <= 1 + 1e-12]
    exact = all(abs(bp.bbpssw_step(f).fidelity - f) < 1e-15 for f in (0.5, 1.0))
    rng = np.random.default_rng(2024)
    upward = 0
    starts = rng.uniform(0.5, 1.0, 1000)
    starts = starts[(starts > 0.5) & (starts < 1.0)]
    for f0 in starts:
        traj = an.iterate_to_fixed_point(lambda s: bp.bbpssw_step(s), werner_from_fidelity(f0), tol=1e-13)
        fs = [s.fidelity for s in traj.iterates]
        if traj.converged and fs[-1] > 1 - 1e-10 and all(b >= a - 1e-15 for a, b in zip(fs, fs[1:])):
            upward += 1
    ok = np.allclose(in_domain, [0.5, 1.0], atol=1e-12) and exact and upward == len(starts)
    report(2, "noiseless fixed points", ok,
           f"fixed points on [1/2,1] = {np.round(in_domain, 12).tolist()} (cubic roots on [0,1]: "
           f"{np.round(roots, 12).tolist()}, 1/4 is the maximally mixed state); "
           f"{upward}/{len(starts)} starts rise monotonically to 1")


def test_03_dejmps_basin():
    t = time.perf_counter()
    rng = np.random.default_rng(3)
    states = []
    while len(states) < 1000:
        v = rng.dirichlet(np.ones(4))
        if v[0] > 0.5:
            states.append(v)
    lam = np.array(states)
    reached = np.zeros(len(lam), dtype=bool)
    for _ in range(200):
        lam, _ = bp.recurrence_weights(lam, lam, flip=True)
        reached |= lam[:, 0] > 1 - 1e-6
    dt = time.perf_counter() - t
    report(3, "DEJMPS basin", reached.all() and dt < 10,
           f"{reached.sum()}/1000 reach lam00 > 1-1e-6 within 200 rounds, {dt:.2f}s (< 10s)")


def test_04_hashing_breeding():
    root = bp.breeding_threshold_werner()
    pure = bp.hashing_yield([1, 0, 0, 0])
    mixed = bp.hashing_yield([0.25] * 4)
    report(4, "hashing/breeding crossover", 0.805 < root < 0.815 and pure == 1.0 and mixed == 0.0,
           f"root F={root:.6f} in (0.805, 0.815); yield(pure)={pure}, yield(1/4)={mixed}")


def test_05_oracle_certification():
    rows, dt = timed(certify.run_all, 100, 0)
    worst = max(r.max_deviation for r in rows)
    failed = [r.check for r in rows if not r.passed]
    report(5, "oracle certification", not failed and dt < 120,
           f"{len(rows)} checks x 100 inputs, worst deviation {worst:.2e} (tol 1e-12), {dt:.1f}s (< 120s)"
           + (f"; failed: {failed}" if failed else ""))


def test_06_ordering_claims():
    c = an.ordering_claims(0.99)
    rb, rd = c["bbpssw"], c["dejmps"]
    report(6, "DEJMPS vs BBPSSW ordering", c["F_max"] and c["F_min"] and c["p_min"],
           f"F_max {rd.F_max:.6f} > {rb.F_max:.6f}; F_min {rd.F_min:.6f} < {rb.F_min:.6f}; "
           f"p_min {c['p_min_dejmps']:.5f} < {c['p_min_bbpssw']:.5f}")


def test_07_nested_pumping():
    (F0, steps, ladder), dt = timed(bp.search_nested_schedule, 1 - 1e-7, [0.95, 0.9, 0.8, 0.7, 0.6],
                                    max_levels=4, max_steps=6)
    F = ladder.final.fidelity
    ok = F >= 1 - 1e-7 and len(steps) <= 4 and max(steps) <= 6 and dt < 30
    report(7, "nested pumping", ok,
           f"elementary Werner F={F0}, steps per level {steps}, 1-F={1 - F:.2e} (<= 1e-7), {dt:.2f}s (< 30s)")


def test_08_ghz_toy():
    devs = {n: abs(an.threshold_p("ghz-toy", 1e-5, n=n) - ghz_toy_threshold(n)) for n in range(2, 7)}
    report(8, "GHZ toy threshold", max(devs.values()) < 1e-3,
           "max |bisection - (1/2)^(1/(n-1))| over n=2..6 = " + f"{max(devs.values()):.2e} (< 1e-3)")


def test_09_threshold_shapes():
    ns = (4, 6, 8)
    line = [an.threshold_p("graph", 1e-4, graph=Graph.line(n), lo=0.9) for n in ns]
    ghz = [an.threshold_p("graph", 1e-4, graph=Graph.ghz(n), lo=0.9) for n in ns]
    spread = max(line) - min(line)
    increasing = all(a < b for a, b in zip(ghz, ghz[1:]))
    report(9, "threshold scaling shapes", spread < 0.01 and increasing,
           f"line p_min {[round(v, 4) for v in line]} spread {spread:.4f} (< 0.01); "
           f"GHZ p_min {[round(v, 4) for v in ghz]} strictly increasing")


def test_10_repeater_scaling():
    ok, parts = True, []
    for protocol, M in (("dejmps", 2), ("dejmps", 4), ("pumping", 3)):
        cfg = rp.RepeaterConfig(1, werner_from_fidelity(0.96), protocol, M=M, noise=depolarizing(0.995))
        table = rp.resource_scaling(cfg, 6)
        exact = all(p == round(N ** np.log2(2 * M)) for p, N in zip(table.pairs, table.distance))
        ok &= exact and table.r_squared > 0.999 and abs(table.slope - np.log2(2 * M)) < 1e-9
        parts.append(f"{protocol} M={M}: exact={exact} slope={table.slope:.6f} R2={table.r_squared:.6f}")
    rng = np.random.default_rng(10)
    worst = 0.0
    for x1, x2 in rng.uniform(-1 / 3, 1, (100, 2)):
        out = rp.swap(werner_from_fidelity((3 * x1 + 1) / 4), werner_from_fidelity((3 * x2 + 1) / 4))
        worst = max(worst, np.max(np.abs(out.lam - werner_from_fidelity((3 * x1 * x2 + 1) / 4).lam)))
    ok &= worst < 1e-12
    report(10, "repeater scaling", ok, "; ".join(parts) + f"; swap product law dev {worst:.1e}")


CLI_RUNS = [
    ["curve", "--p", "1,0.99,0.98,0.97"],
    ["curve", "--protocol", "dejmps", "--noise-kind", "dephasing", "--eta", "0.99", "--p", "0.99"],
    ["threshold", "--protocol", "dejmps", "points=3", "resolution=200"],
    ["threshold", "--protocol", "ghz-toy", "n=3,4"],
    ["repeater", "--levels", "3", "mode=monte_carlo", "trials=20", "--seed", "11"],
    ["repeater", "--levels", "3", "--protocol", "pumping", "M=2"],
    ["multipartite", "family=ring", "n=5", "rounds=2", "--p", "0.99"],
    ["hashing"],
    ["oracle-certify", "cases=3", "--seed", "5"],
]


def test_11_cli_determinism():
    mismatched = []
    for argv in CLI_RUNS:
        outs = []
        for _ in range(2):
            buf = io.StringIO()
            assert main(list(argv), stdout=buf) == 0
            outs.append(buf.getvalue().encode())
        if outs[0] != outs[1]:
            mismatched.append(" ".join(argv))
    report(11, "CLI determinism", not mismatched,
           f"{len(CLI_RUNS) - len(mismatched)}/{len(CLI_RUNS)} runs byte-identical on repeat")
