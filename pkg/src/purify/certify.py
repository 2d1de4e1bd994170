"""Certify closed-form maps against dense density-matrix replays.

Each check draws random inputs, evaluates the closed form and the replay
built from gates, channels and measurements, and reports the largest
absolute deviation over output weights and success probabilities.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bipartite as bp
from . import multipartite as mp
from . import replay
from .graphs import Graph, two_coloring_of
from .repeater import swap
from .states import GateNoiseModel, werner_from_fidelity, werner_twirl

CERT_TOL = 1e-12
NOISY_P = 0.98


@dataclass(frozen=True)
class CertificationRow:
    check: str
    cases: int
    max_deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation <= self.tol)


def _noise(p: float) -> GateNoiseModel | None:
    return None if p == 1.0 else GateNoiseModel("depolarizing", p)


def _simplex(rng, dim: int) -> np.ndarray:
    return rng.dirichlet(np.full(dim, 0.5))


def _dev(w1, p1, w2, p2) -> float:
    return float(max(np.max(np.abs(np.asarray(w1) - np.asarray(w2))), abs(p1 - p2)))


def _bbpssw(rng, p):
    F1, F2 = rng.uniform(0.0, 1.0, 2)
    r = bp.bbpssw_step(F1, F2, _noise(p))
    w, ps = replay.replay_recurrence(werner_from_fidelity(F1).lam, werner_from_fidelity(F2).lam, noise=_noise(p))
    return _dev(r.state.lam, r.p_success, werner_twirl(w).lam, ps)


def _bbpssw_noisy_closed(rng, p):
    x = rng.uniform(-1.0 / 3.0, 1.0)
    r = bp.bbpssw_step_noisy(x, GateNoiseModel("depolarizing", p))
    lam = werner_from_fidelity((3.0 * x + 1.0) / 4.0).lam
    w, ps = replay.replay_recurrence(lam, lam, noise=_noise(p))
    return _dev([r.state.fidelity], r.p_success, [werner_twirl(w).fidelity], ps)


def _dejmps(rng, p):
    a, b = _simplex(rng, 4), _simplex(rng, 4)
    r = bp.dejmps_step(a, b, _noise(p))
    w, ps = replay.replay_recurrence(a, b, basis_change=True, noise=_noise(p))
    return _dev(r.state.lam, r.p_success, w, ps)


def _filter(rng, p):
    F, eps = rng.uniform(1e-3, 1.0, 2)
    r = bp.filter_step(F, eps)
    Fr, pr = replay.replay_filter(F, eps)
    return _dev([r.fidelity], r.p_success, [Fr], pr)


def _psub(g, which):
    va, vb = two_coloring_of(g)
    closed = mp.p1_step if which == 1 else mp.p2_step
    dense = replay.replay_p1 if which == 1 else replay.replay_p2

    def check(rng, p):
        a = mp.GraphDiagonalState(g, _simplex(rng, 2**g.n))
        b = mp.GraphDiagonalState(g, _simplex(rng, 2**g.n))
        r = closed(a, b, _noise(p))
        w, ps = dense(g, va, vb, a.lam, b.lam, _noise(p))
        return _dev(r.state.lam, r.p_success, w, ps)

    return check


def _swap(rng, p):
    a, b = _simplex(rng, 4), _simplex(rng, 4)
    return _dev(swap(a, b, _noise(p)).lam, 0.0, replay.replay_swap(a, b, _noise(p)), 0.0)


def _make_gj(g, variant):
    k = len(mp.coloring_of(g))

    def check(rng, p):
        j = int(rng.integers(k))
        a = mp.GraphDiagonalState(g, _simplex(rng, 2**g.n))
        b = mp.GraphDiagonalState(g, _simplex(rng, 2**g.n))
        r = mp.make_gj_state(a, b, j, variant, _noise(p))
        w, ps, _ = replay.replay_make_gj(g, mp.subgraph_gj(g, j), mp.color_class(g, j), a.lam, b.lam, variant,
                                          _noise(p))
        return _dev(r.state.lam, r.p_success, w, ps)

    return check


def _kcolor_ii(g):
    k = len(mp.coloring_of(g))

    def check(rng, p):
        j = int(rng.integers(k))
        gj = mp.subgraph_gj(g, j)
        t = mp.GraphDiagonalState(g, _simplex(rng, 2**g.n))
        h = mp.GraphDiagonalState(gj, _simplex(rng, 2**g.n))
        r = mp.kcolor_step_ii(t, h, j, _noise(p))
        w, ps = replay.replay_kcolor_step_ii(g, gj, mp.color_class(g, j), t.lam, h.lam, _noise(p))
        return _dev(r.state.lam, r.p_success, w, ps)

    return check


def checks() -> list[tuple[str, object, float]]:
    """``(name, check, p)`` for every certified map; ``check(rng, p)`` returns a deviation."""
    ghz3, line4, tri = Graph.ghz(3), Graph.line(4), Graph.complete(3)
    out = []
    for p in (1.0, NOISY_P):
        out += [(f"bbpssw/p={p:g}", _bbpssw, p), (f"dejmps/p={p:g}", _dejmps, p)]
    out.append((f"bbpssw_noisy_closed_form/p={NOISY_P:g}", _bbpssw_noisy_closed, NOISY_P))
    out.append(("filter", _filter, 1.0))
    for name, g in (("ghz3", ghz3), ("line4", line4)):
        for p in (1.0, NOISY_P):
            out += [(f"p1/{name}/p={p:g}", _psub(g, 1), p), (f"p2/{name}/p={p:g}", _psub(g, 2), p)]
    for p in (1.0, NOISY_P):
        out.append((f"swap/p={p:g}", _swap, p))
    for variant in ("erase", "purifying"):
        for p in (1.0, NOISY_P):
            out.append((f"make_gj/triangle/{variant}/p={p:g}", _make_gj(tri, variant), p))
    out.append((f"kcolor_step_ii/triangle/p={NOISY_P:g}", _kcolor_ii(tri), NOISY_P))
    return out


def run_all(cases: int = 100, seed: int = 0, tol: float = CERT_TOL) -> list[CertificationRow]:
    if cases < 1:
        raise ValueError("cases must be >= 1")
    entries = checks()
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(len(entries))]
    rows = []
    for (name, check, p), rng in zip(entries, rngs):
        dev = max(check(rng, p) for _ in range(cases))
        rows.append(CertificationRow(name, cases, dev, tol))
    return rows
