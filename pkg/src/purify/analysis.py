"""Fixed points, purification ranges, thresholds, and yields of protocol maps.

Numerical ranges use one-parameter input families whose fidelity grows
with the parameter ``t`` in ``[0, 1]``:

* bipartite protocols: the Werner state with parameter ``x = t``;
* graph states: every qubit of the pure graph state depolarized with
  reliability ``t``.

A start is *inside* the purification range when its iterated limit keeps
fidelity above 1/2, i.e. it lands on the upper attractor.  Fidelity above
1/2 certifies entanglement of a Bell-diagonal pair and genuine multipartite
entanglement of a graph-diagonal state, so lower attractors (the fully
mixed state, or classically correlated mixtures) fall outside.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from . import bipartite as bp
from . import multipartite as mp
from .errors import InvalidStateError
from .graphs import Graph, NotTwoColorableError, two_color
from .states import BellDiagonal, GateNoiseModel, NoiseKind, PauliChannel, WernerParam

FIXED_POINT_TOL = 1e-12
MAX_ITER = 10_000
F_ONE = 1.0 - 1e-10
RANGE_TOL = 1e-6
ENTANGLED_F = 0.5


class Status(str, Enum):
    CONVERGED = "converged"
    OSCILLATING = "oscillating"
    DIVERGED = "diverged"
    MAX_ITER = "max_iter"


@dataclass
class MapTrajectory:
    iterates: list = field(default_factory=list)
    p_success: list = field(default_factory=list)
    status: Status = Status.MAX_ITER

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    @property
    def fixed_point(self):
        return self.iterates[-1] if self.converged else None

    @property
    def final(self):
        return self.iterates[-1]


def _vec(s) -> np.ndarray:
    if isinstance(s, WernerParam):
        return np.array([s.x])
    if hasattr(s, "lam"):
        return np.asarray(s.lam, dtype=float)
    return np.atleast_1d(np.asarray(s, dtype=float))


def iterate_to_fixed_point(step: Callable, init, tol: float = FIXED_POINT_TOL,
                           max_iter: int = MAX_ITER) -> MapTrajectory:
    """Iterate ``step`` until ``|s_k - s_{k-1}|_inf < tol``.

    ``step`` returns either the next state or an object with ``state`` and
    ``p_success`` attributes, or a ``(state, p)`` tuple.  A period-2 cycle
    (``|s_k - s_{k-2}| < tol`` while consecutive iterates differ) stops with
    ``OSCILLATING``; non-finite values or invalid states stop with
    ``DIVERGED``.
    """
    traj = MapTrajectory([init])
    prev2 = None
    prev = _vec(init)
    for _ in range(max_iter):
        try:
            out = step(traj.iterates[-1])
        except (InvalidStateError, FloatingPointError, ZeroDivisionError):
            traj.status = Status.DIVERGED
            return traj
        if isinstance(out, tuple):
            state, p = out
        elif hasattr(out, "p_success"):
            state, p = out.state, out.p_success
        else:
            state, p = out, None
        v = _vec(state)
        if not np.all(np.isfinite(v)):
            traj.status = Status.DIVERGED
            return traj
        traj.iterates.append(state)
        if p is not None:
            traj.p_success.append(float(p))
        if np.max(np.abs(v - prev)) < tol:
            traj.status = Status.CONVERGED
            return traj
        if prev2 is not None and np.max(np.abs(v - prev2)) < tol:
            traj.status = Status.OSCILLATING
            return traj
        prev2, prev = prev, v
    traj.status = Status.MAX_ITER
    return traj


# -- protocol models ------------------------------------------------------


class Model:
    """A batched protocol round plus its one-parameter input family."""

    name = "model"

    def family(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def fidelity_of(self, t: np.ndarray) -> np.ndarray:
        return self.family(np.asarray(t, dtype=float))[..., 0]

    def pure(self) -> np.ndarray:
        return self.family(np.array([1.0]))

    def round(self, lam: np.ndarray, p: float) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError


class BipartiteModel(Model):
    def __init__(self, protocol: str, noise_kind: NoiseKind = NoiseKind.DEPOLARIZING):
        if protocol not in bp.PROTOCOLS:
            raise ValueError(f"unknown protocol {protocol!r}")
        self.name = protocol
        self.noise_kind = NoiseKind(noise_kind)

    def family(self, t):
        t = np.asarray(t, dtype=float)[..., None]
        return np.concatenate([(1 + 3 * t) / 4, np.repeat((1 - t) / 4, 3, axis=-1)], axis=-1)

    def round(self, lam, p):
        noise = GateNoiseModel(self.noise_kind, p)
        out, ps = bp.recurrence_weights(lam, lam, flip=self.name == "dejmps", noise=noise)
        if self.name == "bbpssw":
            out = bp._werner_weights(out)
        return out, ps


class GraphModel(Model):
    """P1/P2 alternation on two-colourable graphs, the k-colour protocol otherwise."""

    def __init__(self, g: Graph, noise_kind: NoiseKind = NoiseKind.DEPOLARIZING, scheme: str | None = None):
        self.graph = g
        self.noise_kind = NoiseKind(noise_kind)
        if scheme is None:
            try:
                two_color(g)
                scheme = "p1p2"
            except NotTwoColorableError:
                scheme = "kcolor"
        if scheme not in ("p1p2", "kcolor"):
            raise ValueError(f"unknown scheme {scheme!r}")
        self.scheme = scheme
        self.name = f"graph[{scheme}, n={g.n}]"

    def family(self, t):
        t = np.asarray(t, dtype=float)
        g = self.graph
        lam = np.zeros(t.shape + (2**g.n,))
        lam[..., 0] = 1.0
        for j in range(g.n):
            lam = _depolarize_batch(g, lam, j, t)
        return lam

    def round(self, lam, p):
        g = self.graph
        noise = GateNoiseModel(self.noise_kind, p)
        if self.scheme == "p1p2":
            lam, p1 = mp.p_step_weights(g, lam, lam, 1, noise)
            lam, p2 = mp.p_step_weights(g, lam, lam, 2, noise)
            return lam, p1 * p2
        ps = np.ones(lam.shape[:-1])
        out = np.empty_like(lam)
        for idx in np.ndindex(lam.shape[:-1]):
            s = mp.GraphDiagonalState(g, lam[idx])
            prob = 1.0
            for _, helper, r in mp.kcolor_round(s, "purifying", noise):
                prob *= helper.p_success * r.p_success
                s = r.state
            out[idx] = s.lam
            ps[idx] = prob
        return out, ps


def _depolarize_batch(g: Graph, lam: np.ndarray, j: int, q: np.ndarray) -> np.ndarray:
    idx = np.arange(2**g.n)
    w = (1.0 - q[..., None]) / 4.0
    out = (1.0 - 3 * w) * lam
    for shift in mp.pauli_shifts(g, j)[1:]:
        out = out + w * lam[..., idx ^ shift]
    return out


def model_for(protocol, graph: Graph | None = None, noise_kind=NoiseKind.DEPOLARIZING) -> Model:
    if isinstance(protocol, Model):
        return protocol
    if protocol in bp.PROTOCOLS:
        return BipartiteModel(protocol, noise_kind)
    if protocol in ("graph", "p1p2", "kcolor"):
        if graph is None:
            raise ValueError("graph protocols need a graph")
        return GraphModel(graph, noise_kind, None if protocol == "graph" else protocol)
    raise ValueError(f"unknown protocol {protocol!r}")


def iterate_batch(model: Model, lam: np.ndarray, p: float, tol: float = FIXED_POINT_TOL,
                  max_iter: int = MAX_ITER) -> tuple[np.ndarray, np.ndarray]:
    """Iterate a batch of starts; returns final weights and a converged mask."""
    lam = np.array(lam, dtype=float)
    done = np.zeros(lam.shape[:-1], dtype=bool)
    for _ in range(max_iter):
        active = ~done
        if not active.any():
            break
        cur = lam[active]
        nxt, _ = model.round(cur, p)
        delta = np.max(np.abs(nxt - cur), axis=-1)
        lam[active] = nxt
        sub = done[active]
        sub |= delta < tol
        done[active] = sub
    return lam, done


def upper_attractor(model: Model, p: float, tol: float = FIXED_POINT_TOL, max_iter: int = MAX_ITER) -> np.ndarray:
    """Limit of the protocol iterated from the pure target state."""
    lam, _ = iterate_batch(model, model.pure(), p, tol, max_iter)
    return lam[0]


def range_exists(model: Model, p: float) -> bool:
    if isinstance(model, BipartiteModel) and model.name == "bbpssw" and model.noise_kind is NoiseKind.DEPOLARIZING:
        return p == 1.0 or bp.bbpssw_discriminant(p) >= 0.0
    return bool(upper_attractor(model, p)[0] > ENTANGLED_F)


# -- purification range ---------------------------------------------------


@dataclass(frozen=True)
class PurificationRange:
    p: float
    F_min: float
    F_max: float

    def __post_init__(self):
        if self.exists and self.F_min > self.F_max + 1e-12:
            raise ValueError("F_min exceeds F_max")

    @property
    def exists(self) -> bool:
        return not (math.isnan(self.F_min) or math.isnan(self.F_max))

    @property
    def width(self) -> float:
        return self.F_max - self.F_min if self.exists else 0.0

    def contains(self, other: "PurificationRange") -> bool:
        """Strict containment of another range."""
        if not other.exists:
            return self.exists
        return self.exists and self.F_min < other.F_min and self.F_max > other.F_max


EMPTY = float("nan")


def purification_range(protocol, p: float, resolution: int = 1000, graph: Graph | None = None,
                       method: str = "auto", noise_kind=NoiseKind.DEPOLARIZING, tol: float = RANGE_TOL) -> PurificationRange:
    """Minimal required and maximal reachable fidelity at gate reliability ``p``.

    BBPSSW under depolarizing noise uses the closed-form fixed points
    (``method="closed"``, the default via ``"auto"``).  Everything else
    scans ``resolution`` points of the input family, takes the first inside
    point, and bisects the basin boundary until the bracketing fidelities
    differ by less than ``tol``.
    """
    if not (0.0 < p <= 1.0):
        raise ValueError(f"p={p} outside (0, 1]")
    model = model_for(protocol, graph, noise_kind)
    closed = (isinstance(model, BipartiteModel) and model.name == "bbpssw"
              and model.noise_kind is NoiseKind.DEPOLARIZING)
    if method == "closed" and not closed:
        raise ValueError("closed-form range exists only for BBPSSW with depolarizing noise")
    if closed and method in ("auto", "closed"):
        try:
            xm, xp = bp.bbpssw_fixed_points(p)
        except bp.BelowThresholdError:
            return PurificationRange(p, EMPTY, EMPTY)
        return PurificationRange(p, (3 * xm + 1) / 4, (3 * xp + 1) / 4)

    top = upper_attractor(model, p)
    if not top[0] > ENTANGLED_F:
        return PurificationRange(p, EMPTY, EMPTY)
    F_max = float(top[0])

    def inside(t):
        lam, _ = iterate_batch(model, model.family(np.atleast_1d(t)), p)
        return lam[..., 0] > ENTANGLED_F

    grid = np.linspace(0.0, 1.0, resolution + 1)
    hits = np.flatnonzero(inside(grid))
    if hits.size == 0:
        return PurificationRange(p, EMPTY, EMPTY)
    k = hits[0]
    if k == 0:
        return PurificationRange(p, float(model.fidelity_of(0.0)), F_max)
    lo, hi = grid[k - 1], grid[k]
    while model.fidelity_of(hi) - model.fidelity_of(lo) > tol:
        mid = 0.5 * (lo + hi)
        if inside(mid)[0]:
            hi = mid
        else:
            lo = mid
    return PurificationRange(p, float(model.fidelity_of(hi)), F_max)


# -- thresholds -----------------------------------------------------------


def _bisect(pred, lo: float, hi: float, tol: float) -> float:
    """Smallest ``p`` in ``[lo, hi]`` with ``pred(p)``, assuming monotonicity."""
    if pred(lo):
        return lo
    if not pred(hi):
        raise ValueError("no threshold in the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def ghz_toy_exists(n: int, p: float, x0: float = 1e-6) -> bool:
    """Does a nontrivial fixed point exist in the restricted bit-flip GHZ model?

    The binary mixture ``lam_0 = (1 + x0)/2`` on the ``n``-vertex star,
    bit-flip noise of reliability ``p`` on the leaves, then P1.  The map is
    concave in ``x``, so a nontrivial fixed point exists iff ``x = 0`` is
    repelling, i.e. a small ``x0`` grows.
    """
    g = Graph.star(n)
    va, vb = two_color(g)
    s = mp.binary_mixture_state(g, [(1 + x0) / 2, (1 - x0) / 2], va)
    s = mp.apply_channel_all(s, PauliChannel.bitflip(p), vb)
    r = mp.p1_step(s)
    w = mp.binary_mixture_weights(r.state, va)
    return bool(w[0] - w[1] > x0)


def threshold_p(protocol, tol: float = 1e-5, graph: Graph | None = None, n: int | None = None,
                lo: float = 0.5, hi: float = 1.0, noise_kind=NoiseKind.DEPOLARIZING) -> float:
    """Gate reliability below which no purification interval remains.

    ``protocol`` is ``"bbpssw"``, ``"dejmps"``, ``"graph"`` (with ``graph``)
    or ``"ghz-toy"`` (with ``n``).  All cases bisect the existence test.
    """
    if protocol == "ghz-toy":
        if n is None:
            raise ValueError("ghz-toy needs n")
        return _bisect(lambda p: ghz_toy_exists(n, p), lo, hi, tol)
    model = model_for(protocol, graph, noise_kind)
    return _bisect(lambda p: range_exists(model, p), lo, hi, tol)


# -- yield ----------------------------------------------------------------


def _symmetric_step(protocol: str, s, noise):
    if protocol == "dejmps":
        return bp.dejmps_step(s, s, noise)
    if protocol == "bbpssw":
        return bp.bbpssw_step(s, None, noise)
    raise ValueError(f"unknown protocol {protocol!r}")


def recurrence_schedule(protocol: str, state, F_target: float, noise: GateNoiseModel | None = None,
                        max_rounds: int = 1000) -> list[float] | None:
    """Success probabilities of the rounds needed to reach ``F_target``; ``None`` if unreachable."""
    target = min(F_target, F_ONE)
    s = BellDiagonal(state.lam) if hasattr(state, "lam") else bp.as_bell(state)
    probs: list[float] = []
    prev = None
    for _ in range(max_rounds + 1):
        if s.fidelity >= target:
            return probs
        if prev is not None and np.max(np.abs(s.lam - prev)) < FIXED_POINT_TOL:
            return None
        prev = s.lam
        r = _symmetric_step(protocol, s, noise)
        probs.append(r.p_success)
        s = r.state
    return None


def yield_at_target(protocol: str, state, F_target: float, noise: GateNoiseModel | None = None,
                    max_rounds: int = 1000) -> float:
    """Expected target-fidelity pairs per input pair of the 2 -> 1 recurrence tree.

    Product over rounds of ``p_success / 2`` until the fidelity reaches
    ``F_target`` (capped at ``1 - 1e-10``); 0 when the target is out of reach.
    """
    probs = recurrence_schedule(protocol, state, F_target, noise, max_rounds)
    if probs is None:
        return 0.0
    return float(np.prod([p / 2.0 for p in probs])) if probs else 1.0


@dataclass(frozen=True)
class YieldEstimate:
    mean: float
    stderr: float
    trials: int
    pairs: int


def yield_monte_carlo(protocol: str, state, F_target: float, noise: GateNoiseModel | None = None,
                      pairs: int = 2**16, trials: int = 50, seed: int = 0) -> YieldEstimate:
    """Sampled pair accounting: each round pairs up survivors and keeps each pair w.p. ``p_success``."""
    probs = recurrence_schedule(protocol, state, F_target, noise)
    if probs is None:
        return YieldEstimate(0.0, 0.0, trials, pairs)
    out = np.empty(trials)
    for t, child in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        rng = np.random.default_rng(child)
        k = pairs
        for p in probs:
            k = int(rng.binomial(k // 2, p))
        out[t] = k / pairs
    err = float(out.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return YieldEstimate(float(out.mean()), err, trials, pairs)


def ordering_claims(p: float = 0.99, resolution: int = 1000) -> dict:
    """Compare DEJMPS and BBPSSW ranges at ``p`` and their thresholds."""
    rb = purification_range("bbpssw", p)
    rd = purification_range("dejmps", p, resolution)
    tb = threshold_p("bbpssw")
    td = threshold_p("dejmps")
    return {
        "bbpssw": rb,
        "dejmps": rd,
        "p_min_bbpssw": tb,
        "p_min_dejmps": td,
        "F_max": rd.F_max > rb.F_max,
        "F_min": rd.F_min < rb.F_min,
        "p_min": td < tb,
    }

