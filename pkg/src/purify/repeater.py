"""Entanglement swapping and the nested purify-and-swap repeater.

A chain of ``N = 2**n`` elementary segments is joined level by level: at
each level two adjacent pairs are swapped (doubling the distance) and the
result is purified back to the working fidelity ``F0``.

Accounting
----------
``M`` fixed
    Every purification consumes exactly ``M`` swapped pairs (``log2 M``
    recurrence rounds, or ``M - 1`` pumping rounds) and success
    probabilities are ignored, so ``pairs = (2 M)**n``.
``M`` adaptive (``None``)
    Purify until ``F >= F0``.  In ``expected`` mode each recurrence round
    multiplies the pair cost by ``2 / p_success``; pumping levels use the
    restart-on-failure expectation.

``monte_carlo`` mode samples every purification attempt, with restarts,
for either choice of ``M``.

``time_steps`` counts sequential rounds along the chain: one for each swap
and one per purification round; attempts run in parallel for the
recurrence tree, while pumping rounds are sequential.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import linregress

from . import analysis
from . import bipartite as bp
from .errors import BelowThresholdError, UnreachableTargetError
from .states import BellDiagonal, GateNoiseModel, apply_channel_weights, as_bell

PROTOCOLS = ("dejmps", "bbpssw", "pumping")
F0_CAP = 1.0 - 1e-10


def swap_weights(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """XOR convolution ``out[g] = sum_{i ^ j = g} a[i] b[j]`` over the last axis."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for i in range(4):
        for j in range(4):
            out[..., i ^ j] += a[..., i] * b[..., j]
    return out


def swap(a, b, noise: GateNoiseModel | None = None) -> BellDiagonal:
    """Bell measurement on the inner qubits of A-C1 and C2-B with Pauli correction.

    With ``noise`` the inner qubits each pass the gate-noise channel first.
    """
    la, lb = as_bell(a).lam, as_bell(b).lam
    if noise is not None and noise.p != 1.0:
        la = apply_channel_weights(la, noise.channel, "B")
        lb = apply_channel_weights(lb, noise.channel, "A")
    return BellDiagonal(swap_weights(la, lb))


@dataclass(frozen=True)
class RepeaterConfig:
    levels: int
    elementary: BellDiagonal
    protocol: str = "dejmps"
    F0: float | None = None
    M: int | None = None
    noise: GateNoiseModel | None = None
    mode: str = "expected"
    seed: int = 0
    trials: int = 1

    def __post_init__(self):
        object.__setattr__(self, "elementary", as_bell(self.elementary))
        if self.levels < 0:
            raise ValueError("levels must be >= 0")
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.mode not in ("expected", "monte_carlo"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.M is not None:
            if self.M < 1:
                raise ValueError("M must be >= 1")
            if self.protocol != "pumping" and self.M & (self.M - 1):
                raise ValueError("recurrence protocols need M to be a power of two")
        if self.F0 is not None and not (0.5 < self.F0 <= 1.0):
            raise ValueError(f"F0={self.F0} outside (1/2, 1]")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    @property
    def segments(self) -> int:
        return 2**self.levels

    def with_levels(self, levels: int) -> "RepeaterConfig":
        return RepeaterConfig(levels, self.elementary, self.protocol, self.F0, self.M, self.noise,
                              self.mode, self.seed, self.trials)


@dataclass(frozen=True)
class ResourceCount:
    pairs: float
    time_steps: float
    memory_per_station: int

    def __post_init__(self):
        if min(self.pairs, self.time_steps, self.memory_per_station) < 0:
            raise ValueError("resource counts are nonnegative")


@dataclass(frozen=True)
class LevelRecord:
    level: int
    distance: int
    fidelity_after_swap: float
    fidelity_after_purify: float
    rounds: int
    pairs_total: float
    time_steps: float


@dataclass
class RepeaterResult:
    final: BellDiagonal
    resources: ResourceCount
    levels: list = field(default_factory=list)
    F0: float = 1.0

    @property
    def fidelity(self) -> float:
        return self.final.fidelity


def _recurrence_protocol(cfg: RepeaterConfig) -> str:
    return "dejmps" if cfg.protocol == "pumping" else cfg.protocol


def max_state(cfg: RepeaterConfig) -> BellDiagonal:
    """Upper attractor of the configured recurrence under the gate noise."""
    p = 1.0 if cfg.noise is None else cfg.noise.p
    model = analysis.BipartiteModel(_recurrence_protocol(cfg), cfg.noise.kind if cfg.noise else "depolarizing")
    top = analysis.upper_attractor(model, p)
    if not top[0] > analysis.ENTANGLED_F:
        raise BelowThresholdError(f"p={p}: below the {model.name} threshold, no purification interval")
    return BellDiagonal(top)


def max_fidelity(cfg: RepeaterConfig) -> float:
    return max_state(cfg).fidelity


def pumping_top_state(cfg: RepeaterConfig, max_levels: int = 1000) -> BellDiagonal:
    """Best pair that pumping can hold at every level.

    The stationary point of ``s -> pump_limit(swap(s, s))`` from the pure
    pair, lowered to the pumping limit of the elementary pair when that is
    worse.
    """
    noise = cfg.noise
    s = BellDiagonal(np.array([1.0, 0.0, 0.0, 0.0]))
    for _ in range(max_levels):
        t = bp.pump(swap(s, s, noise), None, noise).final
        done = np.max(np.abs(t.lam - s.lam)) < bp.FIXED_POINT_TOL
        s = t
        if done:
            break
    if not s.fidelity > analysis.ENTANGLED_F:
        raise BelowThresholdError("pumping cannot sustain an entangled pair under this noise")
    elem = bp.pump(cfg.elementary, None, noise).final
    return elem if elem.fidelity < s.fidelity else s


def default_F0(cfg: RepeaterConfig) -> float:
    """Midpoint of ``[F(swap of two F_max pairs), F_max]``, capped below 1.

    ``F_max`` is the recurrence attractor, or for pumping the value from
    :func:`pumping_top_state`.
    """
    top = pumping_top_state(cfg) if cfg.protocol == "pumping" else max_state(cfg)
    return min(0.5 * (swap(top, top, cfg.noise).fidelity + top.fidelity), F0_CAP)


def resolve_F0(cfg: RepeaterConfig) -> float:
    if cfg.F0 is None:
        return default_F0(cfg)
    if cfg.M is None:
        F_max = max_fidelity(cfg)
        if cfg.F0 > F_max + 1e-12 and cfg.F0 > cfg.elementary.fidelity:
            raise UnreachableTargetError(f"F0={cfg.F0} exceeds the reachable F_max={F_max:.6g}")
    return min(cfg.F0, F0_CAP)


# -- one level of purification ---------------------------------------------


def _symmetric_rounds(protocol, s, F0, noise, max_rounds=1000):
    """Rounds of 2 -> 1 recurrence until ``F >= F0``; returns states and success probabilities."""
    states, probs = [s], []
    while states[-1].fidelity < F0:
        if len(probs) >= max_rounds:
            raise UnreachableTargetError(f"F0={F0} not reached in {max_rounds} rounds")
        r = analysis._symmetric_step(protocol, states[-1], noise)
        if np.max(np.abs(r.state.lam - states[-1].lam)) < bp.FIXED_POINT_TOL:
            raise UnreachableTargetError(
                f"purification saturates at F={r.state.fidelity:.6g} below F0={F0:.6g}")
        states.append(r.state)
        probs.append(r.p_success)
    return states, probs


def _fixed_rounds_recurrence(protocol, s, rounds, noise):
    states, probs = [s], []
    for _ in range(rounds):
        r = analysis._symmetric_step(protocol, states[-1], noise)
        states.append(r.state)
        probs.append(r.p_success)
    return states, probs


def _pump_rounds(s, F0, noise, rounds=None, max_rounds=1000):
    res = bp.pump(s, rounds if rounds is not None else max_rounds, noise)
    if rounds is None:
        for r, st in enumerate(res.states):
            if st.fidelity >= F0:
                return res.states[: r + 1], res.p_success[:r]
        raise UnreachableTargetError(
            f"pumping saturates at F={res.final.fidelity:.6g} below F0={F0:.6g}")
    return res.states, res.p_success


def _level_plan(cfg: RepeaterConfig, s: BellDiagonal, F0: float):
    """States and per-round success probabilities for purifying ``s``."""
    noise = cfg.noise
    if cfg.protocol == "pumping":
        rounds = None if cfg.M is None else cfg.M - 1
        return _pump_rounds(s, F0, noise, rounds)
    if cfg.M is None:
        return _symmetric_rounds(cfg.protocol, s, F0, noise)
    return _fixed_rounds_recurrence(cfg.protocol, s, int(round(math.log2(cfg.M))), noise)


def _expected_cost(cfg: RepeaterConfig, probs):
    """(pair multiplier, time steps) of one purification stage in expected-value mode."""
    R = len(probs)
    if cfg.M is not None:
        return (float(cfg.M), float(R))
    if cfg.protocol == "pumping":
        reach = np.concatenate([[1.0], np.cumprod(probs)])
        attempted = reach[:-1].sum()
        return (float((1.0 + attempted) / reach[-1]), float(attempted / reach[-1]))
    return (float(np.prod([2.0 / p for p in probs])) if probs else 1.0, float(R))


def _memory(cfg: RepeaterConfig, rounds_per_level) -> int:
    if cfg.protocol == "pumping":
        return cfg.levels + 1
    copies = 1
    for r in rounds_per_level:
        copies *= 2**r
    return 2 * copies


def repeater_run(cfg: RepeaterConfig) -> RepeaterResult:
    """Run the nested repeater; raises on any level that cannot reach ``F0``."""
    if cfg.noise is not None and cfg.M is None:
        max_fidelity(cfg)  # below-threshold check with a clear diagnostic
    F0 = resolve_F0(cfg) if cfg.M is None else (cfg.F0 or 0.0)
    noise = cfg.noise
    records = []
    rounds_per_level = []

    # level 0: purify the elementary pairs (adaptive mode only)
    s = cfg.elementary
    plans = []
    if cfg.M is None and s.fidelity < F0:
        states, probs = _level_plan(cfg, s, F0)
    else:
        states, probs = [s], []
    plans.append((s, states, probs))
    s = states[-1]
    for _ in range(cfg.levels):
        swapped = swap(s, s, noise)
        states, probs = _level_plan(cfg, swapped, F0)
        plans.append((swapped, states, probs))
        s = states[-1]

    if cfg.mode == "expected":
        pairs, time = 1.0, 0.0
        for k, (before, states, probs) in enumerate(plans):
            if k > 0:
                pairs, time = 2.0 * pairs, time + 1.0
            mult, t = _expected_cost(cfg, probs) if (k > 0 or cfg.M is None) else (1.0, 0.0)
            pairs, time = pairs * mult, time + t
            rounds_per_level.append(len(probs))
            records.append(LevelRecord(k, 2**k, before.fidelity, states[-1].fidelity, len(probs), pairs, time))
    else:
        pairs_s, time_s = _monte_carlo(cfg, plans)
        for k, (before, states, probs) in enumerate(plans):
            rounds_per_level.append(len(probs))
            records.append(LevelRecord(k, 2**k, before.fidelity, states[-1].fidelity, len(probs),
                                       pairs_s[k], time_s[k]))
        pairs, time = pairs_s[-1], time_s[-1]
    if cfg.M is not None and cfg.mode == "expected":
        pairs, time = int(round(pairs)), int(round(time))
    res = ResourceCount(pairs, time, _memory(cfg, rounds_per_level[1:] if cfg.M is not None else rounds_per_level))
    return RepeaterResult(s, res, records, F0)


# -- Monte Carlo accounting ------------------------------------------------


def _monte_carlo(cfg: RepeaterConfig, plans):
    """Mean sampled pairs and time per level over ``cfg.trials`` runs."""
    L = len(plans)
    pairs = np.zeros((cfg.trials, L))
    times = np.zeros((cfg.trials, L))
    for t, child in enumerate(np.random.SeedSequence(cfg.seed).spawn(cfg.trials)):
        rng = np.random.default_rng(child)
        for k in range(L):
            c, tm = _sample_level(cfg, plans, k, rng)
            pairs[t, k], times[t, k] = c, tm
    return pairs.mean(axis=0).tolist(), times.mean(axis=0).tolist()


def _sample_level(cfg, plans, k, rng):
    """One purified pair at level ``k``: (elementary pairs, time)."""
    probs = plans[k][2]

    def base():
        if k == 0:
            return 1, 0
        c1, t1 = _sample_level(cfg, plans, k - 1, rng)
        c2, t2 = _sample_level(cfg, plans, k - 1, rng)
        return c1 + c2, max(t1, t2) + 1

    if cfg.protocol == "pumping":
        pairs = time = 0
        while True:
            c, t = base()
            pairs, time = pairs + c, time + t
            ok = True
            for p in probs:
                c, t = base()
                pairs, time = pairs + c, time + t + 1
                if rng.random() >= p:
                    ok = False
                    break
            if ok:
                return pairs, time
    return _sample_tree(base, probs, len(probs), rng)


def _sample_tree(base, probs, r, rng):
    if r == 0:
        return base()
    pairs = time = 0
    while True:
        c1, t1 = _sample_tree(base, probs, r - 1, rng)
        c2, t2 = _sample_tree(base, probs, r - 1, rng)
        pairs += c1 + c2
        time += max(t1, t2) + 1
        if rng.random() < probs[r - 1]:
            return pairs, time


# -- scaling ---------------------------------------------------------------


@dataclass(frozen=True)
class ScalingTable:
    levels: tuple
    distance: tuple
    pairs: tuple
    time_steps: tuple
    slope: float
    intercept: float
    r_squared: float


def resource_scaling(cfg: RepeaterConfig, n_max: int, n_min: int = 1) -> ScalingTable:
    """Run levels ``n_min..n_max`` and fit ``log pairs = slope * log N + c``."""
    if n_max < n_min + 1:
        raise ValueError("need at least two levels to fit a slope")
    levels, dist, pairs, times = [], [], [], []
    for n in range(n_min, n_max + 1):
        r = repeater_run(cfg.with_levels(n))
        levels.append(n)
        dist.append(2**n)
        pairs.append(r.resources.pairs)
        times.append(r.resources.time_steps)
    fit = linregress(np.log(dist), np.log(pairs))
    return ScalingTable(tuple(levels), tuple(dist), tuple(pairs), tuple(times),
                        float(fit.slope), float(fit.intercept), float(fit.rvalue**2))
