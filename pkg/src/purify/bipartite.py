"""Bipartite purification: filtering, BBPSSW, DEJMPS, pumping, hashing yields.

The recurrence steps act on pair 1 (kept) and pair 2 (measured).  Bilateral
CNOTs ``A1 -> A2`` and ``B2 -> B1`` rewrite Bell indices as

    |Phi_k1k2>|Phi_j1j2>  ->  |Phi_(k1^j1) k2>|Phi_j1 (k2^j2)>,

and pair 1 is kept when the measured ``K2`` of pair 2 reads +1, i.e. when
``k2 == j2``.  DEJMPS additionally swaps ``lam10 <-> lam11`` on both pairs
before the CNOTs.  Gate noise is a Pauli channel on each of the four qubits
applied before the CNOTs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import BelowThresholdError, UnreachableTargetError
from .states import (
    BellDiagonal,
    GateNoiseModel,
    NoiseKind,
    WernerParam,
    apply_channel_weights,
    as_bell,
    entropy,
    s_of_F,
    werner_from_fidelity,
)

PROTOCOLS = ("bbpssw", "dejmps")
FIXED_POINT_TOL = 1e-12
MAX_ITER = 10_000


@dataclass(frozen=True)
class StepResult:
    state: object  # BellDiagonal, WernerParam, or a bare fidelity for filtering
    p_success: float

    def __post_init__(self):
        if not (-1e-12 <= self.p_success <= 1 + 1e-12):
            raise ValueError(f"p_success={self.p_success} outside [0, 1]")

    @property
    def fidelity(self) -> float:
        s = self.state
        return float(s) if isinstance(s, (float, int)) else s.fidelity


# -- filtering ------------------------------------------------------------


def filter_step(F: float, eps: float) -> StepResult:
    """Local filter on ``F |Psi+><Psi+| + (1 - F)|00><00|``."""
    if not (0.0 <= F <= 1.0):
        raise ValueError(f"F={F} outside [0, 1]")
    if not (0.0 < eps <= 1.0):
        raise ValueError("eps must lie in (0, 1]; eps = 0 is a zero-probability branch")
    p = F * eps + (1.0 - F) * eps**2
    if p == 0.0:
        raise ValueError("filter branch has zero probability")
    return StepResult(F * eps / p, p)


# -- core weight maps (vectorized over leading axes) ----------------------


def _flip(lam: np.ndarray) -> np.ndarray:
    return lam[..., [0, 1, 3, 2]]


def _degrade(lam: np.ndarray, noise: GateNoiseModel | None) -> np.ndarray:
    if noise is None or noise.p == 1.0:
        return lam
    ch = noise.channel
    return apply_channel_weights(apply_channel_weights(lam, ch, "A"), ch, "B")


def bcnot_weights(a: np.ndarray, b: np.ndarray, flip_parity: float = 0.0) -> np.ndarray:
    """Unnormalized pair-1 weights after bilateral CNOT and the K2 test.

    ``flip_parity`` is the chance that the two reported outcomes' parity is
    wrong; a wrong parity keeps exactly the rejected branch.
    """
    L = a.reshape(a.shape[:-1] + (2, 2))
    M = b.reshape(b.shape[:-1] + (2, 2))
    out = np.empty(np.broadcast_shapes(L.shape, M.shape))
    out[..., 0, :] = L[..., 0, :] * M[..., 0, :] + L[..., 1, :] * M[..., 1, :]
    out[..., 1, :] = L[..., 0, :] * M[..., 1, :] + L[..., 1, :] * M[..., 0, :]
    if flip_parity:
        Ms = M[..., :, ::-1]
        wrong = np.empty_like(out)
        wrong[..., 0, :] = L[..., 0, :] * Ms[..., 0, :] + L[..., 1, :] * Ms[..., 1, :]
        wrong[..., 1, :] = L[..., 0, :] * Ms[..., 1, :] + L[..., 1, :] * Ms[..., 0, :]
        out = (1.0 - flip_parity) * out + flip_parity * wrong
    return out.reshape(out.shape[:-2] + (4,))


def recurrence_weights(a, b, *, flip: bool, noise: GateNoiseModel | None = None):
    """``(normalized weights, p_success)`` for arrays of shape ``(..., 4)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if flip:
        a, b = _flip(a), _flip(b)
    a, b = _degrade(a, noise), _degrade(b, noise)
    raw = bcnot_weights(a, b, noise.flip_parity if noise is not None else 0.0)
    p = raw.sum(axis=-1)
    return raw / p[..., None], p


# -- BBPSSW ---------------------------------------------------------------


def _werner_weights(lam: np.ndarray) -> np.ndarray:
    F = lam[..., :1]
    return np.concatenate([F, np.repeat((1.0 - F) / 3.0, 3, axis=-1)], axis=-1)


def bbpssw_fidelity(F1: float, F2: float | None = None) -> tuple[float, float]:
    """Output fidelity and success probability for two Werner inputs."""
    F2 = F1 if F2 is None else F2
    e1, e2 = (1.0 - F1) / 3.0, (1.0 - F2) / 3.0
    num = F1 * F2 + e1 * e2
    den = F1 * F2 + F1 * e2 + e1 * F2 + 5.0 * e1 * e2
    return num / den, den


def bbpssw_step(F, F2=None, noise: GateNoiseModel | None = None) -> StepResult:
    """One BBPSSW round on Werner inputs of fidelity ``F`` (and ``F2`` for pumping).

    Inputs may also be Bell-diagonal states; they are Werner-twirled first.
    The output is twirled back to Werner form.
    """
    F1 = F.fidelity if hasattr(F, "fidelity") else float(F)
    F2v = F1 if F2 is None else (F2.fidelity if hasattr(F2, "fidelity") else float(F2))
    for v in (F1, F2v):
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"fidelity {v} outside [0, 1]")
    if noise is None or noise.is_noiseless:
        Fp, p = bbpssw_fidelity(F1, F2v)
    else:
        lam, p = recurrence_weights(
            werner_from_fidelity(F1).lam, werner_from_fidelity(F2v).lam, flip=False, noise=noise
        )
        Fp, p = float(lam[0]), float(p)
    return StepResult(werner_from_fidelity(min(max(Fp, 0.0), 1.0)), p)


def bbpssw_step_noisy(x, noise: GateNoiseModel) -> StepResult:
    """Closed-form BBPSSW map on the Werner parameter under white gate noise."""
    if noise.kind is not NoiseKind.DEPOLARIZING:
        raise ValueError("the closed form holds for depolarizing gate noise only")
    if noise.flip_parity:
        raise ValueError("the closed form assumes perfect measurements")
    x = x.x if isinstance(x, WernerParam) else float(x)
    WernerParam(x)
    p = noise.p
    xp = (4 * x**2 * p**4 + 2 * x * p**2) / (3 * x**2 * p**4 + 3)
    y = x * p**2
    return StepResult(WernerParam(xp), (1.0 + y * y) / 2.0)


def bbpssw_discriminant(p: float) -> float:
    return 4.0 + 6.0 / p**2 - 9.0 / p**4


def bbpssw_fixed_points(p: float) -> tuple[float, float]:
    """Werner-parameter fixed points ``(x_minus, x_plus)`` of the noisy map."""
    if not (0.0 < p <= 1.0):
        raise ValueError(f"p={p} outside (0, 1]")
    disc = bbpssw_discriminant(p)
    if -1e-12 < disc < 0:  # round-off at p_min
        disc = 0.0
    if disc < 0:
        raise BelowThresholdError(f"p={p}: below threshold, no purification interval")
    r = math.sqrt(disc) / 3.0
    return 2.0 / 3.0 - r, 2.0 / 3.0 + r


BBPSSW_P_MIN = 1.0 / math.sqrt((6.0 + math.sqrt(180.0)) / 18.0)


# -- DEJMPS ---------------------------------------------------------------


def dejmps_step(a, b=None, noise: GateNoiseModel | None = None) -> StepResult:
    """One DEJMPS round; ``b`` defaults to a second copy of ``a``."""
    a = as_bell(a)
    b = a if b is None else as_bell(b)
    lam, p = recurrence_weights(a.lam, b.lam, flip=True, noise=noise)
    if not p > 0:
        raise ValueError("degenerate input: success probability is zero")
    return StepResult(BellDiagonal(lam), float(p))


def recurrence_step(protocol: str, a, b=None, noise: GateNoiseModel | None = None) -> StepResult:
    if protocol == "dejmps":
        return dejmps_step(a, b, noise)
    if protocol == "bbpssw":
        return bbpssw_step(a, b, noise)
    raise ValueError(f"unknown protocol {protocol!r}")


# -- pumping --------------------------------------------------------------


@dataclass
class PumpResult:
    """Trajectory of entanglement pumping at one nesting level."""

    elementary: BellDiagonal
    states: list = field(default_factory=list)
    p_success: list = field(default_factory=list)
    converged: bool = False

    @property
    def fidelities(self) -> list[float]:
        return [s.fidelity for s in self.states]

    @property
    def final(self) -> BellDiagonal:
        return self.states[-1]


@dataclass
class PumpingLadder:
    levels: list = field(default_factory=list)  # list of PumpResult
    steps_per_level: list = field(default_factory=list)

    @property
    def fixed_points(self) -> list[float]:
        return [lvl.final.fidelity for lvl in self.levels]

    @property
    def final(self) -> BellDiagonal:
        return self.levels[-1].final


def pump(elementary, rounds: int | None, noise: GateNoiseModel | None = None,
         protocol: str = "dejmps", tol: float = FIXED_POINT_TOL, max_iter: int = MAX_ITER) -> PumpResult:
    """Purify one pair repeatedly with fresh copies of ``elementary``.

    ``rounds=None`` iterates to the fixed point (``|dlam|_inf < tol``).
    ``states[0]`` is the starting pair, itself an elementary pair.
    """
    e = as_bell(elementary)
    res = PumpResult(e, [e], [])
    limit = max_iter if rounds is None else rounds
    if limit < 0:
        raise ValueError("rounds must be nonnegative")
    cur = e
    for _ in range(limit):
        step = recurrence_step(protocol, cur, e, noise)
        res.states.append(step.state)
        res.p_success.append(step.p_success)
        done = np.max(np.abs(step.state.lam - cur.lam)) < tol
        cur = step.state
        if done:
            res.converged = True
            if rounds is None:
                break
    return res


def pump_fixed_point(elementary, noise: GateNoiseModel | None = None, protocol: str = "dejmps") -> BellDiagonal:
    res = pump(elementary, None, noise, protocol)
    if not res.converged:
        raise RuntimeError("pumping did not reach a fixed point")
    return res.final


def nested_pump(levels: int, steps_per_level, elementary, noise: GateNoiseModel | None = None,
                protocol: str = "dejmps") -> PumpingLadder:
    """Nested pumping: the output of level k is the elementary pair of level k+1.

    ``steps_per_level`` is an int (same for every level), a sequence of
    ints, or ``None`` entries meaning "pump to the fixed point".
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if steps_per_level is None or isinstance(steps_per_level, int):
        steps_per_level = [steps_per_level] * levels
    steps_per_level = list(steps_per_level)
    if len(steps_per_level) != levels:
        raise ValueError("steps_per_level needs one entry per level")
    ladder = PumpingLadder(steps_per_level=steps_per_level)
    e = as_bell(elementary)
    for steps in steps_per_level:
        lvl = pump(e, steps, noise, protocol)
        ladder.levels.append(lvl)
        e = lvl.final
    return ladder


def search_nested_schedule(target_F: float, elementary_grid, max_levels: int = 4, max_steps: int = 6,
                           noise: GateNoiseModel | None = None, protocol: str = "dejmps"):
    """Search for a nested-pumping schedule reaching ``target_F``.

    Tries elementary fidelities from ``elementary_grid`` in order and
    schedules with the same number of steps at every level, fewest levels
    and steps first.  Returns ``(elementary_F, steps_per_level, ladder)``.
    """
    for F0 in elementary_grid:
        elem = werner_from_fidelity(F0)
        for levels in range(1, max_levels + 1):
            for steps in range(1, max_steps + 1):
                ladder = nested_pump(levels, steps, elem, noise, protocol)
                if ladder.final.fidelity >= target_F:
                    return F0, ladder.steps_per_level, ladder
    raise UnreachableTargetError(f"no schedule with <= {max_levels} levels reaches F={target_F}")


# -- pumping cost ---------------------------------------------------------


@dataclass(frozen=True)
class PumpCost:
    mean_pairs: float
    var_pairs: float
    mean_time: float
    var_time: float
    trials: int
    steps_per_level: tuple

    @property
    def stderr_pairs(self) -> float:
        return math.sqrt(self.var_pairs / self.trials) if self.trials else 0.0

    @property
    def stderr_time(self) -> float:
        return math.sqrt(self.var_time / self.trials) if self.trials else 0.0


def _success_schedule(elementary, steps_per_level, noise, protocol):
    ladder = nested_pump(len(steps_per_level), steps_per_level, elementary, noise, protocol)
    return [lvl.p_success for lvl in ladder.levels], ladder


def _rounds_to_target(elementary, target_F, noise, protocol, max_rounds=MAX_ITER) -> int:
    res = pump(elementary, None, noise, protocol, max_iter=max_rounds)
    for r, s in enumerate(res.states):
        if s.fidelity >= target_F:
            return r
    raise UnreachableTargetError(
        f"pumping saturates at F={res.final.fidelity:.6g} below the target {target_F}"
    )


def _resolve_schedule(elementary, noise, target_F, steps_per_level, protocol):
    if steps_per_level is None:
        if target_F is None:
            raise ValueError("give target_F or steps_per_level")
        steps_per_level = [_rounds_to_target(elementary, target_F, noise, protocol)]
    probs, ladder = _success_schedule(elementary, steps_per_level, noise, protocol)
    if target_F is not None and ladder.final.fidelity < target_F:
        raise UnreachableTargetError(f"schedule reaches only F={ladder.final.fidelity:.6g}")
    return list(steps_per_level), probs


def pump_cost_expected(elementary, noise=None, target_F=None, steps_per_level=None,
                       protocol: str = "dejmps") -> tuple[float, float]:
    """Expected elementary pairs and time steps with restart-on-failure.

    One attempt at level k builds a starting pair and one helper per round
    from level k-1; a failed round discards everything and the level starts
    over.  Attempts are independent, so expected cost per success is the
    expected cost per attempt divided by the attempt's success probability.
    """
    steps, probs = _resolve_schedule(as_bell(elementary), noise, target_F, steps_per_level, protocol)
    pairs, time = 1.0, 0.0
    for p_lvl in probs:
        reach = np.concatenate([[1.0], np.cumprod(p_lvl)])  # P(round r is attempted), r = 1..R+1
        rounds_attempted = reach[:-1].sum()
        p_all = reach[-1]
        pairs = pairs * (1.0 + rounds_attempted) / p_all
        time = (time * (1.0 + rounds_attempted) + rounds_attempted) / p_all
    return float(pairs), float(time)


def pump_cost_monte_carlo(elementary, noise=None, target_F=None, trials: int = 1000, seed: int = 0,
                          steps_per_level=None, protocol: str = "dejmps") -> PumpCost:
    """Sampled cost of (nested) pumping; each trial has its own spawned seed."""
    steps, probs = _resolve_schedule(as_bell(elementary), noise, target_F, steps_per_level, protocol)
    children = np.random.SeedSequence(seed).spawn(trials)
    pairs = np.empty(trials)
    times = np.empty(trials)
    for t, child in enumerate(children):
        rng = np.random.default_rng(child)
        pairs[t], times[t] = _sample_level(len(probs), probs, rng)
    ddof = 1 if trials > 1 else 0
    return PumpCost(float(pairs.mean()), float(pairs.var(ddof=ddof)), float(times.mean()),
                    float(times.var(ddof=ddof)), trials, tuple(steps))


def _sample_level(k: int, probs, rng) -> tuple[int, int]:
    if k == 0:
        return 1, 0
    pairs = time = 0
    p_lvl = probs[k - 1]
    while True:
        c, t = _sample_level(k - 1, probs, rng)
        pairs += c
        time += t
        ok = True
        for p in p_lvl:
            c, t = _sample_level(k - 1, probs, rng)
            pairs += c
            time += t + 1
            if rng.random() >= p:
                ok = False
                break
        if ok:
            return pairs, time


# -- hashing / breeding ---------------------------------------------------


def hashing_yield(state) -> float:
    return max(0.0, 1.0 - entropy(state))


def breeding_threshold_werner(tol: float = 1e-6) -> float:
    """Werner fidelity where the breeding/hashing yield ``1 - S(F)`` vanishes."""
    return brentq(lambda F: s_of_F(F) - 1.0, 0.5, 1.0 - 1e-12, xtol=tol * 1e-3)


def hashing_noisy_target(p: float, m: int) -> WernerParam:
    """Werner parameter of a perfect target pair after ``m`` noisy bilateral CNOTs."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    return WernerParam(p ** (2 * m))
