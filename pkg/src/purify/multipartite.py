"""Graph-diagonal states and multipartite recurrence protocols.

A graph-diagonal state stores ``2**n`` weights over the basis
``|Phi_mu> = prod_i Z_i^mu_i |G>``.  The multi-index is little-endian:
bit ``i`` of ``mu`` belongs to vertex ``i``.  Internally the weights are
viewed as an ``n``-axis tensor whose axis ``n - 1 - i`` is vertex ``i``.

All two-copy steps share one shape: the output weight at ``gamma`` is a
sum over copy-1 and copy-2 indices that agree on a "revealed" vertex set
and XOR to ``gamma`` on the rest.  Such sector-wise XOR convolutions are
computed with a Walsh-Hadamard transform over the convolved axes.

For the k-colour protocol with colour class ``J`` and complement ``R``:

``make_gj_state``, erase variant
    CNOTs copy 2 -> copy 1 on ``J``, copy 1 -> copy 2 on ``R``; copy 2 is
    measured in z everywhere and copy-1 vertex ``a`` in ``R`` gets ``Z``
    when the outcomes on ``N(a) & R`` have odd parity.  Always succeeds;
    ``lam'[gJ, gR] = sum_{mR ^ nR = gR} lam[gJ, mR] * m2[nR]`` with ``m2``
    the ``J``-marginal of copy 2.
``make_gj_state``, purifying variant
    Same gates, copy 2 measured in x on ``J``; accept when ``K_i = +1``
    for ``i`` in ``J``.  ``lam'[gJ, gR] ~ sum lam[gJ, mR] lam[gJ, nR]``.
``kcolor_step_ii``
    Target on ``G``, helper on ``g_j``; same gates and measurements as the
    purifying variant, no correction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bipartite import StepResult
from .errors import InvalidStateError
from .graphs import MAX_WEIGHT_VERTICES, Graph, GraphError, coloring_of, two_coloring_of
from .states import GateNoiseModel, PauliChannel, normalize_simplex

FIXED_POINT_TOL = 1e-12


@dataclass(frozen=True)
class GraphDiagonalState:
    graph: Graph
    lam: np.ndarray

    def __post_init__(self):
        n = self.graph.n
        if n > MAX_WEIGHT_VERTICES:
            raise GraphError(f"{n} vertices exceeds the weight-vector limit of {MAX_WEIGHT_VERTICES}")
        lam = normalize_simplex(self.lam, name="graph weights")
        if lam.shape != (2**n,):
            raise InvalidStateError(f"expected {2**n} weights for {n} vertices, got {lam.size}")
        object.__setattr__(self, "lam", lam)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def fidelity(self) -> float:
        return float(self.lam[0])

    @classmethod
    def pure(cls, g: Graph) -> "GraphDiagonalState":
        lam = np.zeros(2**g.n)
        lam[0] = 1.0
        return cls(g, lam)

    @classmethod
    def white_noise(cls, g: Graph, q: float) -> "GraphDiagonalState":
        """Pure graph state with every qubit sent through a depolarizing channel of reliability ``q``."""
        return apply_channel_all(cls.pure(g), PauliChannel.depolarizing(q))

    def __repr__(self):
        return f"GraphDiagonalState(n={self.n}, F={self.fidelity:.6g})"


# -- index algebra --------------------------------------------------------


def correlation_operator(g: Graph, j: int) -> str:
    """``K_j`` as a Pauli string, character ``i`` acting on vertex ``i``."""
    if not (0 <= j < g.n):
        raise GraphError(f"vertex {j} outside 0..{g.n - 1}")
    s = ["I"] * g.n
    s[j] = "X"
    for k in g.neighbors(j):
        s[k] = "Z"
    return "".join(s)


def pauli_shifts(g: Graph, j: int) -> tuple[int, int, int, int]:
    """Index XOR masks of (I, X, Y, Z) on vertex ``j``."""
    z = 1 << j
    x = g.neighbor_mask(j)
    return 0, x, x ^ z, z


def pauli_on_weights_array(g: Graph, lam: np.ndarray, j: int, ch: PauliChannel) -> np.ndarray:
    idx = np.arange(2**g.n)
    out = np.zeros_like(lam)
    for pk, shift in zip(ch.p, pauli_shifts(g, j)):
        if pk:
            out = out + pk * lam[..., idx ^ shift]
    return out


def pauli_on_weights(s: GraphDiagonalState, qubit: int, ch: PauliChannel) -> GraphDiagonalState:
    return GraphDiagonalState(s.graph, pauli_on_weights_array(s.graph, s.lam, qubit, ch))


def apply_channel_all(s: GraphDiagonalState, ch: PauliChannel, qubits=None) -> GraphDiagonalState:
    """The same single-qubit channel on each vertex in ``qubits`` (default: all)."""
    lam = s.lam
    for j in range(s.n) if qubits is None else qubits:
        lam = pauli_on_weights_array(s.graph, lam, j, ch)
    return GraphDiagonalState(s.graph, lam)


def degrade_weights(g: Graph, lam: np.ndarray, noise: GateNoiseModel | None) -> np.ndarray:
    """Per-qubit gate-noise channel on every vertex; ``lam`` may carry leading batch axes."""
    if noise is None or noise.p == 1.0:
        return lam
    ch = noise.channel
    for j in range(g.n):
        lam = pauli_on_weights_array(g, lam, j, ch)
    return lam


def _wht(t: np.ndarray, axes) -> np.ndarray:
    for ax in axes:
        a0 = np.take(t, 0, axis=ax)
        a1 = np.take(t, 1, axis=ax)
        t = np.stack([a0 + a1, a0 - a1], axis=ax)
    return t


def sector_convolve(a: np.ndarray, b: np.ndarray, n: int, conv_vertices) -> np.ndarray:
    """``out[g] = sum a[g_S, m] b[g_S, v]`` over ``m ^ v = g`` on ``conv_vertices``.

    ``S`` is the complement of ``conv_vertices``.  Inputs have shape
    ``(..., 2**n)`` and broadcast against each other.  Vertex ``v`` is
    tensor axis ``-1 - v``.
    """
    axes = tuple(-1 - v for v in conv_vertices)
    ta = _wht(a.reshape(a.shape[:-1] + (2,) * n), axes)
    tb = _wht(b.reshape(b.shape[:-1] + (2,) * n), axes)
    out = _wht(ta * tb, axes) / 2 ** len(axes)
    return out.reshape(out.shape[:-n] + (2**n,))


def _clean(raw: np.ndarray) -> np.ndarray:
    # the transform leaves ~1e-17 residue where exact zeros belong
    return np.where(np.abs(raw) < 1e-17, 0.0, raw)


def _finish(g: Graph, raw: np.ndarray) -> StepResult:
    raw = _clean(raw)
    p = float(raw.sum())
    if not p > 0:
        raise InvalidStateError("degenerate input: success probability is zero")
    return StepResult(GraphDiagonalState(g, raw / p), min(p, 1.0))


def _same_graph(a: GraphDiagonalState, b: GraphDiagonalState) -> None:
    if a.graph.n != b.graph.n or a.graph.edges != b.graph.edges:
        raise GraphError("both copies must live on the same graph")


# -- two-colorable recurrence --------------------------------------------


def p_step_weights(g: Graph, a: np.ndarray, b: np.ndarray, which: int,
                   noise: GateNoiseModel | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Batched P1 (``which=1``) or P2 (``which=2``): ``(normalized weights, p_success)``."""
    va, vb = two_coloring_of(g)
    conv = vb if which == 1 else va
    raw = _clean(sector_convolve(degrade_weights(g, a, noise), degrade_weights(g, b, noise), g.n, conv))
    p = raw.sum(axis=-1)
    return raw / p[..., None], p


def _psub(a, b, noise, which: int) -> StepResult:
    b = a if b is None else b
    _same_graph(a, b)
    lam, p = p_step_weights(a.graph, a.lam, b.lam, which, noise)
    if not p > 0:
        raise InvalidStateError("degenerate input: success probability is zero")
    return StepResult(GraphDiagonalState(a.graph, lam), min(float(p), 1.0))


def p1_step(a: GraphDiagonalState, b: GraphDiagonalState | None = None,
            noise: GateNoiseModel | None = None) -> StepResult:
    """Sub-protocol P1: reveals the ``V_A`` indices.

    ``lam'[gA, gB] ~ sum_{mB ^ nB = gB} lam1[gA, mB] lam2[gA, nB]``.
    ``p_success`` is the pre-normalization weight sum.  The two-colouring
    is the graph's own, else BFS from vertex 0.
    """
    return _psub(a, b, noise, 1)


def p2_step(a: GraphDiagonalState, b: GraphDiagonalState | None = None,
            noise: GateNoiseModel | None = None) -> StepResult:
    """Sub-protocol P2: the mirror of :func:`p1_step`, revealing ``V_B``."""
    return _psub(a, b, noise, 2)


@dataclass
class GraphTrajectory:
    states: list = field(default_factory=list)
    p_success: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    converged: bool = False

    @property
    def fidelities(self) -> list[float]:
        return [s.fidelity for s in self.states]

    @property
    def final(self) -> GraphDiagonalState:
        return self.states[-1]


def _run_cycles(s, cycle, max_rounds, tol) -> GraphTrajectory:
    traj = GraphTrajectory([s])
    for _ in range(max_rounds):
        before = s
        for name, fn in cycle:
            r = fn(s)
            s = r.state
            traj.states.append(s)
            traj.p_success.append(r.p_success)
            traj.steps.append(name)
        if np.max(np.abs(s.lam - before.lam)) < tol:
            traj.converged = True
            break
    return traj


def purify_two_colorable(s: GraphDiagonalState, schedule: str = "12", max_rounds: int = 200,
                         noise: GateNoiseModel | None = None, tol: float = FIXED_POINT_TOL) -> GraphTrajectory:
    """Apply P1/P2 in the order given by ``schedule`` (e.g. ``"12"``), cyclically.

    A round is one pass through ``schedule``; iteration stops when a full
    round changes no weight by more than ``tol`` or after ``max_rounds``.
    """
    if not schedule or set(schedule) - {"1", "2"}:
        raise ValueError("schedule must be a nonempty string over {'1', '2'}")
    two_coloring_of(s.graph)
    steps = {"1": lambda t: p1_step(t, noise=noise), "2": lambda t: p2_step(t, noise=noise)}
    return _run_cycles(s, [("P" + c, steps[c]) for c in schedule], max_rounds, tol)


# -- binary mixtures ------------------------------------------------------


def binary_mixture_step(lam_a) -> tuple[np.ndarray, float]:
    """P1 on a binary-type mixture: ``lam -> lam**2 / K`` with ``K = sum lam**2``."""
    lam = normalize_simplex(lam_a, name="binary-mixture weights")
    sq = lam**2
    K = float(sq.sum())
    return sq / K, K


def binary_family_step(F: float, n_a: int) -> float:
    """One-parameter family: target weight ``F``, the rest spread evenly over ``2**n_a - 1``."""
    if n_a < 1:
        raise ValueError("n_a must be >= 1")
    rest = (1.0 - F) ** 2 / (2**n_a - 1)
    return F * F / (F * F + rest)


def binary_mixture_state(g: Graph, lam_a, va=None) -> GraphDiagonalState:
    """Embed weights over ``mu_A`` (bit ``i`` <-> ``i``-th vertex of ``V_A``) with ``mu_B = 0``."""
    va = two_coloring_of(g)[0] if va is None else tuple(va)
    lam_a = np.asarray(lam_a, dtype=float)
    if lam_a.shape != (2 ** len(va),):
        raise InvalidStateError(f"expected {2 ** len(va)} weights for |V_A| = {len(va)}")
    lam = np.zeros(2**g.n)
    for k, w in enumerate(lam_a):
        mu = sum(1 << v for i, v in enumerate(va) if (k >> i) & 1)
        lam[mu] = w
    return GraphDiagonalState(g, lam)


def binary_mixture_weights(s: GraphDiagonalState, va=None) -> np.ndarray:
    va = two_coloring_of(s.graph)[0] if va is None else tuple(va)
    idx = [sum(1 << v for i, v in enumerate(va) if (k >> i) & 1) for k in range(2 ** len(va))]
    return s.lam[idx]


# -- k-colourable graphs --------------------------------------------------


def color_class(g: Graph, j: int) -> tuple[int, ...]:
    classes = coloring_of(g)
    if not (0 <= j < len(classes)):
        raise GraphError(f"colour {j} outside 0..{len(classes) - 1}")
    return tuple(classes[j])


def subgraph_gj(g: Graph, j: int) -> Graph:
    """Keep the edges touching colour class ``j``; colour the result ``(V_j, rest)``."""
    vj = set(color_class(g, j))
    edges = [(u, v) for u, v in g.edges if u in vj or v in vj]
    rest = tuple(v for v in range(g.n) if v not in vj)
    return Graph.from_edges(g.n, edges, (tuple(sorted(vj)), rest) if rest else (tuple(sorted(vj)),))


def make_gj_state(a: GraphDiagonalState, b: GraphDiagonalState | None, j: int,
                  variant: str = "purifying", noise: GateNoiseModel | None = None) -> StepResult:
    """Two copies on ``G`` -> one copy on ``g_j`` (step i of the k-colour protocol)."""
    b = a if b is None else b
    _same_graph(a, b)
    g = a.graph
    vj = color_class(g, j)
    rest = [v for v in range(g.n) if v not in vj]
    la, lb = degrade_weights(g, a.lam, noise), degrade_weights(g, b.lam, noise)
    if variant == "erase":
        t = lb.reshape((2,) * g.n)
        marg = np.broadcast_to(t.sum(axis=tuple(-1 - v for v in vj), keepdims=True), t.shape).reshape(-1)
        raw = sector_convolve(la, marg, g.n, rest)
    elif variant == "purifying":
        raw = sector_convolve(la, lb, g.n, rest)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return _finish(subgraph_gj(g, j), raw)


def kcolor_step_ii(target: GraphDiagonalState, helper: GraphDiagonalState, j: int,
                   noise: GateNoiseModel | None = None) -> StepResult:
    """Purify ``target`` on ``G`` with a ``g_j`` helper, revealing the ``V_j`` indices."""
    g = target.graph
    gj = subgraph_gj(g, j)
    if helper.graph.n != g.n or helper.graph.edges != gj.edges:
        raise GraphError("helper must live on the subgraph g_j of the target graph")
    rest = [v for v in range(g.n) if v not in color_class(g, j)]
    raw = sector_convolve(degrade_weights(g, target.lam, noise), degrade_weights(gj, helper.lam, noise), g.n, rest)
    return _finish(g, raw)


def kcolor_round(s: GraphDiagonalState, variant: str = "purifying", noise: GateNoiseModel | None = None):
    """One pass over all colours; yields ``(colour, StepResult)`` for every step (ii)."""
    out = []
    for j in range(len(coloring_of(s.graph))):
        helper = make_gj_state(s, s, j, variant, noise)
        r = kcolor_step_ii(s, helper.state, j, noise)
        out.append((j, helper, r))
        s = r.state
    return out


def kcolor_purify(s: GraphDiagonalState, max_rounds: int = 200, variant: str = "purifying",
                  noise: GateNoiseModel | None = None, tol: float = FIXED_POINT_TOL) -> GraphTrajectory:
    """Iterate the k-colour protocol; ``p_success`` counts both the helper and step (ii)."""
    traj = GraphTrajectory([s])
    for _ in range(max_rounds):
        before = s
        for j, helper, r in kcolor_round(s, variant, noise):
            s = r.state
            traj.states.append(s)
            traj.p_success.append(helper.p_success * r.p_success)
            traj.steps.append(f"V{j}")
        if np.max(np.abs(s.lam - before.lam)) < tol:
            traj.converged = True
            break
    return traj


# -- GHZ toy model --------------------------------------------------------


def ghz_toy_threshold(n: int) -> float:
    """Gate reliability below which bit-flip noise on the leaves defeats P1 on GHZ-n."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return 0.5 ** (1.0 / (n - 1))


def ghz_toy_step(x: float, n: int, p: float) -> float:
    """Closed-form toy map on ``x = lam_0 - lam_1``: ``y = x p**(n-1)``, ``x' = 2y / (1 + y**2)``."""
    y = x * p ** (n - 1)
    return 2.0 * y / (1.0 + y * y)

