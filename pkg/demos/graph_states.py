"""Multipartite purification of graph states: two-colourable recurrence on
clusters and GHZ states, the k-colour protocol, and how thresholds scale."""
from purify import analysis as an
from purify import multipartite as mp
from purify.graphs import Graph
from purify.states import depolarizing

# Alternate P1 and P2 on a noisy 4-qubit cluster.
s = mp.GraphDiagonalState.white_noise(Graph.line(4), 0.95)
traj = mp.purify_two_colorable(s, max_rounds=6, noise=depolarizing(0.99))
print("cluster-4, q = 0.95, p = 0.99")
for step, F, p in zip(traj.steps, traj.fidelities[1:], traj.p_success):
    print(f"  {step}: F = {F:.6f}  p_success = {p:.4f}")

# A triangle needs three colours: each round builds a two-colourable helper per colour.
tri = mp.GraphDiagonalState.white_noise(Graph.complete(3), 0.95)
traj = mp.kcolor_purify(tri, max_rounds=4)
print("\ntriangle, k-colour protocol:", " -> ".join(f"{F:.5f}" for F in traj.fidelities[::3]))

# Thresholds: flat for clusters, rising for GHZ states.
print("\ngate-reliability thresholds under single-qubit white noise")
for n in (4, 6, 8):
    line = an.threshold_p("graph", 1e-4, graph=Graph.line(n), lo=0.9)
    ghz = an.threshold_p("graph", 1e-4, graph=Graph.ghz(n), lo=0.9)
    print(f"  n={n}: cluster {line:.4f}   GHZ {ghz:.4f}   GHZ toy bound {mp.ghz_toy_threshold(n):.4f}")
