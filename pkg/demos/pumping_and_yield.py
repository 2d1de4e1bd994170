"""Entanglement pumping, nested pumping, and what each costs in elementary pairs."""
from purify import analysis as an
from purify import bipartite as bp
from purify.states import depolarizing, werner_from_fidelity

w = werner_from_fidelity(0.7)

# Pumping one pair with fresh elementary copies saturates well below 1.
res = bp.pump(w, None)
print(f"pumping W(0.7) saturates at F = {res.final.fidelity:.6f} after {len(res.p_success)} rounds")

# Nesting fixes that: the output of one level feeds the next.
F0, steps, ladder = bp.search_nested_schedule(1 - 1e-7, [0.9, 0.8, 0.7])
print(f"nested schedule from W({F0}): steps {steps}, level fidelities "
      + ", ".join(f"{f:.9f}" for f in ladder.fixed_points))

# Cost with restart-on-failure, analytic and sampled.
for sched in ([3], [2, 2]):
    pairs, time = bp.pump_cost_expected(werner_from_fidelity(0.8), steps_per_level=sched)
    mc = bp.pump_cost_monte_carlo(werner_from_fidelity(0.8), steps_per_level=sched, trials=4000, seed=1)
    print(f"W(0.8) schedule {sched}: expected {pairs:.3f} pairs / {time:.3f} steps;"
          f" sampled {mc.mean_pairs:.3f} +/- {mc.stderr_pairs:.3f}")

# Recurrence yield versus the hashing bound.
y = an.yield_at_target("dejmps", w, 0.99)
print(f"\nDEJMPS yield W(0.7) -> F >= 0.99: {y:.6f} pairs per input pair")
print(f"hashing yield of W(0.9): {bp.hashing_yield(werner_from_fidelity(0.9)):.6f}")
print(f"hashing/breeding stops working below F = {bp.breeding_threshold_werner():.6f}")
print(f"unreachable target under noise: {an.yield_at_target('bbpssw', w, 0.99, depolarizing(0.98))}")
