"""A nested repeater over 16 segments: swap, re-purify, repeat; then how the
pair count grows with distance."""
from purify import repeater as rp
from purify.states import depolarizing, werner_from_fidelity

cfg = rp.RepeaterConfig(4, werner_from_fidelity(0.96), "dejmps", noise=depolarizing(0.995))
res = rp.repeater_run(cfg)
print(f"working fidelity F0 = {res.F0:.6f}")
print("level distance  F_swap    F_purified  rounds  pairs")
for L in res.levels:
    print(f"{L.level:5d} {L.distance:8d}  {L.fidelity_after_swap:.6f}  {L.fidelity_after_purify:.6f}"
          f"  {L.rounds:6d}  {L.pairs_total:.1f}")
print(f"memory per station: {res.resources.memory_per_station} qubits")

# With a fixed number of copies per purification loop the count is a power of the distance.
for protocol, M in (("dejmps", 2), ("pumping", 3)):
    fixed = rp.RepeaterConfig(1, werner_from_fidelity(0.96), protocol, M=M, noise=depolarizing(0.995))
    table = rp.resource_scaling(fixed, 6)
    print(f"{protocol} M={M}: pairs {list(table.pairs)}  slope {table.slope:.4f}  R^2 {table.r_squared:.6f}")

adaptive = rp.resource_scaling(cfg, 6)
print(f"adaptive rounds: slope {adaptive.slope:.3f}, R^2 {adaptive.r_squared:.4f}")
