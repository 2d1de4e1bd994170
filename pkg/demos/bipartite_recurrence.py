"""Two-pair recurrence: one round of BBPSSW and DEJMPS, their fixed points
under noisy gates, and the purification ranges they leave open."""
import numpy as np

from purify import analysis as an
from purify import bipartite as bp
from purify.states import depolarizing, werner_from_fidelity

# One noiseless round on Werner pairs.
for F in (0.6, 0.75, 0.9):
    b = bp.bbpssw_step(F)
    d = bp.dejmps_step(werner_from_fidelity(F))
    print(f"F={F:.2f}  BBPSSW -> {b.fidelity:.6f} (p={b.p_success:.4f})"
          f"  DEJMPS -> {d.fidelity:.6f} (p={d.p_success:.4f})")

# With noisy gates the attractor at F=1 moves down and a lower repeller appears.
print("\nBBPSSW Werner-parameter fixed points")
for p in (1.0, 0.99, 0.98, 0.97):
    xm, xp = bp.bbpssw_fixed_points(p)
    print(f"  p={p:.2f}  x- = {xm:.6f}  x+ = {xp:.6f}")
print(f"  interval closes at p_min = {bp.BBPSSW_P_MIN:.6f}")

# DEJMPS keeps a wider window open and survives noisier gates.
print("\nPurification ranges at p = 0.99")
for proto in bp.PROTOCOLS:
    r = an.purification_range(proto, 0.99)
    print(f"  {proto:7s} F in [{r.F_min:.6f}, {r.F_max:.6f}]  p_min = {an.threshold_p(proto):.5f}")

# Gain curve for the noisiest setting, as the `purify curve` subcommand tabulates.
print("\nBBPSSW gain F'-F at p = 0.97")
nz = depolarizing(0.97)
for F in np.linspace(0.5, 1.0, 6):
    print(f"  F={F:.2f}  gain={bp.bbpssw_step(F, noise=nz).fidelity - F:+.5f}")
