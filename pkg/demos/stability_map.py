"""
Where the stabilized scheme is stable
=====================================

A linear reaction G(u) = rho*u turns each Fourier mode into a three-term
recurrence. Its characteristic roots decide stability, and the stabilization
weight kappa shifts them back inside the unit circle.
"""

from fracrd import StabilityQuery, is_stable, kappa_threshold, practical_kappa, unconditional_kappa
from fracrd.stability import stability_map

rho = -8.0

# The constant mode (mu = 0) is the hardest one. It needs kappa > (-3 rho)/4 - 1/tau.
for tau in (1 / 8, 1 / 4, 1 / 2):
    need = kappa_threshold(0.0, rho, tau)
    print(f"tau={tau:<6g} needs kappa > {need:g}")
    for kappa in (need - 0.5, need, need + 0.5):
        if kappa >= 0:
            rep = is_stable(StabilityQuery(0.0, rho, kappa, tau))
            print(f"    kappa={kappa:<5g} {rep.verdict!s:<9} max|root| = {rep.max_modulus:.6f}")

print("stable for every tau once kappa >", unconditional_kappa(rho))
print("stable for every tau <= 1/4 once kappa >", practical_kappa(rho, 0.25))

# A coarse text map: '#' stable, '.' unstable, '=' marginal.
smap = stability_map([0.0], rho, (0.1, 1.0), (0.0, 8.0), (10, 33))
marks = {"Stable": "#", "Unstable": ".", "Marginal": "="}
print("\n  tau   kappa 0 .. 8")
for tau, row in zip(smap.taus, smap.verdicts):
    print(f"{tau:6.2f}  " + "".join(marks[str(v)] for v in row))
