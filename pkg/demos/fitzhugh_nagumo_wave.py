"""
An excitable front in FitzHugh-Nagumo
=====================================

A corner of excited u meets a refractory strip of v, which breaks the front
into a curling wave. The recovery variable does not diffuse.
"""

import numpy as np

from fracrd import GridSpec, StepperConfig, run
from fracrd.models import fitzhugh_nagumo, initial_condition

grid = GridSpec.square(128, 0.0, 2.5)
model = fitzhugh_nagumo(1e-4, mu=0.1, epsilon=0.01, beta=0.5, gamma=1.0, delta=0.0, grid=grid)


def report(t, n, fields):
    u = fields[0].values
    print(f"t={t:5g}  excited fraction {np.mean(u > 0.5):.3f}  u in [{u.min():+.3f}, {u.max():+.3f}]")


for alpha in (2.0, 1.5):
    print(f"alpha = {alpha}")
    cfg = StepperConfig(tau=0.5, kappa=2.0, alpha=alpha, t_end=200.0, snapshot_times=(50.0, 100.0, 150.0, 200.0))
    run(model, initial_condition("fhn_strips", grid), cfg, report)
