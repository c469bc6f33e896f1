"""
Second order in time, spectral in space
=======================================

Fractional Allen-Cahn with u(0) = sin(2 x1) cos(2 x2) on (0, 2 pi)**2.
Halving tau should cut the error by four. Adding Fourier modes should shrink
the error faster than any fixed power of N.
"""

from fracrd.config import RunConfig
from fracrd.studies import spatial_study, temporal_study

base = dict(model="allen_cahn", alpha=1.7, kappa=1.0, t_end=2.0, model_params={"k_alpha": 0.01})

# Time: fine-step reference at the same grid.
cfg = RunConfig(n=32, tau=0.1, reference="tau", tau_ref=0.0005, taus=(1 / 10, 1 / 20, 1 / 40, 1 / 80), **base)
print(temporal_study(cfg).to_csv())

# Space: fine-grid reference at a fixed small step.
cfg = RunConfig(n=8, tau=0.01, reference="n", n_ref=64, ns=(8, 12, 16, 20, 24), **base)
print(spatial_study(cfg).to_csv())
