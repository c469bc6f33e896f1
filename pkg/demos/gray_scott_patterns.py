"""
Gray-Scott spots from a single disc
===================================

A small disc of v seeded in u = 1 grows into a pattern. The script writes PGM
images of v on the unit square at a few times. Inverted, so v is dark.
Takes about half a minute at N = 256.
"""

from pathlib import Path

from fracrd import GridSpec, StepperConfig, run
from fracrd.io import emit_heatmap
from fracrd.models import gray_scott, initial_condition

out = Path("gray_scott_frames")
out.mkdir(exist_ok=True)

grid = GridSpec.square(256, -1.0, 2.0)
model = gray_scott(2e-5, 1e-5, 0.03, 0.063, grid)


def save(t, n, fields):
    v = fields[1]
    emit_heatmap(v, out / f"v_{int(t):05d}.pgm", value_range=(0.0, 0.4), crop=(0, 1, 0, 1), invert=True)
    print(f"t={t:6g}  max v = {v.values.max():.3f}")


cfg = StepperConfig(tau=0.5, kappa=2.0, alpha=1.5, t_end=2000.0, snapshot_times=(0.0, 500.0, 1000.0, 2000.0))
run(model, initial_condition("gs_disc", grid), cfg, save)
print("frames in", out.resolve())
