"""Stabilized semi-implicit second-order time stepping.

Every Fourier mode is advanced by the closed-form update

    u^n = [(2 + 2 tau kappa) u^(n-1) - (1/2 + tau kappa) u^(n-2)
           + tau (2 g^(n-1) - g^(n-2))] / (3/2 + tau mu + tau kappa)

where ``mu`` is the mode's diffusion symbol and ``g`` the projected reaction
term, evaluated pseudo-spectrally at the time level of its own field. The
first level comes from one forward-Euler step built on the PDE right-hand side.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import ComputationError, ConfigError, DivergedError
from .spectral import (
    PhysicalField,
    SpectralField,
    _check_alpha,
    dealias,
    forward_transform,
    inverse_transform,
    multiplier_array,
)

__all__ = [
    "StepperConfig",
    "StepperState",
    "RunSummary",
    "d1",
    "d2",
    "first_step",
    "initial_state",
    "step",
    "step_system",
    "run",
    "MAX_ABS",
]

#: Magnitude above which a trajectory is declared diverged.
MAX_ABS = 1e8


@dataclass(frozen=True)
class StepperConfig:
    """Time-stepping parameters.

    ``t_end / tau`` must be an integer to within ``1e-9``. Snapshot times are
    mapped to the nearest step.
    """

    tau: float
    kappa: float
    alpha: float
    t_end: float
    snapshot_times: tuple = ()
    dealias: bool = False
    max_abs: float = MAX_ABS
    debug: bool = False

    def __post_init__(self):
        if not self.tau > 0:
            raise ConfigError(f"tau must be > 0, got {self.tau}")
        if not self.kappa >= 0:
            raise ConfigError(f"kappa must be >= 0, got {self.kappa}")
        _check_alpha(self.alpha)
        if not self.t_end > 0:
            raise ConfigError(f"t_end must be > 0, got {self.t_end}")
        ratio = self.t_end / self.tau
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio) or round(ratio) < 1:
            raise ConfigError(f"tau={self.tau} does not divide t_end={self.t_end}")
        times = tuple(float(t) for t in self.snapshot_times)
        if list(times) != sorted(times) or any(t < 0 or t > self.t_end * (1 + 1e-12) for t in times):
            raise ConfigError(f"snapshot times must be sorted and within [0, t_end], got {times}")
        object.__setattr__(self, "snapshot_times", times)

    @property
    def n_steps(self):
        return int(round(self.t_end / self.tau))


@dataclass(frozen=True)
class StepperState:
    """Two-level history for the recurrence.

    ``step_index`` is the level of ``u_prev1`` (the newest stored field), so a
    state right after the first step has ``step_index == 1``. Field entries
    are tuples with one :class:`SpectralField` per model component.
    """

    step_index: int
    u_prev1: tuple
    u_prev2: tuple
    g_prev1: tuple
    g_prev2: tuple
    t_prev1: float
    t_prev2: float


@dataclass
class RunSummary:
    final: tuple
    final_time: float
    steps: int
    max_abs: float
    wall_time: float
    diverged: bool = False
    diverged_step: Optional[int] = None
    snapshots: list = field(default_factory=list)

    @property
    def final_physical(self):
        return tuple(inverse_transform(s) for s in self.final)


def d1(u_n, u_nm1, tau):
    """First-order backward difference ``(u^n - u^(n-1)) / tau``."""
    if u_n.grid != u_nm1.grid:
        raise ConfigError("d1: grid mismatch")
    return SpectralField(u_n.grid, (u_n.coeffs - u_nm1.coeffs) / tau)


def d2(u_n, u_nm1, u_nm2, tau):
    """Second-order backward difference ``(3u^n - 4u^(n-1) + u^(n-2)) / (2 tau)``."""
    if not u_n.grid == u_nm1.grid == u_nm2.grid:
        raise ConfigError("d2: grid mismatch")
    return SpectralField(u_n.grid, (3.0 * u_n.coeffs - 4.0 * u_nm1.coeffs + u_nm2.coeffs) / (2.0 * tau))


@lru_cache(maxsize=64)
def _symbol(grid, alpha, k_diff):
    mu = multiplier_array(grid, alpha, k_diff)
    mu.flags.writeable = False
    return mu


def _as_tuple(fields):
    if isinstance(fields, (SpectralField, PhysicalField)):
        return (fields,), True
    return tuple(fields), False


def _to_spectral(f):
    return forward_transform(f) if isinstance(f, PhysicalField) else f


def _check_fields(fields, model):
    if len(fields) != model.arity:
        raise ConfigError(f"{model.name} needs {model.arity} field(s), got {len(fields)}")
    for f in fields:
        if f.grid != model.grid:
            raise ConfigError(f"field grid {f.grid} does not match model grid {model.grid}")


def _check_alpha_agrees(model, cfg):
    a = model.params.get("alpha")
    if a is not None and a != cfg.alpha:
        raise ConfigError(f"model {model.name} was built for alpha={a}, stepper has alpha={cfg.alpha}")


def _nodal(fields, step_index, cfg):
    out = []
    for s in fields:
        if not np.isfinite(s.coeffs).all():
            raise DivergedError(f"non-finite coefficients at step {step_index}", step_index)
        try:
            p = inverse_transform(s)
        except ComputationError as exc:
            raise DivergedError(f"step {step_index}: {exc}", step_index) from exc
        if float(np.max(np.abs(p.values))) > cfg.max_abs:
            raise DivergedError(f"|u| exceeded {cfg.max_abs:g} at step {step_index}", step_index)
        out.append(p)
    return tuple(out)


def _reaction(model, nodal, t, cfg):
    """Projected reaction terms ``P_N G`` from nodal values (pseudo-spectral)."""
    grid = model.grid
    terms = model.evaluate(tuple(p.values for p in nodal), t)
    out = []
    for g in terms:
        g = np.broadcast_to(np.asarray(g, dtype=float), (grid.n, grid.n))
        s = forward_transform(PhysicalField(grid, g))
        out.append(dealias(s) if cfg.dealias else s)
    return tuple(out)


def first_step(u0, model, cfg):
    """``U^1 = P_N(u0 + tau * du/dt(0))`` with ``du/dt`` from the PDE right-hand side.

    ``u0`` is one field (scalar model) or a sequence of fields; the result has
    the same shape.
    """
    fields, single = _as_tuple(u0)
    fields = tuple(_to_spectral(f) for f in fields)
    _check_fields(fields, model)
    _check_alpha_agrees(model, cfg)
    g0 = _reaction(model, _nodal(fields, 0, cfg), 0.0, cfg)
    out = tuple(
        SpectralField(
            model.grid,
            u.coeffs + cfg.tau * (-_symbol(model.grid, cfg.alpha, k) * u.coeffs + g.coeffs),
        )
        for u, g, k in zip(fields, g0, model.diffusion)
    )
    return out[0] if single else out


def initial_state(u0, model, cfg):
    """History after the first step: levels 0 and 1 with their reaction terms."""
    fields, _ = _as_tuple(u0)
    fields = tuple(_to_spectral(f) for f in fields)
    _check_fields(fields, model)
    _check_alpha_agrees(model, cfg)
    g0 = _reaction(model, _nodal(fields, 0, cfg), 0.0, cfg)
    u1 = first_step(fields, model, cfg)
    g1 = _reaction(model, _nodal(u1, 1, cfg), cfg.tau, cfg)
    return StepperState(1, u1, fields, g1, g0, cfg.tau, 0.0)


def _advance(state, model, cfg):
    if state.step_index < 1:
        raise ConfigError("the stepper needs two history levels (step_index >= 1)")
    if cfg.debug:
        for u, g, t in ((state.u_prev1, state.g_prev1, state.t_prev1), (state.u_prev2, state.g_prev2, state.t_prev2)):
            again = _reaction(model, _nodal(u, state.step_index, cfg), t, cfg)
            for a, b in zip(again, g):
                if not np.allclose(a.coeffs, b.coeffs, rtol=1e-12, atol=1e-14):
                    raise ComputationError("stored reaction terms are inconsistent with the stored fields")
    tau, kappa = cfg.tau, cfg.kappa
    a1 = 2.0 + 2.0 * tau * kappa
    a2 = 0.5 + tau * kappa
    new = []
    for u1, u2, g1, g2, k in zip(state.u_prev1, state.u_prev2, state.g_prev1, state.g_prev2, model.diffusion):
        mu = _symbol(model.grid, cfg.alpha, k)
        rhs = a1 * u1.coeffs - a2 * u2.coeffs + tau * (2.0 * g1.coeffs - g2.coeffs)
        new.append(SpectralField(model.grid, rhs / (1.5 + tau * mu + tau * kappa)))
    n = state.step_index + 1
    t_n = n * tau
    nodal = _nodal(new, n, cfg)
    g_new = _reaction(model, nodal, t_n, cfg)
    new_state = StepperState(n, tuple(new), state.u_prev1, g_new, state.g_prev1, t_n, state.t_prev1)
    return tuple(new), new_state, nodal


def step(state, model, cfg):
    """Advance a scalar model by one step; returns ``(U^n, new_state)``."""
    if model.arity != 1:
        raise ConfigError("step() is for scalar models; use step_system()")
    new, new_state, _ = _advance(state, model, cfg)
    return new[0], new_state


def step_system(state, model, cfg):
    """Advance a two-component model by one step; returns ``((U^n, V^n), new_state)``.

    Each component uses its own diffusion coefficient; both reaction terms are
    evaluated on the full ``(U, V)`` pair.
    """
    if model.arity != 2:
        raise ConfigError("step_system() is for two-component models")
    new, new_state, _ = _advance(state, model, cfg)
    return new, new_state


def _snapshot_steps(cfg):
    wanted = {}
    for t in cfg.snapshot_times:
        wanted.setdefault(int(round(t / cfg.tau)), []).append(t)
    return wanted


def run(model, u0, cfg, sink=None):
    """Integrate from ``t = 0`` to ``cfg.t_end``.

    ``sink(t, step_index, fields)`` is called at each requested snapshot
    (``fields`` is a tuple of :class:`PhysicalField`). A divergence raises
    :class:`DivergedError` whose ``summary`` describes the partial run.
    """
    fields, _ = _as_tuple(u0)
    fields = tuple(_to_spectral(f) for f in fields)
    _check_fields(fields, model)
    _check_alpha_agrees(model, cfg)
    wanted = _snapshot_steps(cfg)
    start = time.perf_counter()
    summary = RunSummary(final=fields, final_time=0.0, steps=0, max_abs=0.0, wall_time=0.0)

    def record(n, t, spec, nodal):
        summary.final, summary.final_time, summary.steps = spec, t, n
        summary.max_abs = max(summary.max_abs, max(float(np.max(np.abs(p.values))) for p in nodal))
        if n in wanted and sink is not None:
            sink(t, n, nodal)
            summary.snapshots.append((t, n))

    try:
        record(0, 0.0, fields, _nodal(fields, 0, cfg))
        state = initial_state(fields, model, cfg)
        record(1, cfg.tau, state.u_prev1, _nodal(state.u_prev1, 1, cfg))
        for _ in range(2, cfg.n_steps + 1):
            new, state, nodal = _advance(state, model, cfg)
            record(state.step_index, state.t_prev1, new, nodal)
    except DivergedError as exc:
        summary.diverged = True
        summary.diverged_step = exc.step_index
        summary.wall_time = time.perf_counter() - start
        exc.summary = summary
        raise
    summary.wall_time = time.perf_counter() - start
    return summary
