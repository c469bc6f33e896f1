"""Built-in reaction models, their default parameters and initial conditions.

A :class:`ReactionModel` bundles the pointwise reaction terms with the
diffusion coefficient of each component. Reaction callables receive a tuple
of nodal arrays (one per component) plus the time and return a tuple of the
same length, so scalar equations and two-component systems share one stepper.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import ConfigError
from .spectral import GridSpec, PhysicalField

__all__ = [
    "ReactionModel",
    "allen_cahn_reaction",
    "gray_scott_reaction",
    "fitzhugh_nagumo_reaction",
    "allen_cahn",
    "gray_scott",
    "fitzhugh_nagumo",
    "manufactured",
    "initial_condition",
    "INITIAL_CONDITIONS",
    "MODELS",
    "build_model",
]


@dataclass(frozen=True, eq=False)
class ReactionModel:
    """Reaction terms plus per-component diffusion coefficients on a grid.

    Attributes
    ----------
    name : str
    grid : GridSpec
    reaction : callable
        ``reaction(fields, t) -> tuple`` where ``fields`` is a tuple of nodal
        arrays.
    diffusion : tuple of float
        ``(K_alpha,)`` for scalar models, ``(K_u, K_v)`` for systems.
    params : mapping
        Named model parameters (for reporting and config round trips).
    linearization_rho : float, optional
        Linear rate used for stability advice, when one is meaningful.
    exact : callable, optional
        ``exact(t, grid)`` returning a tuple of :class:`PhysicalField`.
    """

    name: str
    grid: GridSpec
    reaction: Callable
    diffusion: tuple
    params: Mapping[str, float] = field(default_factory=dict)
    linearization_rho: Optional[float] = None
    exact: Optional[Callable] = None

    def __post_init__(self):
        diffusion = tuple(float(k) for k in self.diffusion)
        if len(diffusion) not in (1, 2):
            raise ConfigError(f"models have one or two components, got {len(diffusion)}")
        if any(not k >= 0 for k in diffusion):
            raise ConfigError(f"diffusion coefficients must be >= 0, got {diffusion}")
        if len(diffusion) == 1 and not diffusion[0] > 0:
            raise ConfigError("scalar models need K_alpha > 0")
        object.__setattr__(self, "diffusion", diffusion)
        object.__setattr__(self, "params", dict(self.params))

    @property
    def arity(self):
        return len(self.diffusion)

    def evaluate(self, fields, t):
        """Reaction terms at nodal values ``fields`` (tuple of arrays) and time ``t``."""
        out = tuple(self.reaction(tuple(fields), t))
        if len(out) != self.arity:
            raise ConfigError(f"{self.name}: reaction returned {len(out)} terms for arity {self.arity}")
        return out


# -- reaction terms ---------------------------------------------------------

def allen_cahn_reaction(u):
    """Double-well force ``u - u**3``."""
    return u - u**3


def gray_scott_reaction(u, v, f_rate, lambda_rate):
    """``(-u v**2 + F(1 - u), u v**2 - (F + lambda) v)``."""
    uv2 = u * v**2
    return -uv2 + f_rate * (1.0 - u), uv2 - (f_rate + lambda_rate) * v


def fitzhugh_nagumo_reaction(u, v, mu, epsilon, beta, gamma, delta):
    """``(u(1 - u)(u - mu) - v, epsilon(beta u - gamma v - delta))``."""
    return u * (1.0 - u) * (u - mu) - v, epsilon * (beta * u - gamma * v - delta)


def _scalar(func, fields, t):
    return (func(fields[0]),)


def _pair(func, fields, t):
    return func(fields[0], fields[1])


# -- model builders ---------------------------------------------------------

def allen_cahn(k_alpha, grid):
    """Fractional Allen-Cahn: ``G(u) = u - u**3``.

    ``linearization_rho`` is the slope at the unstable origin, ``G'(0) = 1``.
    """
    return ReactionModel(
        name="allen_cahn",
        grid=grid,
        reaction=partial(_scalar, allen_cahn_reaction),
        diffusion=(k_alpha,),
        params={"k_alpha": float(k_alpha)},
        linearization_rho=1.0,
    )


def gray_scott(k_u, k_v, f_rate, lambda_rate, grid):
    if f_rate < 0 or lambda_rate < 0:
        raise ConfigError("Gray-Scott rates must be >= 0")
    return ReactionModel(
        name="gray_scott",
        grid=grid,
        reaction=partial(_pair, partial(gray_scott_reaction, f_rate=f_rate, lambda_rate=lambda_rate)),
        diffusion=(k_u, k_v),
        params={"k_u": float(k_u), "k_v": float(k_v), "f_rate": float(f_rate), "lambda_rate": float(lambda_rate)},
    )


def fitzhugh_nagumo(k_u, mu, epsilon, beta, gamma, delta, grid):
    """FitzHugh-Nagumo with a non-diffusing recovery variable (``K_v = 0``)."""
    if not k_u > 0:
        raise ConfigError(f"k_u must be > 0, got {k_u}")
    react = partial(fitzhugh_nagumo_reaction, mu=mu, epsilon=epsilon, beta=beta, gamma=gamma, delta=delta)
    return ReactionModel(
        name="fitzhugh_nagumo",
        grid=grid,
        reaction=partial(_pair, react),
        diffusion=(k_u, 0.0),
        params={
            "k_u": float(k_u), "mu": float(mu), "epsilon": float(epsilon),
            "beta": float(beta), "gamma": float(gamma), "delta": float(delta),
        },
    )


def _on_domain(grid, x1_range, x2_range, tol=1e-12):
    return all(
        abs(a - b) <= tol * max(1.0, abs(b))
        for a, b in zip(grid.x1_range + grid.x2_range, tuple(x1_range) + tuple(x2_range))
    )


_TWO_PI = (0.0, 2.0 * math.pi)


def manufactured(k_alpha, alpha, grid):
    """Linear test problem with exact solution ``exp(-t) sin(x1 + x2)``.

    The forcing ``-8u + exp(-t)(7 + 2**(alpha/2) K) sin(x1 + x2)`` makes the
    exact solution satisfy the PDE; the explicit linear part gives
    ``linearization_rho = -8``.
    """
    if not _on_domain(grid, _TWO_PI, _TWO_PI):
        raise ConfigError(f"the manufactured model lives on (0, 2pi)^2, got {grid}")
    if not 1.0 < alpha <= 2.0:
        raise ConfigError(f"alpha must lie in (1, 2], got {alpha}")
    X1, X2 = grid.mesh
    shape = np.sin(X1 + X2)
    amplitude = -1.0 + 8.0 + 2.0 ** (alpha / 2.0) * k_alpha

    def reaction(fields, t):
        return (-8.0 * fields[0] + math.exp(-t) * amplitude * shape,)

    def exact(t, on_grid=None):
        g = grid if on_grid is None else on_grid
        return (g.sample(lambda x1, x2: math.exp(-t) * np.sin(x1 + x2)),)

    return ReactionModel(
        name="manufactured",
        grid=grid,
        reaction=reaction,
        diffusion=(k_alpha,),
        params={"k_alpha": float(k_alpha), "alpha": float(alpha)},
        linearization_rho=-8.0,
        exact=exact,
    )


# -- initial conditions -----------------------------------------------------

def _ac_case1(X1, X2):
    return (np.sin(2.0 * X1) * np.cos(2.0 * X2),)


def _ac_case2(X1, X2):
    return (np.exp(-X1**2 - X2**2),)


def _gs_disc(X1, X2):
    inside = (X1 - 0.5) ** 2 + (X2 - 0.5) ** 2 <= 0.04**2
    return np.where(inside, 0.5, 1.0), np.where(inside, 0.25, 0.0)


def _fhn_strips(X1, X2):
    u = np.where((X1 > 0) & (X1 <= 0.125) & (X2 > 0) & (X2 < 0.125), 1.0, 0.0)
    v = np.where((X1 > 0) & (X1 < 2.5) & (X2 >= 0.125) & (X2 < 2.5), 0.1, 0.0)
    return u, v


#: name -> (generator, x1_range, x2_range)
INITIAL_CONDITIONS = {
    "ac_case1": (_ac_case1, _TWO_PI, _TWO_PI),
    "ac_case2": (_ac_case2, (-20.0, 20.0), (-20.0, 20.0)),
    "gs_disc": (_gs_disc, (-1.0, 2.0), (-1.0, 2.0)),
    "fhn_strips": (_fhn_strips, (0.0, 2.5), (0.0, 2.5)),
}


def initial_condition(name, grid):
    """Sample a named initial condition at the nodes of ``grid``.

    Indicator-type data are evaluated pointwise with the interval ends
    open or closed exactly as in their definitions; no smoothing is applied.
    """
    try:
        gen, r1, r2 = INITIAL_CONDITIONS[name]
    except KeyError:
        raise ConfigError(f"unknown initial condition {name!r}; choose from {sorted(INITIAL_CONDITIONS)}") from None
    if not _on_domain(grid, r1, r2):
        raise ConfigError(f"initial condition {name!r} needs domain {r1} x {r2}, got {grid.x1_range} x {grid.x2_range}")
    X1, X2 = grid.mesh
    return tuple(PhysicalField(grid, np.array(v, dtype=float)) for v in gen(X1, X2))


# -- registry ---------------------------------------------------------------

@dataclass(frozen=True)
class ModelEntry:
    builder: Callable
    defaults: Mapping[str, float]
    default_ic: Optional[str]
    domain: tuple
    description: str


MODELS = {
    "allen_cahn": ModelEntry(
        lambda p, grid: allen_cahn(p["k_alpha"], grid),
        {"k_alpha": 0.01},
        "ac_case1",
        (_TWO_PI, _TWO_PI),
        "scalar, G(u) = u - u^3",
    ),
    "gray_scott": ModelEntry(
        lambda p, grid: gray_scott(p["k_u"], p["k_v"], p["f_rate"], p["lambda_rate"], grid),
        {"k_u": 2e-5, "k_v": 1e-5, "f_rate": 0.03, "lambda_rate": 0.063},
        "gs_disc",
        ((-1.0, 2.0), (-1.0, 2.0)),
        "system, G1 = -uv^2 + F(1-u), G2 = uv^2 - (F+lambda)v",
    ),
    "fitzhugh_nagumo": ModelEntry(
        lambda p, grid: fitzhugh_nagumo(p["k_u"], p["mu"], p["epsilon"], p["beta"], p["gamma"], p["delta"], grid),
        {"k_u": 1e-4, "mu": 0.1, "epsilon": 0.01, "beta": 0.5, "gamma": 1.0, "delta": 0.0},
        "fhn_strips",
        ((0.0, 2.5), (0.0, 2.5)),
        "system, G1 = u(1-u)(u-mu) - v, G2 = eps(beta u - gamma v - delta), K_v = 0",
    ),
    "manufactured": ModelEntry(
        lambda p, grid: manufactured(p["k_alpha"], p["alpha"], grid),
        {"k_alpha": 1.0},
        None,
        (_TWO_PI, _TWO_PI),
        "scalar, exact solution exp(-t) sin(x1 + x2); needs alpha",
    ),
}


def build_model(name, grid, **params):
    """Instantiate a registered model, filling unspecified parameters with defaults."""
    try:
        entry = MODELS[name]
    except KeyError:
        raise ConfigError(f"unknown model {name!r}; choose from {sorted(MODELS)}") from None
    merged = dict(entry.defaults)
    merged.update(params)
    try:
        return entry.builder(merged, grid)
    except KeyError as exc:
        raise ConfigError(f"model {name!r} requires parameter {exc.args[0]!r}") from None
