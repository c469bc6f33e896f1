"""Linear stability of the stabilized two-step scheme.

For a linear reaction ``G(u) = rho*u`` every Fourier mode obeys the
three-term recurrence

    p*U^n - b*U^(n-1) + c*U^(n-2) = 0,
    p = 3/2 + mu*tau + kappa*tau,
    b = 2 + 2*rho*tau + 2*kappa*tau,
    c = 1/2 + rho*tau + kappa*tau,

where ``mu`` is the mode's diffusion symbol. The mode is stable when both
roots of ``p*eta**2 - b*eta + c`` lie strictly inside the unit circle.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

__all__ = [
    "StabilityQuery",
    "StabilityReport",
    "Verdict",
    "StabilityMap",
    "recurrence_coefficients",
    "discriminant",
    "characteristic_roots",
    "is_stable",
    "kappa_threshold",
    "unconditional_kappa",
    "practical_kappa",
    "stability_map",
]

DEFAULT_TOL = 1e-12


class Verdict(enum.Enum):
    STABLE = "Stable"
    MARGINAL = "Marginal"
    UNSTABLE = "Unstable"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class StabilityQuery:
    """One mode's linear-stability question.

    ``mu`` is the diffusion symbol (``K * |k|**alpha``), ``rho`` the linear
    reaction rate, ``kappa`` the stabilization strength and ``tau`` the step.
    """

    mu: float
    rho: float
    kappa: float
    tau: float

    def __post_init__(self):
        if not self.mu >= 0:
            raise ConfigError(f"mu must be >= 0, got {self.mu}")
        if not self.tau > 0:
            raise ConfigError(f"tau must be > 0, got {self.tau}")
        if not self.kappa >= 0:
            raise ConfigError(f"kappa must be >= 0, got {self.kappa}")


@dataclass(frozen=True)
class StabilityReport:
    roots: tuple
    max_modulus: float
    verdict: Verdict
    discriminant: float


def recurrence_coefficients(q):
    """``(p, b, c)`` of ``p*eta**2 - b*eta + c = 0``."""
    p = 1.5 + q.mu * q.tau + q.kappa * q.tau
    b = 2.0 + 2.0 * q.rho * q.tau + 2.0 * q.kappa * q.tau
    c = 0.5 + q.rho * q.tau + q.kappa * q.tau
    return p, b, c


def discriminant(q):
    """Discriminant in the doubled normalisation ``(2p) eta**2 - 2b eta + 2c``."""
    _, b, c = recurrence_coefficients(q)
    return b**2 - (3.0 + 2.0 * q.mu * q.tau + 2.0 * q.kappa * q.tau) * (1.0 + 2.0 * q.rho * q.tau + 2.0 * q.kappa * q.tau)


def characteristic_roots(q):
    """Roots ``(eta_plus, eta_minus)`` of the characteristic quadratic.

    The smaller-magnitude root is recovered from the product ``c/p`` to avoid
    cancellation; a complex square root handles a negative discriminant.
    """
    p, b, c = recurrence_coefficients(q)
    delta = discriminant(q)
    sq = cmath.sqrt(delta)
    denom = 3.0 + 2.0 * q.mu * q.tau + 2.0 * q.kappa * q.tau
    if delta >= 0:
        # pick the sign that adds magnitudes, then use Vieta for the other root
        big = (b + math.copysign(sq.real, b)) / denom
        if big == 0:
            return complex(0.0), complex(0.0)
        small = (c / p) / big
        plus, minus = (big, small) if b >= 0 else (small, big)
        return complex(plus), complex(minus)
    return (b + sq) / denom, (b - sq) / denom


def is_stable(q, tol=DEFAULT_TOL):
    """Classify a query by the largest root modulus.

    Stable below ``1 - tol``, Marginal within ``tol`` of one, Unstable above.
    """
    roots = characteristic_roots(q)
    m = max(abs(r) for r in roots)
    if m < 1.0 - tol:
        verdict = Verdict.STABLE
    elif m <= 1.0 + tol:
        verdict = Verdict.MARGINAL
    else:
        verdict = Verdict.UNSTABLE
    return StabilityReport(roots=roots, max_modulus=m, verdict=verdict, discriminant=discriminant(q))


def kappa_threshold(mu, rho, tau):
    """Smallest stabilization keeping the mode stable: ``(-mu - 3 rho)/4 - 1/tau``."""
    if not tau > 0:
        raise ConfigError(f"tau must be > 0, got {tau}")
    return (-mu - 3.0 * rho) / 4.0 - 1.0 / tau


def unconditional_kappa(rho):
    """Stabilization that works for every step size and mode: ``-3 rho/4``."""
    return -3.0 * rho / 4.0


def practical_kappa(rho, tau_star):
    """Stabilization sufficient for all ``tau`` in ``(0, tau_star]``."""
    if not 0 < tau_star < 1:
        raise ConfigError(f"tau_star must lie in (0, 1), got {tau_star}")
    return -3.0 * rho / 4.0 - 1.0 / tau_star


@dataclass(frozen=True)
class StabilityMap:
    """Verdicts on a ``(tau, kappa)`` lattice.

    ``verdicts[i, j]`` refers to ``taus[i]`` and ``kappas[j]``; ``max_modulus``
    holds the worst root modulus over the supplied ``mu`` values, and
    ``boundary`` the closed-form threshold ``kappa_threshold(min mu, rho, tau)``.
    """

    taus: np.ndarray
    kappas: np.ndarray
    verdicts: np.ndarray
    max_modulus: np.ndarray
    boundary: np.ndarray
    rho: float

    def to_csv(self):
        lines = ["tau,kappa,max_modulus,verdict,kappa_threshold"]
        for i, tau in enumerate(self.taus):
            for j, kappa in enumerate(self.kappas):
                lines.append(
                    f"{tau:.17g},{kappa:.17g},{self.max_modulus[i, j]:.17g},"
                    f"{self.verdicts[i, j]},{self.boundary[i]:.17g}"
                )
        return "\n".join(lines) + "\n"


def _axis(rng, resolution):
    lo, hi = (float(v) for v in rng)
    if resolution == 1 or lo == hi:
        return np.array([lo])
    return np.linspace(lo, hi, resolution)


def stability_map(mu_values, rho, tau_range, kappa_range, resolution, tol=DEFAULT_TOL):
    """Sweep :func:`is_stable` over a ``(tau, kappa)`` lattice.

    ``resolution`` is an int (same for both axes) or a ``(n_tau, n_kappa)``
    pair. Each cell takes the worst (largest) root modulus over ``mu_values``.
    """
    mu_values = [float(m) for m in mu_values]
    if not mu_values:
        raise ConfigError("mu_values must not be empty")
    n_tau, n_kappa = (resolution, resolution) if np.isscalar(resolution) else resolution
    taus = _axis(tau_range, int(n_tau))
    kappas = _axis(kappa_range, int(n_kappa))
    modulus = np.empty((taus.size, kappas.size))
    verdicts = np.empty((taus.size, kappas.size), dtype=object)
    for i, tau in enumerate(taus):
        for j, kappa in enumerate(kappas):
            reports = [is_stable(StabilityQuery(mu, rho, kappa, tau), tol) for mu in mu_values]
            worst = max(reports, key=lambda r: r.max_modulus)
            modulus[i, j] = worst.max_modulus
            verdicts[i, j] = worst.verdict
    boundary = np.array([kappa_threshold(min(mu_values), rho, tau) for tau in taus])
    return StabilityMap(taus, kappas, verdicts, modulus, boundary, float(rho))
