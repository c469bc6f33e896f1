"""Independent oracles used to cross-check the solver.

Nothing here calls the FFT-based transforms or the stepper: each oracle is
written from the defining sums so that agreement with the main path is
meaningful.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

__all__ = [
    "OracleResult",
    "recurrence_oracle",
    "quadrature_oracle",
    "dense_operator_oracle",
    "dense_integer_laplacian",
    "empirical_growth",
]

DENSE_MAX_N = 16


@dataclass(frozen=True)
class OracleResult:
    name: str
    deviation: float
    tolerance: float
    context: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.deviation <= self.tolerance)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: deviation {self.deviation:.3e} (tol {self.tolerance:.1e})"


def recurrence_oracle(q, u0, u1, steps):
    """Iterate the scalar three-term recurrence of a linear mode.

    Returns ``steps + 1`` complex values ``u_0 .. u_steps``.
    """
    if steps < 2:
        raise ConfigError("steps must be >= 2")
    lead = 1.5 + q.mu * q.tau + q.kappa * q.tau
    mid = 2.0 + 2.0 * q.rho * q.tau + 2.0 * q.kappa * q.tau
    last = 0.5 + q.rho * q.tau + q.kappa * q.tau
    seq = [complex(u0), complex(u1)]
    for _ in range(2, steps + 1):
        seq.append((mid * seq[-1] - last * seq[-2]) / lead)
    return np.array(seq)


def empirical_growth(seq, window=20):
    """Per-step growth rate ``(max |u_n| over the last window)**(1/N)`` of a sequence from ``|u_0| = 1``."""
    n = len(seq) - 1
    tail = float(np.max(np.abs(seq[-window:])))
    if tail == 0.0:
        return 0.0
    if not math.isfinite(tail):
        return math.inf
    return tail ** (1.0 / n)


def quadrature_oracle(values, lengths):
    """Rectangle-rule L2 norm ``sqrt(sum f**2 h1 h2)`` of nodal values."""
    values = np.asarray(values, dtype=float)
    n1, n2 = values.shape
    h1 = lengths[0] / n1
    h2 = lengths[1] / n2
    total = 0.0
    for v in values.ravel():
        total += v * v
    return math.sqrt(total * h1 * h2)


def _dense_apply(values, lengths, weight):
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if values.shape != (n, n):
        raise ConfigError("dense oracle needs a square array")
    if n > DENSE_MAX_N:
        raise ConfigError(f"dense oracle limited to n <= {DENSE_MAX_N}, got {n}")
    modes = range(-(n // 2), n // 2)
    theta = [2.0 * math.pi * j / n for j in range(n)]
    out = np.zeros((n, n), dtype=complex)
    for k in modes:
        for l in modes:
            c = 0j
            for j1 in range(n):
                for j2 in range(n):
                    c += values[j1, j2] * cmath.exp(-1j * (k * theta[j1] + l * theta[j2]))
            c /= n * n
            w = weight(2.0 * math.pi * k / lengths[0], 2.0 * math.pi * l / lengths[1])
            if w == 0.0 or c == 0:
                continue
            c *= w
            for j1 in range(n):
                for j2 in range(n):
                    out[j1, j2] += c * cmath.exp(1j * (k * theta[j1] + l * theta[j2]))
    return out.real


def dense_operator_oracle(values, alpha, lengths=(2.0 * math.pi, 2.0 * math.pi)):
    """``(-Laplacian)**(alpha/2)`` on nodal values by explicit mode-by-mode sums (no FFT)."""
    if not 1.0 < alpha <= 2.0:
        raise ConfigError(f"alpha must lie in (1, 2], got {alpha}")
    return _dense_apply(values, lengths, lambda a, b: (a * a + b * b) ** (alpha / 2.0))


def dense_integer_laplacian(values, lengths=(2.0 * math.pi, 2.0 * math.pi)):
    """Plain ``-Laplacian`` by the same explicit sums, symbol ``a**2 + b**2``."""
    return _dense_apply(values, lengths, lambda a, b: a * a + b * b)
