"""Periodic grids, Fourier transforms and the fractional Laplacian symbol.

Conventions
-----------
A rectangle ``[a1, b1) x [a2, b2)`` is sampled on ``n x n`` nodes
``x1_j = a1 + j*L1/n`` (no duplicated endpoint). Physical values are stored
as an ``(n, n)`` array indexed ``[j1, j2]`` (x1 index first, row-major).

Modal coefficients use the normalisation

    u_hat[k, l] = (1/n**2) * sum_j u(x_j) exp(-i(k*t1_j + l*t2_j)),

with ``t = 2*pi*(x - a)/L`` the angular coordinate measured from the lower
corner, so ``u_hat[0, 0]`` is the mean of the samples. On a general rectangle
the wavenumber of mode ``(k, l)`` is ``(2*pi*k/L1, 2*pi*l/L2)``; on
``(0, 2*pi)**2`` this is the integer pair itself.

Coefficients are kept in the native FFT storage order. Use
:func:`mode_to_index` / :func:`index_to_mode` to move between the
mathematical band ``-n/2 <= k <= n/2 - 1`` and array positions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ComputationError, ConfigError

__all__ = [
    "GridSpec",
    "SpectralField",
    "PhysicalField",
    "mode_to_index",
    "index_to_mode",
    "forward_transform",
    "inverse_transform",
    "multiplier",
    "multiplier_array",
    "apply_fractional_laplacian",
    "apply_laplacian_power",
    "project",
    "resample",
    "dealias",
    "l2_norm",
    "hr_seminorm",
    "inner_product",
    "is_conjugate_symmetric",
    "IMAG_RESIDUE_TOL",
]

#: Largest imaginary residue (per unit magnitude) tolerated by inverse_transform.
IMAG_RESIDUE_TOL = 1e-10


def mode_to_index(k, n):
    """Storage index of mathematical mode ``k`` on an ``n``-point axis."""
    return k % n


def index_to_mode(i, n):
    """Mathematical mode of storage index ``i``; inverse of :func:`mode_to_index`."""
    i = i % n
    return i if i < n // 2 else i - n


def _check_alpha(alpha):
    if not 1.0 < alpha <= 2.0:
        raise ConfigError(f"alpha must lie in (1, 2], got {alpha!r}")


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic ``n x n`` grid on a rectangle.

    Parameters
    ----------
    n : int
        Nodes (and retained modes) per axis; even and at least 4.
    x1_range, x2_range : tuple of float
        Half-open intervals ``[a, b)`` of the periodic cell.
    """

    n: int
    x1_range: tuple = (0.0, 2.0 * math.pi)
    x2_range: tuple = (0.0, 2.0 * math.pi)

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise ConfigError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.n < 4 or self.n % 2:
            raise ConfigError(f"n must be even and >= 4, got {self.n}")
        for name in ("x1_range", "x2_range"):
            a, b = (float(v) for v in getattr(self, name))
            if not (math.isfinite(a) and math.isfinite(b)) or b <= a:
                raise ConfigError(f"{name} must be a finite interval with b > a, got {(a, b)}")
            object.__setattr__(self, name, (a, b))

    @classmethod
    def square(cls, n, a=0.0, b=2.0 * math.pi):
        """Grid on ``[a, b)**2``."""
        return cls(n, (a, b), (a, b))

    @property
    def lengths(self):
        return (self.x1_range[1] - self.x1_range[0], self.x2_range[1] - self.x2_range[0])

    @property
    def area(self):
        L1, L2 = self.lengths
        return L1 * L2

    @property
    def spacing(self):
        L1, L2 = self.lengths
        return (L1 / self.n, L2 / self.n)

    @property
    def wavenumber_scale(self):
        """Factors ``(2*pi/L1, 2*pi/L2)`` turning mode numbers into wavenumbers."""
        L1, L2 = self.lengths
        return (2.0 * math.pi / L1, 2.0 * math.pi / L2)

    def same_domain(self, other):
        return self.x1_range == other.x1_range and self.x2_range == other.x2_range

    def with_n(self, n):
        return GridSpec(n, self.x1_range, self.x2_range)

    @cached_property
    def axes(self):
        """1-D node coordinates along x1 and x2."""
        h1, h2 = self.spacing
        j = np.arange(self.n)
        return (self.x1_range[0] + j * h1, self.x2_range[0] + j * h2)

    @cached_property
    def mesh(self):
        """Node coordinates ``(X1, X2)`` with ``ij`` indexing."""
        X1, X2 = np.meshgrid(*self.axes, indexing="ij")
        X1.flags.writeable = False
        X2.flags.writeable = False
        return X1, X2

    @cached_property
    def modes(self):
        """Integer mode numbers per storage index (FFT order)."""
        k = np.array([index_to_mode(i, self.n) for i in range(self.n)])
        k.flags.writeable = False
        return k

    @cached_property
    def symbol(self):
        """``(s1*k)**2 + (s2*l)**2`` for every stored mode, shape ``(n, n)``."""
        s1, s2 = self.wavenumber_scale
        k = s1 * self.modes
        l = s2 * self.modes
        lam = k[:, None] ** 2 + l[None, :] ** 2
        lam.flags.writeable = False
        return lam

    def band_mask(self, m):
        """Boolean mask of stored modes inside ``[-m/2, m/2 - 1]**2``."""
        inside = (self.modes >= -(m // 2)) & (self.modes <= m // 2 - 1)
        return inside[:, None] & inside[None, :]

    def sample(self, func):
        """Evaluate ``func(X1, X2)`` at the nodes and wrap it as a field."""
        X1, X2 = self.mesh
        values = np.broadcast_to(np.asarray(func(X1, X2), dtype=float), (self.n, self.n))
        return PhysicalField(self, np.array(values))


def _same_grid(a, b):
    if a.grid != b.grid:
        raise ConfigError(f"grid mismatch: {a.grid} vs {b.grid}")


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Modal coefficients of a field on ``grid`` (FFT storage order)."""

    grid: GridSpec
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.grid.n, self.grid.n):
            raise ConfigError(f"coefficient array has shape {c.shape}, expected {(self.grid.n,) * 2}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((grid.n, grid.n), dtype=complex))

    @classmethod
    def from_modes(cls, grid, modes):
        """Build a field from a ``{(k, l): value}`` mapping in band indices."""
        c = np.zeros((grid.n, grid.n), dtype=complex)
        for (k, l), value in modes.items():
            if not (-grid.n // 2 <= k < grid.n // 2 and -grid.n // 2 <= l < grid.n // 2):
                raise ConfigError(f"mode {(k, l)} outside the band of n={grid.n}")
            c[mode_to_index(k, grid.n), mode_to_index(l, grid.n)] = value
        return cls(grid, c)

    def coeff(self, k, l):
        """Coefficient of mode ``(k, l)`` given in band indices."""
        n = self.grid.n
        return self.coeffs[mode_to_index(k, n), mode_to_index(l, n)]

    def __add__(self, other):
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return SpectralField(self.grid, self.coeffs / scalar)

    def __neg__(self):
        return SpectralField(self.grid, -self.coeffs)


@dataclass(frozen=True, eq=False)
class PhysicalField:
    """Real nodal values on ``grid``, array indexed ``[j1, j2]``."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n, self.grid.n):
            raise ConfigError(f"value array has shape {v.shape}, expected {(self.grid.n,) * 2}")
        object.__setattr__(self, "values", v)

    def is_finite(self):
        return bool(np.isfinite(self.values).all())


def forward_transform(f):
    """Physical values to modal coefficients; ``u_hat[0, 0]`` is the mean."""
    if not f.is_finite():
        raise ComputationError("forward_transform received non-finite values")
    n = f.grid.n
    return SpectralField(f.grid, np.fft.fft2(f.values) / n**2)


def inverse_transform(s, tol=IMAG_RESIDUE_TOL):
    """Synthesize nodal values ``sum u_hat exp(i(k t1 + l t2))``.

    The imaginary part left by the synthesis is discarded when it is below
    ``tol * max(1, max|Re u|)``; a larger residue means the coefficients were
    not conjugate symmetric and raises :class:`ComputationError`.
    """
    n = s.grid.n
    z = np.fft.ifft2(s.coeffs) * n**2
    real = z.real
    scale = max(1.0, float(np.max(np.abs(real)))) if np.isfinite(real).all() else 1.0
    residue = float(np.max(np.abs(z.imag)))
    if not residue <= tol * scale:
        raise ComputationError(
            f"imaginary residue {residue:.3e} exceeds {tol:.1e} (x{scale:.3g}); "
            "coefficients are not conjugate symmetric"
        )
    return PhysicalField(s.grid, real)


def multiplier(grid, k, l, alpha, k_diff=1.0):
    """Diffusion symbol ``k_diff * ((s1 k)**2 + (s2 l)**2)**(alpha/2)`` of one mode."""
    _check_alpha(alpha)
    n = grid.n
    if not (-n // 2 <= k < n // 2 and -n // 2 <= l < n // 2):
        raise ConfigError(f"mode {(k, l)} outside the band of n={n}")
    s1, s2 = grid.wavenumber_scale
    lam = (s1 * k) ** 2 + (s2 * l) ** 2
    if alpha == 2.0:
        return k_diff * lam
    return k_diff * lam ** (alpha / 2.0)


def multiplier_array(grid, alpha, k_diff=1.0):
    """:func:`multiplier` evaluated for every stored mode."""
    _check_alpha(alpha)
    if alpha == 2.0:
        return k_diff * grid.symbol
    return k_diff * grid.symbol ** (alpha / 2.0)


def apply_fractional_laplacian(s, alpha, k_diff=1.0):
    """Apply ``k_diff * (-Laplacian)**(alpha/2)``; ``k_diff=1`` is the bare operator."""
    return SpectralField(s.grid, s.coeffs * multiplier_array(s.grid, alpha, k_diff))


def apply_laplacian_power(s, r):
    """Apply ``(-Laplacian)**r`` for any real ``r >= 0`` (``r = 0`` is the identity)."""
    if r < 0:
        raise ConfigError(f"power must be >= 0, got {r}")
    if r == 0:
        return s
    return SpectralField(s.grid, s.coeffs * s.grid.symbol**r)


def project(s, m):
    """Orthogonal projection onto modes ``[-m/2, m/2 - 1]**2`` (coefficient truncation).

    For ``m < n`` the kept band is asymmetric, so the result is generally not
    the transform of a real field.
    """
    if int(m) != m or m % 2 or not 4 <= m <= s.grid.n:
        raise ConfigError(f"projection size must be even with 4 <= m <= {s.grid.n}, got {m}")
    if m == s.grid.n:
        return s
    return SpectralField(s.grid, np.where(s.grid.band_mask(int(m)), s.coeffs, 0.0))


def resample(s, grid):
    """Move coefficients to a grid with the same domain and a different ``n``.

    Going coarser keeps the target band (``P_m``); going finer pads with zeros.
    """
    if not s.grid.same_domain(grid):
        raise ConfigError(f"cannot resample between domains {s.grid} and {grid}")
    n_src, n_dst = s.grid.n, grid.n
    if n_src == n_dst:
        return SpectralField(grid, s.coeffs)
    m = min(n_src, n_dst)
    band = np.arange(-(m // 2), m // 2)
    src = band % n_src
    dst = band % n_dst
    out = np.zeros((n_dst, n_dst), dtype=complex)
    out[np.ix_(dst, dst)] = s.coeffs[np.ix_(src, src)]
    return SpectralField(grid, out)


def dealias(s):
    """2/3-rule filter: zero modes with ``|k|`` or ``|l|`` above ``n/3``."""
    keep = np.abs(s.grid.modes) <= s.grid.n // 3
    return SpectralField(s.grid, np.where(keep[:, None] & keep[None, :], s.coeffs, 0.0))


def l2_norm(s):
    """Continuous L2 norm over the rectangle, via Parseval."""
    return math.sqrt(s.grid.area * float(np.sum(np.abs(s.coeffs) ** 2)))


def hr_seminorm(s, r):
    """``|u|_r``: modes weighted by ``lambda**r``, zero mode excluded."""
    if r < 0:
        raise ConfigError(f"seminorm order must be >= 0, got {r}")
    weights = s.grid.symbol**r
    weights = np.where(s.grid.symbol == 0.0, 0.0, weights)
    return math.sqrt(s.grid.area * float(np.sum(weights * np.abs(s.coeffs) ** 2)))


def inner_product(u, v):
    """Continuous L2 inner product ``integral u * conj(v)``."""
    _same_grid(u, v)
    return u.grid.area * complex(np.sum(u.coeffs * np.conj(v.coeffs)))


def is_conjugate_symmetric(s, rtol=1e-12):
    """True when ``u_hat[-k, -l] == conj(u_hat[k, l])`` up to ``rtol`` (relative to max)."""
    n = s.grid.n
    reflect = (-np.arange(n)) % n
    mirrored = np.conj(s.coeffs[np.ix_(reflect, reflect)])
    scale = max(float(np.max(np.abs(s.coeffs))), np.finfo(float).tiny)
    return bool(np.max(np.abs(s.coeffs - mirrored)) <= rtol * scale)
