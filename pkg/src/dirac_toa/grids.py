"""Momentum grids, spinor fields on them, and shared grid numerics.

Grids are staggered uniform samplings of [-p_max, p_max]: p = 0 is never a
sample and every sample has its exact negative on the grid, so the parity
operator is an exact index permutation. Derivatives are order-4 centered
finite differences with order-4 one-sided stencils at the boundary rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SingularGrid(ValueError):
    """Grid contains p = 0 where an inverse-momentum factor is required."""


class TailMass(ValueError):
    """State does not decay at the momentum-grid edges."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MomentumGrid:
    """Symmetric staggered momentum samples; use :meth:`make` to construct."""

    samples: np.ndarray

    def __post_init__(self):
        s = _readonly(np.asarray(self.samples, dtype=float))
        object.__setattr__(self, "samples", s)
        if s.ndim != 1 or s.size < 8:
            raise ValueError("grid needs at least 8 samples")
        if not np.array_equal(s, -s[::-1]):
            raise ValueError("samples must close exactly under negation")
        d = np.diff(s)
        if np.any(d <= 0) or not np.allclose(d, d[0], rtol=1e-12, atol=0.0):
            raise ValueError("samples must be uniformly increasing")

    @staticmethod
    def make(p_max: float, count: int) -> "MomentumGrid":
        if count < 8 or count % 2:
            raise ValueError("count must be even and >= 8")
        if p_max <= 0:
            raise ValueError("p_max must be positive")
        dp = 2.0 * p_max / count
        pos = (np.arange(count // 2) + 0.5) * dp
        return MomentumGrid(np.concatenate([-pos[::-1], pos]))

    @property
    def count(self) -> int:
        return self.samples.size

    @property
    def dp(self) -> float:
        return float(self.samples[1] - self.samples[0])

    @property
    def p_max(self) -> float:
        return float(self.samples[-1]) + 0.5 * self.dp

    def contains_zero(self) -> bool:
        return bool(np.any(self.samples == 0.0))

    def positive_half(self) -> np.ndarray:
        return self.samples[self.samples > 0]


@dataclass(frozen=True)
class SpinorGrid:
    """Two-component complex wavefunction sampled on a momentum grid."""

    grid: MomentumGrid
    upper: np.ndarray
    lower: np.ndarray

    def __post_init__(self):
        u = _readonly(np.asarray(self.upper, dtype=complex))
        l = _readonly(np.asarray(self.lower, dtype=complex))
        if u.shape != (self.grid.count,) or l.shape != (self.grid.count,):
            raise ValueError("component arrays must match the grid length")
        object.__setattr__(self, "upper", u)
        object.__setattr__(self, "lower", l)

    @staticmethod
    def from_components(grid: MomentumGrid, upper, lower) -> "SpinorGrid":
        return SpinorGrid(grid, upper, lower)

    @staticmethod
    def single(grid: MomentumGrid, values, component: int = 0) -> "SpinorGrid":
        z = np.zeros(grid.count, dtype=complex)
        if component == 0:
            return SpinorGrid(grid, values, z)
        return SpinorGrid(grid, z, values)

    def norm(self) -> float:
        w = self.grid.dp
        return float(
            np.sqrt(w * np.sum(np.abs(self.upper) ** 2 + np.abs(self.lower) ** 2))
        )

    def density(self) -> np.ndarray:
        return np.abs(self.upper) ** 2 + np.abs(self.lower) ** 2

    def __add__(self, other: "SpinorGrid") -> "SpinorGrid":
        return SpinorGrid(self.grid, self.upper + other.upper, self.lower + other.lower)

    def __sub__(self, other: "SpinorGrid") -> "SpinorGrid":
        return SpinorGrid(self.grid, self.upper - other.upper, self.lower - other.lower)

    def scale(self, s) -> "SpinorGrid":
        return SpinorGrid(self.grid, s * self.upper, s * self.lower)


def grid_norm_diff(a: SpinorGrid, b: SpinorGrid) -> float:
    return (a - b).norm()


def relative_diff(a: SpinorGrid, b: SpinorGrid) -> float:
    ref = max(a.norm(), b.norm())
    if ref == 0.0:
        return 0.0
    return (a - b).norm() / ref


def derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Order-4 first derivative on a uniform grid (5-point stencils)."""
    f = np.asarray(values)
    out = np.empty_like(f, dtype=complex)
    out[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    out[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
    out[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h)
    out[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * h)
    out[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * h)
    return out


def spinor_derivative(phi: SpinorGrid) -> SpinorGrid:
    h = phi.grid.dp
    return SpinorGrid(phi.grid, derivative(phi.upper, h), derivative(phi.lower, h))


def gaussian_bump(grid: MomentumGrid, center: float, width: float) -> np.ndarray:
    return np.exp(-0.5 * ((grid.samples - center) / width) ** 2).astype(complex)


def smooth_bump(grid: MomentumGrid, lo: float, hi: float, edge: float | None = None) -> np.ndarray:
    """C-infinity bump exactly supported on [lo, hi] (Planck tapers both ends).

    Compact support matters for operators carrying 1/p factors: a Gaussian
    tail reaching the innermost staggered samples gets amplified by 1/p^2.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    if edge is None:
        edge = 0.3 * (hi - lo)
    p = grid.samples
    out = np.zeros(grid.count)
    inside = (p > lo) & (p < hi)
    s = np.zeros_like(out)
    s[inside] = np.minimum((p[inside] - lo) / edge, 1.0)
    s[inside] = np.minimum(s[inside], np.minimum((hi - p[inside]) / edge, 1.0))
    band = inside & (s > 0.0) & (s < 1.0)
    out[inside] = 1.0
    z = np.clip(1.0 / s[band] - 1.0 / (1.0 - s[band]), -700.0, 700.0)
    out[band] = 1.0 / (1.0 + np.exp(z))
    return out.astype(complex)


def planck_window(grid: MomentumGrid, fraction: float = 0.15) -> np.ndarray:
    """Smooth (C-infinity) taper from 1 to exactly 0 over the outer edge band.

    `fraction` is the tapered share of [0, p_max] at each edge in |p|.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be in (0, 1)")
    p = np.abs(grid.samples)
    pm = grid.p_max
    lo, hi = pm * (1.0 - fraction), pm
    w = np.ones_like(p)
    w[p >= hi] = 0.0
    band = (p > lo) & (p < hi)
    # Planck taper from 1 at the inner boundary to 0 at the grid edge
    s = (p[band] - lo) / (hi - lo)
    z = np.clip(1.0 / (1.0 - s) - 1.0 / s, -700.0, 700.0)
    w[band] = 1.0 / (1.0 + np.exp(z))
    return w


def tail_mass_fraction(phi: SpinorGrid, band: int | None = None) -> float:
    """Share of |phi|^2 sitting in the outermost samples on each side."""
    if band is None:
        band = max(4, phi.grid.count // 512)
    rho = phi.density()
    total = float(np.sum(rho))
    if total == 0.0:
        return 0.0
    edge = float(np.sum(rho[:band]) + np.sum(rho[-band:]))
    return edge / total


def check_tail_mass(phi: SpinorGrid, limit: float = 1e-8) -> float:
    frac = tail_mass_fraction(phi)
    if frac >= limit:
        raise TailMass(f"edge tail mass fraction {frac:.3e} >= {limit:.1e}")
    return frac
