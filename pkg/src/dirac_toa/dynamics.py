"""Momentum-space dynamics, parity analysis, eigenfunctions and densities.

Evolution under the diagonalized Hamiltonian is a pure phase per component;
positive- and negative-energy components never mix. Arrival-time
eigenfunctions are built on each momentum half-line by exact integration of
the first-order ODE

    drift(p) phi' + potential(p) phi = tau phi

via cumulative high-order quadrature of the integrating factor, then combined
into an even (non-nodal) or odd (nodal) state. Odd states have exactly zero
configuration-space density at the origin for all times; even states focus at
the origin at t = tau.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .fv import SingularAtZero, apply_t_hat, t_hat_coeffs
from .grids import (
    MomentumGrid,
    SpinorGrid,
    check_tail_mass,
    derivative,
    gaussian_bump,
    planck_window,
)
from .pauli import DiracPair
from .params import PhysParams

_X_CHUNK = 256


class SupportViolation(ValueError):
    """Test state support reaches p <= 0 or the grid edge."""


def evolve(phi: SpinorGrid, t: float, params: PhysParams) -> SpinorGrid:
    """Diagonal evolution: upper picks up e^{-i E t / hbar}, lower e^{+i E t / hbar}."""
    e = params.energy(phi.grid.samples)
    phase = np.exp(-1j * e * t / params.hbar)
    return SpinorGrid(phi.grid, phase * phi.upper, np.conj(phase) * phi.lower)


def parity_apply(phi: SpinorGrid) -> SpinorGrid:
    """Momentum inversion as the exact sample permutation p -> -p."""
    return SpinorGrid(phi.grid, phi.upper[::-1], phi.lower[::-1])


def parity_commutator(apply_op: Callable[[SpinorGrid], SpinorGrid], phi: SpinorGrid) -> SpinorGrid:
    """(Pi . op - op . Pi) phi for any grid operator."""
    return parity_apply(apply_op(phi)) - apply_op(parity_apply(phi))


def parity_t0_coefficient(p, pair: DiracPair, params: PhysParams):
    """Closed-form coefficient of [Pi, T0]: the commutator equals this times phi(-p)."""
    p = np.asarray(p, dtype=float)
    if np.any(p == 0.0):
        raise SingularAtZero("parity commutator coefficient diverges at p = 0")
    a1, a2, a3 = pair.alpha_floats()
    b1, b2, b3 = pair.beta_floats()
    det = a1 * b2 - a2 * b1
    e = params.energy(p)
    mc2 = params.m0 * params.c**2
    num = 2.0 * (e + mc2 * b3) * det
    den = (e + mc2 * b3) ** 2 - (p * params.c * a3) ** 2
    return (num / den) * (params.hbar * params.m0 * params.c / (2.0 * p))


def parity_t0_closed_form(phi: SpinorGrid, pair: DiracPair, params: PhysParams) -> SpinorGrid:
    coeff = parity_t0_coefficient(phi.grid.samples, pair, params)
    flipped = parity_apply(phi)
    return SpinorGrid(phi.grid, coeff * flipped.upper, coeff * flipped.lower)


def component_leakage(phi_in: SpinorGrid, phi_out: SpinorGrid) -> float:
    """Norm fraction leaked into the component that was zero on input."""
    w = phi_in.grid.dp
    un = np.sqrt(w * np.sum(np.abs(phi_in.upper) ** 2))
    ln = np.sqrt(w * np.sum(np.abs(phi_in.lower) ** 2))
    total = phi_in.norm()
    if total == 0.0:
        return 0.0
    if un >= ln:
        leaked = np.sqrt(w * np.sum(np.abs(phi_out.lower) ** 2))
    else:
        leaked = np.sqrt(w * np.sum(np.abs(phi_out.upper) ** 2))
    return float(leaked / total)


# ---------------------------------------------------------------------------
# configuration-space transform


@dataclass(frozen=True)
class PositionSpinor:
    x: np.ndarray
    upper: np.ndarray
    lower: np.ndarray

    def density(self) -> np.ndarray:
        return np.abs(self.upper) ** 2 + np.abs(self.lower) ** 2


def position_grid(x_max: float, count: int) -> np.ndarray:
    return np.linspace(-x_max, x_max, count)


def to_position(phi: SpinorGrid, x_grid: np.ndarray, params: PhysParams) -> PositionSpinor:
    """Componentwise quadrature Fourier transform to configuration space.

    Raises TailMass when the state has not decayed at the momentum-grid edge.
    """
    check_tail_mass(phi)
    p = phi.grid.samples
    w = phi.grid.dp / np.sqrt(2.0 * np.pi * params.hbar)
    x_grid = np.asarray(x_grid, dtype=float)
    out_u = np.empty(x_grid.size, dtype=complex)
    out_l = np.empty(x_grid.size, dtype=complex)
    wu = w * phi.upper
    wl = w * phi.lower
    for start in range(0, x_grid.size, _X_CHUNK):
        sl = slice(start, min(start + _X_CHUNK, x_grid.size))
        kernel = np.exp(1j * np.outer(x_grid[sl], p) / params.hbar)
        out_u[sl] = kernel @ wu
        out_l[sl] = kernel @ wl
    return PositionSpinor(x_grid, out_u, out_l)


# ---------------------------------------------------------------------------
# arrival-time eigenfunctions

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)


def _cumulative_integral(fn, points: np.ndarray) -> np.ndarray:
    """Cumulative integral of fn from points[0] along a uniform array,
    5-node Gauss-Legendre per interval (order 10)."""
    a = points[:-1]
    h = points[1:] - points[:-1]
    nodes = a[:, None] + np.outer(h, (_GL_NODES + 1.0) / 2.0)
    vals = fn(nodes)
    increments = (h / 2.0) * (vals @ _GL_WEIGHTS)
    out = np.empty(points.size, dtype=complex)
    out[0] = 0.0
    np.cumsum(increments, out=out[1:])
    return out


def toa_eigenfunction(
    tau: float,
    lam: int,
    branch: str,
    grid: MomentumGrid,
    params: PhysParams,
) -> SpinorGrid:
    """Arrival-time eigenfunction at eigenvalue tau on the lam energy branch.

    Solves the component ODE on p > 0 by integrating-factor quadrature and
    mirrors it evenly ("non-nodal") or oddly ("nodal") onto p < 0. lam = +1
    states live entirely in the upper component, lam = -1 in the lower.
    """
    if lam not in (+1, -1):
        raise ValueError("lam must be +1 or -1")
    if branch not in ("non-nodal", "nodal"):
        raise ValueError("branch must be 'non-nodal' or 'nodal'")
    if grid.contains_zero():
        raise SingularAtZero("eigenfunction ODE is singular at p = 0")

    def log_derivative(p):
        drift, potential = t_hat_coeffs(p, params)
        return (tau - lam * potential) / (lam * drift)

    pos = grid.positive_half()
    log_phi = _cumulative_integral(log_derivative, pos)
    # subtract the running real part's max to keep exp() comfortably scaled
    log_phi -= np.max(log_phi.real)
    phi_pos = np.exp(log_phi)
    sign = 1.0 if branch == "non-nodal" else -1.0
    values = np.concatenate([sign * phi_pos[::-1], phi_pos])
    out = SpinorGrid.single(grid, values, component=0 if lam == +1 else 1)
    return out.scale(1.0 / out.norm())


def eigen_residual(
    phi: SpinorGrid,
    tau: float,
    params: PhysParams,
    band: tuple[float, float],
) -> float:
    """Relative eigen-equation residual over the interior band p_lo <= |p| <= p_hi."""
    r = apply_t_hat(phi, params) - phi.scale(tau)
    mask = (np.abs(phi.grid.samples) >= band[0]) & (np.abs(phi.grid.samples) <= band[1])
    num = np.sqrt(np.sum(r.density()[mask]))
    den = np.sqrt(np.sum(phi.density()[mask]))
    if den == 0.0:
        raise SupportViolation("state has no support on the residual band")
    return float(num / den)


# ---------------------------------------------------------------------------
# densities


@dataclass(frozen=True)
class DensityField:
    """rho(x, t) on a rectangular grid; rho[i, j] = density at (t[i], x[j])."""

    x: np.ndarray
    t: np.ndarray
    rho: np.ndarray
    header: tuple = ()

    def total_probability(self) -> np.ndarray:
        dx = self.x[1] - self.x[0]
        return np.sum(self.rho, axis=1) * dx

    def to_csv(self) -> str:
        lines = [f"# {line}" for line in self.header]
        lines.append("x,t,rho")
        for i, t in enumerate(self.t):
            row = self.rho[i]
            ts = f"{t:.17g}"
            for j, x in enumerate(self.x):
                lines.append(f"{x:.17g},{ts},{row[j]:.17g}")
        return "\n".join(lines) + "\n"


def density_movie(
    phi0: SpinorGrid,
    t_grid: np.ndarray,
    x_grid: np.ndarray,
    params: PhysParams,
    window_fraction: float = 0.15,
    header: Iterable[str] = (),
) -> DensityField:
    """rho(x, t) of the evolved state, with a smooth edge window applied first.

    The window commutes with the (diagonal) evolution, so it is applied once
    to the initial state; its fraction is recorded in the CSV header.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    x_grid = np.asarray(x_grid, dtype=float)
    window = planck_window(phi0.grid, window_fraction)
    wphi = SpinorGrid(phi0.grid, window * phi0.upper, window * phi0.lower)
    check_tail_mass(wphi)

    p = phi0.grid.samples
    e = params.energy(p)
    w = phi0.grid.dp / np.sqrt(2.0 * np.pi * params.hbar)
    rho = np.zeros((t_grid.size, x_grid.size))
    for component, sign in ((wphi.upper, -1.0), (wphi.lower, +1.0)):
        if not np.any(component):
            continue
        phases = np.exp(sign * 1j * np.outer(e, t_grid) / params.hbar)
        weighted = (w * component)[:, None] * phases  # (p, t)
        for start in range(0, x_grid.size, _X_CHUNK):
            sl = slice(start, min(start + _X_CHUNK, x_grid.size))
            kernel = np.exp(1j * np.outer(x_grid[sl], p) / params.hbar)
            block = kernel @ weighted  # (x_chunk, t)
            rho[:, sl] += (np.abs(block) ** 2).T
    full_header = tuple(header) + (
        f"window-fraction: {window_fraction:.17g}",
        f"params: {params.label()}",
    )
    return DensityField(x=x_grid, t=t_grid, rho=rho, header=full_header)


def origin_density_series(
    phi0: SpinorGrid,
    t_grid: np.ndarray,
    params: PhysParams,
    window_fraction: float = 0.15,
) -> np.ndarray:
    """rho(x = 0, t) by direct quadrature (exact zero for odd states)."""
    t_grid = np.asarray(t_grid, dtype=float)
    window = planck_window(phi0.grid, window_fraction)
    e = params.energy(phi0.grid.samples)
    w = phi0.grid.dp / np.sqrt(2.0 * np.pi * params.hbar)
    out = np.zeros(t_grid.size)
    for component, sign in ((window * phi0.upper, -1.0), (window * phi0.lower, +1.0)):
        if not np.any(component):
            continue
        phases = np.exp(sign * 1j * np.outer(t_grid, e) / params.hbar)
        out += np.abs(phases @ (w * component)) ** 2
    return out


def origin_peak_time(t_grid: np.ndarray, origin_rho: np.ndarray) -> float:
    return float(np.asarray(t_grid)[int(np.argmax(origin_rho))])


def nodal_separation_series(field: DensityField) -> np.ndarray:
    """Distance between the density peaks on x > 0 and x < 0 at each time."""
    xpos = field.x > 0
    xneg = field.x < 0
    right = field.x[xpos][np.argmax(field.rho[:, xpos], axis=1)]
    left = field.x[xneg][np.argmax(field.rho[:, xneg], axis=1)]
    return right - left


def nodal_closing_time(field: DensityField) -> float:
    """Time at which the two nodal-branch peaks are closest.

    Peak positions are quantized by the x grid, so the separation series
    bottoms out on a plateau; the closing time is the plateau midpoint
    (the series is symmetric about the focusing time).
    """
    sep = nodal_separation_series(field)
    dx = field.x[1] - field.x[0]
    close = np.flatnonzero(sep <= np.min(sep) + dx)
    return float(0.5 * (field.t[close[0]] + field.t[close[-1]]))


# ---------------------------------------------------------------------------
# non-relativistic limit


def nonrel_limit_check(
    p_center: float,
    p_width: float,
    params: PhysParams,
    count: int = 2048,
) -> float:
    """Relative discrepancy between the arrival-time action and its
    non-relativistic limit -m0 T[-1,1] on a Gaussian at (p_center, p_width)."""
    if not p_center - 3.0 * p_width > 0.0:
        raise SupportViolation("need 0 < p_center - 3 p_width")
    grid = MomentumGrid.make(p_center + 10.0 * p_width, count)
    phi = SpinorGrid.single(grid, gaussian_bump(grid, p_center, p_width))
    t_full = apply_t_hat(phi, params)

    p = grid.samples
    du = derivative(phi.upper, grid.dp)
    ihbar = 1j * params.hbar
    nr_u = -params.m0 * (ihbar * du / p - ihbar * phi.upper / (2.0 * p**2))
    nr = SpinorGrid.single(grid, nr_u)

    denom = t_full.norm()
    if denom == 0.0:
        raise SupportViolation("arrival-time action vanished on the test state")
    return (t_full - nr).norm() / denom
