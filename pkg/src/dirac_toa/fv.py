"""Diagonalizing transform U(p), its derivative, and the transformed operator.

U(p) = (E_p sigma_3 + H(p)) / sqrt(2 E_p (E_p + alpha_3 p c + beta_3 m0 c^2))
is hermitian and involutive, and conjugates H(p) = c A p + m0 c^2 B into
sigma_3 E_p. Conjugating the arrival-time operator numerically must reproduce
the closed-form split into a sigma_3-weighted derivative part (drift,
potential) plus a scalar momentum-dependent part t0; both routes are exposed
so the agreement is testable.

The transform denominator can decay like m0^2 c^3 / (2|p|) when alpha_3 is
near +-1, so evaluation is guarded: points with
E_p + alpha_3 p c + beta_3 m0 c^2 < 1e-6 E_p raise NearSingularU (scalar) or
are reported through the field mask (vectorized).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import MomentumGrid, SingularGrid, SpinorGrid, derivative, spinor_derivative
from .pauli import DiracPair, Mat2
from .params import PhysParams

GUARD_RATIO = 1e-6


class NearSingularU(ValueError):
    """Transform denominator below the conditioning guard."""


class SingularAtZero(ValueError):
    """Operator with a 1/p factor evaluated at p = 0."""


def transform_denominator(p, pair: DiracPair, params: PhysParams):
    a3 = float(pair.alpha[2])
    b3 = float(pair.beta[2])
    e = params.energy(p)
    return e + a3 * np.asarray(p) * params.c + b3 * params.m0 * params.c**2


def _h_components(p, pair: DiracPair, params: PhysParams):
    """Pauli components (h1, h2, h3) of H(p) = c A p + m0 c^2 B."""
    p = np.asarray(p, dtype=float)
    a1, a2, a3 = pair.alpha_floats()
    b1, b2, b3 = pair.beta_floats()
    mc2 = params.m0 * params.c**2
    return (
        params.c * p * a1 + mc2 * b1,
        params.c * p * a2 + mc2 * b2,
        params.c * p * a3 + mc2 * b3,
    )


def h_psi_matrix(p: float, pair: DiracPair, params: PhysParams) -> Mat2:
    h1, h2, h3 = _h_components(p, pair, params)
    return Mat2(
        complex(h3), complex(h1) - 1j * complex(h2),
        complex(h1) + 1j * complex(h2), -complex(h3),
    )


def apply_h_psi(psi: SpinorGrid, pair: DiracPair, params: PhysParams) -> SpinorGrid:
    """Pointwise action of H(p) on a momentum-sampled spinor."""
    h1, h2, h3 = _h_components(psi.grid.samples, pair, params)
    off = h1 - 1j * h2
    out_u = h3 * psi.upper + off * psi.lower
    out_l = np.conj(off) * psi.upper - h3 * psi.lower
    return SpinorGrid(psi.grid, out_u, out_l)


def apply_h_phi(phi: SpinorGrid, params: PhysParams) -> SpinorGrid:
    """Diagonalized Hamiltonian sigma_3 E_p acting pointwise."""
    e = params.energy(phi.grid.samples)
    return SpinorGrid(phi.grid, e * phi.upper, -e * phi.lower)


def u_matrix(p: float, pair: DiracPair, params: PhysParams) -> Mat2:
    """U(p) as an explicit 2x2 complex matrix (scalar momentum)."""
    e = float(params.energy(p))
    d = float(transform_denominator(p, pair, params))
    if d < GUARD_RATIO * e:
        raise NearSingularU(f"denominator {d:.3e} below guard at p = {p:.6g}")
    h1, h2, h3 = (float(x) for x in _h_components(p, pair, params))
    norm = 1.0 / np.sqrt(2.0 * e * d)
    return Mat2(
        (e + h3) * norm + 0j,
        (h1 - 1j * h2) * norm,
        (h1 + 1j * h2) * norm,
        (-e - h3) * norm + 0j,
    )


@dataclass(frozen=True)
class UMatrixField:
    """U(p) sampled over a grid, with the per-point guard mask."""

    grid: MomentumGrid
    u00: np.ndarray
    u01: np.ndarray
    u10: np.ndarray
    u11: np.ndarray
    denom: np.ndarray
    ok: np.ndarray

    @staticmethod
    def make(grid: MomentumGrid, pair: DiracPair, params: PhysParams) -> "UMatrixField":
        p = grid.samples
        e = params.energy(p)
        d = transform_denominator(p, pair, params)
        ok = d >= GUARD_RATIO * e
        safe_d = np.where(ok, d, 1.0)
        h1, h2, h3 = _h_components(p, pair, params)
        norm = 1.0 / np.sqrt(2.0 * e * safe_d)
        return UMatrixField(
            grid=grid,
            u00=(e + h3) * norm + 0j,
            u01=(h1 - 1j * h2) * norm,
            u10=(h1 + 1j * h2) * norm,
            u11=(-e - h3) * norm + 0j,
            denom=d,
            ok=ok,
        )

    @property
    def guarded_count(self) -> int:
        return int(np.sum(~self.ok))

    def apply(self, phi: SpinorGrid) -> SpinorGrid:
        out_u = self.u00 * phi.upper + self.u01 * phi.lower
        out_l = self.u10 * phi.upper + self.u11 * phi.lower
        return SpinorGrid(phi.grid, out_u, out_l)


def du_inv_dp(p: float, pair: DiracPair, params: PhysParams) -> Mat2:
    """Closed-form d/dp of U(p)^-1 (= U itself, by involution).

    Splits into the derivative of the unnormalized E sigma_3 + H part and the
    derivative of the normalization, without expanding the matrix products.
    """
    c = params.c
    e = float(params.energy(p))
    a3 = float(pair.alpha[2])
    d = float(transform_denominator(p, pair, params))
    if d < GUARD_RATIO * e:
        raise NearSingularU(f"denominator {d:.3e} below guard at p = {p:.6g}")

    def mat(m: Mat2) -> np.ndarray:
        return np.array([[m[0, 0], m[0, 1]], [m[1, 0], m[1, 1]]], dtype=complex)

    sigma3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    a_num = mat(pair.matrix_a("numeric"))
    h = mat(h_psi_matrix(p, pair, params))

    term1 = (d**-0.5 / np.sqrt(2.0)) * (
        (p * c**2 / (2.0 * e**1.5)) * sigma3
        + (c / e**0.5) * a_num
        - (p * c**2 / (2.0 * e**2.5)) * h
    )
    term2 = (d**-1.5 / (2.0 * np.sqrt(2.0))) * (p * c**2 / e + a3 * c) * (
        (e * sigma3 + h) / e**0.5
    )
    out = term1 - term2
    return Mat2(out[0, 0], out[0, 1], out[1, 0], out[1, 1])


def t_hat_coeffs(p, params: PhysParams):
    """(drift, potential): coefficients of sigma_3 d/dp and sigma_3 in T-hat.

    drift = -i hbar E_p / (p c^2), potential = i hbar m0^2 c^2 / (2 p^2 E_p).
    """
    p = np.asarray(p, dtype=float)
    if np.any(p == 0.0):
        raise SingularAtZero("t_hat coefficients diverge at p = 0")
    e = params.energy(p)
    drift = -1j * params.hbar * e / (p * params.c**2)
    potential = 1j * params.hbar * params.m0**2 * params.c**2 / (2.0 * p**2 * e)
    if p.ndim == 0:
        return complex(drift), complex(potential)
    return drift, potential


def apply_t_hat(phi: SpinorGrid, params: PhysParams) -> SpinorGrid:
    """Closed-form T-hat action: drift sigma_3 d/dp + potential sigma_3."""
    drift, potential = t_hat_coeffs(phi.grid.samples, params)
    d = spinor_derivative(phi)
    out_u = drift * d.upper + potential * phi.upper
    out_l = -drift * d.lower - potential * phi.lower
    return SpinorGrid(phi.grid, out_u, out_l)


def t0_scalar(p, pair: DiracPair, params: PhysParams):
    """Scalar factor of T0: -(a1 b2 - a2 b1) hbar m0 c / (2 p (E_p + a3 p c + b3 m0 c^2))."""
    p = np.asarray(p, dtype=float)
    if np.any(p == 0.0):
        raise SingularAtZero("t0 diverges at p = 0")
    e = params.energy(p)
    d = transform_denominator(p, pair, params)
    if np.any(d < GUARD_RATIO * e):
        raise NearSingularU("t0 denominator below guard")
    a1, a2, _ = pair.alpha_floats()
    b1, b2, _ = pair.beta_floats()
    det = a1 * b2 - a2 * b1
    value = -(det / d) * (params.hbar * params.m0 * params.c / (2.0 * p))
    if p.ndim == 0:
        return complex(value)
    return value.astype(complex)


def apply_t0(phi: SpinorGrid, pair: DiracPair, params: PhysParams) -> SpinorGrid:
    value = t0_scalar(phi.grid.samples, pair, params)
    return SpinorGrid(phi.grid, value * phi.upper, value * phi.lower)


def apply_t_phi_closed(phi: SpinorGrid, pair: DiracPair, params: PhysParams) -> SpinorGrid:
    """Closed-form transformed arrival-time action T-hat + T0."""
    return apply_t_hat(phi, params) + apply_t0(phi, pair, params)


def toa_psi_action(psi: SpinorGrid, pair: DiracPair, params: PhysParams) -> SpinorGrid:
    """Momentum-representation action of the untransformed operator:

    -m0 B (i hbar / 2)((1/p) psi' + (psi/p)') - (1/c) A i hbar psi'.
    """
    p = psi.grid.samples
    if psi.grid.contains_zero():
        raise SingularGrid("action carries 1/p factors but the grid contains p = 0")
    ihbar = 1j * params.hbar
    d = spinor_derivative(psi)

    def component(u, du):
        over_p = derivative(u / p, psi.grid.dp)
        return 0.5 * ihbar * (du / p + over_p)

    s_u = component(psi.upper, d.upper)
    s_l = component(psi.lower, d.lower)

    a1, a2, a3 = pair.alpha_floats()
    b1, b2, b3 = pair.beta_floats()
    b_off = b1 - 1j * b2
    a_off = a1 - 1j * a2

    # -m0 B applied to (s_u, s_l)
    t1_u = -params.m0 * (b3 * s_u + b_off * s_l)
    t1_l = -params.m0 * (np.conj(b_off) * s_u - b3 * s_l)
    # -(1/c) A applied to i hbar psi'
    t2_u = -(1.0 / params.c) * (a3 * ihbar * d.upper + a_off * ihbar * d.lower)
    t2_l = -(1.0 / params.c) * (np.conj(a_off) * ihbar * d.upper - a3 * ihbar * d.lower)
    return SpinorGrid(psi.grid, t1_u + t2_u, t1_l + t2_l)


def conjugate_toa_numeric(
    pair: DiracPair, params: PhysParams, psi: SpinorGrid
) -> SpinorGrid:
    """Numeric conjugation U (T (U^-1 phi)) with the derivative of U^-1 phi
    taken implicitly by differentiating the product."""
    field = UMatrixField.make(psi.grid, pair, params)
    if field.guarded_count:
        raise NearSingularU(
            f"{field.guarded_count} grid points below the transform guard"
        )
    w = field.apply(psi)  # U^-1 = U by involution
    tw = toa_psi_action(w, pair, params)
    return field.apply(tw)
