"""Matrix-coefficient polynomials in the symmetrized position-momentum basis.

Basis operators are indexed by (m, n): p-power m (Laurent) and q-power n in
symmetric (Weyl) ordering, with (0, 0) the identity. A polynomial is a finite
canonical map (m, n) -> 2x2 matrix of exact Sym scalars. Multiplication by the
momentum operator obeys

    p . T[m,n] = T[m+1,n] - (i hbar n / 2) T[m,n-1]
    T[m,n] . p = T[m+1,n] + (i hbar n / 2) T[m,n-1]

and the bracket with the Hamiltonian c A p + m0 c^2 B follows from these rules
plus the Pauli (anti)commutators. A momentum-representation evaluator covers
the index set (m >= -1, n <= 1) actually used by the arrival-time operators.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Tuple

import numpy as np

from .exact import QQi, Sym
from .grids import SingularGrid, SpinorGrid, spinor_derivative
from .pauli import ConstraintViolation, DiracPair, Mat2, anticommutator, commutator, sigma

Key = Tuple[int, int]


class UnsupportedTerm(ValueError):
    """Momentum-representation evaluation requested outside (m >= -1, n <= 1)."""


_SYM_ZERO_MAT = sigma(0, "sym").scale(Sym.zero())


def zero_matrix_sym() -> Mat2:
    return _SYM_ZERO_MAT


class OperatorPoly:
    """Canonical finite sum of matrix coefficients times basis operators."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Dict[Key, Mat2] | None = None):
        canon: Dict[Key, Mat2] = {}
        if terms:
            for key, mat in terms.items():
                if not mat.is_zero():
                    canon[(int(key[0]), int(key[1]))] = mat
        object.__setattr__(self, "_terms", dict(sorted(canon.items())))

    def __setattr__(self, name, value):
        raise AttributeError("OperatorPoly is immutable")

    @staticmethod
    def zero() -> "OperatorPoly":
        return OperatorPoly()

    @staticmethod
    def single(m: int, n: int, mat: Mat2) -> "OperatorPoly":
        return OperatorPoly({(m, n): mat})

    @property
    def terms(self) -> Dict[Key, Mat2]:
        return self._terms

    def keys(self) -> Iterable[Key]:
        return self._terms.keys()

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, m: int, n: int) -> Mat2:
        return self._terms.get((m, n), _SYM_ZERO_MAT)

    def _merge(self, other: "OperatorPoly", sign: int) -> "OperatorPoly":
        out = dict(self._terms)
        for key, mat in other._terms.items():
            add = mat if sign > 0 else -mat
            out[key] = out[key] + add if key in out else add
        return OperatorPoly(out)

    def __add__(self, other: "OperatorPoly") -> "OperatorPoly":
        return self._merge(other, +1)

    def __sub__(self, other: "OperatorPoly") -> "OperatorPoly":
        return self._merge(other, -1)

    def __neg__(self) -> "OperatorPoly":
        return OperatorPoly({k: -m for k, m in self._terms.items()})

    def scale(self, s) -> "OperatorPoly":
        s = Sym.coerce(s)
        return OperatorPoly({k: m.scale(s) for k, m in self._terms.items()})

    def mat_left(self, mat: Mat2) -> "OperatorPoly":
        """Compose with a constant matrix on the left: M . X."""
        return OperatorPoly({k: mat @ m for k, m in self._terms.items()})

    def mat_right(self, mat: Mat2) -> "OperatorPoly":
        """Compose with a constant matrix on the right: X . M."""
        return OperatorPoly({k: m @ mat for k, m in self._terms.items()})

    def canonical(self) -> "OperatorPoly":
        return OperatorPoly(self._terms)

    def __eq__(self, other):
        if not isinstance(other, OperatorPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __repr__(self):
        if not self._terms:
            return "OperatorPoly(0)"
        bits = [f"T[{m},{n}]" for (m, n) in self._terms]
        return f"OperatorPoly({' + '.join(bits)})"


def _hbar_shift_coeff(n: int, sign: int) -> Sym:
    # sign * i hbar n / 2
    return Sym.mono(QQi(0, Fraction(sign * n, 2)), hbar=1)


def bd_left_mul_p(poly: OperatorPoly) -> OperatorPoly:
    """Left momentum product: each C T[m,n] -> C T[m+1,n] - (i hbar n/2) C T[m,n-1]."""
    out: Dict[Key, Mat2] = {}
    for (m, n), mat in poly.terms.items():
        _accumulate(out, (m + 1, n), mat)
        if n >= 1:
            _accumulate(out, (m, n - 1), mat.scale(_hbar_shift_coeff(n, -1)))
    return OperatorPoly(out)


def bd_right_mul_p(poly: OperatorPoly) -> OperatorPoly:
    """Right momentum product: each C T[m,n] -> C T[m+1,n] + (i hbar n/2) C T[m,n-1]."""
    out: Dict[Key, Mat2] = {}
    for (m, n), mat in poly.terms.items():
        _accumulate(out, (m + 1, n), mat)
        if n >= 1:
            _accumulate(out, (m, n - 1), mat.scale(_hbar_shift_coeff(n, +1)))
    return OperatorPoly(out)


def _accumulate(store: Dict[Key, Mat2], key: Key, mat: Mat2) -> None:
    store[key] = store[key] + mat if key in store else mat


_SYM_C = Sym.mono(1, c=1)
_SYM_M0C2 = Sym.mono(1, c=2, m0=1)


def commutator_with_hamiltonian(poly: OperatorPoly, pair: DiracPair) -> OperatorPoly:
    """Exact bracket [c A p + m0 c^2 B, X] in canonical form.

    Each coefficient C at (m, n) contributes c [A, C] at (m+1, n), the
    anticommutator term -(i hbar c n / 2) {A, C} at (m, n-1), and
    m0 c^2 [B, C] at (m, n).
    """
    if not pair.exact:
        raise ConstraintViolation("the exact bracket needs a rational pair")
    a = pair.matrix_a("sym")
    b = pair.matrix_b("sym")
    out: Dict[Key, Mat2] = {}
    for (m, n), mat in poly.terms.items():
        _accumulate(out, (m + 1, n), commutator(a, mat).scale(_SYM_C))
        if n >= 1:
            coeff = Sym.mono(QQi(0, Fraction(-n, 2)), hbar=1, c=1)
            _accumulate(out, (m, n - 1), anticommutator(a, mat).scale(coeff))
        _accumulate(out, (m, n), commutator(b, mat).scale(_SYM_M0C2))
    return OperatorPoly(out)


def _coefficient_arrays(poly: OperatorPoly, params) -> Dict[Key, np.ndarray]:
    evaluated = {}
    for key, mat in poly.terms.items():
        evaluated[key] = np.array(
            [[mat[0, 0].evaluate(params), mat[0, 1].evaluate(params)],
             [mat[1, 0].evaluate(params), mat[1, 1].evaluate(params)]],
            dtype=complex,
        )
    return evaluated


def apply_in_momentum_rep(poly: OperatorPoly, psi: SpinorGrid, params) -> SpinorGrid:
    """Act on a momentum-sampled spinor with q = i hbar d/dp, p = multiplication.

    Supported index set: m >= -1 with n in {0, 1}. In symmetric ordering

        T[m,0] psi = p^m psi
        T[m,1] psi = i hbar p^m psi' + (i hbar m / 2) p^(m-1) psi

    which reduces to the closed actions of the arrival-time terms, e.g.
    T[-1,1] psi = (i hbar / 2)((1/p) psi' + (psi / p)').
    """
    p = psi.grid.samples
    has_negative = any(m < 0 for (m, n) in poly.keys())
    for (m, n) in poly.keys():
        if m < -1 or n > 1 or n < 0:
            raise UnsupportedTerm(f"no momentum-representation action for T[{m},{n}]")
    if has_negative and psi.grid.contains_zero():
        raise SingularGrid("grid contains p = 0 but the operator carries 1/p factors")

    coeffs = _coefficient_arrays(poly, params)
    need_derivative = any(n == 1 for (_, n) in poly.keys())
    dpsi = spinor_derivative(psi) if need_derivative else None
    ihbar = 1j * params.hbar

    out_u = np.zeros(psi.grid.count, dtype=complex)
    out_l = np.zeros(psi.grid.count, dtype=complex)
    for (m, n), cmat in coeffs.items():
        if n == 0:
            fu = p**m * psi.upper
            fl = p**m * psi.lower
        else:
            fu = ihbar * p**m * dpsi.upper + (ihbar * m / 2.0) * p ** (m - 1) * psi.upper
            fl = ihbar * p**m * dpsi.lower + (ihbar * m / 2.0) * p ** (m - 1) * psi.lower
        out_u += cmat[0, 0] * fu + cmat[0, 1] * fl
        out_l += cmat[1, 0] * fu + cmat[1, 1] * fl
    return SpinorGrid(psi.grid, out_u, out_l)


def serialize_operator_poly(poly: OperatorPoly) -> str:
    """Stable exact-text form: one block per (m, n), entries as Sym strings."""
    lines = ["operator-poly v1", f"terms {len(poly.terms)}"]
    for (m, n), mat in poly.terms.items():
        lines.append(f"T[{m},{n}]")
        for i in range(2):
            for j in range(2):
                lines.append(f"  ({i},{j}) = {mat[i, j]}")
    return "\n".join(lines) + "\n"
