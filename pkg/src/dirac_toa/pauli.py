"""Exact 2x2 complex matrix algebra, the Pauli basis, and Dirac pairs (A, B).

A Dirac pair is a pair of hermitian 2x2 matrices A, B with A^2 = B^2 = I and
{A, B} = 0, parameterized by orthonormal real 3-vectors (alpha, beta) in the
Pauli basis. Matrices come in three entry modes behind one interface: exact
Gaussian rationals ("exact"), the Laurent-monomial ring ("sym"), and complex
floats ("numeric"); the conjugacy derivation uses exact mode, grids numeric.
"""

from __future__ import annotations

import numbers
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

from .exact import QQi, Sym

NUMERIC_PAIR_TOL = 1e-12


class ConstraintViolation(ValueError):
    """Raised when (alpha, beta) fail the orthonormality constraints."""


class Mat2:
    """Immutable 2x2 matrix over any ring with +, -, * and conjugate()."""

    __slots__ = ("entries",)

    def __init__(self, a, b, c, d):
        object.__setattr__(self, "entries", (a, b, c, d))

    def __setattr__(self, name, value):
        raise AttributeError("Mat2 is immutable")

    @staticmethod
    def from_rows(rows) -> "Mat2":
        (a, b), (c, d) = rows
        return Mat2(a, b, c, d)

    def __getitem__(self, idx: Tuple[int, int]):
        i, j = idx
        return self.entries[2 * i + j]

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(*(x + y for x, y in zip(self.entries, other.entries)))

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(*(x - y for x, y in zip(self.entries, other.entries)))

    def __neg__(self) -> "Mat2":
        return Mat2(*(-x for x in self.entries))

    def __matmul__(self, other: "Mat2") -> "Mat2":
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return Mat2(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def scale(self, s) -> "Mat2":
        return Mat2(*(s * x for x in self.entries))

    def __mul__(self, s):
        return self.scale(s)

    __rmul__ = __mul__

    def trace(self):
        return self.entries[0] + self.entries[3]

    def dagger(self) -> "Mat2":
        a, b, c, d = self.entries
        return Mat2(a.conjugate(), c.conjugate(), b.conjugate(), d.conjugate())

    def map(self, fn) -> "Mat2":
        return Mat2(*(fn(x) for x in self.entries))

    def is_zero(self) -> bool:
        """Exact zero test; meaningful for QQi/Sym entries."""
        for x in self.entries:
            if hasattr(x, "is_zero"):
                if not x.is_zero():
                    return False
            elif x != 0:
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        a, b, c, d = self.entries
        return f"Mat2([[{a}, {b}], [{c}, {d}]])"


def _lift(x, kind: str):
    if kind == "exact":
        return QQi.coerce(x)
    if kind == "sym":
        return Sym.coerce(x)
    if kind == "numeric":
        return complex(x)
    raise ValueError(f"unknown entry kind {kind!r}")


def sigma(j: int, kind: str = "exact") -> Mat2:
    """Pauli matrix sigma_j (j = 0 is the identity) in the requested entry mode."""
    one = _lift(1, kind)
    zero = _lift(0, kind)
    if kind == "exact":
        i_unit = QQi(0, 1)
    elif kind == "sym":
        i_unit = Sym.mono(QQi(0, 1))
    else:
        i_unit = 1j
    if j == 0:
        return Mat2(one, zero, zero, one)
    if j == 1:
        return Mat2(zero, one, one, zero)
    if j == 2:
        return Mat2(zero, -i_unit, i_unit, zero)
    if j == 3:
        return Mat2(one, zero, zero, -one)
    raise ValueError("sigma index must be 0..3")


def _half(x):
    if isinstance(x, numbers.Complex):
        return x * 0.5
    return x * Fraction(1, 2)


def pauli_decompose(m: Mat2):
    """Coefficients (c0, c1, c2, c3) with m = sum_j c_j sigma_j.

    Uses c_j = trace(sigma_j m) / 2; exact for non-float entry rings.
    """
    a, b, c, d = m.entries
    c0 = _half(a + d)
    c1 = _half(b + c)
    c2 = _half((b - c) * _i_like(a))
    c3 = _half(a - d)
    return (c0, c1, c2, c3)


def _i_like(sample):
    # unit imaginary acting on the ring of `sample` (QQi multiplies every
    # exact ring in this package)
    if isinstance(sample, numbers.Complex):
        return 1j
    if isinstance(sample, Sym):
        return Sym.mono(QQi(0, 1))
    return QQi(0, 1)


def pauli_recompose(coeffs, kind: str = "exact") -> Mat2:
    out = sigma(0, kind).scale(_lift(0, kind))
    for j, cj in enumerate(coeffs):
        out = out + sigma(j, kind).scale(cj)
    return out


def commutator(m: Mat2, n: Mat2) -> Mat2:
    return m @ n - n @ m


def anticommutator(m: Mat2, n: Mat2) -> Mat2:
    return m @ n + n @ m


@dataclass(frozen=True)
class DiracPair:
    """Orthonormal (alpha, beta) 3-vectors defining A, B in the Pauli basis.

    Components are Fractions for exact pairs or floats for numeric-only ones;
    use :func:`make_dirac_pair` / :func:`sample_dirac_pair` to construct.
    """

    alpha: Tuple
    beta: Tuple

    @property
    def exact(self) -> bool:
        return all(isinstance(x, (int, Fraction)) for x in self.alpha + self.beta)

    def alpha_floats(self) -> Tuple[float, float, float]:
        return tuple(float(x) for x in self.alpha)

    def beta_floats(self) -> Tuple[float, float, float]:
        return tuple(float(x) for x in self.beta)

    def _matrix(self, comps, kind: str) -> Mat2:
        if kind in ("exact", "sym") and not self.exact:
            raise ConstraintViolation("exact matrices need a rational pair")
        c1, c2, c3 = (comps if kind != "numeric" else [float(x) for x in comps])
        out = sigma(1, kind).scale(_lift(c1, kind))
        out = out + sigma(2, kind).scale(_lift(c2, kind))
        out = out + sigma(3, kind).scale(_lift(c3, kind))
        return out

    def matrix_a(self, kind: str = "exact") -> Mat2:
        return self._matrix(self.alpha, kind)

    def matrix_b(self, kind: str = "exact") -> Mat2:
        return self._matrix(self.beta, kind)

    def label(self) -> str:
        a = ",".join(str(x) for x in self.alpha)
        b = ",".join(str(x) for x in self.beta)
        return f"alpha=({a}) beta=({b})"


def _dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def make_dirac_pair(alpha: Sequence, beta: Sequence) -> DiracPair:
    """Validated Dirac pair; exact pairs are checked in rational arithmetic.

    Raises ConstraintViolation when |alpha| != 1, |beta| != 1 or
    alpha . beta != 0 (tolerance 1e-12 for float input, exact otherwise).
    """
    alpha = tuple(alpha)
    beta = tuple(beta)
    if len(alpha) != 3 or len(beta) != 3:
        raise ConstraintViolation("alpha and beta must be 3-vectors")
    exact = all(isinstance(x, (int, Fraction)) for x in alpha + beta)
    if exact:
        alpha = tuple(Fraction(x) for x in alpha)
        beta = tuple(Fraction(x) for x in beta)
        if _dot(alpha, alpha) != 1 or _dot(beta, beta) != 1:
            raise ConstraintViolation("alpha and beta must be unit vectors")
        if _dot(alpha, beta) != 0:
            raise ConstraintViolation("alpha . beta must vanish")
    else:
        alpha = tuple(float(x) for x in alpha)
        beta = tuple(float(x) for x in beta)
        if abs(_dot(alpha, alpha) - 1.0) > NUMERIC_PAIR_TOL:
            raise ConstraintViolation("|alpha|^2 != 1")
        if abs(_dot(beta, beta) - 1.0) > NUMERIC_PAIR_TOL:
            raise ConstraintViolation("|beta|^2 != 1")
        if abs(_dot(alpha, beta)) > NUMERIC_PAIR_TOL:
            raise ConstraintViolation("alpha . beta != 0")
    return DiracPair(alpha, beta)


STANDARD_PAIR = make_dirac_pair((1, 0, 0), (0, 0, 1))  # A = sigma_1, B = sigma_3
ROTATED_PAIR = make_dirac_pair((1, 0, 0), (0, 1, 0))  # A = sigma_1, B = sigma_2


def sample_dirac_pair(seed: int) -> DiracPair:
    """Deterministic exactly-orthonormal pair from a seeded rational rotation.

    A quaternion with small integer components gives a rotation matrix with
    exactly rational entries; its columns are exactly orthonormal, so the
    rotated standard pair satisfies the constraints by construction.
    """
    rng = random.Random(seed)
    while True:
        w, x, y, z = (rng.randint(-99, 99) for _ in range(4))
        s = w * w + x * x + y * y + z * z
        if s:
            break
    s = Fraction(s)
    alpha = (
        Fraction(w * w + x * x - y * y - z * z) / s,
        Fraction(2 * (x * y + w * z)) / s,
        Fraction(2 * (x * z - w * y)) / s,
    )
    beta = (
        Fraction(2 * (x * z + w * y)) / s,
        Fraction(2 * (y * z - w * x)) / s,
        Fraction(w * w - x * x - y * y + z * z) / s,
    )
    return make_dirac_pair(alpha, beta)
