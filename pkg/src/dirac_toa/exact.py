"""Exact scalar arithmetic: Gaussian rationals and Laurent monomials in (hbar, c, m0).

Every coefficient that appears in the operator algebra lives in the ring
Q(i)[hbar^±1, c^±1, m0^±1]. ``QQi`` is a complex number with exact rational
real and imaginary parts; ``Sym`` is a finite sum of QQi-weighted Laurent
monomials, kept in canonical form (zero coefficients dropped, equal exponent
triples merged). No general symbolic engine is used or needed.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

RatLike = Union[int, Fraction]

_EXPONENT_NAMES = ("hbar", "c", "m0")


def _as_fraction(x: RatLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class QQi:
    """Gaussian rational: exact complex number with Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re: RatLike = 0, im: RatLike = 0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("QQi is immutable")

    @staticmethod
    def coerce(x) -> "QQi":
        if isinstance(x, QQi):
            return x
        return QQi(_as_fraction(x))

    def __add__(self, other):
        other = QQi.coerce(other)
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = QQi.coerce(other)
        return QQi(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return QQi.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QQi(self.re * other, self.im * other)
        if isinstance(other, QQi):
            return QQi(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = QQi.coerce(other)
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero QQi")
        return QQi(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def conjugate(self) -> "QQi":
        return QQi(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        im = "i" if self.im == 1 else ("-i" if self.im == -1 else f"{self.im}i")
        if self.re == 0:
            return im
        sign = "+" if self.im > 0 else ""
        return f"({self.re}{sign}{im})"

    def __repr__(self):
        return f"QQi({self.re!r}, {self.im!r})"


QQI_ZERO = QQi(0)
QQI_ONE = QQi(1)
QQI_I = QQi(0, 1)


class Sym:
    """Canonical sum of Laurent monomials coeff * hbar^a * c^b * m0^d.

    Internally a mapping from exponent triple (a, b, d) to a nonzero QQi.
    Instances are immutable; all arithmetic returns canonicalized results.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        canon = {}
        if terms:
            for exps, coeff in terms.items():
                coeff = QQi.coerce(coeff)
                if not coeff.is_zero():
                    key = (int(exps[0]), int(exps[1]), int(exps[2]))
                    prev = canon.get(key)
                    coeff = coeff if prev is None else prev + coeff
                    if coeff.is_zero():
                        canon.pop(key, None)
                    else:
                        canon[key] = coeff
        object.__setattr__(self, "_terms", dict(sorted(canon.items())))

    def __setattr__(self, name, value):
        raise AttributeError("Sym is immutable")

    @staticmethod
    def zero() -> "Sym":
        return Sym()

    @staticmethod
    def mono(coeff, hbar: int = 0, c: int = 0, m0: int = 0) -> "Sym":
        return Sym({(hbar, c, m0): QQi.coerce(coeff)})

    @staticmethod
    def rational(coeff) -> "Sym":
        return Sym.mono(coeff)

    @staticmethod
    def coerce(x) -> "Sym":
        if isinstance(x, Sym):
            return x
        if isinstance(x, (int, Fraction, QQi)):
            return Sym.mono(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Sym")

    @property
    def terms(self):
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __add__(self, other):
        other = Sym.coerce(other)
        merged = dict(self._terms)
        for exps, coeff in other._terms.items():
            prev = merged.get(exps)
            s = coeff if prev is None else prev + coeff
            if s.is_zero():
                merged.pop(exps, None)
            else:
                merged[exps] = s
        return Sym(merged)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-Sym.coerce(other))

    def __rsub__(self, other):
        return Sym.coerce(other) - self

    def __neg__(self):
        return Sym({e: -c for e, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QQi)):
            other = Sym.mono(other)
        if not isinstance(other, Sym):
            return NotImplemented
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                key = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                prod = c1 * c2
                prev = out.get(key)
                s = prod if prev is None else prev + prod
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        return Sym(out)

    __rmul__ = __mul__

    def conjugate(self) -> "Sym":
        return Sym({e: c.conjugate() for e, c in self._terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, QQi)):
            other = Sym.mono(other)
        if not isinstance(other, Sym):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def evaluate(self, params) -> complex:
        """Numeric value with (hbar, c, m0) taken from a PhysParams-like object."""
        total = 0j
        for (a, b, d), coeff in self._terms.items():
            total += coeff.to_complex() * params.hbar**a * params.c**b * params.m0**d
        return total

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for exps, coeff in self._terms.items():
            factors = [f"({coeff})"]
            for name, e in zip(_EXPONENT_NAMES, exps):
                if e == 1:
                    factors.append(name)
                elif e != 0:
                    factors.append(f"{name}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"Sym({self})"


SYM_ZERO = Sym.zero()
SYM_ONE = Sym.mono(1)
SYM_I = Sym.mono(QQI_I)
SYM_HBAR = Sym.mono(1, hbar=1)
SYM_C = Sym.mono(1, c=1)
SYM_M0 = Sym.mono(1, m0=1)
