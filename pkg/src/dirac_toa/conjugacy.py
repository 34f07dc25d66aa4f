"""Exact linear-constraint solver for the canonical-conjugacy coefficients.

Writing the candidate operator as sum C[m,n] T[m,n] with
C[m,n] = sum_j gamma_j^{m,n} sigma_j, the requirement
[H, X] = i hbar (identity) becomes, per basis index (m, n),

    c [A, C[m-1,n]] - (i hbar c (n+1) / 2) {A, C[m,n+1]} + m0 c^2 [B, C[m,n]]
        = i hbar delta_{m,0} delta_{n,0} sigma_0 .

Each gamma_j^{m,n} carries a forced physical scale
hbar^(1-n) m0^(n-m-1) c^(n-m-2); dividing it out leaves a linear system over
plain rationals, solved by exact Gaussian elimination with a deterministic
pivot order that makes the n = 0 coefficients the free variables. The
minimal-solution policy zeroes every free variable; anything free outside the
n = 0 family is reported, never silently zeroed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Tuple

from .exact import QQi, Sym
from .pauli import ConstraintViolation, DiracPair, Mat2, anticommutator, commutator, pauli_decompose, sigma
from .bdalgebra import OperatorPoly

Var = Tuple[int, int, int]  # (j, m, n)

DEFAULT_M_WINDOW = (-3, 3)
DEFAULT_N_MAX = 3


class WindowTooSmall(ValueError):
    """Index window cannot close under the bracket's index shifts."""


class Inconsistent(ValueError):
    """Exact elimination found a contradictory equation."""


class LinForm:
    """Linear form sum coeff_v * v over unknowns, with QQi coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Dict[Var, QQi] | None = None):
        canon = {}
        if coeffs:
            for v, c in coeffs.items():
                c = QQi.coerce(c)
                if not c.is_zero():
                    canon[v] = c
        object.__setattr__(self, "coeffs", canon)

    def __setattr__(self, name, value):
        raise AttributeError("LinForm is immutable")

    @staticmethod
    def variable(v: Var) -> "LinForm":
        return LinForm({v: QQi(1)})

    def __add__(self, other):
        if not isinstance(other, LinForm):
            return NotImplemented
        out = dict(self.coeffs)
        for v, c in other.coeffs.items():
            s = out.get(v, QQi(0)) + c
            if s.is_zero():
                out.pop(v, None)
            else:
                out[v] = s
        return LinForm(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LinForm({v: -c for v, c in self.coeffs.items()})

    def __mul__(self, s):
        if isinstance(s, (int, Fraction, QQi)):
            s = QQi.coerce(s)
            return LinForm({v: c * s for v, c in self.coeffs.items()})
        return NotImplemented

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.coeffs


@dataclass(frozen=True)
class Equation:
    """One sigma-channel equation at basis index (m, n): coeffs . g = rhs."""

    m: int
    n: int
    channel: int
    coeffs: Dict[Var, Fraction]
    rhs: Fraction


@dataclass(frozen=True)
class ConstraintSystem:
    pair: DiracPair
    m_window: Tuple[int, int]
    n_max: int
    equations: List[Equation]

    @property
    def variables(self) -> List[Var]:
        m_min, m_max = self.m_window
        return [
            (j, m, n)
            for n in range(self.n_max + 1)
            for m in range(m_min, m_max + 1)
            for j in range(4)
        ]


def scale_monomial(m: int, n: int) -> Sym:
    """Forced physical scale of gamma^{m,n}: hbar^(1-n) m0^(n-m-1) c^(n-m-2)."""
    return Sym.mono(1, hbar=1 - n, c=n - m - 2, m0=n - m - 1)


def _unknown_matrix(j_range, m: int, n: int, m_window, n_max) -> Mat2:
    m_min, m_max = m_window
    zero = LinForm()
    if m < m_min or m > m_max or n < 0 or n > n_max:
        return Mat2(zero, zero, zero, zero)
    mats = []
    for j in j_range:
        mats.append(sigma(j, "exact").scale(LinForm.variable((j, m, n))))
    out = mats[0]
    for extra in mats[1:]:
        out = out + extra
    return out


def _check_window(pair: DiracPair, m_window: Tuple[int, int], n_max: int) -> None:
    if not pair.exact:
        raise ConstraintViolation("constraint construction needs a rational pair")
    m_min, m_max = m_window
    if m_min > -2 or m_max < 2 or n_max < 2:
        raise WindowTooSmall(
            f"window m in [{m_min},{m_max}], n <= {n_max} cannot close under the "
            "bracket's index shifts (need m over [-2,2], n_max >= 2)"
        )


def build_constraints(
    pair: DiracPair,
    m_window: Tuple[int, int] = DEFAULT_M_WINDOW,
    n_max: int = DEFAULT_N_MAX,
) -> ConstraintSystem:
    """Instantiate the four sigma-channel equation families over the window.

    Equations are generated at every (m, n) the bracket of a window-supported
    operator can reach (m in [m_min, m_max + 1], n in [0, n_max]); unknowns
    outside the window are structurally zero. The right-hand side is i hbar on
    the sigma_0 channel at (0, 0) and zero elsewhere. In the nondimensional
    unknowns and after dividing out the common factor i, the four channels at
    (m, n) read

        sigma_0:  -(n+1) sum_j a_j g[j,m,n+1]                      = d_{m,0} d_{n,0}
        sigma_1:  2(a2 g[3,m-1,n] - a3 g[2,m-1,n])
                    - (n+1) a1 g[0,m,n+1] + 2(b2 g[3,m,n] - b3 g[2,m,n]) = 0
        sigma_2:  2(a3 g[1,m-1,n] - a1 g[3,m-1,n])
                    - (n+1) a2 g[0,m,n+1] + 2(b3 g[1,m,n] - b1 g[3,m,n]) = 0
        sigma_3:  2(a1 g[2,m-1,n] - a2 g[1,m-1,n])
                    - (n+1) a3 g[0,m,n+1] + 2(b1 g[2,m,n] - b2 g[1,m,n]) = 0

    :func:`build_constraints_bracket` generates the same system through the
    generic matrix bracket and exists as an independent cross-check.
    """
    _check_window(pair, m_window, n_max)
    m_min, m_max = m_window
    a = tuple(Fraction(x) for x in pair.alpha)
    b = tuple(Fraction(x) for x in pair.beta)
    # cyclic channel data: sigma_k channel couples the (x, y) = cyc(k) components
    cyc = {1: (2, 3), 2: (3, 1), 3: (1, 2)}

    def in_window(m: int, n: int) -> bool:
        return m_min <= m <= m_max and 0 <= n <= n_max

    equations: List[Equation] = []
    for m in range(m_min, m_max + 2):
        for n in range(0, n_max + 1):
            coeffs0: Dict[Var, Fraction] = {}
            if in_window(m, n + 1):
                for j in (1, 2, 3):
                    if a[j - 1]:
                        coeffs0[(j, m, n + 1)] = -(n + 1) * a[j - 1]
            rhs0 = Fraction(1) if (m == 0 and n == 0) else Fraction(0)
            if coeffs0 or rhs0:
                equations.append(Equation(m, n, 0, coeffs0, rhs0))
            for ch, (x, y) in cyc.items():
                coeffs: Dict[Var, Fraction] = {}

                def add(var: Var, value: Fraction) -> None:
                    if value:
                        coeffs[var] = coeffs.get(var, Fraction(0)) + value

                if in_window(m - 1, n):
                    add((y, m - 1, n), 2 * a[x - 1])
                    add((x, m - 1, n), -2 * a[y - 1])
                if in_window(m, n + 1):
                    add((0, m, n + 1), -(n + 1) * a[ch - 1])
                if in_window(m, n):
                    add((y, m, n), 2 * b[x - 1])
                    add((x, m, n), -2 * b[y - 1])
                if coeffs:
                    equations.append(Equation(m, n, ch, coeffs, Fraction(0)))
    return ConstraintSystem(pair, (m_min, m_max), n_max, equations)


def build_constraints_bracket(
    pair: DiracPair,
    m_window: Tuple[int, int] = DEFAULT_M_WINDOW,
    n_max: int = DEFAULT_N_MAX,
) -> ConstraintSystem:
    """Same system, generated by Pauli-decomposing the generic matrix bracket
    with unknown-valued coefficient matrices (slow; cross-check route)."""
    _check_window(pair, m_window, n_max)
    m_min, m_max = m_window
    a = pair.matrix_a("exact")
    b = pair.matrix_b("exact")
    j_range = range(4)
    minus_i = QQi(0, -1)
    cache: Dict[Tuple[int, int], Mat2] = {}

    def unknown(m: int, n: int) -> Mat2:
        if (m, n) not in cache:
            cache[(m, n)] = _unknown_matrix(j_range, m, n, m_window, n_max)
        return cache[(m, n)]

    equations: List[Equation] = []
    for m in range(m_min, m_max + 2):
        for n in range(0, n_max + 1):
            anti_scale = QQi(0, Fraction(-(n + 1), 2))
            bracket = (
                commutator(a, unknown(m - 1, n))
                + anticommutator(a, unknown(m, n + 1)).scale(anti_scale)
                + commutator(b, unknown(m, n))
            )
            channels = pauli_decompose(bracket)
            for ch, form in enumerate(channels):
                rhs = QQi(0, 1) if (m == 0 and n == 0 and ch == 0) else QQi(0)
                if form.is_zero() and rhs.is_zero():
                    continue
                # every channel carries a common factor i; divide it out so the
                # system is real rational
                coeffs: Dict[Var, Fraction] = {}
                for v, c in form.coeffs.items():
                    c = c * minus_i
                    if c.im != 0:
                        raise AssertionError("channel equation is not purely imaginary")
                    coeffs[v] = c.re
                rhs = rhs * minus_i
                equations.append(Equation(m, n, ch, coeffs, rhs.re))
    return ConstraintSystem(pair, (m_min, m_max), n_max, equations)


def _column_order(sys: ConstraintSystem) -> List[Var]:
    """n >= 1 unknowns first (sorted by (n, m, j)), then the n = 0 family.

    Pivots are taken in this order, so free variables land on the n = 0
    coefficients whenever the system allows it.
    """
    m_min, m_max = sys.m_window
    pinned = [
        (j, m, n)
        for n in range(1, sys.n_max + 1)
        for m in range(m_min, m_max + 1)
        for j in range(4)
    ]
    tail = [(j, m, 0) for m in range(m_min, m_max + 1) for j in range(4)]
    return pinned + tail


@dataclass(frozen=True)
class GammaTable:
    """Solved coefficient table plus elimination metadata."""

    pair: DiracPair
    m_window: Tuple[int, int]
    n_max: int
    entries: Dict[Var, Sym]
    dimensionless: Dict[Var, Fraction]
    free_vars: List[Var] = field(default_factory=list)
    unexpected_free: List[Var] = field(default_factory=list)
    rank: int = 0
    equation_count: int = 0
    variable_count: int = 0

    def to_operator_poly(self) -> OperatorPoly:
        terms: Dict[Tuple[int, int], Mat2] = {}
        for (j, m, n), value in self.entries.items():
            mat = sigma(j, "sym").scale(value)
            key = (m, n)
            terms[key] = terms[key] + mat if key in terms else mat
        return OperatorPoly(terms)

    def report_text(self) -> str:
        m_min, m_max = self.m_window
        lines = [
            "constraint-system report",
            f"pair: {self.pair.label()}",
            f"window: m in [{m_min},{m_max}], n in [0,{self.n_max}]",
            f"unknowns: {self.variable_count}",
            f"equations: {self.equation_count}",
            f"rank: {self.rank}",
            f"free variables ({len(self.free_vars)}):",
        ]
        for (j, m, n) in self.free_vars:
            lines.append(f"  gamma[j={j}, m={m}, n={n}]")
        if self.unexpected_free:
            lines.append("unexpected free variables outside the n=0 family:")
            for (j, m, n) in self.unexpected_free:
                lines.append(f"  gamma[j={j}, m={m}, n={n}]")
        else:
            lines.append("unexpected free variables outside the n=0 family: none")
        lines.append(f"nonzero solution entries ({len(self.entries)}):")
        for (j, m, n), value in sorted(self.entries.items(), key=lambda kv: (kv[0][2], kv[0][1], kv[0][0])):
            lines.append(f"  gamma[j={j}, m={m}, n={n}] = {value}")
        return "\n".join(lines) + "\n"


def solve_minimal(sys: ConstraintSystem) -> GammaTable:
    """Exact elimination with every free variable pinned to zero.

    Raises Inconsistent if elimination exposes a contradiction. Free variables
    outside the n = 0 family are recorded in ``unexpected_free``.
    """
    order = _column_order(sys)
    col_pos = {v: k for k, v in enumerate(order)}
    rows = [(dict(eq.coeffs), eq.rhs) for eq in sys.equations]
    used = [False] * len(rows)
    pivots: List[Tuple[Var, int]] = []

    for col in order:
        pivot_idx = None
        for ri, (coeffs, _) in enumerate(rows):
            if not used[ri] and coeffs.get(col, 0) != 0:
                pivot_idx = ri
                break
        if pivot_idx is None:
            continue
        used[pivot_idx] = True
        pivots.append((col, pivot_idx))
        pcoeffs, prhs = rows[pivot_idx]
        pval = pcoeffs[col]
        for ri, (coeffs, rhs) in enumerate(rows):
            if used[ri] or col not in coeffs:
                continue
            factor = coeffs[col] / pval
            for v, c in pcoeffs.items():
                s = coeffs.get(v, Fraction(0)) - factor * c
                if s == 0:
                    coeffs.pop(v, None)
                else:
                    coeffs[v] = s
            rows[ri] = (coeffs, rhs - factor * prhs)

    for ri, (coeffs, rhs) in enumerate(rows):
        if not used[ri] and not coeffs and rhs != 0:
            raise Inconsistent("constraint system has no exact solution")

    pivot_cols = {col for col, _ in pivots}
    free = [v for v in order if v not in pivot_cols]
    values: Dict[Var, Fraction] = {v: Fraction(0) for v in free}
    for col, ri in reversed(pivots):
        coeffs, rhs = rows[ri]
        acc = rhs
        for v, c in coeffs.items():
            if v == col:
                continue
            if col_pos[v] < col_pos[col]:
                raise AssertionError("row references an earlier pivot column")
            acc -= c * values[v]
        values[col] = acc / coeffs[col]

    entries = {}
    dimensionless = {}
    for v, val in values.items():
        if val != 0:
            j, m, n = v
            dimensionless[v] = val
            entries[v] = scale_monomial(m, n) * QQi(val)
    unexpected = sorted(v for v in free if v[2] != 0)
    return GammaTable(
        pair=sys.pair,
        m_window=sys.m_window,
        n_max=sys.n_max,
        entries=entries,
        dimensionless=dimensionless,
        free_vars=sorted(free),
        unexpected_free=unexpected,
        rank=len(pivots),
        equation_count=len(sys.equations),
        variable_count=len(order),
    )


def expected_minimal_table(pair: DiracPair) -> Dict[Var, Sym]:
    """Closed-form minimal solution: gamma_j^{0,1} = -alpha_j / c and
    gamma_j^{-1,1} = -m0 beta_j for j = 1,2,3."""
    out: Dict[Var, Sym] = {}
    for j in (1, 2, 3):
        aj = QQi.coerce(pair.alpha[j - 1])
        bj = QQi.coerce(pair.beta[j - 1])
        if not aj.is_zero():
            out[(j, 0, 1)] = Sym.mono(-aj, c=-1)
        if not bj.is_zero():
            out[(j, -1, 1)] = Sym.mono(-bj, m0=1)
    return out


def toa_operator_psi(pair: DiracPair) -> OperatorPoly:
    """Arrival-time operator -m0 B T[-1,1] - (1/c) A T[0,1] for the pair."""
    if not pair.exact:
        raise ConstraintViolation("operator assembly needs a rational pair")
    c_m11 = pair.matrix_b("sym").scale(Sym.mono(-1, m0=1))
    c_01 = pair.matrix_a("sym").scale(Sym.mono(-1, c=-1))
    return OperatorPoly({(-1, 1): c_m11, (0, 1): c_01})


def conjugacy_target() -> OperatorPoly:
    """The bracket target: i hbar sigma_0 T[0,0]."""
    return OperatorPoly.single(0, 0, sigma(0, "sym").scale(Sym.mono(QQi(0, 1), hbar=1)))


def verify_conjugacy(poly: OperatorPoly, pair: DiracPair) -> OperatorPoly:
    """Residual of the conjugacy requirement; empty polynomial iff conjugate."""
    from .bdalgebra import commutator_with_hamiltonian

    return commutator_with_hamiltonian(poly, pair) - conjugacy_target()
