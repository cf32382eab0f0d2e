"""Exact integer/rational checks behind the monotonicity of lambda(t).

``theta(t, k)`` is the numerator polynomial of ``lambda'(t)``.  In the shifted
variable ``x = t - 1`` it is

    theta1(x, k) = S_{2k}(x) * (S_k(x) + k (x + 1) S_{k-2}(x))
                   - 2 k^2 * x (1 + x)^k * S_{k-1}(x)

with ``S_n(x) = (1 + x)^n - 1``.  Everything here works on Python integers
and :class:`fractions.Fraction`, so the checks are exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Sequence

Number = int | Fraction


class ExactPoly:
    """Dense univariate polynomial with exact coefficients (index = power)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number] = ()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[Number, ...] = tuple(c)

    @classmethod
    def monomial(cls, power: int, coeff: Number = 1) -> "ExactPoly":
        return cls([0] * power + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, power: int) -> Number:
        return self.coeffs[power] if 0 <= power < len(self.coeffs) else 0

    def __eq__(self, other) -> bool:
        if isinstance(other, ExactPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "ExactPoly") -> "ExactPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return ExactPoly(self[i] + other[i] for i in range(n))

    def __neg__(self) -> "ExactPoly":
        return ExactPoly(-c for c in self.coeffs)

    def __sub__(self, other: "ExactPoly") -> "ExactPoly":
        return self + (-other)

    def __mul__(self, other) -> "ExactPoly":
        if not isinstance(other, ExactPoly):
            return ExactPoly(c * other for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return ExactPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return ExactPoly(out)

    __rmul__ = __mul__

    def __call__(self, x: Number) -> Number:
        acc: Number = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def shift_down(self, n: int) -> "ExactPoly":
        """Exact division by ``x**n``; the low coefficients must vanish."""
        if any(self[i] != 0 for i in range(n)):
            raise ArithmeticError(f"x^{n} does not divide the polynomial")
        return ExactPoly(self.coeffs[n:])

    def __repr__(self):
        return f"ExactPoly({list(self.coeffs)})"


def binomial_tail(n: int, start: int = 1, shift: int = 0) -> ExactPoly:
    """``sum_{i=start}^{n} C(n, i) x^{i + shift}``."""
    if n < start:
        return ExactPoly()
    return ExactPoly([0] * (start + shift) + [comb(n, i) for i in range(start, n + 1)])


def theta1_poly(k: int) -> ExactPoly:
    """``theta(x + 1, k)`` expanded in powers of ``x``."""
    if k < 2:
        raise ValueError("k must be >= 2")
    first = binomial_tail(2 * k)
    second = binomial_tail(k) + ExactPoly([k, k]) * binomial_tail(k - 2)
    third = binomial_tail(k, start=0, shift=1) * binomial_tail(k - 1)
    return first * second - third * (2 * k * k)


def theta_product(t: Number, k: int) -> Number:
    """``theta(t, k)`` straight from its product form."""
    t = Fraction(t)
    return (
        (t**k - 1) * (t ** (2 * k) - 1)
        + k * t * (t ** (k - 2) - 1) * (t ** (2 * k) - 1)
        - 2 * k * k * t**k * (t - 1) * (t ** (k - 1) - 1)
    )


def x4_coefficient_formula(k: int) -> Fraction:
    return Fraction(k * k * (k - 1) * (2 * k * k - k + 3), 6)


def check_low_coeffs(k: int) -> bool:
    p = theta1_poly(k)
    return all(p[i] == 0 for i in range(4)) and p[4] == x4_coefficient_formula(k)


def check_nonneg_high_coeffs(k: int) -> bool:
    """Every coefficient of ``x^n``, ``n >= 4``, is strictly positive."""
    p = theta1_poly(k)
    return p.degree >= 4 and all(p[n] > 0 for n in range(4, p.degree + 1))


def binomial_inequality_terms(k: int) -> list[tuple[int, int, int]]:
    """``(i, C(2k, i), 2k C(k, i-1))`` for ``i = 3 .. k+1``."""
    return [(i, comb(2 * k, i), 2 * k * comb(k, i - 1)) for i in range(3, k + 2)]


def check_binomial_inequality(k: int) -> bool:
    """``C(2k, i) >= 2k C(k, i-1)`` for ``i = 3 .. k+1``, in both equivalent forms."""
    if k < 2:
        raise ValueError("k must be >= 2")
    ok = True
    for i, lhs, rhs in binomial_inequality_terms(k):
        direct = lhs >= rhs
        factorial_form = factorial(2 * k - 1) * factorial(k + 1 - i) >= i * factorial(k) * factorial(2 * k - i)
        if direct != factorial_form:
            raise ArithmeticError(f"binomial and factorial forms disagree at k={k}, i={i}")
        ok = ok and direct
    return ok


def eta_poly(k: int) -> ExactPoly:
    """``theta1 / x^4``; raises if the low coefficients do not vanish."""
    return theta1_poly(k).shift_down(4)


DEFAULT_T_GRID: tuple[Fraction, ...] = (
    Fraction(1, 1000),
    Fraction(1, 10),
    Fraction(1, 2),
    Fraction(9, 10),
    Fraction(999_999, 1_000_000),
    Fraction(1_000_001, 1_000_000),
    Fraction(11, 10),
    Fraction(3, 2),
    Fraction(2),
    Fraction(10),
    Fraction(1000),
)


def eta_positive_samples(k: int, grid: Sequence[Number] = DEFAULT_T_GRID) -> bool:
    """``eta(t) > 0`` at every grid point, with ``(t-1)^4 eta(t) = theta(t)`` checked exactly."""
    eta = eta_poly(k)
    for t in grid:
        t = Fraction(t)
        if t <= 0:
            raise ValueError("grid points must be positive")
        value = eta(t - 1)
        if value <= 0:
            return False
        if t != 1 and (t - 1) ** 4 * value != theta_product(t, k):
            raise ArithmeticError(f"expansion and product form disagree at t={t}, k={k}")
    return True


def sign_variations(coeffs: Sequence[Number]) -> int:
    signs = [c > 0 for c in coeffs if c != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def ti_q2_poly(k: int, lam: Number) -> ExactPoly:
    """``2^k a^{k+1} - lam (a + 2)^k``."""
    lam = Fraction(lam)
    coeffs = [-lam * comb(k, j) * 2 ** (k - j) for j in range(k + 1)] + [Fraction(2**k)]
    return ExactPoly(coeffs)


def descartes_sign_count(k: int, lam: Number) -> int:
    if k < 2:
        raise ValueError("k must be >= 2")
    if not Fraction(lam) > 0:
        raise ValueError("lambda must be positive")
    return sign_variations(ti_q2_poly(k, lam).coeffs)


@dataclass(frozen=True)
class CheckResult:
    k: int
    name: str
    passed: bool
    detail: str = ""


DESCARTES_LAMBDAS = (Fraction(1, 1000), Fraction(1, 3), Fraction(2), Fraction(1000))


def verify_k(k: int) -> list[CheckResult]:
    p = theta1_poly(k)
    low = check_low_coeffs(k)
    out = [
        CheckResult(k, "low_coeffs", all(p[i] == 0 for i in range(4)), f"x^0..x^3 = {[p[i] for i in range(4)]}"),
        CheckResult(k, "x4_formula", low, f"x^4 = {p[4]}, formula = {x4_coefficient_formula(k)}"),
        CheckResult(k, "positive_high_coeffs", check_nonneg_high_coeffs(k), f"degree {p.degree}"),
        CheckResult(k, "binomial_inequality", check_binomial_inequality(k), "i = 3..k+1"),
    ]
    counts = [descartes_sign_count(k, lam) for lam in DESCARTES_LAMBDAS]
    out.append(CheckResult(k, "descartes", all(c == 1 for c in counts), f"sign changes {counts}"))
    if low:
        out.append(CheckResult(k, "eta_positive", eta_positive_samples(k), f"{len(DEFAULT_T_GRID)} rational points"))
    else:
        out.append(CheckResult(k, "eta_positive", False, "skipped: low coefficients do not vanish"))
    return out


def verify_all(k_max: int = 12, k_min: int = 2) -> list[CheckResult]:
    if k_min < 2 or k_max < k_min:
        raise ValueError(f"bad k range {k_min}..{k_max}")
    return [r for k in range(k_min, k_max + 1) for r in verify_k(k)]
