"""Exact Haar integrals over O(N) as rationals.

Values come from the invariance calculus: the single-line moment, fan
relations, the Z-integral recursion, the exchange-integral recursion and a
table of closed forms for the remaining order-6 diagrams.  Everything is
computed with :class:`fractions.Fraction`, so there is no rounding anywhere.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .diagram import (
    Diagram,
    Monomial,
    canonicalize,
    parse_monomial,
    required_dimension,
    vanishes_by_invariance,
)


class DimensionTooSmall(ValueError):
    """N is too small for the requested monomial or formula."""


class Classification(str, enum.Enum):
    ZERO = "Zero"
    FAN = "Fan"
    Z = "Z"
    EXCHANGE = "Exchange"
    ORDER6 = "Order6"
    UNSUPPORTED = "Unsupported"


@dataclass(frozen=True)
class IntegralResult:
    value: Fraction | None
    classification: Classification
    formula: str
    diagram: Diagram | None = None


def double_factorial(n: int) -> int:
    """n!! with the conventions (-1)!! = 0!! = 1."""
    if n < -1:
        raise ValueError(f"double factorial undefined for n={n}")
    result = 1
    while n > 1:
        result *= n
        n -= 2
    return result


def _check_even(*ms: int) -> None:
    for m in ms:
        if m < 0 or m % 2:
            raise ValueError(f"multiplicities must be even and non-negative, got {m}")


@lru_cache(maxsize=None)
def f1(two_m: int, N: int) -> Fraction:
    """Moment of a single entry, E[O_11^(2m)] = (2m-1)!! (N-2)!! / (2m+N-2)!!."""
    _check_even(two_m)
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    # (N-2)!! with N=1 is (-1)!! = 1
    return Fraction(
        double_factorial(two_m - 1) * double_factorial(N - 2),
        double_factorial(two_m + N - 2),
    )


def fan(ms, N: int) -> Fraction:
    """Integral of a star diagram: t lines of even multiplicity sharing one dot."""
    ms = tuple(ms)
    if not ms:
        raise ValueError("fan needs at least one line")
    for m in ms:
        if m < 2 or m % 2:
            raise ValueError(f"fan multiplicities must be even and >= 2, got {m}")
    if N < len(ms):
        raise DimensionTooSmall(f"a fan with {len(ms)} lines needs N >= {len(ms)}, got N={N}")
    return _fan(tuple(sorted(ms)), N)


@lru_cache(maxsize=None)
def _fan(ms: tuple[int, ...], N: int) -> Fraction:
    d = sum(ms)
    value = f1(d, N) * Fraction(factorial(d // 2), factorial(d))
    for m in ms:
        value *= Fraction(factorial(m), factorial(m // 2))
    return value


def z_integral(m1: int, m2: int, m3: int, N: int) -> Fraction:
    """E[O_11^m1 O_12^m2 O_22^m3] by recursion on m3 down to a fan."""
    _check_even(m1, m2, m3)
    if N < 2:
        raise DimensionTooSmall(f"Z-integrals need N >= 2, got N={N}")
    return _z(m1, m2, m3, N)


@lru_cache(maxsize=None)
def _z(m1: int, m2: int, m3: int, N: int) -> Fraction:
    if m3 == 0:
        lines = tuple(m for m in (m1, m2) if m)
        return _fan(tuple(sorted(lines)), N) if lines else Fraction(1)
    # N + m3 - 3 >= 1 for N >= 2, m3 >= 2
    return Fraction(m3 - 1, N + m3 - 3) * (_z(m1, m2, m3 - 2, N) - _z(m1, m2 + 2, m3 - 2, N))


def _gamma_half(twice_arg: int) -> tuple[Fraction, int]:
    """Gamma(twice_arg / 2) as (rational coefficient, power of sqrt(pi))."""
    if twice_arg <= 0:
        raise ValueError(f"Gamma pole at {twice_arg}/2")
    if twice_arg % 2 == 0:
        return Fraction(factorial(twice_arg // 2 - 1)), 0
    k = (twice_arg - 1) // 2
    # Gamma(k + 1/2) = (2k-1)!! sqrt(pi) / 2^k
    return Fraction(double_factorial(2 * k - 1), 2**k), 1


def z_closed_form(m1: int, m2: int, m3: int, N: int) -> Fraction:
    """Gamma-ratio closed form of the Z-integral, reduced to a rational.

    Half-integer Gammas are rewritten through double factorials; the powers
    of sqrt(pi) must cancel exactly, which is asserted.
    """
    _check_even(m1, m2, m3)
    if N < 2:
        raise DimensionTooSmall(f"Z-integrals need N >= 2, got N={N}")
    numer = [1 + m1, 1 + m2, 1 + m3, 2 * (N - 1), N + m1 + m3 - 1]
    denom = [N + m1 - 1, N + m3 - 1, N + m1 + m2 + m3]
    value = Fraction(1, 2 ** (N - 2))
    sqrt_pi = -2  # the explicit 1/pi
    for arg in numer:
        c, p = _gamma_half(arg)
        value *= c
        sqrt_pi += p
    for arg in denom:
        c, p = _gamma_half(arg)
        value /= c
        sqrt_pi -= p
    assert sqrt_pi == 0, f"irrational residue pi^({sqrt_pi}/2) in Z closed form"
    return value


# The 4-cycle X(r,s,t,u) = E[O11^r O21^s O22^t O12^u] has edges in cyclic order
# r, s, t, u; these generate its symmetry group (transpose, row swap, column swap).
_X_GENERATORS = (
    lambda r, s, t, u: (r, u, t, s),
    lambda r, s, t, u: (s, r, u, t),
    lambda r, s, t, u: (u, t, s, r),
)


def _x_orbit_key(x: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
    seen = {x}
    frontier = [x]
    while frontier:
        y = frontier.pop()
        for g in _X_GENERATORS:
            z = g(*y)
            if z not in seen:
                seen.add(z)
                frontier.append(z)
    return min(seen)


def _x_degenerate(r: int, s: int, t: int, u: int, N: int) -> Fraction:
    """Some exponent is zero, so the 4-cycle is a path, a fan or a matching."""
    x = (r, s, t, u)
    k = x.index(0)
    # remaining edges in cyclic order form the path Z(a, b, c)
    a, b, c = x[k + 1:] + x[:k]
    if a == 0 or c == 0:
        lines = tuple(m for m in (a, b, c) if m)
        if not lines:
            return Fraction(1)
        if N < len(lines):
            raise DimensionTooSmall(f"needs N >= {len(lines)}, got N={N}")
        return _fan(tuple(sorted(lines)), N)
    return z_integral(a, b, c, N)


def x_integral(r: int, s: int, t: int, u: int, N: int) -> Fraction:
    """Exchange integral E[O11^r O21^s O22^t O12^u].

    Odd dot degrees give 0.  A zero exponent reduces to a Z/fan value.
    Otherwise the rotation recursion lowers r + s by 2 per step until r or s
    hits zero; it rotates lines into a third column, hence N >= 3.
    """
    if min(r, s, t, u) < 0:
        raise ValueError("exponents must be non-negative")
    if (r + u) % 2 or (s + t) % 2 or (r + s) % 2:
        return Fraction(0)
    if 0 in (r, s, t, u):
        return _x_degenerate(r, s, t, u, N)
    if _x_orbit_key((r, s, t, u)) == (1, 1, 1, 1):
        if N < 2:
            raise DimensionTooSmall(f"X(1,1,1,1) needs N >= 2, got N={N}")
        return -_fan((2, 2), N) / (N - 1)
    if N < 3:
        raise DimensionTooSmall(
            f"the exchange recursion rotates into a third index and needs N >= 3, got N={N}"
        )
    return _x(r, s, t, u, N)


_x_memo: dict[tuple[int, int, int, int, int], Fraction] = {}


def _x(r: int, s: int, t: int, u: int, N: int) -> Fraction:
    if 0 in (r, s, t, u):
        return _x_degenerate(r, s, t, u, N)
    key = _x_orbit_key((r, s, t, u)) + (N,)
    cached = _x_memo.get(key)
    if cached is not None:
        return cached

    def sub(r2, s2, t2, u2):
        assert r2 + s2 < r + s, "exchange recursion must lower r + s"
        return _x(r2, s2, t2, u2, N)

    numer = -2 * r * s * sub(r - 1, s - 1, t + 1, u + 1)
    if r >= 2:
        # row 1 carries edges r and u; the orthogonality sum removes both
        numer += r * (r - 1) * (sub(r - 2, s, t, u) - sub(r - 2, s, t, u + 2))
    if s >= 2:
        numer += s * (s - 1) * (sub(r, s - 2, t, u) - sub(r, s - 2, t + 2, u))
    denom = (r + s) * (N - 2) + r * (r - 1) + 2 * r * s + s * (s - 1)
    value = numer / denom
    # dict assignment is atomic; a racing thread at worst recomputes the same value
    _x_memo[key] = value
    return value


# Representative monomials of the order-6 diagrams that are neither fans nor
# Z-shapes.  5c and 5d are the same 4-cycle X(3,1,1,1) drawn two ways.
ORDER6_SHAPES = {
    "5a": "O(1,1)^2 O(1,2)^2 O(2,3)^2",
    "5b": "O(1,1)^2 O(2,2)^2 O(3,3)^2",
    "5c": "O(1,1)^3 O(2,1) O(2,2) O(1,2)",
    "5d": "O(1,1) O(2,1) O(2,2) O(1,2)^3",
    "5e": "O(1,1) O(2,1) O(2,2) O(1,2) O(1,3)^2",
    "5f": "O(1,1) O(2,1) O(2,2) O(1,2) O(3,3)^2",
    "5g": "O(1,1) O(1,2) O(2,2) O(2,3) O(3,3) O(3,1)",
}

# smallest N at which each closed form is defined
ORDER6_MIN_N = {"5a": 2, "5b": 3, "5c": 2, "5d": 2, "5e": 2, "5f": 3, "5g": 3}

_ORDER6_BY_DIAGRAM = {
    canonicalize(parse_monomial(ORDER6_SHAPES[tag])): tag
    for tag in ("5a", "5b", "5e", "5f", "5g")
}


def order6_catalog(shape: str, N: int) -> Fraction:
    """Closed forms for the order-6 diagrams that are not fans or Z-shapes."""
    if shape not in ORDER6_MIN_N:
        raise ValueError(f"unknown order-6 shape {shape!r}")
    if N < ORDER6_MIN_N[shape]:
        raise DimensionTooSmall(f"I({shape}) needs N >= {ORDER6_MIN_N[shape]}, got N={N}")
    ratio = Fraction(double_factorial(N - 2), double_factorial(N + 4))
    if shape == "5a":
        return Fraction(N + 3, (N - 1) * N * (N + 2) * (N + 4))
    if shape == "5b":
        return Fraction(N * (N + 3) - 2, (N - 2) * (N - 1) * N * (N + 2) * (N + 4))
    if shape in ("5c", "5d"):
        return -3 * ratio / (N - 1)
    if shape == "5e":
        return -ratio / (N - 1)
    if shape == "5f":
        return Fraction(-1, (N - 2) * (N - 1) * N * (N + 4))
    return 2 * ratio / ((N - 2) * (N - 1))


def _is_star(d: Diagram) -> bool:
    t, s = d.shape
    return t <= 1 or s <= 1


def classify(d: Diagram) -> Classification:
    if vanishes_by_invariance(d):
        return Classification.ZERO
    if _is_star(d):
        return Classification.FAN
    if d.shape == (2, 2):
        nonzero = sum(1 for row in d.matrix for m in row if m)
        return Classification.EXCHANGE if nonzero == 4 else Classification.Z
    if d in _ORDER6_BY_DIAGRAM:
        return Classification.ORDER6
    return Classification.UNSUPPORTED


def order6_tag(d: Diagram) -> str | None:
    return _ORDER6_BY_DIAGRAM.get(d)


def _z_args(d: Diagram) -> tuple[int, int, int]:
    """Read a 2x2 Z-diagram as Z(m1, m2, m3) = O11^m1 O12^m2 O22^m3."""
    (a, b), (c, e) = d.matrix
    if c == 0:
        return a, b, e
    if b == 0:
        return a, c, e
    if a == 0:
        return b, e, c
    return b, a, c  # e == 0: path b - a - c


def evaluate(m: Monomial | str, N: int) -> IntegralResult:
    """Exact E[monomial] over Haar-distributed O(N)."""
    if isinstance(m, str):
        m = parse_monomial(m)
    if N < 1:
        raise DimensionTooSmall(f"N must be >= 1, got {N}")
    d = canonicalize(m)
    need = required_dimension(d)
    if N < need:
        raise DimensionTooSmall(f"{m} needs N >= {need} distinct indices, got N={N}")

    kind = classify(d)
    if kind is Classification.ZERO:
        return IntegralResult(Fraction(0), kind, "odd dot degree (sign-flip invariance)", d)
    if kind is Classification.FAN:
        if not d.edges:
            return IntegralResult(Fraction(1), kind, "normalization", d)
        lines = [e[2] for e in d.edges]
        if len(lines) == 1:
            return IntegralResult(f1(lines[0], N), kind, f"F1({lines[0]})", d)
        label = ",".join(map(str, lines))
        return IntegralResult(fan(lines, N), kind, f"F{len(lines)}({label}) fan relation", d)
    if kind is Classification.Z:
        m1, m2, m3 = _z_args(d)
        return IntegralResult(z_integral(m1, m2, m3, N), kind, f"Z({m1},{m2},{m3}) recursion", d)
    if kind is Classification.EXCHANGE:
        (r, u), (s, t) = d.matrix
        return IntegralResult(
            x_integral(r, s, t, u, N), kind, f"X({r},{s},{t},{u}) exchange recursion", d
        )
    if kind is Classification.ORDER6:
        tag = order6_tag(d)
        return IntegralResult(order6_catalog(tag, N), kind, f"I({tag}) order-6 closed form", d)
    return IntegralResult(None, kind, "no formula for this diagram", d)
