"""Exact rationals, certified ball reals, zeta constants, integer relations.

Exact scalars are plain :class:`fractions.Fraction` values (always stored
in lowest terms with positive denominator, arithmetic never rounds), so
``BigRational`` is an alias rather than a wrapper.  High precision reals
are :class:`HPReal` balls: a dyadic rational midpoint at a declared
working precision together with an absolute error bound.  Every
operation propagates the bound conservatively, and comparisons that the
bounds cannot decide raise :class:`IndeterminateComparison` instead of
guessing.

Zeta values at integer arguments come from the alternating (eta
function) series with Chebyshev-style acceleration, which yields an
exact rational approximant together with a proven tail bound.  Integer
relation detection reduces the standard relation lattice
``[identity block | scaled value column]`` with an exact-arithmetic LLL.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

#: Exact rational scalar type used throughout the package.
BigRational = Fraction

#: Guard digits added to every requested working precision.
GUARD_DIGITS = 10

RationalLike = Union[Fraction, int]


class IndeterminateComparison(ArithmeticError):
    """Raised when ball intervals overlap and a comparison has no answer."""


class PrecisionError(ValueError):
    """Raised when inputs do not carry enough certified precision."""


def as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def rat_to_str(x: RationalLike) -> str:
    """Serialize a rational as ``p/q`` (``q`` omitted when 1)."""
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def rat_from_str(s: str) -> Fraction:
    """Parse the ``p/q`` wire form (also accepts plain integers)."""
    return Fraction(s.strip())


def pochhammer(a: RationalLike, n: int) -> Fraction:
    """Rising factorial a (a+1) ... (a+n-1); the empty product for n = 0."""
    if n < 0:
        raise ValueError("pochhammer needs n >= 0")
    a = as_fraction(a)
    out = Fraction(1)
    for i in range(n):
        out *= a + i
    return out


def _bits_for(digits: int) -> int:
    # dyadic grid fine enough for `digits` decimal digits plus the guard
    return int(math.ceil((digits + GUARD_DIGITS) * math.log2(10))) + 4


def _snap_up(x: Fraction, bits: int) -> Fraction:
    """Smallest grid point >= x (grid spacing 2^-bits); keeps bounds sound."""
    scaled = x * (1 << bits)
    n = scaled.numerator // scaled.denominator
    if n * scaled.denominator < scaled.numerator:
        n += 1
    return Fraction(n, 1 << bits)


def decimal_string(x: Fraction, max_digits: int = 4000) -> str:
    """Exact decimal expansion of a rational whose denominator is 2^a 5^b."""
    sign = "-" if x < 0 else ""
    x = abs(x)
    ip = x.numerator // x.denominator
    frac = x - ip
    digits = []
    while frac != 0:
        if len(digits) > max_digits:
            raise ValueError("decimal expansion does not terminate")
        frac *= 10
        d = frac.numerator // frac.denominator
        digits.append(str(d))
        frac -= d
    if not digits:
        return f"{sign}{ip}"
    return f"{sign}{ip}." + "".join(digits)


class HPReal:
    """A real number known to lie within ``value +- err``.

    ``value`` is snapped to a dyadic grid determined by the declared
    working precision (``digits`` decimal digits plus a fixed guard), and
    whatever the snap discards is folded into ``err``.  All arithmetic is
    carried out exactly on the grid representatives, so the only error
    sources are the declared input bounds and grid snapping; both are
    tracked as exact rationals.
    """

    __slots__ = ("value", "err", "digits")

    def __init__(self, value: RationalLike, err: RationalLike = 0,
                 digits: int = 30):
        if digits < 1:
            raise ValueError("digits must be positive")
        value = as_fraction(value)
        err = as_fraction(err)
        if err < 0:
            raise ValueError("error bound must be nonnegative")
        bits = _bits_for(digits)
        scaled = value * (1 << bits)
        n = round(scaled)
        snapped = Fraction(n, 1 << bits)
        err += abs(value - snapped)
        object.__setattr__(self, "value", snapped)
        object.__setattr__(self, "err", _snap_up(err, bits))
        object.__setattr__(self, "digits", digits)

    def __setattr__(self, name, val):  # pragma: no cover - immutability guard
        raise AttributeError("HPReal is immutable")

    # -- interval views ------------------------------------------------

    def lower(self) -> Fraction:
        return self.value - self.err

    def upper(self) -> Fraction:
        return self.value + self.err

    def magnitude_upper(self) -> Fraction:
        """Certified upper bound on the absolute value."""
        return abs(self.value) + self.err

    def is_below(self, bound: RationalLike) -> bool:
        """True iff |self| is certainly < bound."""
        return self.magnitude_upper() < as_fraction(bound)

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other) -> "HPReal":
        if isinstance(other, HPReal):
            return other
        return HPReal(as_fraction(other), 0, self.digits)

    def __add__(self, other) -> "HPReal":
        o = self._coerce(other)
        return HPReal(self.value + o.value, self.err + o.err,
                      min(self.digits, o.digits))

    __radd__ = __add__

    def __neg__(self) -> "HPReal":
        return HPReal(-self.value, self.err, self.digits)

    def __sub__(self, other) -> "HPReal":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "HPReal":
        return self._coerce(other) - self

    def __mul__(self, other) -> "HPReal":
        o = self._coerce(other)
        err = (abs(self.value) * o.err + abs(o.value) * self.err
               + self.err * o.err)
        return HPReal(self.value * o.value, err, min(self.digits, o.digits))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "HPReal":
        o = self._coerce(other)
        if abs(o.value) <= o.err:
            raise PrecisionError("division by a ball containing zero")
        denom_low = abs(o.value) - o.err
        err = (abs(self.value) * o.err + abs(o.value) * self.err) \
            / (abs(o.value) * denom_low)
        return HPReal(self.value / o.value, err, min(self.digits, o.digits))

    def __abs__(self) -> "HPReal":
        return HPReal(abs(self.value), self.err, self.digits)

    # -- comparisons: indeterminate overlaps raise ----------------------

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if self.upper() < o.lower():
            return -1
        if self.lower() > o.upper():
            return 1
        if self.err == 0 and o.err == 0 and self.value == o.value:
            return 0
        raise IndeterminateComparison(
            "intervals overlap; comparison undecidable at this precision")

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if not isinstance(other, (HPReal, Fraction, int)):
            return NotImplemented
        return self._cmp(other) == 0

    def __hash__(self):
        return hash((self.value, self.err))

    # -- io --------------------------------------------------------------

    def __repr__(self):
        return f"HPReal({float(self.value)!r} +- {float(self.err):.3e}, digits={self.digits})"

    def to_json(self) -> dict:
        return {
            "value": decimal_string(self.value),
            "err": rat_to_str(self.err),
            "digits": self.digits,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "HPReal":
        return cls(Fraction(obj["value"]), rat_from_str(obj["err"]),
                   int(obj["digits"]))


# ---------------------------------------------------------------------------
# zeta constants
# ---------------------------------------------------------------------------

def zeta_int(s: int, digits: int) -> HPReal:
    """Riemann zeta at an integer s >= 2 with error below 10^-digits.

    Uses the accelerated alternating series
    ``zeta(s) = -1/(d_n (1 - 2^(1-s))) * sum_{k<n} (-1)^k (d_k - d_n)/(k+1)^s``
    whose tail is bounded by ``3 / ((3 + sqrt(8))^n |1 - 2^(1-s)|)``.  The
    approximant is an exact rational, so the returned ball is fully
    certified.
    """
    if s < 2:
        raise ValueError("zeta_int requires s >= 2")
    target = Fraction(1, 10 ** (digits + GUARD_DIGITS))
    # 3 + sqrt(8) > 29/5, and |1 - 2^(1-s)|^-1 <= 2 for s >= 2
    n = int(math.ceil((digits + GUARD_DIGITS + 1) / math.log10(5.8))) + 4
    while 6 * Fraction(5, 29) ** n > target:
        n += 4
    # d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    u = Fraction(1, n)
    prefix = u
    d = [Fraction(n) * prefix]
    for i in range(n):
        u *= Fraction(4 * (n + i) * (n - i), (2 * i + 1) * (2 * i + 2))
        prefix += u
        d.append(Fraction(n) * prefix)
    d_n = d[n]
    acc = Fraction(0)
    for k in range(n):
        term = (d[k] - d_n) / Fraction((k + 1) ** s)
        acc += term if k % 2 == 0 else -term
    value = -acc / (d_n * (1 - Fraction(1, 2 ** (s - 1))))
    bound = 6 * Fraction(5, 29) ** n
    return HPReal(value, bound, digits)


def pi_const(digits: int) -> HPReal:
    """pi via Machin's formula with explicit alternating tail bounds."""
    target = Fraction(1, 10 ** (digits + GUARD_DIGITS))

    def atan_inv(x: int) -> tuple[Fraction, Fraction]:
        total = Fraction(0)
        k = 0
        while True:
            term = Fraction((-1) ** k, (2 * k + 1) * x ** (2 * k + 1))
            total += term
            nxt = Fraction(1, (2 * k + 3) * x ** (2 * k + 3))
            if 20 * nxt < target:
                return total, nxt
            k += 1

    a5, t5 = atan_inv(5)
    a239, t239 = atan_inv(239)
    return HPReal(16 * a5 - 4 * a239, 16 * t5 + 4 * t239, digits)


def sqrt_rational(x: RationalLike, digits: int) -> HPReal:
    """Certified square root of a nonnegative rational."""
    x = as_fraction(x)
    if x < 0:
        raise ValueError("sqrt of a negative rational")
    bits = _bits_for(digits) + 8
    p, q = x.numerator, x.denominator
    r = math.isqrt(p * q << (2 * bits))
    val = Fraction(r, q << bits)
    return HPReal(val, Fraction(1, q << bits), digits)


def log_rational(x: RationalLike, digits: int) -> HPReal:
    """Certified natural log of a positive rational, via the atanh series."""
    x = as_fraction(x)
    if x <= 0:
        raise ValueError("log of a nonpositive rational")
    target = Fraction(1, 10 ** (digits + GUARD_DIGITS))
    u = (x - 1) / (x + 1)
    u2 = u * u
    total = Fraction(0)
    pw = u
    k = 0
    while True:
        total += pw / (2 * k + 1)
        pw *= u2
        # geometric tail bound for 2 * sum_{j>k} |u|^(2j+1)/(2j+1)
        tail = 2 * abs(pw) / ((2 * k + 3) * (1 - u2))
        if tail < target:
            return HPReal(2 * total, tail, digits)
        k += 1


# ---------------------------------------------------------------------------
# integer relation detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntRelation:
    """A nonzero integer vector c with |sum c_i x_i| certified small."""

    coefficients: tuple[int, ...]
    residual: HPReal

    def __post_init__(self):
        if not any(self.coefficients):
            raise ValueError("relation vector must be nonzero")


def lll_reduce(rows: Sequence[Sequence[int]],
               delta: Fraction = Fraction(99, 100)) -> list[list[int]]:
    """LLL reduction of an integer basis, entirely in exact arithmetic.

    Dimensions in this package are tiny (the relation lattices have at
    most a dozen rows), so the Gram-Schmidt data is simply recomputed
    after every basis change.
    """
    basis = [[int(x) for x in row] for row in rows]
    n = len(basis)
    if n <= 1:
        return basis

    def gso():
        star: list[list[Fraction]] = []
        norms: list[Fraction] = []
        mu = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            v = [Fraction(x) for x in basis[i]]
            for j in range(i):
                if norms[j] == 0:
                    continue
                m = Fraction(sum(Fraction(x) * y for x, y in zip(basis[i], star[j]))) / norms[j]
                mu[i][j] = m
                v = [a - m * c for a, c in zip(v, star[j])]
            star.append(v)
            norms.append(sum(a * a for a in v))
        return norms, mu

    norms, mu = gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            if abs(mu[k][j]) > Fraction(1, 2):
                r = round(mu[k][j])
                basis[k] = [a - r * c for a, c in zip(basis[k], basis[j])]
                norms, mu = gso()
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            basis[k], basis[k - 1] = basis[k - 1], basis[k]
            norms, mu = gso()
            k = max(k - 1, 1)
    return basis


def relation_residual(coefficients: Iterable[int],
                      xs: Sequence[HPReal]) -> HPReal:
    """Exact ball evaluation of |sum c_i x_i| with the full error budget."""
    val = Fraction(0)
    err = Fraction(0)
    for c, x in zip(coefficients, xs):
        val += c * x.value
        err += abs(c) * x.err
    digits = min(x.digits for x in xs)
    return HPReal(abs(val), err, digits)


def integer_relation(xs: Sequence[HPReal], height_bound: int,
                     digits: int) -> Optional[IntRelation]:
    """Search for a small integer relation among the given ball reals.

    Reduces the lattice spanned by ``[e_i | round(x_i * 10^(digits-10))]``
    and accepts a reduced vector only if its coefficients are bounded by
    ``height_bound`` and the exactly re-summed residual (including every
    input error bound) is certified below ``10^(-digits//2)``.  Returns
    ``None`` when nothing passes; inputs whose error bounds are too weak
    for the detection threshold are rejected outright.
    """
    if len(xs) < 2:
        raise ValueError("need at least two values")
    err_cap = Fraction(1, 10 ** digits)
    for x in xs:
        if x.err >= err_cap:
            raise PrecisionError(
                "input error bound too large for requested detection digits")
    n = len(xs)
    scale = 10 ** (digits - GUARD_DIGITS)
    rows = []
    for i, x in enumerate(xs):
        row = [0] * n
        row[i] = 1
        row.append(round(x.value * scale))
        rows.append(row)
    reduced = lll_reduce(rows)
    threshold = Fraction(1, 10 ** (digits // 2))
    best: Optional[IntRelation] = None
    for row in reduced:
        coeffs = tuple(row[:n])
        if not any(coeffs):
            continue
        if max(abs(c) for c in coeffs) > height_bound:
            continue
        residual = relation_residual(coeffs, xs)
        if not residual.is_below(threshold):
            continue
        if best is None or residual.magnitude_upper() < best.residual.magnitude_upper():
            best = IntRelation(coeffs, residual)
    return best
