"""Truncated series with exact rational coefficients.

Three series shapes cover everything the package needs:

* :class:`RatSeries` -- sum_n c_n z^(s0+n) with rational c_n, truncated
  after the coefficient of index N (the order).  Exponents below the
  offset s0 are genuinely zero; coefficients beyond the order are
  unknown, never assumed zero.
* :class:`JetSeries` -- like RatSeries but every coefficient is a
  truncated polynomial in a deformation parameter eps, representing an
  expansion at exponent s0 + eps.  The z^eps prefactor stays symbolic
  until converted to logarithmic form.
* :class:`LogSeries` -- sum_k (log z)^k / k! * S_k(z) with RatSeries
  blocks S_k, the shape of solution bases at a point of maximal
  unipotent monodromy.

Constructors for hypergeometric coefficient series, Frobenius
deformations and their logarithmic derivatives, quasi-period series in
the inverse coordinate, certified moment sums, termwise calculus and
rigorous evaluation live here as module functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .numerics import (GUARD_DIGITS, HPReal, as_fraction, pochhammer,
                       rat_from_str, rat_to_str)

Rat = Union[Fraction, int]


class OrderError(ValueError):
    """A truncation order is too small for the requested operation."""


class TailBoundError(ValueError):
    """No certified tail bound is available for an evaluation."""


class PoleCollision(ValueError):
    """A Frobenius deformation hit a pole of the coefficient ratio."""

    def __init__(self, index: int, step: int):
        self.index = index
        self.step = step
        super().__init__(
            f"lower index {index} collides with a pole at series step {step}")


# ---------------------------------------------------------------------------
# jets: truncated polynomials in the deformation parameter
# ---------------------------------------------------------------------------

def jet_from_scalar(c: Rat, jet_order: int) -> list[Fraction]:
    return [as_fraction(c)] + [Fraction(0)] * jet_order


def jet_linear(c0: Rat, jet_order: int) -> list[Fraction]:
    """The jet of c0 + eps."""
    out = jet_from_scalar(c0, jet_order)
    if jet_order >= 1:
        out[1] = Fraction(1)
    return out


def jet_add(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    return [x + y for x, y in zip(a, b)]


def jet_scale(a: Sequence[Fraction], c: Fraction) -> list[Fraction]:
    return [c * x for x in a]


def jet_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    n = len(a)
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j in range(n - i):
            out[i + j] += x * b[j]
    return out


def jet_inv(a: Sequence[Fraction]) -> list[Fraction]:
    if a[0] == 0:
        raise ZeroDivisionError("jet with vanishing constant term")
    n = len(a)
    out = [Fraction(0)] * n
    out[0] = 1 / a[0]
    for k in range(1, n):
        out[k] = -sum(a[i] * out[k - i] for i in range(1, k + 1)) / a[0]
    return out


# ---------------------------------------------------------------------------
# plain rational series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailMajorant:
    """Certificate |c_n| <= bound * ratio^n for every index n >= start."""

    start: int
    ratio: Fraction
    bound: Fraction


@dataclass
class RatSeries:
    offset: Fraction
    coeffs: list
    majorant: Optional[TailMajorant] = field(default=None, compare=False)

    def __post_init__(self):
        self.offset = as_fraction(self.offset)
        self.coeffs = [as_fraction(c) for c in self.coeffs]
        if not self.coeffs:
            raise ValueError("a truncated series needs at least one term")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, c: Rat, order: int) -> "RatSeries":
        coeffs = [as_fraction(c)] + [Fraction(0)] * order
        return cls(Fraction(0), coeffs)

    def coeff_at(self, exponent: Rat) -> Fraction:
        """Coefficient of z^exponent; zero below the offset, error beyond."""
        idx = as_fraction(exponent) - self.offset
        if idx.denominator != 1:
            return Fraction(0)
        idx = int(idx)
        if idx < 0:
            return Fraction(0)
        if idx > self.order:
            raise OrderError(f"coefficient {exponent} is beyond the truncation")
        return self.coeffs[idx]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def truncate(self, order: int) -> "RatSeries":
        if order > self.order:
            raise OrderError("cannot extend a truncated series")
        return RatSeries(self.offset, self.coeffs[: order + 1], self.majorant)

    def shift(self, k: int) -> "RatSeries":
        """Multiply by z^k (offset moves; coefficients are untouched)."""
        return RatSeries(self.offset + k, list(self.coeffs))

    def scale(self, c: Rat) -> "RatSeries":
        c = as_fraction(c)
        maj = self.majorant
        if maj is not None:
            maj = TailMajorant(maj.start, maj.ratio, abs(c) * maj.bound)
        return RatSeries(self.offset, [c * a for a in self.coeffs], maj)

    def _aligned(self, other: "RatSeries") -> tuple[Fraction, list, list, int]:
        d = self.offset - other.offset
        if d.denominator != 1:
            raise ValueError("offsets differ by a non-integer")
        d = int(d)
        if d >= 0:
            a = [Fraction(0)] * d + self.coeffs
            b = list(other.coeffs)
            off = other.offset
        else:
            a = list(self.coeffs)
            b = [Fraction(0)] * (-d) + other.coeffs
            off = self.offset
        order = min(len(a), len(b)) - 1
        return off, a, b, order

    def __add__(self, other: "RatSeries") -> "RatSeries":
        off, a, b, order = self._aligned(other)
        return RatSeries(off, [a[i] + b[i] for i in range(order + 1)])

    def __sub__(self, other: "RatSeries") -> "RatSeries":
        return self + other.scale(-1)

    def __mul__(self, other: "RatSeries") -> "RatSeries":
        order = min(self.order, other.order)
        out = [Fraction(0)] * (order + 1)
        for i, a in enumerate(self.coeffs[: order + 1]):
            if a == 0:
                continue
            for j in range(order + 1 - i):
                out[i + j] += a * other.coeffs[j]
        return RatSeries(self.offset + other.offset, out)

    def theta(self) -> "RatSeries":
        """Apply z d/dz termwise."""
        return RatSeries(self.offset,
                         [(self.offset + n) * c for n, c in enumerate(self.coeffs)])

    def inverse(self) -> "RatSeries":
        if self.coeffs[0] == 0:
            raise ZeroDivisionError("leading coefficient vanishes")
        inv = [Fraction(0)] * (self.order + 1)
        inv[0] = 1 / self.coeffs[0]
        for n in range(1, self.order + 1):
            inv[n] = -sum(self.coeffs[i] * inv[n - i]
                          for i in range(1, n + 1)) / self.coeffs[0]
        return RatSeries(-self.offset, inv)

    def pow_int(self, e: int) -> "RatSeries":
        base = self if e >= 0 else self.inverse()
        out = RatSeries.constant(1, self.order)
        for _ in range(abs(e)):
            out = out * base
        return out

    def to_json(self) -> dict:
        return {
            "offset": rat_to_str(self.offset),
            "order": self.order,
            "coefficients": [rat_to_str(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RatSeries":
        coeffs = [rat_from_str(c) for c in obj["coefficients"]]
        s = cls(rat_from_str(obj["offset"]), coeffs)
        if s.order != int(obj["order"]):
            raise ValueError("inconsistent order field")
        return s


@dataclass
class JetSeries:
    """Series whose coefficients are jets at exponent offset + eps."""

    offset: Fraction
    jet_order: int
    coeffs: list

    def __post_init__(self):
        self.offset = as_fraction(self.offset)
        width = self.jet_order + 1
        self.coeffs = [list(map(as_fraction, c)) for c in self.coeffs]
        for c in self.coeffs:
            if len(c) != width:
                raise ValueError("ragged jet coefficients")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return all(all(x == 0 for x in c) for c in self.coeffs)

    def jet_free(self) -> RatSeries:
        """Drop the deformation, keeping the eps^0 part."""
        return RatSeries(self.offset, [c[0] for c in self.coeffs])

    def __eq__(self, other):
        if not isinstance(other, JetSeries):
            return NotImplemented
        return (self.offset == other.offset
                and self.jet_order == other.jet_order
                and self.coeffs == other.coeffs)

    def __sub__(self, other: "JetSeries") -> "JetSeries":
        if (self.offset, self.jet_order) != (other.offset, other.jet_order):
            raise ValueError("jet series shapes differ")
        order = min(self.order, other.order)
        return JetSeries(self.offset, self.jet_order,
                         [[a - b for a, b in zip(self.coeffs[n], other.coeffs[n])]
                          for n in range(order + 1)])

    def to_json(self) -> dict:
        return {
            "offset": rat_to_str(self.offset),
            "jet_order": self.jet_order,
            "order": self.order,
            "coefficients": [[rat_to_str(x) for x in c] for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "JetSeries":
        return cls(rat_from_str(obj["offset"]), int(obj["jet_order"]),
                   [[rat_from_str(x) for x in c] for c in obj["coefficients"]])


@dataclass
class LogSeries:
    """sum_k (log z)^k / k! * blocks[k], all blocks sharing offset/order."""

    blocks: list

    def __post_init__(self):
        if not self.blocks:
            raise ValueError("need at least one block")
        off = self.blocks[0].offset
        order = self.blocks[0].order
        for b in self.blocks:
            if b.offset != off or b.order != order:
                raise ValueError("blocks must share offset and order")

    @property
    def offset(self) -> Fraction:
        return self.blocks[0].offset

    @property
    def order(self) -> int:
        return self.blocks[0].order

    @property
    def log_degree(self) -> int:
        return len(self.blocks) - 1

    def is_zero(self) -> bool:
        return all(b.is_zero() for b in self.blocks)

    def __eq__(self, other):
        if not isinstance(other, LogSeries):
            return NotImplemented
        return self.blocks == other.blocks

    def to_json(self) -> dict:
        return {"blocks": [{"log_degree": k, "series": b.to_json()}
                           for k, b in enumerate(self.blocks)]}

    @classmethod
    def from_json(cls, obj: dict) -> "LogSeries":
        blocks = [None] * len(obj["blocks"])
        for entry in obj["blocks"]:
            blocks[int(entry["log_degree"])] = RatSeries.from_json(entry["series"])
        return cls(blocks)


# ---------------------------------------------------------------------------
# hypergeometric constructors
# ---------------------------------------------------------------------------

def _index_lists(a, b) -> tuple[list, list]:
    if hasattr(a, "a") and b is None:  # an HGDatum-like object
        return list(a.a), list(a.b)
    return [as_fraction(x) for x in a], [as_fraction(x) for x in b]


def hg_coefficients(a: Sequence[Rat], b: Sequence[Rat], order: int) -> RatSeries:
    """Coefficient series prod_j [a_j]_n / [b_j]_n at offset zero.

    Attaches a certified tail majorant: with the index sets sorted and
    paired, each ratio factor (a_j + n)/(b_j + n) is monotone toward 1,
    so its value at n0 bounds every later one.
    """
    a, b = _index_lists(a, b)
    coeffs = [Fraction(1)]
    for n in range(order):
        num = Fraction(1)
        den = Fraction(1)
        for x in a:
            num *= x + n
        for y in b:
            den *= y + n
        coeffs.append(coeffs[-1] * num / den)
    n0 = min(order, 16)
    ratio = Fraction(1)
    for x, y in zip(sorted(a), sorted(b)):
        ratio *= max(Fraction(1), (x + n0) / (y + n0))
    bound = abs(coeffs[n0]) / ratio ** n0 if coeffs[n0] != 0 else Fraction(0)
    return RatSeries(Fraction(0), coeffs, TailMajorant(n0, ratio, bound))


def frobenius_series(a: Sequence[Rat], b: Sequence[Rat], s0: Rat,
                     jet_order: int, order: int) -> JetSeries:
    """The deformed series sum_n prod_j [s+a_j]_n/[s+b_j]_n z^(s+n) at s = s0 + eps.

    Coefficients are exact jets in eps; the z^(s0+eps) prefactor is
    carried by the series shape.  A vanishing denominator factor
    s0 + b_j + n (a pole of the deformation through the requested jet
    order) raises :class:`PoleCollision` naming the offending index.
    """
    a, b = _index_lists(a, b)
    s0 = as_fraction(s0)
    coeffs = [jet_from_scalar(1, jet_order)]
    for n in range(order):
        num = jet_from_scalar(1, jet_order)
        den = jet_from_scalar(1, jet_order)
        for x in a:
            num = jet_mul(num, jet_linear(x + s0 + n, jet_order))
        for j, y in enumerate(b):
            if y + s0 + n == 0:
                raise PoleCollision(j, n)
            den = jet_mul(den, jet_linear(y + s0 + n, jet_order))
        coeffs.append(jet_mul(coeffs[-1], jet_mul(num, jet_inv(den))))
    return JetSeries(s0, jet_order, coeffs)


def log_solution(phi: JetSeries, derivative: int) -> LogSeries:
    """The derivative-th s-derivative of a Frobenius deformation at s0.

    Expanding z^(s0+eps) = z^s0 exp(eps log z) converts the jet data to
    logarithmic blocks: the (log z)^k/k! block of d^c Phi / ds^c is
    c! times the eps^(c-k) jet layer.
    """
    c = derivative
    if c > phi.jet_order:
        raise OrderError("jet order too small for this derivative")
    fact = Fraction(math.factorial(c))
    blocks = []
    for k in range(c + 1):
        blocks.append(RatSeries(phi.offset,
                                [fact * jet[c - k] for jet in phi.coeffs]))
    return LogSeries(blocks)


def frobenius_basis(a: Sequence[Rat], order: int) -> list:
    """Solution basis at a maximal unipotent monodromy point (all lower
    indices equal to 1): the s-derivatives of the deformation at s = 0,
    one for each log degree 0 .. r-1.
    """
    a = [as_fraction(x) for x in a]
    r = len(a)
    phi = frobenius_series(a, [Fraction(1)] * r, Fraction(0), r - 1, order)
    return [log_solution(phi, c) for c in range(r)]


def quasiperiod_series(a: Sequence[Rat], order: int) -> RatSeries:
    """Series sum_{n>=1} (n!)^r w^n / (n^r prod_j [a_j]_n) in w = 1/z.

    This is the single-valued lift of the quasi-period near z = infinity
    for upper indices a and lower indices all 1; the associated
    inhomogeneous equation has right-hand side 1.
    """
    a = [as_fraction(x) for x in a]
    if order < 1:
        raise OrderError("need at least the w^1 term")
    r = len(a)
    coeffs = []
    t = Fraction(1)
    for x in a:
        t /= x
    coeffs.append(t)  # t_1 = 1 / prod a_j
    for n in range(1, order):
        # t_{n+1} = t_n * n^r / prod (a_j + n)
        ratio = Fraction(n) ** r
        for x in a:
            ratio /= x + n
        t *= ratio
        coeffs.append(t)
    # |t_{n+1}/t_n| = n^r / prod (n + a_j) < 1, so t_1 majorizes the tail
    maj = TailMajorant(0, Fraction(1), abs(coeffs[0]))
    return RatSeries(Fraction(1), coeffs, maj)


def moment_sums(a: Sequence[Rat], z0: Rat, q: int, digits: int,
                progress: Optional[Callable[[int, float], None]] = None) -> list:
    """Certified values S_j = sum_{n>=1} n^j (n!)^r z0^(-n) / (n^r prod [a_j]_n).

    Requires |z0| > 1 (the convergence region of the quasi-period at
    infinity).  Partial sums are exact rationals; summation stops once a
    geometric tail bound drops below 10^-(digits + guard), and that
    bound is carried in the returned balls.  ``progress``, if given, is
    called with (terms summed, current tail estimate) and may abort the
    computation by raising.
    """
    a = [as_fraction(x) for x in a]
    z0 = as_fraction(z0)
    if abs(z0) <= 1:
        raise ValueError("moment sums require |z0| > 1")
    if q < 0:
        raise ValueError("q must be nonnegative")
    r = len(a)
    target = Fraction(1, 10 ** (digits + GUARD_DIGITS))
    sums = [Fraction(0)] * (q + 1)
    u = Fraction(1)  # u_n = (n!)^r / (n^r prod [a_j]_n) z0^(-n)
    n = 0
    while True:
        n += 1
        if n == 1:
            for x in a:
                u /= x
            u /= z0
        else:
            # u_n = u_{n-1} * (n-1)^r / (prod (a_j + n - 1) * z0)
            ratio = Fraction(n - 1) ** r
            for x in a:
                ratio /= x + (n - 1)
            u *= ratio / z0
        npow = Fraction(1)
        for j in range(q + 1):
            sums[j] += npow * u
            npow *= n
        # certified tail: |n^j u_n| ratio is bounded by ((n+1)/n)^q / |z0|
        rho = (Fraction(n + 1, n)) ** q / abs(z0)
        if rho < 1:
            head = abs(u) * Fraction(n) ** q
            tail = head * rho / (1 - rho)
            if progress is not None and n % 32 == 0:
                progress(n, float(tail))
            if tail < target:
                break
        if n > 100000:
            raise TailBoundError("moment sum failed to converge")
    if progress is not None:
        progress(n, float(tail))
    return [HPReal(s, tail, digits) for s in sums]


def eval_series(s: RatSeries, z0: Rat, digits: int) -> HPReal:
    """Evaluate a truncated series at a rational point with a certified tail.

    The series must carry a tail majorant |c_n| <= A rho^n (n >= n0) and
    the point must satisfy rho |z0| < 1 strictly; otherwise the tail is
    not certifiable and :class:`TailBoundError` is raised.
    """
    z0 = as_fraction(z0)
    if s.offset.denominator != 1:
        raise ValueError("evaluation needs an integer exponent offset")
    maj = s.majorant
    if maj is None:
        raise TailBoundError("series carries no tail majorant")
    if s.order < maj.start:
        raise TailBoundError("truncation order below the majorant start")
    geom = maj.ratio * abs(z0)
    if geom >= 1:
        raise TailBoundError("point is outside the certified region")
    total = Fraction(0)
    zpow = z0 ** int(s.offset)
    for c in s.coeffs:
        total += c * zpow
        zpow *= z0
    tail = maj.bound * geom ** (s.order + 1) / (1 - geom) * abs(z0) ** int(s.offset)
    return HPReal(total, tail, digits)


def integrate_termwise(s: RatSeries, mode: str) -> RatSeries:
    """Exact termwise primitive, with zero constant of integration.

    mode "dz":    c_n z^(s0+n) -> c_n z^(s0+n+1) / (s0+n+1)
    mode "dz/z":  c_n z^(s0+n) -> c_n z^(s0+n) / (s0+n); the exponent-zero
    coefficient must vanish (a log term is outside this type).
    """
    if mode == "dz":
        out = []
        for n, c in enumerate(s.coeffs):
            e = s.offset + n + 1
            if e == 0:
                raise ValueError("dz-primitive of the z^-1 term is a log")
            out.append(c / e)
        return RatSeries(s.offset + 1, out)
    if mode == "dz/z":
        out = []
        for n, c in enumerate(s.coeffs):
            e = s.offset + n
            if e == 0:
                if c != 0:
                    raise ValueError("dz/z-primitive needs a vanishing constant term")
                out.append(Fraction(0))
            else:
                out.append(c / e)
        return RatSeries(s.offset, out)
    raise ValueError("mode must be 'dz' or 'dz/z'")
