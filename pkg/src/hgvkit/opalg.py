"""The noncommutative operator ring in z (Laurent) and D = z d/dz.

Operators are kept in the normal form sum_k z^k q_k(D) with z-powers on
the left, so composition reduces to the single commutation rule
q(D) z^k = z^k q(D + k) and the action on z^(s+n) is multiplication by
q(s+n) followed by an exponent shift.  Constructors for the
hypergeometric Picard-Fuchs operator, its inverse-coordinate companion,
power-map pullbacks and the coordinate inversion z -> 1/w live here,
together with the action on all three series shapes.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence, Union

from . import rpoly
from .numerics import as_fraction, rat_to_str
from .series import (JetSeries, LogSeries, OrderError, RatSeries,
                     jet_add, jet_from_scalar, jet_linear, jet_mul, jet_scale)

Rat = Union[Fraction, int]


class DiffOp:
    """An element sum_k z^k q_k(D) of the operator ring.

    The term map stores, for each integer z-exponent k, the nonzero
    polynomial q_k(D) as a little-endian rational coefficient list.
    Values are immutable; all arithmetic returns fresh operators.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: dict):
        clean = {}
        for k, q in terms.items():
            q = rpoly.ptrim([as_fraction(c) for c in q])
            if q:
                clean[int(k)] = q
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, *_):  # pragma: no cover - immutability guard
        raise AttributeError("DiffOp is immutable")

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls) -> "DiffOp":
        return cls({})

    @classmethod
    def one(cls) -> "DiffOp":
        return cls({0: [Fraction(1)]})

    @classmethod
    def scalar(cls, c: Rat) -> "DiffOp":
        return cls({0: [as_fraction(c)]})

    @classmethod
    def z_power(cls, k: int) -> "DiffOp":
        return cls({k: [Fraction(1)]})

    @classmethod
    def d_shifted(cls, c: Rat = 0) -> "DiffOp":
        """The operator D + c."""
        return cls({0: [as_fraction(c), Fraction(1)]})

    @classmethod
    def from_d_poly(cls, q: Sequence[Rat], k: int = 0) -> "DiffOp":
        return cls({k: list(q)})

    # -- views ------------------------------------------------------------

    def terms(self) -> dict:
        return {k: list(q) for k, q in self._terms.items()}

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def z_min(self) -> int:
        return min(self._terms) if self._terms else 0

    @property
    def z_max(self) -> int:
        return max(self._terms) if self._terms else 0

    @property
    def z_spread(self) -> int:
        return self.z_max - self.z_min if self._terms else 0

    @property
    def d_degree(self) -> int:
        return max((len(q) - 1 for q in self._terms.values()), default=-1)

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(sorted((k, tuple(q)) for k, q in self._terms.items())))

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "DiffOp") -> "DiffOp":
        out = {k: list(q) for k, q in self._terms.items()}
        for k, q in other._terms.items():
            out[k] = rpoly.padd(out.get(k, []), q)
        return DiffOp(out)

    def __neg__(self) -> "DiffOp":
        return DiffOp({k: rpoly.pneg(q) for k, q in self._terms.items()})

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def scale(self, c: Rat) -> "DiffOp":
        c = as_fraction(c)
        return DiffOp({k: rpoly.pscale(q, c) for k, q in self._terms.items()})

    def __mul__(self, other: Union["DiffOp", Rat]) -> "DiffOp":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        # q(D) z^l = z^l q(D + l)
        out: dict = {}
        for k, q in self._terms.items():
            for l, p in other._terms.items():
                shifted = rpoly.pshift(q, Fraction(l))
                prod = rpoly.pmul(shifted, p)
                out[k + l] = rpoly.padd(out.get(k + l, []), prod)
        return DiffOp(out)

    def __rmul__(self, other: Rat) -> "DiffOp":
        return self.scale(other)

    def __pow__(self, e: int) -> "DiffOp":
        if e < 0:
            raise ValueError("negative operator powers are not defined")
        out = DiffOp.one()
        for _ in range(e):
            out = out * self
        return out

    def content_normalize(self) -> tuple["DiffOp", Fraction]:
        """Clear denominators and common integer content.

        Returns (normalized, factor) with normalized = factor * self and
        the coefficient of the highest D-power in the lowest z-term made
        positive.
        """
        if self.is_zero():
            return self, Fraction(1)
        flat = []
        for q in self._terms.values():
            flat.extend(q)
        _, factor = rpoly.pcontent_normalize(flat)
        factor = abs(factor)
        lead = self._terms[self.z_min][-1]
        if lead < 0:
            factor = -factor
        return self.scale(factor), factor

    # -- text form ----------------------------------------------------------

    def to_text(self) -> str:
        if self.is_zero():
            return "0"
        chunks = []
        for k in sorted(self._terms):
            q = self._terms[k]
            poly = self._poly_text(q)
            if k == 0:
                chunks.append(f"({poly})")
            else:
                chunks.append(f"z^{k} * ({poly})")
        return " + ".join(chunks)

    @staticmethod
    def _poly_text(q) -> str:
        parts = []
        for d in range(len(q) - 1, -1, -1):
            c = q[d]
            if c == 0:
                continue
            mag = rat_to_str(abs(c))
            if d == 0:
                body = mag
            else:
                dname = "D" if d == 1 else f"D^{d}"
                body = dname if abs(c) == 1 else f"{mag}*{dname}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    __repr__ = to_text

    @classmethod
    def parse(cls, text: str) -> "DiffOp":
        return _OpParser(text).parse()


class _OpParser:
    """Recursive-descent parser for operator expressions.

    Grammar (whitespace-insensitive):
        expr   := ['+'|'-'] term (('+'|'-') term)*
        term   := factor ('*'? factor)*        (products are noncommutative)
        factor := atom ['^' int]
        atom   := rational | 'z' | 'D' | '(' expr ')'
    """

    _token = re.compile(r"\s*(\d+/\d+|\d+|[zD()^*+-])")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = self._token.match(text, pos)
            if not m:
                if text[pos:].strip() == "":
                    break
                raise ValueError(f"bad operator syntax at position {pos}: {text[pos:pos+10]!r}")
            self.tokens.append((m.group(1), m.start(1)))
            pos = m.end()

    def _peek(self):
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def _next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok[0]

    def parse(self) -> DiffOp:
        op = self._expr()
        if self.pos != len(self.tokens):
            raise ValueError(f"trailing tokens at position {self.tokens[self.pos][1]}")
        return op

    def _expr(self) -> DiffOp:
        sign = 1
        if self._peek() in ("+", "-"):
            sign = -1 if self._next() == "-" else 1
        out = self._term().scale(sign)
        while self._peek() in ("+", "-"):
            sign = -1 if self._next() == "-" else 1
            out = out + self._term().scale(sign)
        return out

    def _term(self) -> DiffOp:
        out = self._factor()
        while True:
            tok = self._peek()
            if tok == "*":
                self._next()
                out = out * self._factor()
            elif tok is not None and tok not in ("+", "-", ")"):
                out = out * self._factor()
            else:
                return out

    def _factor(self) -> DiffOp:
        base = self._atom()
        if self._peek() == "^":
            self._next()
            tok = self._next()
            neg = False
            if tok == "-":
                neg = True
                tok = self._next()
            if not tok.isdigit():
                raise ValueError("exponent must be an integer")
            e = int(tok)
            if neg:
                if base == DiffOp.z_power(1):
                    return DiffOp.z_power(-e)
                raise ValueError("only z may carry negative exponents")
            if base._terms == DiffOp.z_power(1)._terms:
                return DiffOp.z_power(e)
            return base ** e
        return base

    def _atom(self) -> DiffOp:
        tok = self._peek()
        if tok is None:
            raise ValueError("unexpected end of operator expression")
        if tok == "(":
            self._next()
            inner = self._expr()
            if self._peek() != ")":
                raise ValueError("missing closing parenthesis")
            self._next()
            return inner
        if tok == "z":
            self._next()
            return DiffOp.z_power(1)
        if tok == "D":
            self._next()
            return DiffOp.d_shifted(0)
        if re.fullmatch(r"\d+/\d+|\d+", tok):
            self._next()
            return DiffOp.scalar(Fraction(tok))
        raise ValueError(f"unexpected token {tok!r}")


# ---------------------------------------------------------------------------
# constructors tied to hypergeometric data
# ---------------------------------------------------------------------------

def pf_formula(a: Sequence[Rat], b: Sequence[Rat]) -> DiffOp:
    """prod_j (D + b_j - 1) - z prod_j (D + a_j), for raw index lists."""
    left = DiffOp.one()
    for y in b:
        left = left * DiffOp.d_shifted(as_fraction(y) - 1)
    right = DiffOp.one()
    for x in a:
        right = right * DiffOp.d_shifted(as_fraction(x))
    return left - DiffOp.z_power(1) * right


def pf_operator(datum) -> DiffOp:
    """Picard-Fuchs operator of a validated hypergeometric datum."""
    return pf_formula(datum.a, datum.b)


def hat_operator(datum_or_a) -> DiffOp:
    """Inverse-coordinate companion prod_j (D + a_j) - w (D + 1)^r.

    Defined for data with every lower index equal to 1; this is the
    Picard-Fuchs operator of z * mu in the coordinate w = 1/z, and it
    sends z times the quasi-period to the constant 1.
    """
    if hasattr(datum_or_a, "a"):
        a = list(datum_or_a.a)
        if any(y != 1 for y in datum_or_a.b):
            raise ValueError("hat operator needs all lower indices equal to 1")
    else:
        a = [as_fraction(x) for x in datum_or_a]
    left = DiffOp.one()
    for x in a:
        left = left * DiffOp.d_shifted(x)
    right = DiffOp.d_shifted(1) ** len(a)
    return left - DiffOp.z_power(1) * right


def pullback_powermap(op: DiffOp, c: Rat, k: int) -> DiffOp:
    """Substitute old = c z^k: each old-coordinate term t^m q(D_t) becomes
    c^m z^(km) q(D_z / k).  Scalar prefactors such as the resulting 1/k^deg
    are preserved exactly; use content_normalize to clear them.
    """
    c = as_fraction(c)
    if k <= 0:
        raise ValueError("power map exponent must be a positive integer")
    if c == 0:
        raise ValueError("power map scale must be nonzero")
    if op.z_min < 0 and k != 1:
        raise ValueError("Laurent pullback only defined for k = 1")
    out = DiffOp.zero()
    for m, q in op.terms().items():
        # q(D/k) has coefficients q_d / k^d
        scaled = [coeff / Fraction(k) ** d for d, coeff in enumerate(q)]
        out = out + DiffOp.from_d_poly(scaled, k * m).scale(c ** m)
    return out


def invert_coordinate(op: DiffOp) -> DiffOp:
    """Conjugate by z -> 1/w: z^k q(D_z) becomes w^(-k) q(-D_w)."""
    out: dict = {}
    for k, q in op.terms().items():
        flipped = [c if d % 2 == 0 else -c for d, c in enumerate(q)]
        out[-k] = rpoly.padd(out.get(-k, []), flipped)
    return DiffOp(out)


# ---------------------------------------------------------------------------
# action on series
# ---------------------------------------------------------------------------

def apply(op: DiffOp, s):
    """Apply an operator to a series, exactly.

    The result offset moves down by the most negative z-shift of the
    operator and the number of trustworthy coefficients is preserved;
    exponents that only part of the operator can reach are dropped.
    Series whose truncation order is below the operator's z-spread are
    rejected.
    """
    if isinstance(s, RatSeries):
        return _apply_rat(op, s)
    if isinstance(s, JetSeries):
        return _apply_jet(op, s)
    if isinstance(s, LogSeries):
        return _apply_log(op, s)
    raise TypeError(f"cannot apply an operator to {type(s).__name__}")


def _check_order(op: DiffOp, order: int):
    if op.is_zero():
        return
    if order < op.z_spread:
        raise OrderError(
            f"series order {order} is below the operator z-spread {op.z_spread}")


def _apply_rat(op: DiffOp, s: RatSeries) -> RatSeries:
    _check_order(op, s.order)
    if op.is_zero():
        return RatSeries(s.offset, [Fraction(0)] * (s.order + 1))
    kmin = op.z_min
    n_out = s.order
    out = [Fraction(0)] * (n_out + 1)
    for k, q in op.terms().items():
        shift = k - kmin
        for m in range(shift, n_out + 1):
            i = m - shift
            if i > s.order:
                break
            c = s.coeffs[i]
            if c == 0:
                continue
            out[m] += rpoly.peval(q, s.offset + i) * c
    return RatSeries(s.offset + kmin, out)


def _apply_jet(op: DiffOp, s: JetSeries) -> JetSeries:
    _check_order(op, s.order)
    J = s.jet_order
    if op.is_zero():
        zero = jet_from_scalar(0, J)
        return JetSeries(s.offset, J, [list(zero) for _ in range(s.order + 1)])
    kmin = op.z_min
    n_out = s.order
    out = [jet_from_scalar(0, J) for _ in range(n_out + 1)]
    for k, q in op.terms().items():
        shift = k - kmin
        for m in range(shift, n_out + 1):
            i = m - shift
            if i > s.order:
                break
            c = s.coeffs[i]
            if all(x == 0 for x in c):
                continue
            arg = jet_linear(s.offset + i, J)  # D acts as (s0 + eps + i)
            val = jet_from_scalar(0, J)
            for coeff in reversed(q):
                val = jet_add(jet_mul(val, arg), jet_from_scalar(coeff, J))
            out[m] = jet_add(out[m], jet_mul(val, c))
    return JetSeries(s.offset + kmin, J, out)


def _log_theta(blocks: list, offset: Fraction) -> list:
    """D on sum (log z)^k/k! S_k: new S_k = theta S_k + S_(k+1)."""
    g = len(blocks) - 1
    out = []
    for k in range(g + 1):
        nxt = blocks[k + 1] if k + 1 <= g else None
        theta = blocks[k].theta()
        out.append(theta + nxt if nxt is not None else theta)
    return out


def _apply_log(op: DiffOp, s: LogSeries) -> LogSeries:
    _check_order(op, s.order)
    g = s.log_degree
    n_out = s.order
    offset = s.offset
    kmin = op.z_min if not op.is_zero() else 0
    acc = [RatSeries(offset + kmin, [Fraction(0)] * (n_out + 1))
           for _ in range(g + 1)]
    for k, q in op.terms().items():
        # Horner: q(D) S = a_0 S + D (a_1 S + D (...))
        cur = [RatSeries(offset, [Fraction(0)] * (s.order + 1)) for _ in range(g + 1)]
        for coeff in reversed(q):
            cur = _log_theta(cur, offset)
            cur = [blk + s.blocks[j].scale(coeff) for j, blk in enumerate(cur)]
        shift = k - kmin
        for j in range(g + 1):
            body = cur[j].coeffs
            padded = [Fraction(0)] * shift + body
            acc[j] = acc[j] + RatSeries(offset + kmin, padded[: n_out + 1])
    return LogSeries(acc)
