"""Small univariate polynomial helpers over exact rationals.

Polynomials are plain lists of Fractions, little-endian (index = degree).
Shared by the operator ring (polynomials in D), the classifier
(cyclotomic polynomials) and the algebraicity solver (rational function
coefficients); deliberately minimal.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Poly = list  # list[Fraction]


def ptrim(p: Sequence[Fraction]) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def pzero(p: Sequence[Fraction]) -> bool:
    return all(c == 0 for c in p)


def pdeg(p: Sequence[Fraction]) -> int:
    """Degree, with deg 0 = -1."""
    for i in range(len(p) - 1, -1, -1):
        if p[i] != 0:
            return i
    return -1


def padd(p: Sequence[Fraction], q: Sequence[Fraction]) -> Poly:
    n = max(len(p), len(q))
    out = [Fraction(0)] * n
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return ptrim(out)


def pneg(p: Sequence[Fraction]) -> Poly:
    return [-c for c in p]


def psub(p: Sequence[Fraction], q: Sequence[Fraction]) -> Poly:
    return padd(p, pneg(q))


def pscale(p: Sequence[Fraction], c: Fraction) -> Poly:
    if c == 0:
        return []
    return [c * a for a in p]


def pmul(p: Sequence[Fraction], q: Sequence[Fraction]) -> Poly:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return ptrim(out)


def ppow(p: Sequence[Fraction], e: int) -> Poly:
    out: Poly = [Fraction(1)]
    for _ in range(e):
        out = pmul(out, p)
    return out


def peval(p: Sequence[Fraction], x: Fraction) -> Fraction:
    out = Fraction(0)
    for c in reversed(list(p)):
        out = out * x + c
    return out


def pshift(p: Sequence[Fraction], c: Fraction) -> Poly:
    """p(x + c), by Horner in the shifted variable."""
    out: Poly = []
    for coeff in reversed(list(p)):
        out = padd(pmul(out, [c, Fraction(1)]), [coeff])
    return out


def pdivmod(p: Sequence[Fraction], q: Sequence[Fraction]) -> tuple[Poly, Poly]:
    q = ptrim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(ptrim(p))
    dq = len(q) - 1
    lead = q[-1]
    quot = [Fraction(0)] * max(0, len(rem) - dq)
    while len(rem) - 1 >= dq and rem:
        k = len(rem) - 1 - dq
        c = rem[-1] / lead
        quot[k] = c
        for i, b in enumerate(q):
            rem[k + i] -= c * b
        rem = ptrim(rem)
    return ptrim(quot), rem


def pdiv_exact(p: Sequence[Fraction], q: Sequence[Fraction]) -> Poly:
    quot, rem = pdivmod(p, q)
    if rem:
        raise ValueError("polynomial division is not exact")
    return quot


def pgcd(p: Sequence[Fraction], q: Sequence[Fraction]) -> Poly:
    """Monic gcd over the rationals."""
    a, b = ptrim(p), ptrim(q)
    while b:
        a, b = b, pdivmod(a, b)[1]
    if a:
        a = pscale(a, 1 / a[-1])
    return a


def pcontent_normalize(p: Sequence[Fraction]) -> tuple[Poly, Fraction]:
    """Scale to coprime integer coefficients with positive leading term.

    Returns (normalized, factor) with normalized = factor * p.
    """
    p = ptrim(p)
    if not p:
        return [], Fraction(1)
    den = 1
    for c in p:
        den = den * c.denominator // gcd(den, c.denominator)
    num = 0
    for c in p:
        num = gcd(num, abs(c.numerator * (den // c.denominator)))
    factor = Fraction(den, num)
    if p[-1] < 0:
        factor = -factor
    return [c * factor for c in p], factor


def pto_str(p: Sequence[Fraction], var: str = "n") -> str:
    """Canonical display, highest degree first."""
    p = ptrim(p)
    if not p:
        return "0"
    parts = []
    for d in range(len(p) - 1, -1, -1):
        c = p[d]
        if c == 0:
            continue
        mag = abs(c)
        if d == 0:
            body = str(mag)
        else:
            v = var if d == 1 else f"{var}^{d}"
            body = v if mag == 1 else f"{mag}*{v}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)
