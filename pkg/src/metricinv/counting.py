"""Exact counts of scalar metric invariants and their generating functions.

Everything here is integer/rational arithmetic; no floating point. s_count
gives the number of independent invariants of order <= k, delta_count the
number of pure order k, and poincare(n) the rational generating function
of the delta sequence. The generating function of the cumulative counts is
poincare(n) / (1 - z).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd

from .errors import PoleAtZeroError

# -- integer polynomial helpers (dense, ascending powers of z) ----------------


def _trim(p: list[int]) -> list[int]:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _padd(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                  for i in range(n)])


def _pneg(a):
    return [-x for x in a]


def _pmul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _pcontent(a) -> int:
    c = 0
    for x in a:
        c = gcd(c, x)
    return c or 1


def _is_zero(a) -> bool:
    return all(x == 0 for x in a)


def _pgcd(a: list[int], b: list[int]) -> list[int]:
    """Primitive gcd over Z via monic Euclid on Fractions."""
    fa = [Fraction(x) for x in a]
    fb = [Fraction(x) for x in b]

    def trimf(p):
        while len(p) > 1 and p[-1] == 0:
            p.pop()
        return p

    def remf(num, den):
        num = num[:]
        while len(num) >= len(den) and not all(x == 0 for x in num):
            factor = num[-1] / den[-1]
            shift = len(num) - len(den)
            for i, d in enumerate(den):
                num[shift + i] -= factor * d
            num.pop()  # leading term cancelled exactly
            num = trimf(num or [Fraction(0)])
        return trimf(num or [Fraction(0)])

    fa, fb = trimf(fa), trimf(fb)
    while not all(x == 0 for x in fb):
        fa, fb = fb, remf(fa, fb)
    if all(x == 0 for x in fa):
        return [1]
    denominators = [f.denominator for f in fa]
    lcm = 1
    for d in denominators:
        lcm = lcm * d // gcd(lcm, d)
    ints = [int(f * lcm) for f in fa]
    content = _pcontent(ints)
    ints = [x // content for x in ints]
    if ints[-1] < 0:
        ints = [-x for x in ints]
    return ints


def _pdivexact(a: list[int], b: list[int]) -> list[int]:
    """Exact polynomial division a / b; a must be a multiple of b."""
    fa = [Fraction(x) for x in a]
    out = [Fraction(0)] * (len(a) - len(b) + 1)
    for k in range(len(out) - 1, -1, -1):
        coeff = fa[k + len(b) - 1] / Fraction(b[-1])
        out[k] = coeff
        for i, d in enumerate(b):
            fa[k + i] -= coeff * d
    if not all(x == 0 for x in fa):
        raise ArithmeticError("inexact polynomial division")
    assert all(f.denominator == 1 for f in out)
    return _trim([int(f) for f in out])


def _zval(a: list[int]) -> int:
    """Multiplicity of the factor z."""
    if _is_zero(a):
        return 0
    v = 0
    while a[v] == 0:
        v += 1
    return v


@dataclass(frozen=True)
class RationalFunction:
    """z**(-shift) * numerator(z) / denominator(z) with integer coefficients.

    Stored reduced: no common polynomial factor, no common z power between
    the Laurent shift and the numerator/denominator, denominator with
    positive leading coefficient and the integer content shared with the
    numerator divided out. The explicit shift keeps genuinely Laurent
    intermediates (the n/z terms of the order-count assembly)
    representable before their cancellation is asserted.
    """

    numerator: tuple[int, ...]
    denominator: tuple[int, ...]
    shift: int = 0

    @staticmethod
    def make(numerator, denominator, shift: int = 0) -> "RationalFunction":
        num = _trim([int(x) for x in numerator] or [0])
        den = _trim([int(x) for x in denominator] or [0])
        if _is_zero(den):
            raise ZeroDivisionError("rational function with zero denominator")
        if _is_zero(num):
            return RationalFunction((0,), (1,), 0)
        # pull z powers out of den into the shift, then cancel against num
        vden = _zval(den)
        if vden:
            den = den[vden:]
            shift += vden
        vnum = _zval(num)
        if vnum and shift > 0:
            cancel = min(vnum, shift)
            num = num[cancel:]
            shift -= cancel
        if shift < 0:
            num = [0] * (-shift) + num
            shift = 0
        g = _pgcd(num, den)
        if len(g) > 1 or g[0] != 1:
            num = _pdivexact(num, g)
            den = _pdivexact(den, g)
        if den[-1] < 0:
            num, den = _pneg(num), _pneg(den)
        content = gcd(_pcontent(num), _pcontent(den))
        if content > 1:
            num = [x // content for x in num]
            den = [x // content for x in den]
        return RationalFunction(tuple(num), tuple(den), shift)

    @staticmethod
    def from_polynomial(coeffs) -> "RationalFunction":
        return RationalFunction.make(coeffs, [1])

    @property
    def is_laurent(self) -> bool:
        return self.shift > 0

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        s = max(self.shift, other.shift)
        a = _pmul(list(self.numerator), [0] * (s - self.shift) + [1])
        b = _pmul(list(other.numerator), [0] * (s - other.shift) + [1])
        num = _padd(
            _pmul(a, list(other.denominator)), _pmul(b, list(self.denominator))
        )
        return RationalFunction.make(
            num, _pmul(list(self.denominator), list(other.denominator)), s
        )

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(
            tuple(-x for x in self.numerator), self.denominator, self.shift
        )

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self + (-other)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction.make(
            _pmul(list(self.numerator), list(other.numerator)),
            _pmul(list(self.denominator), list(other.denominator)),
            self.shift + other.shift,
        )

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        if _is_zero(list(other.numerator)):
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction.make(
            _pmul(list(self.numerator), list(other.denominator)),
            _pmul(list(self.denominator), list(other.numerator)),
            self.shift - other.shift,
        )


def series_expand(f: RationalFunction, k_max: int) -> list[int]:
    """Exact Taylor coefficients c_0..c_k_max of f around z = 0."""
    if f.is_laurent:
        raise PoleAtZeroError(f"function has a pole of order {f.shift} at z = 0")
    num, den = f.numerator, f.denominator
    if den[0] == 0:
        raise PoleAtZeroError("denominator vanishes at z = 0")
    d0 = Fraction(den[0])
    coeffs: list[Fraction] = []
    for k in range(k_max + 1):
        acc = Fraction(num[k] if k < len(num) else 0)
        for i in range(1, min(k, len(den) - 1) + 1):
            acc -= den[i] * coeffs[k - i]
        coeffs.append(acc / d0)
    return [int(c) if c.denominator == 1 else c for c in coeffs]


def _multiplicity_at_one(p) -> int:
    """Multiplicity of the root z = 1, by repeated synthetic division."""
    p = list(p)
    mult = 0
    while not _is_zero(p) and sum(p) == 0:
        # divide by (z - 1): q_i from Horner, remainder = p(1) = 0
        q = [0] * (len(p) - 1)
        carry = 0
        for i in range(len(p) - 1, 0, -1):
            carry += p[i]
            q[i - 1] = carry
        p = _trim(q)
        mult += 1
    return mult


def pole_order_at_one(f: RationalFunction) -> int:
    """Order of the pole of f at z = 1 (0 when there is none)."""
    return max(
        0,
        _multiplicity_at_one(f.denominator) - _multiplicity_at_one(f.numerator),
    )


# -- the counts ----------------------------------------------------------------


def _check_dim(n: int):
    if n < 2:
        raise ValueError(f"invariant counts need dimension n >= 2, got {n}")


def _exact_div(num: int, den: int) -> int:
    q, r = divmod(num, den)
    assert r == 0, f"count formula produced non-integer {num}/{den}"
    return q


def s_count(n: int, k: int) -> int:
    """Number of independent scalar invariants of order <= k."""
    _check_dim(n)
    if k < 2:
        return 0
    if n == 2:
        return (k + 1) * (k - 2) // 2 + (1 if k == 2 else 0)
    return n + _exact_div(
        (n * n * (k - 1) - n * (k + 1)) * comb(n + k, k), 2 * (k + 1)
    )


def delta_count(n: int, k: int) -> int:
    """Number of scalar invariants of pure order k."""
    _check_dim(n)
    if k < 2:
        return 0
    if n == 2:
        return k - 1 - (1 if k == 3 else 0)
    if k == 2:
        return n + _exact_div((n + 2) * (n + 1) * n * (n - 3), 12)
    return _exact_div(n * (k - 1) * comb(n + k - 1, k + 1), 2)


def weyl_trace_count(n: int) -> int:
    """Number of independent order-2 invariants beyond the n power traces."""
    _check_dim(n)
    return _exact_div((n + 2) * (n + 1) * n * (n - 3), 12)


def poincare(n: int) -> RationalFunction:
    """Generating function of delta_count(n, .) as a reduced rational function.

    For n > 2 the assembly passes through genuinely Laurent terms (the n/z
    pieces); their cancellation is asserted, so a surviving pole at z = 0
    would indicate a transcription bug rather than return a bad function.
    """
    _check_dim(n)
    if n == 2:
        num = _pmul([0, 0, 1], [1, -1, 2, -1])  # z^2 (1 - z + 2z^2 - z^3)
        return RationalFunction.make(num, _pmul([1, -1], [1, -1]))
    one_minus_z_n = [1]
    for _ in range(n):
        one_minus_z_n = _pmul(one_minus_z_n, [1, -1])
    n_over_z = RationalFunction.make([n], [1], shift=1)
    middle = RationalFunction.from_polynomial(
        [comb(n, 2), 0, -comb(n, 2)]
    )
    bracket = RationalFunction.make([n, -comb(n + 1, 2)], [1], shift=1)
    tail = bracket / RationalFunction.from_polynomial(one_minus_z_n)
    p = n_over_z + middle - tail
    assert not p.is_laurent and p.denominator[0] != 0, (
        "1/z terms failed to cancel in the order-count generating function"
    )
    return p


def cumulative_generating_function(n: int) -> RationalFunction:
    """Generating function of s_count(n, .): poincare(n) / (1 - z)."""
    return poincare(n) / RationalFunction.from_polynomial([1, -1])
