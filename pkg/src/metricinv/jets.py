"""Truncated multivariate Taylor ("jet") arithmetic at a point.

A Jet stores the Taylor coefficients c_alpha = (d^alpha f) / alpha! of a
scalar function at a fixed base point, for all multi-indices |alpha| <= K.
Storing coefficients rather than raw derivatives keeps multiplication a
plain truncated convolution; `partial` multiplies by alpha! on exit.

Coefficient storage is dense over the full simplex of multi-indices,
enumerated in graded lexicographic order so that the degree <= d block is a
shared prefix of every higher-order enumeration. All coefficient sums are
accumulated in a fixed order, which makes truncation commute with every
operation exactly (not just up to rounding): evaluating at order K+1 and
restricting to order K reproduces the order-K evaluation bit for bit.

Jets are immutable values and all operations are pure.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Real
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DomainError,
    InsufficientOrderError,
    OrderExceededError,
    ShapeMismatchError,
)


def _compositions(total: int, parts: int):
    """All multi-indices with given total degree, first slot descending."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


class _JetContext:
    """Shared index tables for the ring of order-K jets in n variables.

    The product table lists triples (i, j, k) with alpha_i + alpha_j =
    alpha_k, sorted by (k, i, j); `np.bincount` then accumulates each
    target coefficient in that fixed order.
    """

    __slots__ = (
        "n_vars", "order", "multi_indices", "index", "size",
        "prod_i", "prod_j", "prod_k", "diff_src", "diff_fact",
    )

    def __init__(self, n_vars: int, order: int):
        self.n_vars = n_vars
        self.order = order
        mi = []
        for degree in range(order + 1):
            mi.extend(_compositions(degree, n_vars))
        self.multi_indices = tuple(mi)
        self.index = {alpha: pos for pos, alpha in enumerate(mi)}
        self.size = len(mi)

        triples = []
        for i, a in enumerate(mi):
            da = sum(a)
            for j, b in enumerate(mi):
                if da + sum(b) > order:
                    continue
                k = self.index[tuple(x + y for x, y in zip(a, b))]
                triples.append((k, i, j))
        triples.sort()
        self.prod_k = np.array([t[0] for t in triples], dtype=np.intp)
        self.prod_i = np.array([t[1] for t in triples], dtype=np.intp)
        self.prod_j = np.array([t[2] for t in triples], dtype=np.intp)

        # Maps into the order-(K-1) context for partial differentiation.
        self.diff_src = []
        self.diff_fact = []
        if order >= 1:
            lower = [alpha for alpha in mi if sum(alpha) <= order - 1]
            for v in range(n_vars):
                src = np.empty(len(lower), dtype=np.intp)
                fact = np.empty(len(lower))
                for p, beta in enumerate(lower):
                    up = list(beta)
                    up[v] += 1
                    src[p] = self.index[tuple(up)]
                    fact[p] = beta[v] + 1
                self.diff_src.append(src)
                self.diff_fact.append(fact)


@lru_cache(maxsize=None)
def _context(n_vars: int, order: int) -> _JetContext:
    if n_vars < 1:
        raise ShapeMismatchError("jets need at least one variable")
    if order < 0:
        raise ShapeMismatchError("jet order must be non-negative")
    return _JetContext(n_vars, order)


class Jet:
    """Truncated Taylor expansion of a scalar quantity at a point."""

    __slots__ = ("ctx", "c")

    def __init__(self, n_vars: int, order: int, coeffs):
        ctx = _context(n_vars, order)
        c = np.asarray(coeffs, dtype=float)
        if c.shape != (ctx.size,):
            raise ShapeMismatchError(
                f"expected {ctx.size} coefficients for n_vars={n_vars}, "
                f"order={order}, got shape {c.shape}"
            )
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "c", c)

    def __setattr__(self, name, value):
        raise AttributeError("Jet is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(value: float, n_vars: int, order: int) -> "Jet":
        ctx = _context(n_vars, order)
        c = np.zeros(ctx.size)
        c[0] = value
        return Jet(n_vars, order, c)

    @staticmethod
    def zero(n_vars: int, order: int) -> "Jet":
        return Jet(n_vars, order, np.zeros(_context(n_vars, order).size))

    # -- basic queries -----------------------------------------------------

    @property
    def n_vars(self) -> int:
        return self.ctx.n_vars

    @property
    def order(self) -> int:
        return self.ctx.order

    @property
    def value(self) -> float:
        """Constant term, i.e. the function value at the base point."""
        return float(self.c[0])

    def gradient(self) -> np.ndarray:
        """First partial derivatives as a vector (requires order >= 1)."""
        if self.order < 1:
            raise InsufficientOrderError("gradient needs a jet of order >= 1")
        return self.c[1 : 1 + self.n_vars].copy()

    def partial(self, multiindex: Sequence[int]) -> float:
        """The raw derivative d^alpha f = alpha! * c_alpha."""
        alpha = tuple(int(a) for a in multiindex)
        if len(alpha) != self.n_vars or any(a < 0 for a in alpha):
            raise ShapeMismatchError(f"bad multi-index {alpha}")
        if sum(alpha) > self.order:
            raise OrderExceededError(
                f"|alpha|={sum(alpha)} exceeds jet order {self.order}"
            )
        fact = 1.0
        for a in alpha:
            fact *= math.factorial(a)
        return float(self.c[self.ctx.index[alpha]] * fact)

    def truncate(self, order: int) -> "Jet":
        """Restrict to a lower order (graded prefix of the coefficients)."""
        if order == self.order:
            return self
        if order > self.order:
            raise OrderExceededError(
                f"cannot extend order {self.order} jet to order {order}"
            )
        size = _context(self.n_vars, order).size
        return Jet(self.n_vars, order, self.c[:size])

    def derivative(self, var: int) -> "Jet":
        """Partial derivative jet; the order drops by one."""
        if self.order < 1:
            raise InsufficientOrderError("derivative needs a jet of order >= 1")
        if not 0 <= var < self.n_vars:
            raise IndexError(f"variable index {var} out of range")
        c = self.c[self.ctx.diff_src[var]] * self.ctx.diff_fact[var]
        return Jet(self.n_vars, self.order - 1, c)

    # -- ring operations ---------------------------------------------------

    def _check_compatible(self, other: "Jet"):
        if self.ctx is not other.ctx:
            raise ShapeMismatchError(
                f"cannot combine jets with (n_vars, order) = "
                f"({self.n_vars}, {self.order}) and "
                f"({other.n_vars}, {other.order})"
            )

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check_compatible(other)
            return Jet(self.n_vars, self.order, self.c + other.c)
        if isinstance(other, Real):
            c = self.c.copy()
            c[0] += other
            return Jet(self.n_vars, self.order, c)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.n_vars, self.order, -self.c)

    def __sub__(self, other):
        if isinstance(other, Jet):
            self._check_compatible(other)
            return Jet(self.n_vars, self.order, self.c - other.c)
        if isinstance(other, Real):
            c = self.c.copy()
            c[0] -= other
            return Jet(self.n_vars, self.order, c)
        return NotImplemented

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check_compatible(other)
            ctx = self.ctx
            prods = self.c[ctx.prod_i] * other.c[ctx.prod_j]
            c = np.bincount(ctx.prod_k, weights=prods, minlength=ctx.size)
            return Jet(self.n_vars, self.order, c)
        if isinstance(other, Real):
            return Jet(self.n_vars, self.order, self.c * float(other))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * apply_fn("recip", other)
        if isinstance(other, Real):
            return Jet(self.n_vars, self.order, self.c / float(other))
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Real):
            return apply_fn("recip", self) * float(other)
        return NotImplemented

    def __pow__(self, exponent):
        if isinstance(exponent, int):
            return _int_pow(self, exponent)
        if isinstance(exponent, Fraction):
            return jet_pow(self, exponent)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return self.ctx is other.ctx and bool(np.all(self.c == other.c))

    __hash__ = None

    def __repr__(self):
        terms = []
        for alpha, coeff in zip(self.ctx.multi_indices, self.c):
            if coeff != 0.0:
                terms.append(f"{alpha}:{coeff:.6g}")
        body = ", ".join(terms) if terms else "0"
        return f"Jet(n={self.n_vars}, K={self.order}; {body})"


def seed(point: Sequence[float], var_index: int, order: int) -> Jet:
    """Jet of the coordinate function x^var_index at `point`."""
    n = len(point)
    if not 0 <= var_index < n:
        raise IndexError(f"var_index {var_index} out of range for {n} coordinates")
    j = Jet.constant(float(point[var_index]), n, order)
    if order >= 1:
        c = j.c.copy()
        c[1 + var_index] = 1.0
        return Jet(n, order, c)
    return j


def mul(a: Jet, b: Jet) -> Jet:
    """Truncated Cauchy product."""
    return a * b


def _int_pow(a: Jet, e: int) -> Jet:
    if e < 0:
        return _int_pow(apply_fn("recip", a), -e)
    result = Jet.constant(1.0, a.n_vars, a.order)
    base = a
    while e:
        if e & 1:
            result = result * base
        base_needed = e > 1
        if base_needed:
            base = base * base
        e >>= 1
    return result


def _compose(outer: Sequence[float], a: Jet) -> Jet:
    """Sum outer[j] * h^j for the nilpotent part h = a - a.value.

    Power-sum accumulation in ascending j; each h^j has exact zeros below
    degree j, so restriction to a lower order commutes with composition
    exactly.
    """
    h = a - a.value
    acc = np.zeros(a.ctx.size)
    acc[0] = outer[0]
    power = None
    for j in range(1, a.order + 1):
        power = h if power is None else power * h
        acc = acc + outer[j] * power.c
    return Jet(a.n_vars, a.order, acc)


def _series_sin(c0: float, order: int) -> list[float]:
    cycle = (math.sin(c0), math.cos(c0), -math.sin(c0), -math.cos(c0))
    fact = 1.0
    out = []
    for j in range(order + 1):
        if j:
            fact *= j
        out.append(cycle[j % 4] / fact)
    return out


def _series_cos(c0: float, order: int) -> list[float]:
    cycle = (math.cos(c0), -math.sin(c0), -math.cos(c0), math.sin(c0))
    fact = 1.0
    out = []
    for j in range(order + 1):
        if j:
            fact *= j
        out.append(cycle[j % 4] / fact)
    return out


def _series_exp(c0: float, order: int) -> list[float]:
    e = math.exp(c0)
    fact = 1.0
    out = []
    for j in range(order + 1):
        if j:
            fact *= j
        out.append(e / fact)
    return out


def _series_log(c0: float, order: int) -> list[float]:
    if c0 <= 0.0:
        raise DomainError(f"log of jet with non-positive constant term {c0}")
    out = [math.log(c0)]
    for j in range(1, order + 1):
        out.append((-1.0) ** (j - 1) / (j * c0**j))
    return out


def _series_recip(c0: float, order: int) -> list[float]:
    if c0 == 0.0:
        raise DomainError("reciprocal of jet with zero constant term")
    out = []
    p = 1.0 / c0
    for j in range(order + 1):
        out.append(p if j % 2 == 0 else -p)
        p /= c0
    return out


def _series_sinh(c0: float, order: int) -> list[float]:
    cycle = (math.sinh(c0), math.cosh(c0))
    fact = 1.0
    out = []
    for j in range(order + 1):
        if j:
            fact *= j
        out.append(cycle[j % 2] / fact)
    return out


def _series_cosh(c0: float, order: int) -> list[float]:
    cycle = (math.cosh(c0), math.sinh(c0))
    fact = 1.0
    out = []
    for j in range(order + 1):
        if j:
            fact *= j
        out.append(cycle[j % 2] / fact)
    return out


_SERIES: dict[str, Callable[[float, int], list[float]]] = {
    "sin": _series_sin,
    "cos": _series_cos,
    "exp": _series_exp,
    "log": _series_log,
    "recip": _series_recip,
    "sinh": _series_sinh,
    "cosh": _series_cosh,
}

FUNCTION_TAGS = frozenset(
    ["sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "tanh",
     "neg", "recip"]
)


def jet_pow(a: Jet, exponent: Fraction) -> Jet:
    """a**exponent for a rational exponent.

    Integer exponents go through repeated multiplication (valid for any
    constant term when >= 0); fractional ones through the binomial series,
    which needs a positive constant term.
    """
    exponent = Fraction(exponent)
    if exponent.denominator == 1:
        return _int_pow(a, int(exponent))
    c0 = a.value
    if c0 <= 0.0:
        raise DomainError(
            f"fractional power {exponent} of jet with non-positive "
            f"constant term {c0}"
        )
    r = float(exponent)
    outer = [math.pow(c0, r)]
    for j in range(1, a.order + 1):
        outer.append(outer[-1] * (r - (j - 1)) / (j * c0))
    return _compose(outer, a)


def apply_fn(tag: str, a: Jet) -> Jet:
    """Apply an elementary function to a jet by series composition."""
    if tag == "neg":
        return -a
    if tag == "tan":
        cos_a = _compose(_series_cos(a.value, a.order), a)
        if cos_a.value == 0.0:
            raise DomainError("tan of jet at a pole (cos of constant term is 0)")
        return _compose(_series_sin(a.value, a.order), a) * apply_fn("recip", cos_a)
    if tag == "tanh":
        cosh_a = _compose(_series_cosh(a.value, a.order), a)
        return _compose(_series_sinh(a.value, a.order), a) * apply_fn("recip", cosh_a)
    if tag == "sqrt":
        return jet_pow(a, Fraction(1, 2))
    series = _SERIES.get(tag)
    if series is None:
        raise ValueError(f"unknown function tag '{tag}'")
    return _compose(series(a.value, a.order), a)
