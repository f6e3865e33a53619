"""Levi-Civita pipeline on jets: Christoffel, Riemann, Ricci, Weyl, nabla^s R.

Conventions (fixed so the unit sphere has positive scalar curvature):

    Gamma^k_ij = 1/2 g^{kl} (d_i g_lj + d_j g_li - d_l g_ij)
    R^i_jkl    = d_k Gamma^i_lj - d_l Gamma^i_kj
                 + Gamma^i_km Gamma^m_lj - Gamma^i_lm Gamma^m_kj
    Ric_jl     = R^i_jil,   scal = g^{jl} Ric_jl,   A^i_j = g^{ik} Ric_kj
    W_ijkl     = R_ijkl - (g_ik Ric_jl - g_il Ric_jk + g_jl Ric_ik
                 - g_jk Ric_il) / (n-2)
                 + scal (g_ik g_jl - g_il g_jk) / ((n-1)(n-2))

Every derivative consumed drops the available jet order by one; each
operation below states its consumption and rejects inputs that are too
shallow. Signature plays no role: the inverse metric comes from the full
jet-level matrix inverse and no positivity is assumed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DomainError,
    InsufficientOrderError,
    ShapeMismatchError,
    SingularMetricError,
    UnsupportedDimensionError,
)
from .jets import Jet
from .metriclang import MetricSpec, eval_expr

SINGULAR_DET_RTOL = 1e-10


@dataclass(frozen=True)
class TensorComponents:
    """Dense multi-indexed array of jets with per-slot variance.

    `variance` holds one of 'u' (contravariant) / 'd' (covariant) per
    slot; `entries` is an object ndarray of Jets of shape (n,) * rank, all
    sharing n_vars and order.
    """

    variance: tuple[str, ...]
    n: int
    entries: np.ndarray

    def __post_init__(self):
        if self.entries.shape != (self.n,) * self.rank:
            raise ShapeMismatchError(
                f"entries shape {self.entries.shape} does not match "
                f"rank {self.rank}, n {self.n}"
            )

    @property
    def rank(self) -> int:
        return len(self.variance)

    @property
    def order(self) -> int:
        return self.entries.flat[0].order

    def __getitem__(self, idx):
        return self.entries[idx]

    def values(self) -> np.ndarray:
        """Constant terms as a plain float array."""
        out = np.empty((self.n,) * self.rank)
        for idx in np.ndindex(*out.shape):
            out[idx] = self.entries[idx].value
        return out

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values()))) if self.rank else 0.0

    def truncate(self, order: int) -> "TensorComponents":
        if order == self.order:
            return self
        out = np.empty_like(self.entries)
        for idx in np.ndindex(*self.entries.shape):
            out[idx] = self.entries[idx].truncate(order)
        return TensorComponents(self.variance, self.n, out)


def _tensor(variance: tuple[str, ...], n: int, fill=None) -> np.ndarray:
    arr = np.empty((n,) * len(variance), dtype=object)
    if fill is not None:
        for idx in np.ndindex(*arr.shape):
            arr[idx] = fill
    return arr


def _jet_matrix_inverse(mat: list[list[Jet]]) -> list[list[Jet]]:
    """Gauss-Jordan inverse over the jet ring, pivoting on constant terms."""
    n = len(mat)
    a = [row[:] for row in mat]
    first = a[0][0]
    ident = [
        [Jet.constant(1.0 if i == j else 0.0, first.n_vars, first.order)
         for j in range(n)]
        for i in range(n)
    ]
    for col in range(n):
        pivot_row = max(range(col, n), key=lambda r: abs(a[r][col].value))
        if a[pivot_row][col].value == 0.0:
            raise SingularMetricError("jet matrix is singular at the base point")
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            ident[col], ident[pivot_row] = ident[pivot_row], ident[col]
        inv_pivot = 1.0 / a[col][col]
        a[col] = [x * inv_pivot for x in a[col]]
        ident[col] = [x * inv_pivot for x in ident[col]]
        for row in range(n):
            if row == col:
                continue
            factor = a[row][col]
            if np.all(factor.c == 0.0):
                continue
            a[row] = [x - factor * y for x, y in zip(a[row], a[col])]
            ident[row] = [x - factor * y for x, y in zip(ident[row], ident[col])]
    return ident


def metric_at(
    spec: MetricSpec, point: Sequence[float], order: int
) -> tuple[TensorComponents, TensorComponents]:
    """K-jets of g_ij and of its matrix inverse at a point."""
    n = spec.dim
    if len(point) != n:
        raise ShapeMismatchError(f"point has {len(point)} entries, metric dim {n}")
    entries = _tensor(("d", "d"), n)
    for i in range(n):
        for j in range(i, n):
            jet = eval_expr(spec.components[i][j], point, order)
            entries[i, j] = jet
            entries[j, i] = jet
    g = TensorComponents(("d", "d"), n, entries)

    const = g.values()
    if not np.all(np.isfinite(const)):
        raise DomainError(f"metric component not finite at point {tuple(point)}")
    scale = max(float(np.max(np.abs(const))), 1e-300)
    det = float(np.linalg.det(const))
    if abs(det) < SINGULAR_DET_RTOL * scale**n:
        raise SingularMetricError(
            f"|det g| = {abs(det):.3e} below threshold at point {tuple(point)}"
        )

    inv_rows = _jet_matrix_inverse([[entries[i, j] for j in range(n)] for i in range(n)])
    inv = _tensor(("u", "u"), n)
    for i in range(n):
        for j in range(n):
            inv[i, j] = inv_rows[i][j]
    return g, TensorComponents(("u", "u"), n, inv)


def christoffel(g: TensorComponents, g_inv: TensorComponents) -> TensorComponents:
    """Gamma^k_ij; consumes one derivative order."""
    if g.order < 1:
        raise InsufficientOrderError("Christoffel symbols need metric jets of order >= 1")
    n = g.n
    target = g.order - 1
    ginv_t = g_inv.truncate(target)
    dg = np.empty((n, n, n), dtype=object)  # dg[l][i][j] = d_l g_ij
    for l in range(n):
        for i in range(n):
            for j in range(i, n):
                d = g[i, j].derivative(l)
                dg[l, i, j] = d
                dg[l, j, i] = d
    out = _tensor(("u", "d", "d"), n)
    for i in range(n):
        for j in range(i, n):
            for k in range(n):
                acc = None
                for l in range(n):
                    term = ginv_t[k, l] * (dg[i, l, j] + dg[j, l, i] - dg[l, i, j])
                    acc = term if acc is None else acc + term
                half = acc * 0.5
                out[k, i, j] = half
                out[k, j, i] = half
    return TensorComponents(("u", "d", "d"), n, out)


def riemann(
    gamma: TensorComponents, g: TensorComponents
) -> tuple[TensorComponents, TensorComponents]:
    """All-lower R_ijkl and mixed R^i_jkl; consumes one order from Gamma."""
    if gamma.order < 1:
        raise InsufficientOrderError("Riemann tensor needs Gamma jets of order >= 1")
    n = gamma.n
    target = gamma.order - 1
    gamma_t = gamma.truncate(target)
    dgamma = np.empty((n, n, n, n), dtype=object)  # dgamma[m][i][j][k] = d_m Gamma^i_jk
    for m in range(n):
        for i in range(n):
            for j in range(n):
                for k in range(j, n):
                    d = gamma[i, j, k].derivative(m)
                    dgamma[m, i, j, k] = d
                    dgamma[m, i, k, j] = d
    mixed = _tensor(("u", "d", "d", "d"), n)
    zero = Jet.zero(gamma.entries.flat[0].n_vars, target)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                mixed[i, j, k, k] = zero
            for k in range(n):
                for l in range(k + 1, n):
                    acc = dgamma[k, i, l, j] - dgamma[l, i, k, j]
                    for m in range(n):
                        acc = acc + (
                            gamma_t[i, k, m] * gamma_t[m, l, j]
                            - gamma_t[i, l, m] * gamma_t[m, k, j]
                        )
                    mixed[i, j, k, l] = acc
                    mixed[i, j, l, k] = -acc
    g_t = g.truncate(target)
    lower = _tensor(("d", "d", "d", "d"), n)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    acc = None
                    for m in range(n):
                        term = g_t[i, m] * mixed[m, j, k, l]
                        acc = term if acc is None else acc + term
                    lower[i, j, k, l] = acc
    return (
        TensorComponents(("d", "d", "d", "d"), n, lower),
        TensorComponents(("u", "d", "d", "d"), n, mixed),
    )


def ricci(
    r_mixed: TensorComponents, g_inv: TensorComponents
) -> tuple[TensorComponents, Jet]:
    """Ric_jl = R^i_jil and the scalar curvature g^{jl} Ric_jl."""
    n = r_mixed.n
    target = r_mixed.order
    out = _tensor(("d", "d"), n)
    for j in range(n):
        for l in range(j, n):
            acc = None
            for i in range(n):
                term = r_mixed[i, j, i, l]
                acc = term if acc is None else acc + term
            out[j, l] = acc
            out[l, j] = acc
    ric = TensorComponents(("d", "d"), n, out)
    ginv_t = g_inv.truncate(target)
    scal = None
    for j in range(n):
        for l in range(n):
            term = ginv_t[j, l] * ric[j, l]
            scal = term if scal is None else scal + term
    return ric, scal


def ricci_operator(g_inv: TensorComponents, ric: TensorComponents) -> TensorComponents:
    """The endomorphism A^i_j = g^{ik} Ric_kj of the tangent bundle."""
    n = ric.n
    ginv_t = g_inv.truncate(ric.order)
    out = _tensor(("u", "d"), n)
    for i in range(n):
        for j in range(n):
            acc = None
            for k in range(n):
                term = ginv_t[i, k] * ric[k, j]
                acc = term if acc is None else acc + term
            out[i, j] = acc
    return TensorComponents(("u", "d"), n, out)


def weyl(
    g: TensorComponents,
    ric: TensorComponents,
    scal: Jet,
    r_lower: TensorComponents,
) -> TensorComponents:
    """Totally trace-free part of the curvature; undefined for n = 2."""
    n = g.n
    if n < 3:
        raise UnsupportedDimensionError("the Weyl tensor is undefined for n = 2")
    target = r_lower.order
    g_t = g.truncate(target)
    ric_t = ric.truncate(target)
    scal_t = scal.truncate(target)
    c1 = 1.0 / (n - 2)
    c2 = 1.0 / ((n - 1) * (n - 2))
    out = _tensor(("d", "d", "d", "d"), n)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    ricci_part = (
                        g_t[i, k] * ric_t[j, l]
                        - g_t[i, l] * ric_t[j, k]
                        + g_t[j, l] * ric_t[i, k]
                        - g_t[j, k] * ric_t[i, l]
                    )
                    scal_part = g_t[i, k] * g_t[j, l] - g_t[i, l] * g_t[j, k]
                    out[i, j, k, l] = (
                        r_lower[i, j, k, l]
                        - c1 * ricci_part
                        + c2 * (scal_t * scal_part)
                    )
    return TensorComponents(("d", "d", "d", "d"), n, out)


def covariant_derivative(
    t: TensorComponents, gamma: TensorComponents
) -> TensorComponents:
    """Adds one covariant slot in front; consumes one order from T.

    (nabla T)_{m, I} = d_m T_I - sum over down slots of Gamma^q_{m i_p} T
    with i_p replaced by q, + sum over up slots of Gamma^{i_p}_{m q} T
    with i_p replaced by q.
    """
    if t.order < 1:
        raise InsufficientOrderError("covariant derivative needs jets of order >= 1")
    n = t.n
    target = t.order - 1
    if gamma.order < target:
        raise InsufficientOrderError(
            f"Gamma jets of order {gamma.order} cannot support output order {target}"
        )
    gamma_t = gamma.truncate(target)
    t_t = t.truncate(target)
    variance = ("d",) + t.variance
    out = _tensor(variance, n)
    for idx in itertools.product(range(n), repeat=t.rank):
        for m in range(n):
            acc = t[idx].derivative(m)
            for p, slot_var in enumerate(t.variance):
                ip = idx[p]
                for q in range(n):
                    swapped = idx[:p] + (q,) + idx[p + 1 :]
                    if slot_var == "d":
                        acc = acc - gamma_t[q, m, ip] * t_t[swapped]
                    else:
                        acc = acc + gamma_t[ip, m, q] * t_t[swapped]
            out[(m,) + idx] = acc
    return TensorComponents(variance, n, out)


@dataclass(frozen=True)
class CurvaturePoint:
    """Every curvature quantity of one metric at one base point.

    All tensors are evaluated at the same point; the jet order of each
    entry reflects how many derivatives its construction consumed. `weyl`
    is None for n = 2, where the tensor is undefined.
    """

    point: tuple[float, ...]
    n: int
    order: int
    g: TensorComponents
    g_inv: TensorComponents
    gamma: TensorComponents
    riemann_lower: TensorComponents
    riemann_mixed: TensorComponents
    ricci: TensorComponents
    scalar: Jet
    ricci_op: TensorComponents
    weyl: TensorComponents | None
    nabla_r: tuple[TensorComponents, ...]  # nabla^s R_lower for s = 0..s_max


def curvature_point(
    spec: MetricSpec,
    point: Sequence[float],
    order: int,
    s_max: int | None = None,
) -> CurvaturePoint:
    """Run the full pipeline from metric jets of the given order.

    nabla^s R is computable iff s <= order - 2; `s_max` defaults to that
    bound and larger requests are rejected.
    """
    if order < 2:
        raise InsufficientOrderError("curvature needs metric jets of order >= 2")
    limit = order - 2
    if s_max is None:
        s_max = limit
    elif s_max > limit:
        raise InsufficientOrderError(
            f"nabla^{s_max} R needs metric jets of order >= {s_max + 2}, got {order}"
        )
    g, g_inv = metric_at(spec, point, order)
    gamma = christoffel(g, g_inv)
    r_lower, r_mixed = riemann(gamma, g)
    ric, scal = ricci(r_mixed, g_inv)
    a_op = ricci_operator(g_inv, ric)
    w = weyl(g, ric, scal, r_lower) if spec.dim >= 3 else None
    nabla = [r_lower]
    for _ in range(s_max):
        nabla.append(covariant_derivative(nabla[-1], gamma))
    return CurvaturePoint(
        point=tuple(float(x) for x in point),
        n=spec.dim,
        order=order,
        g=g,
        g_inv=g_inv,
        gamma=gamma,
        riemann_lower=r_lower,
        riemann_mixed=r_mixed,
        ricci=ric,
        scalar=scal,
        ricci_op=a_op,
        weyl=w,
        nabla_r=tuple(nabla),
    )
