"""Scalar differential invariants of a metric at a point.

Order 2: power traces of the Ricci operator A (n of them), and for n >= 4
the traces of bivector operators built from A and the Weyl map on
Lambda^2 TM. Order k >= 3: the (k-2)-fold covariant derivative of the
curvature fully contracted against the frame dual to the differentials of
the power traces, with optional extra powers of A on the curvature slots.

For n = 2 the power traces degenerate (A is scalar), so the standard
substitute pair {scalar curvature, squared gradient of the scalar
curvature} is used instead; it feeds the same frame machinery.

All outputs are jets of order 0 or 1: order 1 carries the invariant's
gradient so the symmetry module can assemble Jacobians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .curvature import CurvaturePoint, TensorComponents, _jet_matrix_inverse, curvature_point
from .errors import (
    InsufficientOrderError,
    SingularFrameError,
    UnsupportedDimensionError,
)
from .jets import Jet
from .metriclang import MetricSpec

DEFAULT_FRAME_RTOL = 1e-8
DEFAULT_FRAME_FLOOR = 1e-10


# -- jet matrix helpers --------------------------------------------------------


def _mat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            acc = None
            for k in range(n):
                term = a[i, k] * b[k, j]
                acc = term if acc is None else acc + term
            out[i, j] = acc
    return out


def _mat_trace(a: np.ndarray) -> Jet:
    acc = a[0, 0]
    for i in range(1, a.shape[0]):
        acc = acc + a[i, i]
    return acc


def _identity_matrix(n: int, like: Jet) -> np.ndarray:
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = Jet.constant(1.0 if i == j else 0.0, like.n_vars, like.order)
    return out


# -- order-2 invariants ----------------------------------------------------------


def ricci_traces(a_op: TensorComponents, count: int | None = None) -> list[Jet]:
    """Power traces of the Ricci operator, Tr(A^i) for i = 1..count."""
    n = a_op.n
    count = n if count is None else count
    power = a_op.entries
    traces = [_mat_trace(power)]
    for _ in range(count - 1):
        power = _mat_mul(power, a_op.entries)
        traces.append(_mat_trace(power))
    return traces


def surface_invariant_pair(curv: CurvaturePoint) -> list[Jet]:
    """The n = 2 substitute pair: scalar curvature and |grad scal|^2_g.

    A is scal/2 times the identity in two dimensions, so the power traces
    are mutually dependent; this pair restores two generically independent
    functions at the cost of one extra derivative order.
    """
    scal = curv.scalar
    if scal.order < 1:
        raise InsufficientOrderError("surface pair needs the scalar at order >= 1")
    n = curv.n
    ginv = curv.g_inv.truncate(scal.order - 1)
    d_scal = [scal.derivative(m) for m in range(n)]
    acc = None
    for i in range(n):
        for j in range(n):
            term = ginv[i, j] * d_scal[i] * d_scal[j]
            acc = term if acc is None else acc + term
    return [scal, acc]


def _bivector_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def weyl_bivector_operator(
    w_lower: TensorComponents, g_inv: TensorComponents
) -> np.ndarray:
    """The Weyl map on Lambda^2 TM as a C(n,2) x C(n,2) jet matrix.

    Row/column labels are index pairs (i < j); the entry at (cd, ab) is
    g^{ci} g^{dj} W_{ij ab}.
    """
    n = w_lower.n
    order = min(w_lower.order, g_inv.order)
    w = w_lower.truncate(order)
    ginv = g_inv.truncate(order)
    up2 = np.empty((n, n, n, n), dtype=object)  # W^{cd}_{ab}
    for c in range(n):
        for d in range(n):
            for a in range(n):
                for b in range(n):
                    acc = None
                    for i in range(n):
                        for j in range(n):
                            term = ginv[c, i] * ginv[d, j] * w[i, j, a, b]
                            acc = term if acc is None else acc + term
                    up2[c, d, a, b] = acc
    pairs = _bivector_pairs(n)
    m = len(pairs)
    out = np.empty((m, m), dtype=object)
    for p, (c, d) in enumerate(pairs):
        for q, (a, b) in enumerate(pairs):
            out[p, q] = up2[c, d, a, b]
    return out


def exterior_square(a_mat: np.ndarray, n: int) -> np.ndarray:
    """Lambda^2 of an endomorphism: (u ^ v) -> (Au) ^ (Av) on pair basis."""
    pairs = _bivector_pairs(n)
    m = len(pairs)
    out = np.empty((m, m), dtype=object)
    for p, (c, d) in enumerate(pairs):
        for q, (a, b) in enumerate(pairs):
            out[p, q] = a_mat[c, a] * a_mat[d, b] - a_mat[c, b] * a_mat[d, a]
    return out


def weyl_operator_trace(
    a_op: TensorComponents,
    w_lower: TensorComponents,
    g_inv: TensorComponents,
    a: int,
    b: int,
    c: int,
) -> Jet:
    """Tr of Lambda^2(A)^a composed with W^b composed with Lambda^2(A)^c.

    Reference implementation by explicit triple matrix product; the batch
    path in `weyl_traces` relies on the cyclic trace identity and must
    agree with this.
    """
    n = a_op.n
    order = min(a_op.order, w_lower.order, g_inv.order)
    w_op = weyl_bivector_operator(w_lower.truncate(order), g_inv.truncate(order))
    lam = exterior_square(a_op.truncate(order).entries, n)
    sample = w_op[0, 0]

    def mat_pow(mat, e):
        out = _identity_matrix(mat.shape[0], sample)
        for _ in range(e):
            out = _mat_mul(out, mat)
        return out

    total = _mat_mul(_mat_mul(mat_pow(lam, a), mat_pow(w_op, b)), mat_pow(lam, c))
    return _mat_trace(total)


def weyl_traces(
    a_op: TensorComponents,
    w_lower: TensorComponents | None,
    g_inv: TensorComponents,
    a_max: int | None = None,
    limit: int | None = None,
    order: int | None = None,
) -> tuple[list[str], list[Jet]]:
    """Traces Tr(W^{a,b,c}) of the bivector operators, deduplicated.

    Powers of A act on Lambda^2 TM through the exterior square, under
    which Lambda^2(A)^a Lambda^2(A)^c = Lambda^2(A)^{a+c}; the cyclic
    trace identity then makes the trace depend on (a+c, b) only, so one
    canonical representative with a <= c is emitted per class, ordered by
    (a+c, b). By default the list is cut at the number of independent
    order-2 invariants beyond the power traces, (n+2)(n+1)n(n-3)/12.
    """
    n = a_op.n
    if n < 3:
        raise UnsupportedDimensionError("Weyl trace invariants need n >= 3")
    if n == 3:
        return [], []
    assert w_lower is not None
    from .counting import weyl_trace_count

    if a_max is None:
        a_max = n
    if limit is None:
        limit = weyl_trace_count(n)
    if order is not None:
        a_op = a_op.truncate(min(order, a_op.order))
        w_lower = w_lower.truncate(min(order, w_lower.order))
        g_inv = g_inv.truncate(min(order, g_inv.order))

    w_op = weyl_bivector_operator(w_lower, g_inv)
    lam = exterior_square(a_op.truncate(w_op[0, 0].order).entries, n)
    n_biv = len(_bivector_pairs(n))

    w_powers = [w_op]
    for _ in range(n_biv - 1):
        w_powers.append(_mat_mul(w_powers[-1], w_op))
    lam_powers = [_identity_matrix(n_biv, w_op[0, 0])]
    for _ in range(2 * a_max):
        lam_powers.append(_mat_mul(lam_powers[-1], lam))

    labels: list[str] = []
    values: list[Jet] = []
    for s in range(2 * a_max + 1):
        a = max(0, s - a_max)
        c = s - a
        for b in range(1, n_biv + 1):
            if len(labels) >= limit:
                return labels, values
            acc = None
            pb = w_powers[b - 1]
            ms = lam_powers[s]
            for p in range(n_biv):
                for q in range(n_biv):
                    term = pb[p, q] * ms[q, p]
                    acc = term if acc is None else acc + term
            labels.append(f"J({a},{b},{c})")
            values.append(acc)
    return labels, values


# -- the Tresse frame ------------------------------------------------------------


@dataclass(frozen=True)
class TresseFrame:
    """Frame of derivations dual to the differentials of the base invariants.

    `jacobian[i, m]` holds the m-th partial of the i-th invariant at the
    point; `frame[m, i]` the m-th coordinate component of the i-th dual
    vector (columns of the inverse Jacobian), as jets so gradients
    propagate. jacobian @ frame-values = identity.
    """

    jacobian: np.ndarray
    frame: np.ndarray
    condition_number: float


def _svd_rank(matrix: np.ndarray, rel_tol: float, abs_floor: float) -> tuple[int, np.ndarray]:
    sv = np.linalg.svd(matrix, compute_uv=False)
    if sv.size == 0 or sv[0] < abs_floor:
        return 0, sv
    return int(np.sum(sv > rel_tol * sv[0])), sv


def tresse_frame(
    invariants: Sequence[Jet],
    rel_tol: float = DEFAULT_FRAME_RTOL,
    abs_floor: float = DEFAULT_FRAME_FLOOR,
) -> TresseFrame:
    """Invert the Jacobian of n base invariants; raises SingularFrameError.

    A singular frame is the expected outcome on locally homogeneous
    metrics (constant invariants), so callers should treat the exception
    as a structured result, not a failure.
    """
    n = invariants[0].n_vars
    if len(invariants) != n:
        raise SingularFrameError(
            0, f"need exactly {n} base invariants, got {len(invariants)}"
        )
    order = min(j.order for j in invariants)
    if order < 1:
        raise InsufficientOrderError("Tresse frame needs invariant jets of order >= 1")
    jac = np.array([j.gradient() for j in invariants])
    rank, sv = _svd_rank(jac, rel_tol, abs_floor)
    if rank < n:
        raise SingularFrameError(rank)
    jac_jets = [
        [invariants[i].truncate(order).derivative(m) for m in range(n)]
        for i in range(n)
    ]
    inv_rows = _jet_matrix_inverse(jac_jets)
    frame = np.empty((n, n), dtype=object)
    for m in range(n):
        for i in range(n):
            frame[m, i] = inv_rows[m][i]
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    return TresseFrame(jacobian=jac, frame=frame, condition_number=cond)


# -- higher-order invariants -------------------------------------------------------


def _tensor_val_grad(entries: np.ndarray, want_grad: bool):
    shape = entries.shape
    val = np.empty(shape)
    n_vars = entries.flat[0].n_vars
    grad = np.empty(shape + (n_vars,)) if want_grad else None
    for idx in np.ndindex(*shape):
        jet = entries[idx]
        val[idx] = jet.value
        if want_grad:
            grad[idx] = jet.gradient()
    return val, grad


def _contract_first(tv, tg, fv, fg):
    """Contract tensor axis 0 against a family of vectors (columns of fv).

    Value/gradient pairs follow the product rule; the family axis is
    appended at the end, the gradient axis stays last.
    """
    val = np.tensordot(tv, fv, axes=([0], [0]))
    if tg is None:
        return val, None
    grad = np.moveaxis(np.tensordot(tg, fv, axes=([0], [0])), -2, -1)
    grad = grad + np.tensordot(tv, fg, axes=([0], [0]))
    return val, grad


def _jet_from_val_grad(value: float, grad, n_vars: int) -> Jet:
    if grad is None:
        return Jet.constant(float(value), n_vars, 0)
    c = np.zeros(1 + n_vars)  # order-1 context: constant plus gradient slots
    c[0] = value
    c[1:] = grad
    return Jet(n_vars, 1, c)


def higher_invariants(
    curv: CurvaturePoint,
    frame: TresseFrame,
    a_op: TensorComponents,
    k: int,
    s_range: int = 1,
    with_gradients: bool = False,
) -> tuple[list[str], list[Jet]]:
    """Order-k invariants from nabla^{k-2} R contracted against the frame.

    Each derivative slot is paired with a frame vector, each of the four
    curvature slots with A^s applied to a frame vector for s = 0..s_range.
    Labels read H{k}[derivative word | s word | frame word] with 1-based
    frame indices. The contraction sweep is vectorized over plain
    value/gradient arrays since every output is needed at order <= 1 only.
    """
    if k < 3:
        raise ValueError("higher invariants start at order 3")
    n = curv.n
    if len(curv.nabla_r) < k - 1:
        raise InsufficientOrderError(
            f"nabla^{k - 2} R not available; increase the metric jet order"
        )
    t = curv.nabla_r[k - 2]
    out_order = 1 if with_gradients else 0
    if t.order < out_order:
        raise InsufficientOrderError(
            f"nabla^{k - 2} R has jet order {t.order}, need {out_order}"
        )

    tv, tg = _tensor_val_grad(t.entries, with_gradients)
    fv, fg = _tensor_val_grad(frame.frame, with_gradients)
    av, ag = _tensor_val_grad(a_op.entries, with_gradients)

    # families: columns w = s*n + j hold A^s applied to frame vector j
    fam_v = [fv]
    fam_g = [fg]
    for _ in range(s_range):
        prev_v, prev_g = fam_v[-1], fam_g[-1]
        nv = av @ prev_v
        fam_v.append(nv)
        if with_gradients:
            fam_g.append(
                np.einsum("pmq,mw->pwq", ag, prev_v) + np.einsum("pm,mwq->pwq", av, prev_g)
            )
        else:
            fam_g.append(None)
    wv = np.concatenate(fam_v, axis=1)
    wg = np.concatenate(fam_g, axis=1) if with_gradients else None

    val, grad = tv, tg
    for _ in range(k - 2):
        val, grad = _contract_first(val, grad, fv, fg)
    for _ in range(4):
        val, grad = _contract_first(val, grad, wv, wg)

    labels: list[str] = []
    values: list[Jet] = []
    n_vars = n
    for idx in np.ndindex(*val.shape):
        iword = "".join(str(i + 1) for i in idx[: k - 2])
        sword = "".join(str(w // n) for w in idx[k - 2 :])
        jword = "".join(str(w % n + 1) for w in idx[k - 2 :])
        labels.append(f"H{k}[{iword}|{sword}|{jword}]")
        values.append(
            _jet_from_val_grad(val[idx], grad[idx] if with_gradients else None, n_vars)
        )
    return labels, values


# -- the assembled invariant vector -------------------------------------------------


@dataclass(frozen=True)
class InvariantVector:
    """Labeled scalar invariants of one metric at one point.

    Values are jets of order 0, or order 1 when gradients were requested.
    `warnings` records structured degradations (singular Tresse frame on
    homogeneous metrics) that replace the higher-order blocks.
    """

    labels: tuple[str, ...]
    values: tuple[Jet, ...]
    max_order: int
    point: tuple[float, ...]
    warnings: tuple[str, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.labels)

    def values_array(self) -> np.ndarray:
        return np.array([v.value for v in self.values])

    def jacobian(self) -> np.ndarray:
        """Gradients row per invariant; requires with_gradients=True."""
        return np.array([v.gradient() for v in self.values])


def required_jet_order(n: int, max_order: int, with_gradients: bool) -> int:
    """Metric jet order needed to emit invariants up to `max_order`."""
    out = 1 if with_gradients else 0
    if n == 2:
        k = 2 + out + 1 + (1 if max_order >= 3 else 0)
        return max(k, max_order + out)
    return max_order + out


def invariant_sample(
    spec: MetricSpec,
    point: Sequence[float],
    max_order: int = 2,
    with_gradients: bool = False,
    s_range: int = 1,
    a_power_max: int | None = None,
    frame_rel_tol: float = DEFAULT_FRAME_RTOL,
    frame_abs_floor: float = DEFAULT_FRAME_FLOOR,
) -> tuple[InvariantVector, CurvaturePoint]:
    """Invariant vector plus the curvature data it was computed from."""
    n = spec.dim
    if max_order < 2:
        raise ValueError("invariants start at order 2")
    out_order = 1 if with_gradients else 0
    order = required_jet_order(n, max_order, with_gradients)
    curv = curvature_point(spec, point, order, s_max=max(0, max_order - 2))

    labels: list[str] = []
    values: list[Jet] = []
    warnings: list[str] = []

    if n == 2:
        base = surface_invariant_pair(curv)
        labels.extend(["I1", "I2'"])
    else:
        base = ricci_traces(curv.ricci_op)
        labels.extend(f"I{i + 1}" for i in range(n))
    values.extend(base)

    if n >= 4:
        j_labels, j_values = weyl_traces(
            curv.ricci_op,
            curv.weyl,
            curv.g_inv,
            a_max=a_power_max,
            order=out_order,
        )
        labels.extend(j_labels)
        values.extend(j_values)

    if max_order >= 3:
        frame_order = min(j.order for j in base)
        try:
            frame = tresse_frame(
                [j.truncate(frame_order) for j in base],
                rel_tol=frame_rel_tol,
                abs_floor=frame_abs_floor,
            )
        except SingularFrameError as exc:
            warnings.append(
                f"SingularFrame: base invariant Jacobian has rank {exc.rank}; "
                f"higher-order blocks omitted"
            )
            frame = None
        if frame is not None:
            for k in range(3, max_order + 1):
                h_labels, h_values = higher_invariants(
                    curv, frame, curv.ricci_op, k,
                    s_range=s_range, with_gradients=with_gradients,
                )
                labels.extend(h_labels)
                values.extend(h_values)

    values = [v.truncate(out_order) if v.order > out_order else v for v in values]
    iv = InvariantVector(
        labels=tuple(labels),
        values=tuple(values),
        max_order=max_order,
        point=tuple(float(x) for x in point),
        warnings=tuple(warnings),
    )
    return iv, curv


def invariant_vector(
    spec: MetricSpec,
    point: Sequence[float],
    max_order: int = 2,
    with_gradients: bool = False,
    s_range: int = 1,
    a_power_max: int | None = None,
    frame_rel_tol: float = DEFAULT_FRAME_RTOL,
    frame_abs_floor: float = DEFAULT_FRAME_FLOOR,
) -> InvariantVector:
    """Concatenated invariant blocks up to `max_order` at one point."""
    iv, _ = invariant_sample(
        spec, point, max_order, with_gradients, s_range, a_power_max,
        frame_rel_tol, frame_abs_floor,
    )
    return iv
