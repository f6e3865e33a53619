"""Command-line surface: curvature, invariants, homogeneity, count, poincare.

Every command builds one Report; JSON is the single machine format and the
text renderer prints the same numbers. Exit codes: 0 success, 2 input
error, 3 mathematical domain error, 4 internal assertion failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import __version__
from .counting import (
    cumulative_generating_function,
    delta_count,
    poincare,
    pole_order_at_one,
    s_count,
    series_expand,
)
from .curvature import curvature_point
from .errors import (
    AllPointsSingularError,
    DomainError,
    InsufficientOrderError,
    MetricInvError,
    MetricLangError,
    SingularMetricError,
    UnsupportedDimensionError,
)
from .invariants import invariant_vector
from .metriclang import MetricSpec, parse_metric
from .symmetry import homogeneity

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DOMAIN = 3
EXIT_INTERNAL = 4

_DOMAIN_ERRORS = (
    DomainError,
    SingularMetricError,
    AllPointsSingularError,
    InsufficientOrderError,
    UnsupportedDimensionError,
)


@dataclass
class Report:
    command: str
    parameters: dict[str, Any]
    results: dict[str, Any] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    metric_digest: str | None = None
    wall_time_s: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        doc = {
            "tool": "metricinv",
            "version": __version__,
            "command": self.command,
            "parameters": self.parameters,
            "results": self.results,
            "warnings": self.warnings,
            "wall_time_s": self.wall_time_s,
        }
        if self.metric_digest is not None:
            doc["metric_digest"] = self.metric_digest
        return doc


def _load_metric(path: str) -> tuple[MetricSpec, str]:
    with open(path, "rb") as fh:
        raw = fh.read()
    digest = hashlib.sha256(raw).hexdigest()
    return parse_metric(raw.decode("utf-8")), digest


def _parse_point(text: str, spec: MetricSpec) -> tuple[float, ...]:
    values: dict[str, float] = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise MetricLangError(f"bad point component {item!r}; expected name=value")
        name, _, value = item.partition("=")
        name = name.strip()
        if name not in spec.coords:
            raise MetricLangError(f"unknown coordinate {name!r} in --point")
        values[name] = float(value)
    missing = [c for c in spec.coords if c not in values]
    if missing:
        raise MetricLangError(f"--point missing coordinates: {', '.join(missing)}")
    return tuple(values[c] for c in spec.coords)


def _parse_box(text: str, spec: MetricSpec) -> list[tuple[float, float]]:
    ranges: dict[str, tuple[float, float]] = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, _, rng = item.partition("=")
        name = name.strip()
        if name not in spec.coords:
            raise MetricLangError(f"unknown coordinate {name!r} in --box")
        lo, sep, hi = rng.partition(":")
        if not sep:
            raise MetricLangError(f"bad range {rng!r}; expected lo:hi")
        ranges[name] = (float(lo), float(hi))
    missing = [c for c in spec.coords if c not in ranges]
    if missing:
        raise MetricLangError(f"--box missing coordinates: {', '.join(missing)}")
    return [ranges[c] for c in spec.coords]


def _tensor_lists(values: np.ndarray):
    return np.asarray(values, dtype=float).tolist()


# -- subcommand implementations --------------------------------------------------


def cmd_curvature(args) -> Report:
    spec, digest = _load_metric(args.metric)
    point = _parse_point(args.point, spec)
    order = args.order if args.order is not None else 2
    report = Report(
        command="curvature",
        parameters={
            "metric": args.metric,
            "point": {c: p for c, p in zip(spec.coords, point)},
            "order": order,
        },
        metric_digest=digest,
    )
    curv = curvature_point(spec, point, order, s_max=0)
    report.results = {
        "dim": spec.dim,
        "coords": list(spec.coords),
        "signature": list(spec.signature),
        "g": _tensor_lists(curv.g.values()),
        "g_inv": _tensor_lists(curv.g_inv.values()),
        "christoffel": _tensor_lists(curv.gamma.values()),
        "riemann_lower": _tensor_lists(curv.riemann_lower.values()),
        "ricci": _tensor_lists(curv.ricci.values()),
        "scalar_curvature": curv.scalar.value,
        "ricci_operator": _tensor_lists(curv.ricci_op.values()),
        "weyl": _tensor_lists(curv.weyl.values()) if curv.weyl is not None else None,
    }
    if spec.dim == 2:
        report.warnings.append("Weyl tensor undefined for dim 2; field omitted")
    return report


def cmd_invariants(args) -> Report:
    spec, digest = _load_metric(args.metric)
    point = _parse_point(args.point, spec)
    report = Report(
        command="invariants",
        parameters={
            "metric": args.metric,
            "point": {c: p for c, p in zip(spec.coords, point)},
            "max_order": args.max_order,
            "a_power_range": args.a_power_range,
        },
        metric_digest=digest,
    )
    iv = invariant_vector(
        spec,
        point,
        max_order=args.max_order,
        s_range=args.a_power_range,
    )
    report.results = {
        "dim": spec.dim,
        "max_order": iv.max_order,
        "count": len(iv),
        "labels": list(iv.labels),
        "values": [v.value for v in iv.values],
    }
    report.warnings.extend(iv.warnings)
    return report


def cmd_homogeneity(args) -> Report:
    spec, digest = _load_metric(args.metric)
    box = _parse_box(args.box, spec)
    report = Report(
        command="homogeneity",
        parameters={
            "metric": args.metric,
            "box": {c: list(b) for c, b in zip(spec.coords, box)},
            "samples": args.samples,
            "seed": args.seed,
            "max_order": args.max_order,
            "rel_tol": args.rel_tol,
        },
        metric_digest=digest,
    )
    rr = homogeneity(
        spec,
        box,
        n_samples=args.samples,
        max_order=args.max_order,
        seed=args.seed,
        rel_tol=args.rel_tol,
    )
    report.results = {
        "dim": rr.n,
        "max_order": rr.max_order,
        "seed": rr.seed,
        "consensus_rank": rr.rank,
        "homogeneity": rr.homogeneity,
        "invariant_max": rr.invariant_max,
        "riemann_max": rr.riemann_max,
        "gradient_max": rr.gradient_max,
        "regularity_warning": rr.regularity_warning,
        "is_riemannian": rr.is_riemannian,
        "claims_killing_fields": rr.claims_killing_fields,
        "samples": [
            {
                "point": list(p),
                "singular_values": list(sv),
                "rank": rk,
            }
            for p, sv, rk in zip(rr.points, rr.singular_values, rr.ranks)
        ],
        "skipped": [
            {"point": list(p), "reason": reason} for p, reason in rr.skipped
        ],
    }
    report.warnings.extend(rr.warnings)
    return report


def cmd_count(args) -> Report:
    report = Report(
        command="count",
        parameters={"dim": args.dim, "max_k": args.max_k},
    )
    ks = list(range(args.max_k + 1))
    report.results = {
        "dim": args.dim,
        "k": ks,
        "s": [s_count(args.dim, k) for k in ks],
        "delta": [delta_count(args.dim, k) for k in ks],
    }
    return report


def cmd_poincare(args) -> Report:
    report = Report(
        command="poincare",
        parameters={"dim": args.dim, "expand": args.expand},
    )
    p = poincare(args.dim)
    q = cumulative_generating_function(args.dim)
    report.results = {
        "dim": args.dim,
        "numerator": list(p.numerator),
        "denominator": list(p.denominator),
        "series_delta": series_expand(p, args.expand),
        "series_s": series_expand(q, args.expand),
        "pole_order_at_one": pole_order_at_one(p),
    }
    return report


# -- rendering --------------------------------------------------------------------


def _render_value(value: Any, indent: str = "") -> str:
    if isinstance(value, dict):
        lines = []
        for key, sub in value.items():
            rendered = _render_value(sub, indent + "  ")
            if "\n" in rendered or isinstance(sub, (dict, list)) and sub:
                lines.append(f"{indent}{key}:")
                lines.append(rendered)
            else:
                lines.append(f"{indent}{key}: {rendered.strip()}")
        return "\n".join(lines)
    if isinstance(value, list):
        flat = json.dumps(value)
        if len(flat) <= 100:
            return f"{indent}{flat}"
        return "\n".join(f"{indent}- {_render_value(v).strip()}" for v in value)
    return f"{indent}{value!r}" if isinstance(value, str) else f"{indent}{value}"


def render_text(report: Report) -> str:
    lines = [f"metricinv {report.command}"]
    if report.metric_digest:
        lines.append(f"metric sha256: {report.metric_digest}")
    lines.append("parameters:")
    lines.append(_render_value(report.parameters, "  "))
    lines.append("results:")
    lines.append(_render_value(report.results, "  "))
    if report.warnings:
        lines.append("warnings:")
        for w in report.warnings:
            lines.append(f"  ! {w}")
    lines.append(f"wall time: {report.wall_time_s:.3f} s")
    return "\n".join(lines)


def emit(report: Report, fmt: str, stream=None) -> None:
    stream = stream if stream is not None else sys.stdout
    if fmt == "auto":
        fmt = "text" if stream.isatty() else "json"
    if fmt == "json":
        json.dump(report.to_dict(), stream, indent=2)
        stream.write("\n")
    else:
        stream.write(render_text(report))
        stream.write("\n")


# -- argument parsing ---------------------------------------------------------------


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="metricinv",
        description="Scalar curvature invariants and symmetry estimation "
        "for (pseudo-)Riemannian metrics.",
    )
    common = _ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=["auto", "json", "text"], default="auto",
        help="output format (default: text on a terminal, json when piped)",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("curvature", help="curvature tensors at a point", parents=[common])
    p.add_argument("--metric", required=True, help="metric definition file")
    p.add_argument("--point", required=True, help='evaluation point, e.g. "x=1,y=0.5"')
    p.add_argument("--order", type=int, default=None, help="metric jet order (default 2)")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("invariants", parents=[common], help="scalar invariants at a point")
    p.add_argument("--metric", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--max-order", type=int, default=2, dest="max_order")
    p.add_argument(
        "--a-power-range", type=int, default=1, dest="a_power_range",
        help="highest power of the Ricci operator in higher-order contractions",
    )
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("homogeneity", parents=[common], help="symmetry-orbit dimension over a box")
    p.add_argument("--metric", required=True)
    p.add_argument("--box", required=True, help='sampling box, e.g. "x=0.5:2.5,y=-1:1"')
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-order", type=int, default=2, dest="max_order")
    p.add_argument("--rel-tol", type=float, default=1e-8, dest="rel_tol")
    p.set_defaults(func=cmd_homogeneity)

    p = sub.add_parser("count", parents=[common], help="invariant counts s_k and delta_k")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--max-k", type=int, default=8, dest="max_k")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("poincare", parents=[common], help="generating function of the counts")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--expand", type=int, default=12)
    p.set_defaults(func=cmd_poincare)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_INPUT

    start = time.perf_counter()
    try:
        report = args.func(args)
    except _DOMAIN_ERRORS as exc:
        print(f"metricinv: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (MetricLangError, FileNotFoundError, ValueError) as exc:
        print(f"metricinv: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AssertionError as exc:
        print(f"metricinv: internal assertion failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    report.wall_time_s = time.perf_counter() - start
    emit(report, args.format)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
