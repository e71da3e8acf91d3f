"""Command-line surface: dataset ingestion, computations, verification.

Exit codes: 0 success, 2 parse/ingestion error, 3 validation error,
4 computation error.  Reports go to stdout, diagnostics to stderr.
The only environment variable consulted is GENUS_THREADS (parallelism
cap for numeric sampling).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .algebra import (
    AlgebraError,
    DegreeOutOfRange,
    NonInvertibleLeadingCoefficient,
    OffGridExponent,
    QSeries,
)
from .catalog import UnknownEntry, builtin, names as catalog_names
from .dataset import DatasetFormatError, dataset_to_json, load_dataset
from .genera import OperatorKind, ZeroWeightNormalBundle
from .jacobi import (
    BoundaryZero,
    NonFiniteSample,
    check_jacobi,
    count_zeros,
    designated_spec,
)
from .localization import (
    InconsistentAnomaly,
    NearPole,
    ValidationError,
    anomaly_index,
    degree_component_function,
    equivariant_character,
    rigidity_check,
    validate,
)
from .theta import (
    NonconvergentDomain,
    ThetaKind,
    theta_formal,
    theta_numeric,
)

EXIT_PARSE, EXIT_VALIDATION, EXIT_COMPUTE = 2, 3, 4

_PARSE_ERRORS = (DatasetFormatError, OSError)
_VALIDATION_ERRORS = (ValidationError, InconsistentAnomaly, UnknownEntry,
                      DegreeOutOfRange, ZeroWeightNormalBundle, ValueError)
_COMPUTE_ERRORS = (NonInvertibleLeadingCoefficient, OffGridExponent, NearPole,
                   NonconvergentDomain, BoundaryZero, NonFiniteSample,
                   AlgebraError, ZeroDivisionError)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GENUS_THREADS", "1")))
    except ValueError:
        return 1


def _load_input(source: str):
    if source.startswith("catalog:"):
        return builtin(source.split(":", 1)[1]).data
    return load_dataset(source)


def _operator(name: str) -> OperatorKind:
    try:
        return OperatorKind(name)
    except ValueError:
        raise ValidationError("unknown operator %r (have: %s)" %
                              (name, ", ".join(k.value for k in OperatorKind)))


def _parse_complex(s: str) -> complex:
    try:
        return complex(s.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise ValidationError("cannot parse complex number %r (use e.g. 0.5+1.2i)" % s)


def _q_name(key: int) -> str:
    return "%d/8" % key


def _emit(report: dict, fmt: str, text_lines):
    if fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _series_payload(ser: QSeries, grid_step: int = 8) -> dict:
    if not ser.c:
        return {_q_name(k): "0" for k in range(0, ser.n8 + 1, grid_step)}
    return {_q_name(k): str(ser.c[k]) for k in sorted(ser.c)}


# -- commands ---------------------------------------------------------------------


def cmd_expand(args) -> int:
    data = _load_input(args.input)
    kind = _operator(args.operator)
    if args.order > 256:
        raise ValidationError("order capped at 256 eighth-steps")
    res = equivariant_character(data, kind, args.order, args.normalized)
    mono_series: dict[str, dict] = {}
    for exps in res.monomials():
        name = res.monomial_name(exps)
        sub = QSeries({k: res.coefficient(k, exps) for k in res.series.c}, res.series.n8)
        mono_series[name] = _series_payload(sub)
    report = {
        "format": 1, "command": "expand", "dataset": data.name or args.input,
        "digest": res.provenance, "operator": kind.value,
        "normalized": args.normalized, "order_n8": res.n8,
        "ledger": {"two_pi": res.ledger.two_pi, "i": res.ledger.i, "two": res.ledger.two},
        "coefficients": mono_series,
    }
    lines = ["operator: %s%s" % (kind.value, " (dim-normalized)" if args.normalized else ""),
             "dataset: %s  digest %s" % (data.name or args.input, res.provenance),
             "order: q-exponents up to %s" % _q_name(res.n8),
             "ledger (2pi, i, 2) powers: (%d, %d, %d)"
             % (res.ledger.two_pi, res.ledger.i, res.ledger.two)]
    for name, coeffs in mono_series.items():
        lines.append("monomial %s:" % name)
        for qk, val in coeffs.items():
            lines.append("  q^{%s}: %s" % (qk, val))
    _emit(report, args.format, lines)
    return 0


def cmd_rigidity(args) -> int:
    data = _load_input(args.input)
    if args.operator == "all":
        kinds = [OperatorKind.DsThetaPrime, OperatorKind.DThetaQ, OperatorKind.DThetaMinusQ]
        if all(c.vbundles for c in data.components):
            kinds += [OperatorKind.DeltaVThetaPrime, OperatorKind.DVThetaQ,
                      OperatorKind.DVThetaMinusQ, OperatorKind.DVStarDifference]
    else:
        kinds = [_operator(args.operator)]
    rep = validate(data)
    verdicts = {}
    lines = ["dataset: %s" % (data.name or args.input)]
    if rep.anomaly is not None:
        lines.append("anomaly n = %s" % rep.anomaly)
    for kind in kinds:
        res = equivariant_character(data, kind, args.order, args.normalized)
        v = rigidity_check(res)
        if v.rigid:
            nonzero = {("q^{%s}" % _q_name(k), m): str(c)
                       for (k, m), c in v.constants.items() if c}
            verdicts[kind.value] = {"rigid": True,
                                    "constants": {"%s %s" % k: c for k, c in nonzero.items()}}
            lines.append("%s: rigid (%d nonzero constants)" % (kind.value, len(nonzero)))
            for (qk, m), c in sorted(nonzero.items()):
                lines.append("  %s %s = %s" % (qk, m, c))
        else:
            key, mono, coeff = v.witness
            verdicts[kind.value] = {"rigid": False,
                                    "witness": {"q": _q_name(key), "monomial": mono,
                                                "coefficient": str(coeff)}}
            lines.append("%s: NOT rigid; witness at q^{%s}, monomial %s: %s"
                         % (kind.value, _q_name(key), mono, coeff))
    report = {"format": 1, "command": "rigidity", "dataset": data.name or args.input,
              "anomaly": None if rep.anomaly is None else str(rep.anomaly),
              "order_n8": args.order, "verdicts": verdicts}
    _emit(report, args.format, lines)
    return 0


def cmd_jacobi(args) -> int:
    data = _load_input(args.input)
    kind = _operator(args.operator)
    if args.degree % 2 or args.degree < 0 or args.degree > data.base_cap:
        raise ValidationError("degree %d outside the even range [0, %d]"
                              % (args.degree, data.base_cap))
    n = anomaly_index(data)
    k = data.fiber_half_dim
    l = data.components[0].v_rank()
    spec = designated_spec(kind, n, k, l, args.degree // 2)
    F = degree_component_function(data, kind, args.degree,
                                  normalized=not args.raw, eps=args.tol * 1e-4)
    rep = check_jacobi(F, spec, samples=args.samples, eps=args.tol, workers=_threads())
    report = {
        "format": 1, "command": "jacobi", "dataset": data.name or args.input,
        "operator": kind.value, "degree": args.degree, "monomial": F.monomial,
        "anomaly": n, "index": str(Fraction(n, 2)), "weight": spec.weight,
        "group": spec.group.value, "samples": rep.samples,
        "max_modular_discrepancy": rep.max_modular_discrepancy,
        "max_lattice_discrepancy": rep.max_lattice_discrepancy,
        "tolerance": args.tol, "passed": rep.passed,
    }
    lines = ["operator: %s, degree %d (monomial %s)" % (kind.value, args.degree, F.monomial),
             "anomaly n = %d: expected index %s, weight %d over %s"
             % (n, Fraction(n, 2), spec.weight, spec.group.value),
             "max discrepancy: modular %.3e, lattice %.3e at %d samples"
             % (rep.max_modular_discrepancy, rep.max_lattice_discrepancy, rep.samples),
             "PASS" if rep.passed else "FAIL"]
    _emit(report, args.format, lines)
    return 0 if rep.passed else 1


def cmd_zeros(args) -> int:
    data = _load_input(args.input)
    kind = _operator(args.operator)
    tau = _parse_complex(args.tau)
    if tau.imag <= 0:
        raise ValidationError("tau must lie in the upper half plane")
    F = degree_component_function(data, kind, 0, normalized=not args.raw, eps=1e-12)
    origin = _parse_complex(args.origin) if args.origin else 0.171 + 0.113j
    res = count_zeros(F, tau, (origin, 2, 2 * tau))
    try:
        n = anomaly_index(data)
    except (ValidationError, InconsistentAnomaly):
        n = None
    report = {"format": 1, "command": "zeros", "dataset": data.name or args.input,
              "operator": kind.value, "tau": str(tau),
              "identically_zero": res.identically_zero,
              "count": res.count, "anomaly": n,
              "cell": "(2Z)^2 fundamental cell (4 unit cells)"}
    if res.identically_zero:
        lines = ["IdenticallyZero (sampled max |F| below the zero floor)"]
    else:
        lines = ["zero count over the (2Z)^2 cell at tau=%s: %.4f" % (tau, res.count),
                 "(area-scaled expectation for index n/2: 4n = %s)"
                 % (4 * n if n is not None else "unknown")]
    _emit(report, args.format, lines)
    return 0


def cmd_theta(args) -> int:
    kind = ThetaKind(args.kind)
    if args.formal:
        ts = theta_formal(kind, Fraction(args.m), args.order)
        report = {"format": 1, "command": "theta", "kind": kind.value,
                  "m": args.m, "order_n8": args.order, "i_power": ts.i_power,
                  "series": _series_payload(ts.series, 1)}
        lines = ["theta kind %s at v = %s t, i-power %d" % (kind.value, args.m, ts.i_power)]
        for k in sorted(ts.series.c):
            lines.append("  q^{%s}: %s" % (_q_name(k), ts.series.c[k]))
        if not ts.series.c:
            lines.append("  identically zero (order-%d vanishing at v=0)" % ts.vanishing_order)
        _emit(report, args.format, lines)
        return 0
    t = _parse_complex(args.t)
    tau = _parse_complex(args.tau)
    val = theta_numeric(kind, t, tau, args.eps)
    report = {"format": 1, "command": "theta", "kind": kind.value,
              "t": str(t), "tau": str(tau), "eps": args.eps,
              "value": {"re": val.real, "im": val.imag}}
    _emit(report, args.format, ["%s(%s, %s) = %s (within %g)"
                                % (kind.value, t, tau, val, args.eps)])
    return 0


def cmd_catalog(args) -> int:
    if args.action == "list":
        report = {"format": 1, "command": "catalog", "entries": {}}
        lines = []
        for name in catalog_names():
            e = builtin(name)
            report["entries"][name] = {"doc": e.doc, "expected": e.expected}
            lines.append("%-22s %s" % (name, e.doc.split(".")[0] + "."))
        _emit(report, args.format, lines)
        return 0
    entry = builtin(args.name)
    payload = dataset_to_json(entry.data)
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print("wrote %s" % args.output)
    else:
        print(text)
    return 0


# -- wiring -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="eqgenus",
        description="Exact equivariant elliptic genus computations from "
                    "circle-action fixed-point data.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, order_default=32):
        sp.add_argument("--input", required=True,
                        help="dataset JSON file, or catalog:NAME")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        return sp

    sp = common(sub.add_parser("expand", help="print the localized character"))
    sp.add_argument("--operator", required=True)
    sp.add_argument("--order", type=int, default=32, help="truncation in eighth-steps")
    sp.add_argument("--normalized", action="store_true",
                    help="dim-normalized variant of the element")
    sp.set_defaults(fn=cmd_expand)

    sp = common(sub.add_parser("rigidity", help="rigidity verdicts"))
    sp.add_argument("--operator", default="all")
    sp.add_argument("--order", type=int, default=32)
    sp.add_argument("--normalized", action="store_true")
    sp.set_defaults(fn=cmd_rigidity)

    sp = common(sub.add_parser("jacobi", help="Jacobi-form transformation checks"))
    sp.add_argument("--operator", required=True)
    sp.add_argument("--degree", type=int, default=0, help="base degree 2p")
    sp.add_argument("--samples", type=int, default=32)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--raw", action="store_true",
                    help="check the un-normalized family instead")
    sp.set_defaults(fn=cmd_jacobi)

    sp = common(sub.add_parser("zeros", help="argument-principle zero count"))
    sp.add_argument("--operator", required=True)
    sp.add_argument("--tau", required=True)
    sp.add_argument("--origin", default=None)
    sp.add_argument("--raw", action="store_true")
    sp.set_defaults(fn=cmd_zeros)

    sp = sub.add_parser("theta", help="theta function values and expansions")
    sp.add_argument("--kind", required=True,
                    choices=[k.value for k in ThetaKind])
    sp.add_argument("--t", default="0.3")
    sp.add_argument("--tau", default="1.0i")
    sp.add_argument("--eps", type=float, default=1e-12)
    sp.add_argument("--formal", action="store_true")
    sp.add_argument("--m", default="1")
    sp.add_argument("--order", type=int, default=32)
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.set_defaults(fn=cmd_theta)

    sp = sub.add_parser("catalog", help="built-in datasets")
    sp.add_argument("action", choices=("list", "emit"))
    sp.add_argument("name", nargs="?")
    sp.add_argument("--output", default=None)
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.set_defaults(fn=cmd_catalog)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "catalog" and args.action == "emit" and not args.name:
        print("catalog emit requires a name", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return args.fn(args)
    except _PARSE_ERRORS as e:
        print("parse error: %s" % e, file=sys.stderr)
        return EXIT_PARSE
    except _VALIDATION_ERRORS as e:
        print("validation error: %s" % e, file=sys.stderr)
        return EXIT_VALIDATION
    except _COMPUTE_ERRORS as e:
        print("computation error: %s" % e, file=sys.stderr)
        return EXIT_COMPUTE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
