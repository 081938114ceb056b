"""Command-line entry point.

Exit codes: 0 success or certified, 2 not certified, 3 boundary (numeric),
4 input error, 5 internal numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import io as fio
from .certify import Conclusion, certify, inequality_system
from .characters import (
    CharacterTableError,
    FusionIntegralityError,
    character_table,
    fusion_coefficients,
    verify_orthogonality,
)
from .semigroup import RealnessError, decompose
from .verify import (
    VIOLATION_TOL,
    CombinatorialSizeError,
    positivity_scan,
    power_expansion_check,
    theorem_sweep,
)

EXIT_OK = 0
EXIT_NOT_CERTIFIED = 2
EXIT_BOUNDARY = 3
EXIT_INPUT = 4
EXIT_NUMERICAL = 5

CONCLUSION_EXIT = {
    Conclusion.CERTIFIED_POSITIVE: EXIT_OK,
    Conclusion.NOT_CERTIFIED: EXIT_NOT_CERTIFIED,
    Conclusion.BOUNDARY_NUMERIC: EXIT_BOUNDARY,
}

log = logging.getLogger("fuspos")


class NumericalFailure(ArithmeticError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise fio.InputError("argv", message)


def _positive_float(s):
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
    if not v > 0 or v != v or v == float("inf"):
        raise argparse.ArgumentTypeError(f"must be positive and finite: {s!r}")
    return v


def _int_at_least(lo):
    def parse(s):
        try:
            v = int(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}: {s!r}")
        return v

    return parse


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fuspos", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, lengths: bool):
        sp.add_argument("--group", required=True, help="group spec JSON, or @file")
        if lengths:
            sp.add_argument("--lengths", required=True, help="length document JSON, or @file")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("-o", "--output", help="machine-readable output path")

    common(sub.add_parser("table", help="character table"), False)
    common(sub.add_parser("fusion", help="binary fusion multiplicities"), False)
    common(sub.add_parser("decompose", help="p_r(t) as exponential sums"), True)
    common(sub.add_parser("certify", help="positivity certificate"), True)
    common(sub.add_parser("ineq", help="linear inequality system"), False)

    sp = sub.add_parser("scan", help="grid scan of p_r(t)")
    common(sp, True)
    sp.add_argument("--t-max", type=_positive_float, default=50.0)
    sp.add_argument("--samples", type=_int_at_least(2), default=5000)

    sp = sub.add_parser("power-check", help="check P_t = (P_{t/n})^n through fusion multiplicities")
    common(sp, True)
    sp.add_argument("--t", type=_positive_float, default=1.0)
    sp.add_argument("--n", type=_int_at_least(1), default=2)

    sp = sub.add_parser("sweep", help="random certificate-vs-scan sweep")
    common(sp, False)
    sp.add_argument("--trials", type=_int_at_least(1), default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=_int_at_least(2), default=5000)
    sp.add_argument("--csv", dest="csv_path", help="per-trial CSV path")
    return p


# ------------------------------------------------------------------ commands


def _load(args):
    g = fio.parse_group(fio.load_document(args.group, "group"))
    ct = character_table(g)
    ell = None
    if getattr(args, "lengths", None) is not None:
        ell = fio.parse_lengths(fio.load_document(args.lengths, "lengths"), g)
    return g, ct, ell


def cmd_table(args):
    g, ct, _ = _load(args)
    rep = verify_orthogonality(ct)
    summary = [
        f"{g.name}: order {g.order}, {g.n_classes} classes, dims {list(map(int, ct.dims))}",
        f"orthogonality residual: row {rep.row:.3g}, column {rep.column:.3g}",
    ]
    if args.format == "csv":
        rows = [(r, k, float(z.real), float(z.imag)) for r, row in enumerate(ct.chi) for k, z in enumerate(row)]
        return fio.rows_to_csv(("irrep", "class", "re", "im"), rows), summary, EXIT_OK
    return fio.dumps(fio.table_doc(ct)), summary, EXIT_OK


def cmd_fusion(args):
    g, ct, _ = _load(args)
    ft = fusion_coefficients(ct)
    entries = ft.sparse()
    summary = [f"{g.name}: {len(entries)} nonzero fusion multiplicities"]
    if args.format == "csv":
        return fio.rows_to_csv(("a", "b", "c", "n"), entries), summary, EXIT_OK
    return fio.dumps(fio.fusion_doc(ft)), summary, EXIT_OK


def cmd_decompose(args):
    g, ct, ell = _load(args)
    d = decompose(ct, ell)
    summary = [f"{g.name}: {len(d.p)} coefficients over rates {list(ell.distinct_rates)}"]
    if args.format == "csv":
        rows = [(r, c, lam) for r, s in enumerate(d.p) for c, lam in s.terms]
        return fio.rows_to_csv(("r", "coeff", "rate"), rows), summary, EXIT_OK
    return fio.dumps(fio.decomposition_doc(d)), summary, EXIT_OK


def cmd_certify(args):
    g, ct, ell = _load(args)
    rep = certify(decompose(ct, ell))
    summary = [f"{g.name}: {rep.conclusion.value}"]
    summary += [
        f"  r={v.irrep:<3d} p(0)={v.value_at_zero:+.6g} p'(0)={v.derivative_at_zero:+.6g} {v.status.value} ({v.resolution})"
        for v in rep.per_irrep
    ]
    if args.format == "csv":
        rows = [
            (v.irrep, v.value_at_zero, v.derivative_at_zero, v.status.value, v.resolution)
            for v in rep.per_irrep
        ]
        out = fio.rows_to_csv(("r", "p0", "dp0", "status", "resolution"), rows)
    else:
        out = fio.dumps(fio.certificate_doc(rep))
    return out, summary, CONCLUSION_EXIT[rep.conclusion]


def _row_text(row) -> str:
    parts = []
    for var, c in row.coeffs.items():
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        coef = "" if mag == 1 else f"{mag:g}"
        parts.append(f"{sign} {coef}{var}")
    text = " ".join(parts) if parts else "0"
    text = text[2:] if text.startswith("+ ") else "-" + text[2:] if text.startswith("- ") else text
    return f"{text} <= 0"


def cmd_ineq(args):
    g, ct, _ = _load(args)
    sys_ = inequality_system(ct)
    summary = [f"{g.name}: {len(sys_.rows)} rows over {list(sys_.variables)}"]
    for row in sys_.rows:
        note = f"  (irreps {list(row.irreps)})" if row.multiplicity > 1 else ""
        summary.append(f"  {_row_text(row)}{note}")
    if args.format == "csv":
        rows = [
            [i] + [row.coeffs.get(v, 0.0) for v in sys_.variables] + ["<=", 0, " ".join(map(str, row.irreps))]
            for i, row in enumerate(sys_.rows)
        ]
        header = ["row", *sys_.variables, "sense", "rhs", "irreps"]
        return fio.rows_to_csv(header, rows), summary, EXIT_OK
    return fio.dumps(fio.inequality_doc(sys_)), summary, EXIT_OK


def cmd_scan(args):
    g, ct, ell = _load(args)
    rep = positivity_scan(decompose(ct, ell), args.t_max, args.samples)
    viol = rep.first_violation
    summary = [
        f"{g.name}: {rep.grid.size} grid points on [0, {args.t_max:g}]",
        "no violation" if viol is None else f"violation: p_{viol[0]}({viol[1]:.6g}) = {viol[2]:.3g}",
    ]
    if args.format == "csv":
        header = ["t"] + [f"p{r}" for r in range(rep.values.shape[0])]
        rows = [[float(t), *map(float, rep.values[:, j])] for j, t in enumerate(rep.grid)]
        return fio.rows_to_csv(header, rows), summary, EXIT_OK
    doc = {
        "t_max": args.t_max,
        "points": int(rep.grid.size),
        "tolerance": VIOLATION_TOL,
        "min_value": [float(x) for x in rep.min_value],
        "argmin_t": [float(x) for x in rep.argmin_t],
        "first_violation": None if viol is None else {"r": viol[0], "t": viol[1], "value": viol[2]},
    }
    return fio.dumps(doc), summary, EXIT_OK


def cmd_power_check(args):
    g, ct, ell = _load(args)
    if args.n > 4:
        raise fio.InputError("argv.n", "must be <= 4")
    try:
        resid = power_expansion_check(decompose(ct, ell), args.t, args.n)
    except CombinatorialSizeError as exc:
        raise fio.InputError("argv.n", str(exc)) from None
    summary = [f"{g.name}: n={args.n} t={args.t:g} residual {resid:.3g}"]
    if resid >= VIOLATION_TOL:
        raise NumericalFailure("power expansion does not reproduce p_b(t)", residual=resid)
    doc = {"t": args.t, "n": args.n, "residual": resid}
    if args.format == "csv":
        return fio.rows_to_csv(("t", "n", "residual"), [(args.t, args.n, resid)]), summary, EXIT_OK
    return fio.dumps(doc), summary, EXIT_OK


def _sweep_csv(result) -> str:
    rows = []
    for tr in result.trials:
        worst = min(range(len(tr.min_value)), key=lambda r: tr.min_value[r])
        rows.append(
            (
                tr.index,
                " ".join(fio._fmt(x) for x in tr.class_lengths),
                tr.conclusion.value,
                worst,
                tr.min_value[worst],
                tr.argmin_t[worst],
            )
        )
    return fio.rows_to_csv(("trial", "lengths", "conclusion", "argmin_r", "min_p", "argmin_t"), rows)


def cmd_sweep(args):
    g, ct, _ = _load(args)
    result = theorem_sweep(g, args.trials, args.seed, ct=ct, samples=args.samples)
    counts = result.counts()
    bad = result.certified_but_violating
    summary = [
        f"{g.name}: {args.trials} trials, seed {args.seed}",
        f"  certified & clean {counts[(True, True)]}, certified & violating {bad}, "
        f"not certified & clean {counts[(False, True)]}, not certified & violating {counts[(False, False)]}",
        f"  FAIL irreps without a negative witness: {result.missing_witnesses}",
    ]
    table = _sweep_csv(result)
    if args.csv_path:
        Path(args.csv_path).write_text(table)
    doc = {
        "group": g.name,
        "seed": args.seed,
        "trials": args.trials,
        "counts": {
            "certified_clean": counts[(True, True)],
            "certified_violating": bad,
            "not_certified_clean": counts[(False, True)],
            "not_certified_violating": counts[(False, False)],
        },
        "missing_witnesses": result.missing_witnesses,
    }
    out = table if args.format == "csv" else fio.dumps(doc)
    if bad or result.missing_witnesses:
        # the certificate contradicts the scan: an implementation bug, not bad data
        _emit(args, out, summary)
        raise NumericalFailure(f"{bad} certified trials violate positivity", residual=float(bad))
    return out, summary, EXIT_OK


COMMANDS = {
    "table": cmd_table,
    "fusion": cmd_fusion,
    "decompose": cmd_decompose,
    "certify": cmd_certify,
    "ineq": cmd_ineq,
    "scan": cmd_scan,
    "power-check": cmd_power_check,
    "sweep": cmd_sweep,
}


def _emit(args, machine: str, summary):
    if args.output:
        Path(args.output).write_text(machine)
        print("\n".join(summary))
    else:
        sys.stdout.write(machine)
        print("\n".join(summary), file=sys.stderr)


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except fio.InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        machine, summary, code = COMMANDS[args.command](args)
    except fio.InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalFailure, CharacterTableError, FusionIntegralityError, RealnessError) as exc:
        resid = getattr(exc, "residual", None)
        extra = "" if resid is None else f" (residual {resid:.3g})"
        print(f"numerical failure: {exc}{extra}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(args, machine, summary)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
