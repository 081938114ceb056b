"""Document parsing and serialization for the command line.

Floats are written with 17 significant digits so every double round-trips.
"""
from __future__ import annotations

import csv
import io
import json
import math
from decimal import Decimal, InvalidOperation
from pathlib import Path

from .certify import CertificateReport, InequalitySystem
from .characters import CharacterTable, FusionTensor
from .groups import (
    FiniteGroup,
    build_cyclic,
    build_dihedral,
    build_product,
    build_symmetric,
    from_table,
)
from .semigroup import Decomposition, ExpSum, LengthFunction, validate_length

__all__ = [
    "InputError",
    "load_document",
    "parse_group",
    "parse_lengths",
    "dumps",
    "table_doc",
    "fusion_doc",
    "decomposition_doc",
    "parse_decomposition_doc",
    "certificate_doc",
    "inequality_doc",
    "rows_to_csv",
]


class InputError(ValueError):
    """Malformed user input; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def load_document(text: str, path: str = "$"):
    """Parse inline JSON, or read it from a file when prefixed with ``@``."""
    if text.startswith("@"):
        try:
            text = Path(text[1:]).read_text()
        except OSError as exc:
            raise InputError(path, f"cannot read {text[1:]!r}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(path, f"invalid JSON ({exc.msg} at char {exc.pos})") from None


def _require_keys(doc, allowed: set, required: set, path: str):
    if not isinstance(doc, dict):
        raise InputError(path, "expected an object")
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise InputError(f"{path}.{unknown[0]}", "unknown field")
    missing = sorted(required - set(doc))
    if missing:
        raise InputError(f"{path}.{missing[0]}", "missing field")


def _int_field(doc, key, path) -> int:
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise InputError(f"{path}.{key}", f"expected an integer, got {v!r}")
    return v


def parse_group(doc, path: str = "group") -> FiniteGroup:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InputError(f"{path}.kind", "missing field")
    kind = doc["kind"]
    try:
        if kind in ("cyclic", "dihedral", "symmetric"):
            _require_keys(doc, {"kind", "n"}, {"kind", "n"}, path)
            n = _int_field(doc, "n", path)
            builder = {"cyclic": build_cyclic, "dihedral": build_dihedral, "symmetric": build_symmetric}
            return builder[kind](n)
        if kind == "product":
            _require_keys(doc, {"kind", "factors"}, {"kind", "factors"}, path)
            factors = doc["factors"]
            if not isinstance(factors, list) or len(factors) != 2:
                raise InputError(f"{path}.factors", "expected a list of two group specs")
            g = parse_group(factors[0], f"{path}.factors[0]")
            h = parse_group(factors[1], f"{path}.factors[1]")
            return build_product(g, h)
        if kind == "table":
            _require_keys(doc, {"kind", "mul"}, {"kind", "mul"}, path)
            return from_table(doc["mul"])
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(path, str(exc)) from None
    raise InputError(f"{path}.kind", f"unknown group kind {kind!r}")


def _real(v, path) -> float:
    if isinstance(v, bool):
        raise InputError(path, f"expected a number, got {v!r}")
    if isinstance(v, (int, float)):
        x = float(v)
    elif isinstance(v, str):
        try:
            x = float(Decimal(v.strip()))
        except InvalidOperation:
            raise InputError(path, f"not a decimal number: {v!r}") from None
    else:
        raise InputError(path, f"expected a number, got {v!r}")
    if not math.isfinite(x):
        raise InputError(path, "must be finite")
    return x


def parse_lengths(doc, g: FiniteGroup, path: str = "lengths") -> LengthFunction:
    """Accepts ``{"lengths": {...}}`` or the inner object directly."""
    if isinstance(doc, dict) and set(doc) == {"lengths"}:
        doc = doc["lengths"]
        path = f"{path}.lengths"
    if not isinstance(doc, dict) or len(doc) != 1 or not set(doc) <= {"per_element", "per_class"}:
        keys = sorted(doc) if isinstance(doc, dict) else []
        bad = [k for k in keys if k not in ("per_element", "per_class")]
        where = f"{path}.{bad[0]}" if bad else path
        raise InputError(where, "expected exactly one of per_element, per_class")
    (key, values), = doc.items()
    sub = f"{path}.{key}"
    if not isinstance(values, list):
        raise InputError(sub, "expected a list")
    vals = [_real(v, f"{sub}[{i}]") for i, v in enumerate(values)]
    try:
        return validate_length(g, vals, per="element" if key == "per_element" else "class")
    except ValueError as exc:
        raise InputError(sub, str(exc)) from None


# ------------------------------------------------------------------ output


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite {x}")
    s = format(x + 0.0, ".17g")
    return s


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float printed to 17 significant digits."""

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, int):
            return str(o)
        if isinstance(o, float):
            return _fmt(o)
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, complex):
            return enc({"re": o.real, "im": o.imag}, level)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(isinstance(v, (int, float, bool)) or v is None for v in o):
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            items = [pad + enc(v, level + 1) for v in o]
            return "[\n" + ",\n".join(items) + "\n" + end + "]"
        if hasattr(o, "item"):  # numpy scalar
            return enc(o.item(), level)
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(obj, 0) + "\n"


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _complex(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def table_doc(ct: CharacterTable) -> dict:
    g = ct.group
    return {
        "group": g.name,
        "order": g.order,
        "method": ct.method,
        "classes": [
            {"index": k, "size": len(c), "representative": c[0], "inverse_class": int(g.inverse_class[k])}
            for k, c in enumerate(g.classes)
        ],
        "dims": [int(d) for d in ct.dims],
        "chi": [[_complex(z) for z in row] for row in ct.chi],
    }


def fusion_doc(ft: FusionTensor) -> dict:
    return {"entries": [{"a": a, "b": b, "c": c, "n": n} for a, b, c, n in ft.sparse()]}


def decomposition_doc(d: Decomposition) -> dict:
    return {
        "group": d.table.group.name,
        "class_lengths": list(d.length.class_lengths),
        "irreps": [
            {"r": r, "terms": [{"coeff": c, "rate": lam} for c, lam in s.terms]}
            for r, s in enumerate(d.p)
        ],
    }


def parse_decomposition_doc(doc) -> list:
    """Inverse of :func:`decomposition_doc` for the term lists."""
    return [
        ExpSum(
            coeffs=tuple(float(t["coeff"]) for t in item["terms"]),
            rates=tuple(float(t["rate"]) for t in item["terms"]),
        )
        for item in doc["irreps"]
    ]


def certificate_doc(rep: CertificateReport) -> dict:
    return {
        "conclusion": rep.conclusion.value,
        "epsilon": rep.epsilon_used,
        "irreps": [
            {
                "r": v.irrep,
                "p0": v.value_at_zero,
                "dp0": v.derivative_at_zero,
                "status": v.status.value,
                "resolution": v.resolution,
            }
            for v in rep.per_irrep
        ],
    }


def inequality_doc(sys: InequalitySystem) -> dict:
    return {
        "variables": {v: list(cls) for v, cls in sys.variable_classes.items()},
        "rows": [
            {
                "coeffs": dict(row.coeffs),
                "sense": "<=",
                "rhs": 0,
                "irreps": list(row.irreps),
                "multiplicity": row.multiplicity,
            }
            for row in sys.rows
        ],
    }
