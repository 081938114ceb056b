"""Finite positivity certificate for the coefficients ``p_r(t)``.

If every ``p_r`` is nonnegative on some interval ``[0, eps]`` then, because the
semigroup is a power of itself and tensor-product multiplicities are
nonnegative, every ``p_r`` is nonnegative for all ``t >= 0``. Nonnegativity
near zero is decided here from derivatives at ``t = 0``.
"""
from __future__ import annotations

import enum
import string
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .characters import CharacterTable
from .semigroup import MAX_DERIVATIVE_ORDER, Decomposition, ExpSum, derivative_at_zero, eval_expsum

__all__ = [
    "Status",
    "Conclusion",
    "IrrepVerdict",
    "CertificateReport",
    "InequalityRow",
    "InequalitySystem",
    "certify",
    "inequality_system",
    "check_point",
]

SIGN_TOL = 1e-12
COEFF_SNAP_TOL = 1e-9
BOUNDARY_SCAN_POINTS = 2001


class Status(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    BOUNDARY = "BOUNDARY"


class Conclusion(str, enum.Enum):
    CERTIFIED_POSITIVE = "CERTIFIED_POSITIVE"
    NOT_CERTIFIED = "NOT_CERTIFIED"
    BOUNDARY_NUMERIC = "BOUNDARY_NUMERIC"


@dataclass(frozen=True)
class IrrepVerdict:
    irrep: int
    value_at_zero: float
    derivative_at_zero: float
    status: Status
    # how the sign was decided: "order-m" (first nonvanishing derivative),
    # "identically-zero", or "numeric-scan"
    resolution: str
    deciding_order: Optional[int] = None


@dataclass(frozen=True)
class CertificateReport:
    per_irrep: tuple
    conclusion: Conclusion
    epsilon_used: float

    @property
    def failed(self) -> list:
        return [v.irrep for v in self.per_irrep if v.status is Status.FAIL]


def _sign_near_zero(s: ExpSum, eps: float):
    """Classify ``s`` on a right neighbourhood of 0.

    Returns ``(status, resolution, order)``.
    """
    n_terms = len(s.rates)
    for m in range(MAX_DERIVATIVE_ORDER + 1):
        d = derivative_at_zero(s, m)
        if d > SIGN_TOL:
            return Status.PASS, f"order-{m}", m
        if d < -SIGN_TOL:
            return Status.FAIL, f"order-{m}", m
        # derivatives 0..n_terms-1 vanishing forces all coefficients to zero
        # (Vandermonde in the distinct rates)
        if m + 1 >= n_terms:
            return Status.PASS, "identically-zero", m
    grid = np.linspace(0.0, eps, BOUNDARY_SCAN_POINTS)
    if eval_expsum(s, grid).min() < -SIGN_TOL:
        return Status.FAIL, "numeric-scan", None
    return Status.BOUNDARY, "numeric-scan", None


def certify(d: Decomposition) -> CertificateReport:
    eps = 1e-3 / max(1.0, d.max_rate)
    verdicts = []
    for r, s in enumerate(d.p):
        value = derivative_at_zero(s, 0)
        slope = derivative_at_zero(s, 1)
        status, how, order = _sign_near_zero(s, eps)
        if r == 0 and abs(value - 1.0) > SIGN_TOL:
            status, how = Status.FAIL, "trivial-value"
        verdicts.append(IrrepVerdict(r, value, slope, status, how, order))

    statuses = {v.status for v in verdicts}
    if Status.FAIL in statuses:
        conclusion = Conclusion.NOT_CERTIFIED
    elif Status.BOUNDARY in statuses:
        conclusion = Conclusion.BOUNDARY_NUMERIC
    else:
        conclusion = Conclusion.CERTIFIED_POSITIVE
    return CertificateReport(per_irrep=tuple(verdicts), conclusion=conclusion, epsilon_used=eps)


# ----------------------------------------------------------------- inequalities


@dataclass(frozen=True)
class InequalityRow:
    """``sum coeffs[v] * v <= 0``; equals ``-|G| p_r'(0)`` for each listed irrep."""

    coeffs: Mapping[str, float]
    irreps: tuple

    @property
    def multiplicity(self) -> int:
        return len(self.irreps)


@dataclass(frozen=True)
class InequalitySystem:
    variables: tuple
    variable_classes: Mapping[str, tuple] = field(repr=False)
    rows: tuple

    def matrix(self) -> np.ndarray:
        return np.array([[row.coeffs.get(v, 0.0) for v in self.variables] for row in self.rows])

    def evaluate(self, assignment: Mapping[str, float]) -> np.ndarray:
        missing = [v for v in self.variables if v not in assignment]
        if missing:
            raise KeyError(f"assignment is missing variables {missing}")
        x = np.array([float(assignment[v]) for v in self.variables])
        if (x < 0).any():
            raise ValueError("variables are lengths and must be nonnegative")
        if not self.rows:
            return np.zeros(0)
        return self.matrix() @ x

    def assignment_from(self, class_lengths) -> dict:
        return {v: float(class_lengths[cls[0]]) for v, cls in self.variable_classes.items()}


def _variable_name(i: int) -> str:
    letters = string.ascii_lowercase
    return letters[i] if i < len(letters) else f"x{i}"


def _snap(x: float) -> float:
    nearest = round(x)
    out = float(nearest) if abs(x - nearest) <= COEFF_SNAP_TOL else float(x)
    return out + 0.0  # no negative zero


def inequality_system(ct: CharacterTable) -> InequalitySystem:
    """Linear system in per-class-pair lengths equivalent to ``p_r'(0) >= 0``.

    For Z_6 with lengths ``(0, a, b, c, b, a)`` this yields
    ``a - b - c <= 0``, ``-a - b + c <= 0`` and ``-2a + 2b - c <= 0``.
    """
    g = ct.group
    ic = g.inverse_class
    pairs = []
    for k in range(1, g.n_classes):
        if ic[k] >= k:
            pairs.append((k,) if ic[k] == k else (k, int(ic[k])))
    names = tuple(_variable_name(i) for i in range(len(pairs)))
    chi = np.asarray(ct.chi)
    sizes = g.class_sizes

    rows: list = []
    seen: dict = {}
    for r in range(1, ct.n_irreps):
        coeffs = {}
        for name, cls in zip(names, pairs):
            w = sum(sizes[k] * np.conj(chi[r, k]) for k in cls)
            c = _snap(float(np.real(w)))
            if c != 0.0:
                coeffs[name] = c
        key = tuple(round(coeffs.get(n, 0.0), 9) + 0.0 for n in names)
        if key in seen:
            i = seen[key]
            rows[i] = InequalityRow(rows[i].coeffs, rows[i].irreps + (r,))
        else:
            seen[key] = len(rows)
            rows.append(InequalityRow(coeffs, (r,)))
    return InequalitySystem(
        variables=names,
        variable_classes=dict(zip(names, pairs)),
        rows=tuple(rows),
    )


def check_point(sys: InequalitySystem, assignment: Mapping[str, float]):
    """Return ``(satisfied, violated_row_indices)`` with 0-based row indices."""
    vals = sys.evaluate(assignment)
    violated = [int(i) for i in np.flatnonzero(vals > SIGN_TOL)]
    return not violated, violated
