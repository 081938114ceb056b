"""Length functions and the character expansion of the heat semigroup.

For a class-function length ``l`` the diagonal semigroup ``P_t|g> = exp(-t l(g))|g>``
expands as ``P_t = sum_r p_r(t) sigma_r`` where ``sigma_r`` multiplies ``|g>`` by
``chi_r(g)``. Orthogonality of characters gives

    p_r(t) = 1/|G| * sum_k |C_k| conj(chi_r(k)) exp(-t l_k)

which is stored exactly as an :class:`ExpSum` with one term per distinct rate.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .characters import CharacterTable
from .groups import FiniteGroup

__all__ = [
    "LengthFunction",
    "ExpSum",
    "Decomposition",
    "LengthError",
    "IdentityLengthError",
    "InverseSymmetryError",
    "NegativeLengthError",
    "NotClassFunctionError",
    "RealnessError",
    "validate_length",
    "decompose",
]

logger = logging.getLogger(__name__)

CLASS_CONSTANCY_TOL = 1e-12
IMAG_TOL = 1e-9
MAX_DERIVATIVE_ORDER = 8


class LengthError(ValueError):
    """Invalid length function."""


class IdentityLengthError(LengthError):
    pass


class InverseSymmetryError(LengthError):
    pass


class NegativeLengthError(LengthError):
    pass


class NotClassFunctionError(LengthError):
    pass


class RealnessError(ArithmeticError):
    def __init__(self, message, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True, eq=False)
class LengthFunction:
    group: FiniteGroup = field(repr=False)
    class_lengths: tuple

    @property
    def distinct_rates(self) -> tuple:
        return tuple(sorted(set(self.class_lengths)))

    def per_element(self) -> np.ndarray:
        return np.asarray(self.class_lengths, dtype=float)[self.group.class_of]


def validate_length(g: FiniteGroup, raw: Sequence[float], *, per: str = "auto") -> LengthFunction:
    """Check and collapse a length function to per-class values.

    ``per`` is ``"element"``, ``"class"`` or ``"auto"``; ``auto`` picks by the
    length of ``raw`` and prefers per-element when both match (abelian groups,
    where the two readings coincide anyway).
    """
    values = np.asarray(raw, dtype=float).ravel()
    if per == "auto":
        per = "element" if values.size == g.order else "class"
    if per == "element":
        if values.size != g.order:
            raise LengthError(f"expected {g.order} per-element lengths, got {values.size}")
    elif per == "class":
        if values.size != g.n_classes:
            raise LengthError(f"expected {g.n_classes} per-class lengths, got {values.size}")
    else:
        raise ValueError(f"per must be 'element', 'class' or 'auto', not {per!r}")

    if not np.isfinite(values).all():
        raise LengthError("lengths must be finite")
    if (values < 0).any():
        bad = int(np.flatnonzero(values < 0)[0])
        raise NegativeLengthError(f"length at {per} {bad} is negative ({values[bad]})")
    if values[0] != 0:
        raise IdentityLengthError(f"length of the identity must be 0, got {values[0]}")

    if per == "element":
        inv = g.inv.astype(np.intp)
        mismatch = values != values[inv]
        if mismatch.any():
            a = int(np.flatnonzero(mismatch)[0])
            raise InverseSymmetryError(
                f"|g| != |g^-1| for element {a}: {values[a]} vs {values[inv[a]]}"
            )
        per_class = []
        for k, members in enumerate(g.classes):
            vals = values[list(members)]
            if np.abs(vals - vals[0]).max() > CLASS_CONSTANCY_TOL:
                raise NotClassFunctionError(f"lengths differ inside conjugacy class {k}")
            per_class.append(float(vals[0]))
    else:
        per_class = [float(v) for v in values]
        ic = g.inverse_class
        for k in range(g.n_classes):
            if per_class[k] != per_class[ic[k]]:
                raise InverseSymmetryError(
                    f"class {k} and its inverse class {ic[k]} have different lengths"
                )
    return LengthFunction(group=g, class_lengths=tuple(per_class))


@dataclass(frozen=True)
class ExpSum:
    """``t -> sum_k coeffs[k] * exp(-rates[k] * t)`` with ascending distinct rates."""

    coeffs: tuple
    rates: tuple

    def __post_init__(self):
        if len(self.coeffs) != len(self.rates):
            raise ValueError("coeffs and rates differ in length")
        r = self.rates
        if any(b <= a for a, b in zip(r, r[1:])):
            raise ValueError("rates must be strictly increasing")
        if r and r[0] < 0:
            raise ValueError("rates must be nonnegative")

    @property
    def terms(self):
        return list(zip(self.coeffs, self.rates))

    @property
    def max_rate(self) -> float:
        return self.rates[-1] if self.rates else 0.0

    def __call__(self, t):
        return eval_expsum(self, t)

    def derivative_at_zero(self, m: int = 1) -> float:
        return derivative_at_zero(self, m)


def eval_expsum(s: ExpSum, t):
    """Evaluate at scalar or array ``t >= 0``."""
    arr = np.asarray(t, dtype=float)
    if not np.isfinite(arr).all() or (arr < 0).any():
        raise ValueError("t must be finite and nonnegative")
    c = np.asarray(s.coeffs, dtype=float)
    lam = np.asarray(s.rates, dtype=float)
    out = np.exp(-np.multiply.outer(arr, lam)) @ c
    return float(out) if arr.ndim == 0 else out


def derivative_at_zero(s: ExpSum, m: int = 1) -> float:
    """``p^(m)(0) = sum_k c_k (-rate_k)^m`` from the stored terms."""
    if int(m) != m or not 0 <= m <= MAX_DERIVATIVE_ORDER:
        raise ValueError(f"derivative order must be in [0, {MAX_DERIVATIVE_ORDER}]")
    return math.fsum(c * (-lam) ** m for c, lam in zip(s.coeffs, s.rates))


@dataclass(frozen=True, eq=False)
class Decomposition:
    table: CharacterTable = field(repr=False)
    length: LengthFunction
    p: tuple

    @property
    def max_rate(self) -> float:
        return max(self.length.class_lengths)

    def values(self, t) -> np.ndarray:
        """All ``p_r(t)``; shape ``(n_irreps,) + shape(t)``."""
        return np.stack([eval_expsum(s, t) for s in self.p])

    def reconstruct(self, t) -> np.ndarray:
        """``sum_r p_r(t) chi_r(k)`` for every class; should equal ``exp(-t l_k)``."""
        vals = self.values(t)
        return np.tensordot(np.asarray(self.table.chi).T, vals, axes=1)


def decompose(ct: CharacterTable, ell: LengthFunction) -> Decomposition:
    if ell.group is not ct.group:
        raise ValueError("length function and character table belong to different groups")
    g = ct.group
    lengths = ell.class_lengths
    rates = ell.distinct_rates
    slot = {r: i for i, r in enumerate(rates)}
    # weights[k] = |C_k| / |G|; group classes into one column per distinct rate
    pool = np.zeros((g.n_classes, len(rates)))
    for k, lk in enumerate(lengths):
        pool[k, slot[lk]] = g.class_sizes[k] / g.order
    coeffs = np.asarray(ct.chi).conj() @ pool
    imag = float(np.abs(coeffs.imag).max())
    if imag >= IMAG_TOL:
        raise RealnessError(f"expansion coefficient has imaginary part {imag:.3g}", residual=imag)
    if imag > 0:
        logger.debug("dropping imaginary residue %.3g", imag)
    p = tuple(
        ExpSum(coeffs=tuple(float(c) for c in row), rates=tuple(float(r) for r in rates))
        for row in coeffs.real
    )
    return Decomposition(table=ct, length=ell, p=p)
