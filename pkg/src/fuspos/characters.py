"""Complex character tables and fusion (tensor-product) multiplicities."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .groups import FiniteGroup

__all__ = [
    "CharacterTable",
    "FusionTensor",
    "CharacterTableError",
    "FusionIntegralityError",
    "character_table",
    "fusion_coefficients",
    "fusion_multi",
    "verify_orthogonality",
    "OrthogonalityReport",
]

logger = logging.getLogger(__name__)

INTEGRALITY_TOL = 1e-6
ORTHOGONALITY_TOL = 1e-9
EIGEN_SEPARATION = 1e-8
MAX_REDRAWS = 20


class CharacterTableError(ArithmeticError):
    """Numerical character-table construction failed."""

    def __init__(self, message, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class FusionIntegralityError(ArithmeticError):
    """A fusion multiplicity is not a nonnegative integer."""

    def __init__(self, message, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True, eq=False)
class CharacterTable:
    """``chi[r, k]`` is the value of irrep ``r`` on conjugacy class ``k``."""

    group: FiniteGroup = field(repr=False)
    chi: np.ndarray = field(repr=False)
    dims: np.ndarray
    method: str = "numeric"

    @property
    def n_irreps(self) -> int:
        return self.chi.shape[0]

    @property
    def class_sizes(self) -> np.ndarray:
        return self.group.class_sizes

    def conjugate_irrep(self) -> np.ndarray:
        """Index of the complex-conjugate irrep of each irrep."""
        conj = self.chi.conj()
        dist = np.abs(conj[:, None, :] - self.chi[None, :, :]).max(axis=2)
        return dist.argmin(axis=1)

    def element_values(self) -> np.ndarray:
        """Characters expanded to elements, shape ``(n_irreps, order)``."""
        return self.chi[:, self.group.class_of]


@dataclass(frozen=True, eq=False)
class FusionTensor:
    """``n[a, b, c]`` is the multiplicity of irrep c in a (x) b."""

    n: np.ndarray = field(repr=False)

    def sparse(self):
        return [
            (int(a), int(b), int(c), int(self.n[a, b, c]))
            for a, b, c in np.argwhere(self.n != 0)
        ]


class OrthogonalityReport(NamedTuple):
    row: float
    column: float

    @property
    def max(self) -> float:
        return max(self.row, self.column)


# ---------------------------------------------------------------- closed form


def _cyclic_table(g: FiniteGroup) -> np.ndarray:
    """Products of ``exp(2 pi i a x / n)`` over the cyclic factors."""
    factors = g.cyclic_factors
    digits = np.array(np.unravel_index(np.arange(g.order), factors))  # (n_factors, order)
    frac = np.zeros((g.order, g.order))
    for d, n in zip(digits, factors):
        # reduce mod n before scaling so q^{ij} is computed from an exact angle
        frac += ((d[:, None] * d[None, :]) % n) / n
    # classes are singletons in element order for abelian groups
    cls_elems = np.array([c[0] for c in g.classes])
    return np.exp(2j * np.pi * frac[:, cls_elems])


# ------------------------------------------------------------------ numerical


def class_structure_constants(g: FiniteGroup) -> np.ndarray:
    """``a[j, k, l]``: number of pairs (x in C_j, y in C_k) with ``x*y = z_l``.

    ``z_l`` is the smallest element of class ``l``.
    """
    h = g.n_classes
    a = np.zeros((h, h, h), dtype=np.int64)
    inv = g.inv.astype(np.intp)
    cls = g.class_of
    for l, members in enumerate(g.classes):
        z = members[0]
        y = g.mul[inv, z]  # y = x^-1 z for every x
        np.add.at(a[:, :, l], (cls, cls[y]), 1)
    return a


def _central_characters(a: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Rows are the common eigenvectors ``omega_r`` scaled so ``omega_r[0] = 1``."""
    h = a.shape[0]
    if h == 1:
        return np.ones((1, 1), dtype=complex)
    worst = 0.0
    for _ in range(MAX_REDRAWS + 1):
        u = rng.uniform(-1.0, 1.0, size=h)
        m = np.einsum("j,jkl->kl", u, a.astype(float))
        vals, vecs = np.linalg.eig(m)
        gaps = np.abs(vals[:, None] - vals[None, :])
        np.fill_diagonal(gaps, np.inf)
        worst = gaps.min()
        if worst >= EIGEN_SEPARATION:
            break
        logger.debug("eigenvalue separation %.3g too small, redrawing", worst)
    else:
        raise CharacterTableError(
            f"eigenvalues not separated after {MAX_REDRAWS} redraws", residual=worst
        )
    omega = (vecs / vecs[0:1, :]).T
    return omega


def _signature_key(row: np.ndarray, dim: int):
    re = tuple(-np.round(row.real, 6) + 0.0)
    im = tuple(-np.round(row.imag, 6) + 0.0)
    return (dim, re, im)


def _numeric_table(g: FiniteGroup, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    sizes = g.class_sizes.astype(float)
    omega = _central_characters(class_structure_constants(g), rng)
    norm = (np.abs(omega) ** 2 / sizes).sum(axis=1)
    dims_f = np.sqrt(g.order / norm)
    dims = np.rint(dims_f).astype(np.int64)
    off = np.abs(dims_f - dims).max()
    if off > INTEGRALITY_TOL or (dims < 1).any():
        raise CharacterTableError(f"irrep dimensions not integral (off by {off:.3g})", residual=off)
    if int((dims**2).sum()) != g.order:
        raise CharacterTableError(
            f"sum of squared dimensions {int((dims**2).sum())} != |G| = {g.order}"
        )
    chi = dims[:, None] * omega / sizes[None, :]
    return chi, dims


def _normalize_order(chi: np.ndarray, dims: np.ndarray):
    trivial = int(np.argmin(np.abs(chi - 1.0).max(axis=1)))
    rest = [r for r in range(len(dims)) if r != trivial]
    rest.sort(key=lambda r: _signature_key(chi[r], int(dims[r])))
    perm = [trivial] + rest
    return chi[perm], dims[perm]


def character_table(g: FiniteGroup, *, seed: int = 0) -> CharacterTable:
    """Character table of ``g``.

    Groups built from cyclic factors get the closed form ``q^{ij}`` with the
    irrep index equal to the element index. Everything else goes through
    the class-sum eigenvector method with a random combination drawn from
    ``seed``.
    """
    if g.cyclic_factors is not None:
        chi = _cyclic_table(g)
        dims = np.ones(g.order, dtype=np.int64)
        method = "closed-form"
    else:
        chi, dims = _numeric_table(g, np.random.default_rng(seed))
        chi, dims = _normalize_order(chi, dims)
        method = "numeric"
    # characters of the trivial irrep and at the identity are exact integers
    chi[0, :] = 1.0
    chi[:, 0] = dims
    chi.setflags(write=False)
    dims.setflags(write=False)
    ct = CharacterTable(group=g, chi=chi, dims=dims, method=method)
    rep = verify_orthogonality(ct)
    if rep.max > ORTHOGONALITY_TOL:
        raise CharacterTableError(f"orthogonality residual {rep.max:.3g}", residual=rep.max)
    return ct


def verify_orthogonality(ct: CharacterTable) -> OrthogonalityReport:
    """Maximal deviation from row and (normalized) column orthonormality.

    The column residual compares ``sqrt(|C_k||C_l|)/|G| * sum_r chi_r(k) conj(chi_r(l))``
    against the identity, i.e. the orthonormal form of column orthogonality.
    """
    order = ct.group.order
    sizes = ct.class_sizes.astype(float)
    chi = np.asarray(ct.chi)
    gram = (chi * sizes) @ chi.conj().T / order
    row = np.abs(gram - np.eye(chi.shape[0])).max()
    col = chi.T @ chi.conj()
    scale = np.sqrt(np.outer(sizes, sizes)) / order
    column = np.abs(col * scale - np.eye(chi.shape[1])).max()
    return OrthogonalityReport(float(row), float(column))


# --------------------------------------------------------------------- fusion


def _round_multiplicities(raw: np.ndarray) -> np.ndarray:
    if raw.size == 0:
        return raw.real.astype(np.int64)
    rounded = np.rint(raw.real)
    resid = float(np.abs(raw - rounded).max())
    if resid > INTEGRALITY_TOL:
        raise FusionIntegralityError(
            f"fusion multiplicity off-integer by {resid:.3g}", residual=resid
        )
    if (rounded < 0).any():
        raise FusionIntegralityError(
            f"negative fusion multiplicity {rounded.min():.0f}", residual=float(-rounded.min())
        )
    return rounded.astype(np.int64)


def fusion_coefficients(ct: CharacterTable) -> FusionTensor:
    """Binary fusion table ``n[a, b, c] = <chi_a chi_b, chi_c>``."""
    chi = np.asarray(ct.chi)
    w = ct.class_sizes / ct.group.order
    raw = np.einsum("k,ak,bk,ck->abc", w, chi, chi, chi.conj())
    n = _round_multiplicities(raw)
    n.setflags(write=False)
    return FusionTensor(n)


def _multi_row(ct: CharacterTable, irreps: Sequence[int]) -> np.ndarray:
    """n-ary multiplicities of every target irrep in the tensor product."""
    chi = np.asarray(ct.chi)
    if len(irreps) == 0:
        raise ValueError("need at least one irrep")
    prod = np.prod(chi[list(irreps)], axis=0)
    raw = (chi.conj() * (ct.class_sizes * prod)).sum(axis=1) / ct.group.order
    return _round_multiplicities(raw)


def fusion_multi(ct: CharacterTable, irreps: Sequence[int], b: int) -> int:
    """Multiplicity of irrep ``b`` in the tensor product of ``irreps``."""
    return int(_multi_row(ct, irreps)[b])
