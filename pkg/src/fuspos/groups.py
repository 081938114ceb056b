"""Finite groups as dense Cayley tables.

Element 0 is always the identity. Conjugacy classes are ordered by
``(size, smallest member)`` so class 0 is ``{e}``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "FiniteGroup",
    "GroupTableError",
    "NonSquareTableError",
    "EntryRangeError",
    "MissingIdentityError",
    "AssociativityError",
    "NonInvertibleError",
    "build_cyclic",
    "build_dihedral",
    "build_symmetric",
    "build_product",
    "from_table",
]

EXHAUSTIVE_ASSOC_LIMIT = 256
ASSOC_SAMPLES = 1_000_000
MAX_SYMMETRIC_DEGREE = 7


class GroupTableError(ValueError):
    """Base class for malformed multiplication tables."""


class NonSquareTableError(GroupTableError):
    pass


class EntryRangeError(GroupTableError):
    pass


class MissingIdentityError(GroupTableError):
    pass


class AssociativityError(GroupTableError):
    def __init__(self, witness):
        a, b, c = witness
        self.witness = (int(a), int(b), int(c))
        super().__init__(f"associativity fails for (a, b, c) = {self.witness}")


class NonInvertibleError(GroupTableError):
    def __init__(self, element):
        self.element = int(element)
        super().__init__(f"element {self.element} has no two-sided inverse")


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Immutable finite group on the index set ``0..order-1``.

    Attributes
    ----------
    mul : ndarray, shape (order, order)
        ``mul[a, b]`` is the index of ``a*b``.
    inv : ndarray, shape (order,)
    classes : tuple of tuple of int
        Conjugacy classes, each sorted ascending.
    class_of : ndarray, shape (order,)
    inverse_class : ndarray, shape (n_classes,)
    cyclic_factors : tuple of int or None
        Set when the group was built as a product of cyclic groups with the
        mixed-radix element numbering used by :func:`build_product`; enables
        closed-form characters.
    """

    order: int
    mul: np.ndarray = field(repr=False)
    inv: np.ndarray = field(repr=False)
    classes: tuple = field(repr=False)
    class_of: np.ndarray = field(repr=False)
    inverse_class: np.ndarray = field(repr=False)
    name: str = "G"
    cyclic_factors: Optional[tuple] = None

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def class_sizes(self) -> np.ndarray:
        return np.array([len(c) for c in self.classes], dtype=np.int64)

    @property
    def is_abelian(self) -> bool:
        return self.n_classes == self.order

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order}, classes={self.n_classes})"


def _index_dtype(n: int):
    return np.int16 if n < 2**15 else np.int32


def _check_table(mul: np.ndarray) -> np.ndarray:
    """Validate group axioms; return the inverse map."""
    n = mul.shape[0]
    idx = np.arange(n)
    if not np.array_equal(mul[0], idx) or not np.array_equal(mul[:, 0], idx):
        raise MissingIdentityError("element 0 is not a two-sided identity")

    # right inverse from each row, then require it to be a left inverse too
    is_id = mul == 0
    has_right = is_id.any(axis=1)
    if not has_right.all():
        raise NonInvertibleError(np.flatnonzero(~has_right)[0])
    inv = is_id.argmax(axis=1)
    bad = mul[inv, idx] != 0
    if bad.any():
        raise NonInvertibleError(np.flatnonzero(bad)[0])

    if n <= EXHAUSTIVE_ASSOC_LIMIT:
        m = mul.astype(np.intp)
        left = m[m]  # left[a, b, c] = (ab)c
        right = m[idx[:, None, None], m[None, :, :]]  # a(bc)
        diff = left != right
        if diff.any():
            raise AssociativityError(np.argwhere(diff)[0])
    else:
        rng = np.random.default_rng(0x5EED)
        done = 0
        while done < ASSOC_SAMPLES:
            k = min(200_000, ASSOC_SAMPLES - done)
            a, b, c = rng.integers(0, n, size=(3, k))
            diff = mul[mul[a, b], c] != mul[a, mul[b, c]]
            if diff.any():
                j = np.flatnonzero(diff)[0]
                raise AssociativityError((a[j], b[j], c[j]))
            done += k
    return inv.astype(mul.dtype)


def _conjugacy(mul: np.ndarray, inv: np.ndarray):
    n = mul.shape[0]
    m = mul.astype(np.intp)
    # conj[g, a] = g a g^-1
    conj = m[m, inv.astype(np.intp)[:, None]]
    class_of = np.full(n, -1, dtype=np.int64)
    orbits = []
    for a in range(n):
        if class_of[a] >= 0:
            continue
        orbit = np.unique(conj[:, a])
        class_of[orbit] = len(orbits)
        orbits.append(tuple(int(x) for x in orbit))
    order = sorted(range(len(orbits)), key=lambda k: (len(orbits[k]), orbits[k][0]))
    classes = tuple(orbits[k] for k in order)
    relabel = np.empty(len(orbits), dtype=np.int64)
    relabel[order] = np.arange(len(orbits))
    class_of = relabel[class_of]
    inverse_class = np.array([class_of[inv[c[0]]] for c in classes], dtype=np.int64)
    return classes, class_of, inverse_class


def _assemble(mul: np.ndarray, name: str, cyclic_factors=None, validate: bool = True) -> FiniteGroup:
    mul = np.ascontiguousarray(mul, dtype=_index_dtype(mul.shape[0]))
    if validate:
        inv = _check_table(mul)
    else:
        inv = np.argmax(mul == 0, axis=1).astype(mul.dtype)
    classes, class_of, inverse_class = _conjugacy(mul, inv)
    for arr in (mul, inv, class_of, inverse_class):
        arr.setflags(write=False)
    return FiniteGroup(
        order=int(mul.shape[0]),
        mul=mul,
        inv=inv,
        classes=classes,
        class_of=class_of,
        inverse_class=inverse_class,
        name=name,
        cyclic_factors=cyclic_factors,
    )


def build_cyclic(n: int) -> FiniteGroup:
    """The cyclic group Z_n with ``mul[a, b] = (a + b) % n``."""
    if int(n) != n or n < 1:
        raise ValueError(f"cyclic group needs n >= 1, got {n!r}")
    n = int(n)
    idx = np.arange(n)
    mul = (idx[:, None] + idx[None, :]) % n
    return _assemble(mul, f"Z{n}", cyclic_factors=(n,))


def build_dihedral(n: int) -> FiniteGroup:
    """Dihedral group D_n of order 2n.

    Index ``k`` is the rotation ``r^k``; index ``n + k`` is ``s r^k``.
    """
    if int(n) != n or n < 3:
        raise ValueError(f"dihedral group needs n >= 3, got {n!r}")
    n = int(n)
    k = np.arange(2 * n)
    refl = k >= n
    rot = k % n
    a_refl, b_refl = refl[:, None], refl[None, :]
    a_rot, b_rot = rot[:, None], rot[None, :]
    # s^i r^a * s^j r^b = s^(i+j) r^((-1)^j a + b)
    exp = np.where(b_refl, -a_rot, a_rot) + b_rot
    mul = np.where(a_refl ^ b_refl, n, 0) + exp % n
    return _assemble(mul, f"D{n}")


def build_symmetric(n: int) -> FiniteGroup:
    """Symmetric group S_n, elements in lexicographic permutation order.

    The product is composition ``(a*b)(i) = a(b(i))``.
    """
    if int(n) != n or not 1 <= n <= MAX_SYMMETRIC_DEGREE:
        raise ValueError(f"symmetric group needs 1 <= n <= {MAX_SYMMETRIC_DEGREE}, got {n!r}")
    n = int(n)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
    size = perms.shape[0]
    weights = n ** np.arange(n - 1, -1, -1, dtype=np.int64)
    lookup = np.full(n**n, -1, dtype=np.int64)
    lookup[perms @ weights] = np.arange(size)
    mul = np.empty((size, size), dtype=_index_dtype(size))
    block = max(1, 2_000_000 // (size * n))
    for start in range(0, size, block):
        a = perms[start : start + block]
        composed = np.take_along_axis(
            np.broadcast_to(a[:, None, :], (a.shape[0], size, n)),
            np.broadcast_to(perms[None, :, :], (a.shape[0], size, n)),
            axis=2,
        )
        mul[start : start + block] = lookup[composed @ weights]
    return _assemble(mul, f"S{n}")


def build_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """Direct product; element ``(x, y)`` has index ``x * |H| + y``."""
    nh = h.order
    gm = g.mul.astype(np.int64)
    hm = h.mul.astype(np.int64)
    mul = (gm[:, None, :, None] * nh + hm[None, :, None, :]).reshape(g.order * nh, g.order * nh)
    factors = None
    if g.cyclic_factors is not None and h.cyclic_factors is not None:
        factors = tuple(f for f in g.cyclic_factors + h.cyclic_factors if f > 1) or (1,)
        # the trivial factor contributes nothing to the mixed-radix numbering
    return _assemble(mul, f"{g.name}x{h.name}", cyclic_factors=factors, validate=False)


def from_table(mul: Sequence[Sequence[int]], name: str = "G") -> FiniteGroup:
    """Validate an explicit Cayley table and build the group from it."""
    try:
        arr = np.asarray(mul)
    except ValueError as exc:  # ragged nested lists
        raise NonSquareTableError(f"table is not rectangular: {exc}") from None
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise NonSquareTableError(f"table must be a non-empty square, got shape {arr.shape}")
    if arr.dtype.kind not in "iu":
        if arr.dtype.kind == "f" and np.all(arr == np.round(arr)):
            arr = arr.astype(np.int64)
        else:
            raise EntryRangeError("table entries must be integers")
    n = arr.shape[0]
    if arr.min() < 0 or arr.max() >= n:
        raise EntryRangeError(f"table entries must lie in [0, {n - 1}]")
    return _assemble(arr, name)

