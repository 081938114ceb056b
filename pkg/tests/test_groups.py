import itertools

import numpy as np
import pytest

from fuspos.groups import (
    AssociativityError,
    EntryRangeError,
    MissingIdentityError,
    NonInvertibleError,
    NonSquareTableError,
    build_cyclic,
    build_dihedral,
    build_product,
    build_symmetric,
    from_table,
)

from conftest import small_groups


# -- independent oracle: groups as explicit permutations, classes as Python sets


def _compose(p, q):
    return tuple(p[i] for i in q)


def _inverse(p):
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def _closure(gens):
    n = len(gens[0])
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = _compose(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def _class_sizes(elements):
    elements = list(elements)
    remaining = set(elements)
    sizes = []
    while remaining:
        a = next(iter(remaining))
        orbit = {_compose(_compose(g, a), _inverse(g)) for g in elements}
        remaining -= orbit
        sizes.append(len(orbit))
    return sorted(sizes)


def _dihedral_perms(n):
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return _closure([rot, ref])


@pytest.mark.parametrize(
    "group, elements",
    [
        (build_dihedral(3), _dihedral_perms(3)),
        (build_dihedral(4), _dihedral_perms(4)),
        (build_dihedral(5), _dihedral_perms(5)),
        (build_symmetric(3), set(itertools.permutations(range(3)))),
        (build_symmetric(4), set(itertools.permutations(range(4)))),
    ],
    ids=["D3", "D4", "D5", "S3", "S4"],
)
def test_class_sizes_match_permutation_oracle(group, elements):
    assert group.order == len(elements)
    assert sorted(group.class_sizes.tolist()) == _class_sizes(elements)


def test_frozen_class_counts():
    # values produced by the oracle above
    assert build_dihedral(3).class_sizes.tolist() == [1, 2, 3]
    assert build_dihedral(4).n_classes == 5
    assert build_dihedral(5).n_classes == 4
    assert sorted(build_symmetric(3).class_sizes.tolist()) == [1, 2, 3]
    assert build_symmetric(4).n_classes == 5
    z2s3 = build_product(build_cyclic(2), build_symmetric(3))
    assert (z2s3.order, z2s3.n_classes) == (12, 6)


def test_product_oracle():
    s3 = set(itertools.permutations(range(3)))
    # Z2 acting on two extra points, S3 on the first three
    elements = {p + q for p in s3 for q in [(3, 4), (4, 3)]}
    assert _class_sizes(elements) == sorted(
        build_product(build_cyclic(2), build_symmetric(3)).class_sizes.tolist()
    )


def test_cyclic_examples():
    z6 = build_cyclic(6)
    assert z6.order == 6 and z6.n_classes == 6
    assert z6.inv[1] == 5
    z1 = build_cyclic(1)
    assert z1.order == 1 and z1.n_classes == 1
    z4 = build_cyclic(4)
    assert z4.inverse_class.tolist() == [0, 3, 2, 1]


@pytest.mark.parametrize("bad", [0, -3])
def test_cyclic_rejects(bad):
    with pytest.raises(ValueError):
        build_cyclic(bad)


@pytest.mark.parametrize("builder, bad", [(build_dihedral, 2), (build_symmetric, 0), (build_symmetric, 8)])
def test_builders_reject_out_of_range(builder, bad):
    with pytest.raises(ValueError):
        builder(bad)


def test_symmetric_lexicographic_numbering():
    s3 = build_symmetric(3)
    perms = list(itertools.permutations(range(3)))
    for a, b in itertools.product(range(6), repeat=2):
        assert perms[s3.mul[a, b]] == _compose(perms[a], perms[b])
    assert build_symmetric(1).order == 1


def test_product_with_trivial():
    g = build_symmetric(3)
    p = build_product(build_cyclic(1), g)
    assert p.order == g.order
    assert p.class_sizes.tolist() == g.class_sizes.tolist()


def test_z2_z3_is_like_z6():
    p = build_product(build_cyclic(2), build_cyclic(3))
    assert p.order == 6 and p.n_classes == 6 and p.is_abelian


@pytest.mark.parametrize("g", small_groups(), ids=lambda g: g.name)
def test_group_invariants(g):
    n = g.order
    idx = np.arange(n)
    m = g.mul.astype(np.intp)
    assert (m[0] == idx).all() and (m[:, 0] == idx).all()
    assert (m[m, :] == m[idx[:, None, None], m[None]]).all()  # associativity, exhaustive
    assert (m[idx, g.inv] == 0).all()
    conj = m[m, g.inv.astype(np.intp)[:, None]]
    assert (g.class_of[conj] == g.class_of[None, :]).all()
    ic = g.inverse_class
    assert (ic[ic] == np.arange(g.n_classes)).all()
    assert g.classes[0] == (0,)
    sizes = g.class_sizes
    assert sizes.sum() == n
    assert all(n % s == 0 for s in sizes)
    keys = [(len(c), c[0]) for c in g.classes]
    assert keys == sorted(keys)


@pytest.mark.parametrize("g", small_groups(), ids=lambda g: g.name)
def test_from_table_round_trip(g):
    h = from_table(g.mul.tolist())
    assert h.classes == g.classes
    assert (h.inv == g.inv).all()


def test_from_table_z6_equals_builder():
    z6 = build_cyclic(6)
    h = from_table([[(a + b) % 6 for b in range(6)] for a in range(6)])
    assert (h.mul == z6.mul).all() and h.classes == z6.classes


def test_from_table_s3_classes():
    assert from_table(build_symmetric(3).mul.tolist()).n_classes == 3


def test_from_table_errors():
    with pytest.raises(NonSquareTableError):
        from_table([[0, 1], [1, 0], [0, 1]])
    with pytest.raises(NonSquareTableError):
        from_table([[0, 1], [1]])
    with pytest.raises(EntryRangeError):
        from_table([[0, 1], [1, 2]])
    with pytest.raises(MissingIdentityError):
        from_table([[1, 0], [0, 1]])


def test_idempotent_non_identity_rejected():
    t = [[(a + b) % 6 for b in range(6)] for a in range(6)]
    t[1][1] = 1
    with pytest.raises((NonInvertibleError, AssociativityError)):
        from_table(t)


def test_associativity_witness():
    # identity row/col and every element self-inverse, but not associative:
    # a 5-element loop that is not a group
    t = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(AssociativityError) as info:
        from_table(t)
    a, b, c = info.value.witness
    assert t[t[a][b]][c] != t[a][t[b][c]]


def test_non_invertible():
    t = [[0, 1, 2], [1, 1, 1], [2, 2, 2]]
    with pytest.raises(NonInvertibleError):
        from_table(t)


def test_large_group_sampled_check():
    s6 = build_symmetric(6)
    assert s6.order == 720 and s6.n_classes == 11
    t = s6.mul.astype(np.int64)
    # swap two entries in one row: identity row/column stay intact
    a, b, c = 3, 5, 7
    assert 0 not in (t[a, b], t[a, c])
    t[a, [b, c]] = t[a, [c, b]]
    with pytest.raises((AssociativityError, NonInvertibleError)):
        from_table(t)


def test_groups_are_immutable():
    g = build_cyclic(4)
    with pytest.raises(ValueError):
        g.mul[0, 0] = 1
