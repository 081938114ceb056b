"""Exit criteria. Each test records one PASS/FAIL line, printed in the
terminal summary under "acceptance criteria"."""
import math
import time

import numpy as np
import pytest

from fuspos.certify import inequality_system
from fuspos.characters import character_table, fusion_coefficients, verify_orthogonality
from fuspos.cli import run
from fuspos.groups import build_cyclic, build_dihedral, build_product, build_symmetric
from fuspos.semigroup import decompose, validate_length
from fuspos.verify import power_expansion_check, sigma_orthogonality_check, theorem_sweep

from conftest import GOLDEN_DIR, small_groups


def test_1_z6_closed_forms(record_criterion):
    start = time.perf_counter()
    g = build_cyclic(6)
    ct = character_table(g)
    rng = np.random.default_rng(2024)
    expected = {1: (1, 1, -1, -1), 2: (1, -1, -1, 1), 3: (1, -2, 2, -1)}  # (1, a, b, c) numerators
    worst = 0.0
    for _ in range(20):
        a, b, c = rng.choice(np.linspace(0.05, 10, 4000), size=3, replace=False)
        d = decompose(ct, validate_length(g, [0, a, b, c, b, a]))
        for r, nums in expected.items():
            by_rate = dict(zip(d.p[r].rates, d.p[r].coeffs))
            got = (by_rate[0.0], by_rate[a], by_rate[b], by_rate[c])
            worst = max(worst, max(abs(x - n / 6) for x, n in zip(got, nums)))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-12 and elapsed < 1.0
    record_criterion("1 Z6 closed forms", ok, f"max coeff error {worst:.2e}, {elapsed:.3f}s")
    assert ok


def test_2_inequality_system_golden(record_criterion, tmp_path, capsys):
    out = tmp_path / "ineq.json"
    code = run(["ineq", "--group", '{"kind":"cyclic","n":6}', "-o", str(out)])
    sys_ = inequality_system(character_table(build_cyclic(6)))
    rows = [dict(r.coeffs) for r in sys_.rows]
    ok = (
        code == 0
        and out.read_bytes() == (GOLDEN_DIR / "ineq_z6.json").read_bytes()
        and rows == [{"a": 1, "b": -1, "c": -1}, {"a": -1, "b": -1, "c": 1}, {"a": -2, "b": 2, "c": -1}]
        and [r.irreps for r in sys_.rows] == [(1, 5), (2, 4), (3,)]
    )
    record_criterion("2 Z6 inequality system (golden)", ok, f"{len(rows)} rows, duplicates {[r.irreps for r in sys_.rows]}")
    assert ok


def _sweep(groups, trials):
    results = {}
    for g in groups:
        results[g.name] = theorem_sweep(g, trials, seed=20240601)
    return results


@pytest.fixture(scope="module")
def abelian_sweeps():
    start = time.perf_counter()
    res = _sweep([build_cyclic(n) for n in range(2, 13)], 1000)
    return res, time.perf_counter() - start


@pytest.fixture(scope="module")
def nonabelian_sweeps():
    groups = [
        build_symmetric(3),
        build_symmetric(4),
        build_dihedral(4),
        build_dihedral(5),
        build_product(build_cyclic(2), build_symmetric(3)),
    ]
    start = time.perf_counter()
    res = _sweep(groups, 200)
    return res, time.perf_counter() - start


def test_3_soundness_sweep_cyclic(abelian_sweeps, record_criterion):
    res, elapsed = abelian_sweeps
    bad = sum(r.certified_but_violating for r in res.values())
    certified = sum(r.counts()[(True, True)] + r.counts()[(True, False)] for r in res.values())
    total = sum(len(r.trials) for r in res.values())
    ok = bad == 0 and elapsed < 60 and total == 11 * 1000
    record_criterion(
        "3 abelian soundness sweep Z2..Z12",
        ok,
        f"{total} trials, {certified} certified, {bad} certified-but-violating, {elapsed:.1f}s",
    )
    assert ok


def test_4_soundness_sweep_nonabelian(nonabelian_sweeps, record_criterion):
    res, elapsed = nonabelian_sweeps
    bad = sum(r.certified_but_violating for r in res.values())
    certified = sum(r.counts()[(True, True)] + r.counts()[(True, False)] for r in res.values())
    total = sum(len(r.trials) for r in res.values())
    ok = bad == 0 and elapsed < 120 and total == 5 * 200
    record_criterion(
        "4 nonabelian soundness sweep S3,S4,D4,D5,Z2xS3",
        ok,
        f"{total} trials, {certified} certified, {bad} certified-but-violating, {elapsed:.1f}s",
    )
    assert ok


def test_5_fail_witnesses(abelian_sweeps, nonabelian_sweeps, record_criterion):
    missing = 0
    fails = 0
    p0_gap = math.inf
    for res, _ in (abelian_sweeps, nonabelian_sweeps):
        for name, summary in res.items():
            fails += sum(len(tr.failed) for tr in summary.trials)
            missing += sum(len(tr.missing_witness) for tr in summary.trials)
            order = next(g.order for g in _sweep_groups() if g.name == name)
            p0_gap = min(p0_gap, summary.p0_floor_gap(order))
    ok = missing == 0 and fails > 0 and p0_gap >= -1e-9
    record_criterion(
        "5 FAIL witnesses",
        ok,
        f"{fails} failing irreps, {missing} without a value < -1e-15; min p0 - 1/|G| = {p0_gap:.2e}",
    )
    assert ok


def _sweep_groups():
    return [build_cyclic(n) for n in range(2, 13)] + [
        build_symmetric(3),
        build_symmetric(4),
        build_dihedral(4),
        build_dihedral(5),
        build_product(build_cyclic(2), build_symmetric(3)),
    ]


def test_6_power_expansion(record_criterion):
    worst = 0.0
    rng = np.random.default_rng(6)
    for g in (build_cyclic(2), build_cyclic(6), build_symmetric(3), build_dihedral(4)):
        ct = character_table(g)
        x = rng.uniform(0, 10, size=g.n_classes)
        x[0] = 0
        x = x[np.minimum(np.arange(g.n_classes), g.inverse_class)]
        d = decompose(ct, validate_length(g, x, per="class"))
        for n in (1, 2, 3):
            for t in (0.5, 1.0, 5.0):
                worst = max(worst, power_expansion_check(d, t, n))
    ok = worst < 1e-9
    record_criterion("6 power-expansion identity", ok, f"max residual {worst:.2e}")
    assert ok


def test_7_character_table_quality(tables, record_criterion):
    worst_orth = 0.0
    ok = True
    for g in small_groups():
        ct = tables[g.name]
        rep = verify_orthogonality(ct)
        worst_orth = max(worst_orth, rep.max)
        n = fusion_coefficients(ct).n  # raises if any entry is off-integer or negative
        d = ct.dims
        ok &= int((d**2).sum()) == g.order
        ok &= bool((n >= 0).all()) and bool((n @ d == np.outer(d, d)).all())
    assert max(g.order for g in small_groups()) == 120
    ok &= worst_orth < 1e-9
    record_criterion(
        "7 character-table quality",
        ok,
        f"{len(small_groups())} groups up to order 120, max orthogonality residual {worst_orth:.2e}",
    )
    assert ok


def test_8_multiplier_orthogonality(record_criterion):
    z6 = sigma_orthogonality_check(character_table(build_cyclic(6)))
    s4 = sigma_orthogonality_check(character_table(build_symmetric(4)))
    ok = z6 < 1e-12 and s4 < 1e-9
    record_criterion("8 multiplier orthogonality", ok, f"Z6 {z6:.2e}, S4 {s4:.2e}")
    assert ok


def test_9_initial_values(tables, record_criterion):
    worst = 0.0
    rng = np.random.default_rng(9)
    for g in small_groups():
        ct = tables[g.name]
        for _ in range(5):
            x = rng.uniform(0, 10, size=g.n_classes)
            x[0] = 0
            x = x[np.minimum(np.arange(g.n_classes), g.inverse_class)]
            vals = decompose(ct, validate_length(g, x, per="class")).values(0.0)
            delta = np.zeros(ct.n_irreps)
            delta[0] = 1
            worst = max(worst, float(np.abs(vals - delta).max()))
    ok = worst < 1e-12
    record_criterion("9 p_r(0) = delta_r0", ok, f"max deviation {worst:.2e}")
    assert ok
