"""Numerical oracles: grid scans, the power-expansion identity, multiplier
orthogonality, and randomized certificate-vs-scan sweeps."""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .certify import Conclusion, certify
from .characters import CharacterTable, _multi_row, character_table
from .groups import FiniteGroup
from .semigroup import Decomposition, decompose, eval_expsum, validate_length

__all__ = [
    "ScanReport",
    "positivity_scan",
    "power_expansion_check",
    "sigma_orthogonality_check",
    "SweepTrial",
    "SweepSummary",
    "theorem_sweep",
    "CombinatorialSizeError",
    "random_class_lengths",
    "scan_grid",
]

VIOLATION_TOL = 1e-9
WITNESS_TOL = 1e-15
MAX_EXPANSION_TERMS = 10**6
SWEEP_SAMPLES = 5000  # per sub-grid; the union has ~10^4 points
SWEEP_LENGTH_MAX = 10.0


class CombinatorialSizeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ScanReport:
    grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)  # (n_irreps, len(grid))
    geometric: np.ndarray = field(repr=False)  # mask of points from the geometric sub-grid
    min_value: np.ndarray
    argmin_t: np.ndarray
    first_violation: Optional[tuple]

    @property
    def clean(self) -> bool:
        return self.first_violation is None

    def witness(self, r: int, tol: float = WITNESS_TOL) -> Optional[float]:
        """Smallest geometric-grid ``t`` where ``p_r(t) < -tol``, if any."""
        hit = np.flatnonzero(self.geometric & (self.values[r] < -tol))
        return float(self.grid[hit[0]]) if hit.size else None


def scan_grid(t_max: float, samples: int, max_rate: float):
    """Uniform grid on [0, t_max] merged with a geometric one starting at 1e-6/max_rate."""
    uniform = np.linspace(0.0, t_max, samples)
    start = 1e-6 / max_rate if max_rate > 0 else 1e-6
    start = min(start, t_max)
    geometric = np.geomspace(start, t_max, samples)
    grid, inverse = np.unique(np.concatenate([uniform, geometric]), return_inverse=True)
    mask = np.zeros(grid.size, dtype=bool)
    mask[inverse[samples:]] = True
    return grid, mask


def positivity_scan(d: Decomposition, t_max: float, samples: int) -> ScanReport:
    if samples < 2:
        raise ValueError("samples must be >= 2")
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    grid, mask = scan_grid(float(t_max), int(samples), d.max_rate)
    rates = np.asarray(d.p[0].rates)
    basis = np.exp(-np.multiply.outer(rates, grid))  # shared by every irrep
    coeffs = np.array([s.coeffs for s in d.p])
    values = coeffs @ basis
    argmin = values.argmin(axis=1)
    min_value = values[np.arange(values.shape[0]), argmin]

    first = None
    bad = values < -VIOLATION_TOL
    if bad.any():
        cols = bad.any(axis=0)
        j = int(np.flatnonzero(cols)[0])
        r = int(np.flatnonzero(bad[:, j])[0])
        first = (r, float(grid[j]), float(values[r, j]))
    return ScanReport(grid, values, mask, min_value, grid[argmin], first)


def power_expansion_check(d: Decomposition, t: float, n: int) -> float:
    """``max_b |sum_{a_1..a_n} prod_j p_{a_j}(t/n) * N(a_1..a_n; b) - p_b(t)|``.

    The n-ary multiplicities ``N`` come straight from character sums, not from
    contracting the binary fusion table.
    """
    if not 1 <= n <= 4:
        raise ValueError("n must be in [1, 4]")
    if not t > 0:
        raise ValueError("t must be positive")
    ct = d.table
    h = ct.n_irreps
    if h**n > MAX_EXPANSION_TERMS:
        raise CombinatorialSizeError(f"{h}^{n} terms exceeds {MAX_EXPANSION_TERMS}")
    small = np.array([eval_expsum(s, t / n) for s in d.p])
    total = np.zeros(h)
    for seq in itertools.product(range(h), repeat=n):
        weight = np.prod(small[list(seq)])
        total += weight * _multi_row(ct, seq)
    target = np.array([eval_expsum(s, t) for s in d.p])
    return float(np.abs(total - target).max())


def sigma_orthogonality_check(ct: CharacterTable) -> float:
    """Max deviation of ``Tr(sigma_r^* sigma_s)`` from ``|G| delta_rs``."""
    x = ct.element_values()
    gram = x.conj() @ x.T
    return float(np.abs(gram - ct.group.order * np.eye(x.shape[0])).max())


# ---------------------------------------------------------------------- sweep


@dataclass(frozen=True)
class SweepTrial:
    index: int
    class_lengths: tuple
    conclusion: Conclusion
    failed: tuple
    clean: bool
    min_value: tuple
    argmin_t: tuple
    p0_min: float
    missing_witness: tuple  # FAIL irreps with no negative value on the geometric grid


@dataclass(frozen=True)
class SweepSummary:
    group: str
    seed: int
    trials: tuple = field(repr=False)

    def counts(self) -> dict:
        out = {(c, s): 0 for c in (True, False) for s in (True, False)}
        for tr in self.trials:
            out[(tr.conclusion is Conclusion.CERTIFIED_POSITIVE, tr.clean)] += 1
        return out

    @property
    def certified_but_violating(self) -> int:
        return self.counts()[(True, False)]

    @property
    def missing_witnesses(self) -> int:
        return sum(1 for tr in self.trials if tr.missing_witness)

    def p0_floor_gap(self, order: int) -> float:
        """Smallest ``min_t p_0(t) - 1/|G|`` across trials."""
        return min(tr.p0_min - 1.0 / order for tr in self.trials)


def random_class_lengths(g: FiniteGroup, rng: np.random.Generator) -> np.ndarray:
    lengths = rng.uniform(0.0, SWEEP_LENGTH_MAX, size=g.n_classes)
    lengths[0] = 0.0
    ic = g.inverse_class
    for k in range(g.n_classes):
        if ic[k] < k:
            lengths[k] = lengths[ic[k]]
    return lengths


def _run_trial(ct: CharacterTable, seed: int, index: int, samples: int) -> SweepTrial:
    g = ct.group
    rng = np.random.default_rng([seed, index])
    lengths = random_class_lengths(g, rng)
    d = decompose(ct, validate_length(g, lengths, per="class"))
    report = certify(d)
    positive = lengths[lengths > 0]
    t_max = 50.0 / positive.min() if positive.size else 50.0
    scan = positivity_scan(d, t_max, samples)
    failed = tuple(report.failed)
    missing = tuple(r for r in failed if scan.witness(r) is None)
    return SweepTrial(
        index=index,
        class_lengths=tuple(float(x) for x in lengths),
        conclusion=report.conclusion,
        failed=failed,
        clean=scan.clean,
        min_value=tuple(float(x) for x in scan.min_value),
        argmin_t=tuple(float(x) for x in scan.argmin_t),
        p0_min=float(scan.min_value[0]),
        missing_witness=missing,
    )


def _workers(threads: Optional[int]) -> int:
    if threads is None:
        threads = int(os.environ.get("FUSPOS_THREADS", "1") or 1)
    if threads <= 0:
        return os.cpu_count() or 1
    return threads


def theorem_sweep(
    g: FiniteGroup,
    trials: int,
    seed: int,
    *,
    ct: Optional[CharacterTable] = None,
    samples: int = SWEEP_SAMPLES,
    threads: Optional[int] = None,
) -> SweepSummary:
    """Certify and scan ``trials`` random length functions on ``g``.

    Trial ``i`` draws from ``default_rng([seed, i])`` so results do not depend
    on scheduling.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ct = ct if ct is not None else character_table(g)
    workers = _workers(threads)
    if workers == 1:
        results = [_run_trial(ct, seed, i, samples) for i in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda i: _run_trial(ct, seed, i, samples), range(trials)))
    return SweepSummary(group=g.name, seed=seed, trials=tuple(results))

