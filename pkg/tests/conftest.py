from functools import lru_cache
from pathlib import Path

import pytest

from fuspos import (
    build_cyclic,
    build_dihedral,
    build_product,
    build_symmetric,
    character_table,
)

_CRITERIA = []
GOLDEN_DIR = Path(__file__).parent / "golden"


@lru_cache(maxsize=None)
def _small_groups():
    gs = [build_cyclic(n) for n in range(1, 13)]
    gs += [build_dihedral(n) for n in range(3, 8)]
    gs += [build_symmetric(n) for n in range(1, 6)]
    gs += [
        build_product(build_cyclic(2), build_cyclic(3)),
        build_product(build_cyclic(2), build_symmetric(3)),
        build_product(build_cyclic(3), build_cyclic(3)),
        build_product(build_symmetric(3), build_symmetric(3)),
    ]
    return tuple(gs)


def small_groups():
    """Every built-in group family up to order 120 (shared instances)."""
    return list(_small_groups())


@pytest.fixture(scope="session")
def tables():
    """Character tables keyed by group name, built once per session."""
    return {g.name: character_table(g) for g in small_groups()}


@pytest.fixture
def record_criterion():
    def record(label, ok, detail=""):
        _CRITERIA.append((label, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")
