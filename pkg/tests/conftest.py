"""Shared fixtures.

The large ingested datasets are produced by our own scanner, written in the
one-ordinate-per-line text format at 9 decimals and read back through the
ingest path, so they exercise exactly what a downloaded table would.  The
file is cached under tests/.cache between runs.
"""
import os
from pathlib import Path

import numpy as np
import pytest

from zpc import zero_engine, zero_store

CACHE = Path(__file__).parent / ".cache"
# N(74930) = 100013, enough for the 100k-zero checks
LARGE_T = 74930.0


def _threads():
    return max(1, min(8, os.cpu_count() or 1))


@pytest.fixture(scope="session")
def computed_100():
    return zero_engine.scan_zeros(zero_engine.ScanConfig(10.0, 100.0))


@pytest.fixture(scope="session")
def computed_1000():
    return zero_engine.scan_zeros(zero_engine.ScanConfig(10.0, 1000.0))


@pytest.fixture(scope="session")
def odlyzko_file():
    CACHE.mkdir(exist_ok=True)
    path = CACHE / "zeros_100k.txt"
    if not path.exists():
        zs = zero_engine.scan_zeros(zero_engine.ScanConfig(10.0, LARGE_T, threads=_threads()))
        assert zs.certificate.certified
        tmp = path.with_suffix(".tmp")
        zero_store.write_odlyzko(zs, tmp)
        tmp.replace(path)
    return path


@pytest.fixture(scope="session")
def ingested(odlyzko_file):
    return zero_store.ingest_odlyzko(odlyzko_file)


@pytest.fixture(scope="session")
def ingested_20k(ingested):
    return ingested.truncate(20_000)


def synthetic(*seeds):
    return zero_store.build_synthetic(zero_store.SyntheticSpec(tuple(seeds)))


def random_synthetic(rng, shared: bool, max_records: int = 50):
    """A symmetry-completed set of at most ``max_records`` records, m <= 3.

    With ``shared`` at least two seeds sit on one ordinate, often with
    several off-line pairs on that line.
    """
    n_ord = int(rng.integers(1, 12))
    ordinates = np.round(rng.uniform(14, 500, n_ord), 3)
    seeds = []
    budget = max_records
    for k, g in enumerate(ordinates):
        per_line = int(rng.integers(2 if (shared and k == 0) else 1, 4))
        betas = rng.choice(np.arange(0.05, 0.51, 0.05).round(2), size=per_line, replace=False)
        for b in betas:
            need = 1 if b == 0.5 else 2
            if need > budget:
                break
            budget -= need
            seeds.append((float(b), float(g), int(rng.integers(1, 4))))
    return synthetic(*seeds)


# criterion number -> (passed, summary); filled by test_acceptance
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d}. {text}")
