"""Shared session fixtures: the large q = 2 tables reused across suites."""

import time
from dataclasses import dataclass

import pytest

from ffcount.exactcount import (
    BiSeries,
    euler_product_allfactors,
    euler_product_squarefree,
    max_omega,
)


@dataclass(frozen=True)
class Q2Tables:
    squarefree: BiSeries
    allfactors: BiSeries
    build_seconds: float


@pytest.fixture(scope="session")
def q2_tables():
    t0 = time.monotonic()
    K = max_omega(2, 400)
    sq = euler_product_squarefree(2, 400, K)
    al = euler_product_allfactors(2, 400, K)
    return Q2Tables(sq, al, time.monotonic() - t0)
