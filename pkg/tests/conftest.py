"""Shared fixtures, hypothesis profile and strategies.

Random algebras come from :mod:`nilcurv.randgen`, driven by a seed drawn by
hypothesis so that failures shrink to a reproducible integer.
"""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from nilcurv import randgen as rg

settings.register_profile(
    "nilcurv",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("nilcurv")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def float_algebras(draw, min_dim: int = 3, max_dim: int = 7, negative=None):
    seed = draw(seeds)
    n = draw(st.integers(min_dim, max_dim))
    neg = draw(st.integers(0, 2)) if negative is None else negative
    rng = np.random.default_rng(seed)
    return rg.random_metric_lie_algebra(rng, n, neg)


@st.composite
def exact_algebras(draw, min_dim: int = 3, max_dim: int = 5, negative=None):
    seed = draw(seeds)
    n = draw(st.integers(min_dim, max_dim))
    neg = draw(st.integers(0, 1)) if negative is None else negative
    rng = np.random.default_rng(seed)
    return rg.random_metric_lie_algebra(rng, n, neg, exact=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# ---------------------------------------------------------------------------
# acceptance summary: criteria record a line here, printed at session end

ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
