"""Shared generators for the test suite.

Random sources are always seeded numpy generators; probabilities are drawn
as exact decimal fractions (6 digits, denominator 10**6) that sum exactly to
1, so the int64 kernel paths stay exact and every expected value can be
checked in rational arithmetic.
"""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("quantacode", deadline=None, max_examples=50)
settings.load_profile("quantacode")

DENOM = 10**6


def random_decimal_probs(rng: np.random.Generator, m: int, min_p: float = 0.0):
    """m exact decimal probabilities (denominator 1e6) summing exactly to 1."""
    floor = max(1, int(min_p * DENOM))
    while True:
        raw = rng.dirichlet(np.ones(m))
        scaled = np.floor(raw * DENOM).astype(np.int64)
        scaled[int(np.argmax(scaled))] += DENOM - int(scaled.sum())
        if scaled.min() >= floor:
            return [Fraction(int(v), DENOM) for v in scaled]


def strict_rounding_regime(probs, m: int) -> bool:
    """True when min-max rounding achieves delta_star < 1/t for every t >= m.

    Equivalent condition: at every t small enough that some t*p_i < 1, the
    forced unit frequencies are covered by the available round-ups.  Only
    t < 1/p_min can violate it, so the check is finite.
    """
    d = DENOM
    nums = [int(x * d) for x in probs]
    p_min = min(nums)
    t_limit = d // p_min + 1
    for t in range(m, t_limit + 1):
        floors = [t * v // d for v in nums]
        z = sum(1 for n in floors if n == 0)
        r = t - sum(floors)
        if z > r:
            return False
    return True


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
