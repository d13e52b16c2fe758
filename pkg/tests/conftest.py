import random
from fractions import Fraction

import pytest

from toda_bn import PhasePoint


@pytest.fixture
def rng():
    return random.Random(20260810)


@pytest.fixture
def worked_point():
    """The fully worked n = 2 point used throughout the checks."""
    return PhasePoint(2, (Fraction(2), Fraction(3)), (Fraction(1, 2), Fraction(1, 5)))
