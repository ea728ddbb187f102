import random

import numpy as np
import pytest

from derham.bumps import make_tensor_bump


@pytest.fixture
def rng():
    return random.Random(20240814)


@pytest.fixture
def nprng():
    return np.random.default_rng(20240814)


@pytest.fixture
def bump2():
    """Centered k=1 tensor bump on [-1,1]^2 (the reference bump)."""
    return make_tensor_bump(2, [0, 0], 1, 1)


@pytest.fixture
def bump2_smooth():
    """C^3 bump with small support, used by the numeric operators."""
    from fractions import Fraction
    return make_tensor_bump(2, [0, 0], Fraction(1, 2), 4)
