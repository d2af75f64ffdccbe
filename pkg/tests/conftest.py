from __future__ import annotations

import numpy as np
import pytest

from symflow.measures import InvariantMeasure, MarkovComponent
from symflow.sft import Sft


@pytest.fixture(scope="session")
def full2() -> Sft:
    return Sft(np.ones((2, 2), dtype=int))


@pytest.fixture(scope="session")
def golden() -> Sft:
    return Sft([[1, 1], [1, 0]])


def bernoulli_measure(sft: Sft, p) -> InvariantMeasure:
    """Memory-1 i.i.d. measure with symbol distribution p (full shifts only)."""
    p = np.asarray(p, dtype=float)
    Q = np.tile(p, (len(p), 1))
    states = [(a,) for a in range(sft.k)]
    return InvariantMeasure.single(MarkovComponent(sft, 1, states, Q))


def binary_entropy(a: float) -> float:
    if a <= 0.0 or a >= 1.0:
        return 0.0
    return float(-a * np.log(a) - (1 - a) * np.log(1 - a))
