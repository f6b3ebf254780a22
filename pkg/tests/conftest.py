from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from arat_homotopy.game_model import AratGame

FIXTURES = Path(__file__).parent / "fixtures"


def make_example1() -> AratGame:
    """Two states, two actions each, beta = 1/2, half/half transition split."""
    return AratGame(
        beta=0.5,
        r1=([4.0, 3.0], [5.0, 4.0]),
        r2=([3.0, 6.0], [6.0, 2.0]),
        p1=(
            [[0.5, 0.0], [0.5, 0.0]],
            [[0.0, 0.5], [0.0, 0.5]],
        ),
        p2=(
            [[0.5, 0.0], [0.0, 0.5]],
            [[0.0, 0.5], [0.5, 0.0]],
        ),
    )


def make_example2() -> AratGame:
    """Same rewards as example 1, quarter/three-quarter split in state 1."""
    return AratGame(
        beta=0.5,
        r1=([4.0, 3.0], [5.0, 4.0]),
        r2=([3.0, 6.0], [6.0, 2.0]),
        p1=(
            [[0.25, 0.0], [0.25, 0.0]],
            [[0.0, 0.5], [0.0, 0.5]],
        ),
        p2=(
            [[0.75, 0.0], [0.0, 0.75]],
            [[0.0, 0.5], [0.5, 0.0]],
        ),
    )


def random_arat_game(rng: np.random.Generator, *, d_max: int = 2,
                     actions_max: int = 2, betas=(0.3, 0.5, 0.9)) -> AratGame:
    """Random valid additive game with strictly positive rewards.

    Each state draws a mass split c in [0, 1]; player-I rows are random
    distributions scaled by c, player-II rows by 1 - c, so composed rows
    sum to one and per-player row sums are constant within a state.
    """
    d = int(rng.integers(1, d_max + 1))
    beta = float(rng.choice(betas))
    r1, r2, p1, p2 = [], [], [], []
    for _ in range(d):
        n1 = int(rng.integers(1, actions_max + 1))
        n2 = int(rng.integers(1, actions_max + 1))
        c = float(rng.uniform(0.0, 1.0))
        rows1 = rng.dirichlet(np.ones(d), size=n1) * c
        rows2 = rng.dirichlet(np.ones(d), size=n2) * (1.0 - c)
        r1.append(rng.uniform(0.5, 6.0, size=n1))
        r2.append(rng.uniform(0.5, 6.0, size=n2))
        p1.append(rows1)
        p2.append(rows2)
    return AratGame(beta=beta, r1=tuple(r1), r2=tuple(r2),
                    p1=tuple(p1), p2=tuple(p2))


@pytest.fixture
def example1() -> AratGame:
    return make_example1()


@pytest.fixture
def example2() -> AratGame:
    return make_example2()
