from __future__ import annotations

import random

import pytest

from byztrim.digraph import Digraph


def complete(n: int) -> Digraph:
    return Digraph(n, [(i, j) for i in range(n) for j in range(n) if i != j])


def random_digraph(n: int, p: float, rng: random.Random) -> Digraph:
    edges = [(i, j) for i in range(n) for j in range(n) if i != j and rng.random() < p]
    return Digraph(n, edges)


@pytest.fixture
def k4() -> Digraph:
    return complete(4)


@pytest.fixture
def k5() -> Digraph:
    return complete(5)


@pytest.fixture
def k6() -> Digraph:
    return complete(6)


@pytest.fixture
def cycle3() -> Digraph:
    return Digraph(3, [(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def chain3() -> Digraph:
    return Digraph(3, [(0, 1), (1, 2)])
