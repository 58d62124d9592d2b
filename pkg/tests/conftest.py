"""Shared fixtures: the qubit instance used throughout (plus state, Z then X)."""

import numpy as np
import pytest

from qud.qstate import (
    fourier_basis,
    make_density,
    outcome_dist,
    overlap_matrix,
    sequential_dist,
    standard_basis,
)

RT2 = 1.0 / np.sqrt(2.0)


@pytest.fixture(scope="session")
def plus_state():
    return make_density(np.full((2, 2), 0.5))


@pytest.fixture(scope="session")
def zero_state():
    return make_density(np.diag([1.0, 0.0]))


@pytest.fixture(scope="session")
def z_basis():
    return standard_basis(2)


@pytest.fixture(scope="session")
def x_basis():
    return fourier_basis(2)


@pytest.fixture(scope="session")
def f1(plus_state, z_basis, x_basis):
    """(rho, A, B) with p = (1/2, 1/2), q = (1, 0), q' = (1/2, 1/2)."""
    return plus_state, z_basis, x_basis


def triple_of(rho, a, b):
    """(p, q, qp, c) statistics for a measured instance."""
    p = outcome_dist(rho, a)
    q = outcome_dist(rho, b)
    c = overlap_matrix(a, b)
    qp = sequential_dist(p, c)
    return p, q, qp, c
