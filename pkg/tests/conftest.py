"""Shared fixtures and the small oracle helpers used across test modules."""

import numpy as np
import pytest

from shrinker_ot import make_model
from shrinker_ot.quadrature import DiscreteMeasure


@pytest.fixture(scope="session")
def gaussian2():
    return make_model("gaussian", 2)


@pytest.fixture(scope="session")
def cyl31():
    return make_model("cylinder", 3, 1)


@pytest.fixture(scope="session")
def sphere3():
    return make_model("sphere", 3)


def random_discrete(rng, count, dim, scale=1.0):
    """Random tangent-space measure with positive weights summing to 1."""
    pts = scale * rng.standard_normal((count, dim))
    w = rng.uniform(0.2, 1.0, count)
    return DiscreteMeasure(pts, w / w.sum())


def linprog_transport(a, b, cost):
    """Reference LP solution of the transport problem via HiGHS.

    Independent of the in-package network simplex; only trustworthy at the
    small sizes and O(1) cost scales the tests feed it.
    """
    from scipy.optimize import linprog

    n, m = cost.shape
    a_eq = []
    for i in range(n):
        row = np.zeros((n, m))
        row[i, :] = 1.0
        a_eq.append(row.reshape(-1))
    for j in range(m):
        row = np.zeros((n, m))
        row[:, j] = 1.0
        a_eq.append(row.reshape(-1))
    rhs = np.concatenate([a, b])
    res = linprog(cost.reshape(-1), A_eq=np.array(a_eq), b_eq=rhs,
                  bounds=(0.0, None), method="highs")
    assert res.status == 0, res.message
    return float(res.fun)
