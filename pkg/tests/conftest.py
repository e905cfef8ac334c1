import numpy as np
import pytest

from graphvar import census


@pytest.fixture(scope="session")
def census3():
    return census.census_dags(3)


@pytest.fixture(scope="session")
def census4():
    return census.census_dags(4)


@pytest.fixture(scope="session")
def census5():
    return census.census_dags(5)


@pytest.fixture(scope="session")
def census6():
    return census.census_dags(6)


def robinson_dag_count(n):
    """Labeled DAG count by the alternating recurrence; counting oracle only.

    a(n) = sum_{i=1..n} (-1)^(i+1) C(n, i) 2^(i (n-i)) a(n-i), a(0) = 1.
    """
    import math
    a = [1]
    for m in range(1, n + 1):
        total = 0
        for i in range(1, m + 1):
            total += (-1) ** (i + 1) * math.comb(m, i) * 2 ** (i * (m - i)) * a[m - i]
        a.append(total)
    return a[n]


# Example 1 of the two-edge walkthrough: cell probabilities over the edge
# sets {}, {e2}, {e1}, {e1, e2} and the covariance matrices they induce.
EXAMPLE1_STATES = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=np.int8)
EXAMPLE1_B1_WEIGHTS = np.array([0.2, 0.2, 0.2, 0.4])
EXAMPLE1_B2_WEIGHTS = np.array([0.0, 0.12, 0.28, 0.6])
EXAMPLE1_SIGMA1 = np.array([[0.24, 0.04], [0.04, 0.24]])
EXAMPLE1_SIGMA2 = np.array([[0.1056, -0.0336], [-0.0336, 0.2016]])
# Stated directly as a covariance matrix; no bivariate Bernoulli attains it
# (the implied cell p01 would be negative), so it is used as a literal input.
EXAMPLE1_SIGMA3 = np.array([[0.1056, 0.1456], [0.1456, 0.2016]])
