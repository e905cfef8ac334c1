import numpy as np
import pytest

from graphvar import bernoulli_from_states, trinomial_from_states
from graphvar.spectral import (
    FAMILY_BERNOULLI,
    FAMILY_TRINOMIAL,
    eigenvalues_symmetric,
    jacobi_eigenvalues,
    simplex_position,
)

from conftest import (
    EXAMPLE1_B1_WEIGHTS,
    EXAMPLE1_B2_WEIGHTS,
    EXAMPLE1_SIGMA3,
    EXAMPLE1_STATES,
)


class TestJacobi:
    def test_example_matrices(self):
        s1 = eigenvalues_symmetric(
            bernoulli_from_states(EXAMPLE1_STATES, weights=EXAMPLE1_B1_WEIGHTS).sigma)
        assert s1.eigenvalues == pytest.approx([0.28, 0.20], abs=1e-4)
        s2 = eigenvalues_symmetric(
            bernoulli_from_states(EXAMPLE1_STATES, weights=EXAMPLE1_B2_WEIGHTS).sigma)
        assert s2.eigenvalues == pytest.approx([0.2121, 0.095], abs=1e-4)
        s3 = eigenvalues_symmetric(EXAMPLE1_SIGMA3)
        assert s3.eigenvalues == pytest.approx([0.3069, 0.0003], abs=1e-4)

    def test_near_singular_detection(self):
        s3 = eigenvalues_symmetric(EXAMPLE1_SIGMA3)
        assert s3.eigenvalues[-1] <= 0.0005

    def test_identity_scaled(self):
        s = eigenvalues_symmetric(0.25 * np.eye(8), family=FAMILY_BERNOULLI)
        assert np.all(s.eigenvalues == 0.25)

    def test_against_numpy_oracle(self):
        rng = np.random.default_rng(7)
        for k in (1, 2, 3, 5, 10, 25, 40):
            base = rng.standard_normal((k, k))
            sigma = base @ base.T / k
            ours = np.sort(jacobi_eigenvalues(sigma))
            ref = np.linalg.eigvalsh(sigma)
            assert np.allclose(ours, ref, atol=1e-10)

    def test_trace_equals_eigenvalue_sum(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            base = rng.standard_normal((12, 12))
            sigma = base @ base.T
            s = eigenvalues_symmetric(sigma)
            assert abs(s.eigenvalues.sum() - np.trace(sigma)) <= 1e-10 * max(1.0, abs(np.trace(sigma)))

    def test_descending_with_stable_ties(self):
        s = eigenvalues_symmetric(np.diag([0.2, 0.2, 0.1]))
        assert s.eigenvalues.tolist() == [0.2, 0.2, 0.1]

    def test_rejects_non_symmetric(self):
        with pytest.raises(ValueError):
            eigenvalues_symmetric(np.array([[1.0, 0.5], [0.2, 1.0]]))

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            eigenvalues_symmetric(np.zeros((2, 3)))

    def test_rejects_clearly_indefinite(self):
        with pytest.raises(ValueError):
            eigenvalues_symmetric(np.diag([-0.001, 0.1]))

    def test_scalar_case(self):
        s = eigenvalues_symmetric(np.array([[0.17]]))
        assert s.eigenvalues.tolist() == [0.17]

    def test_empty_matrix(self):
        s = eigenvalues_symmetric(np.zeros((0, 0)))
        assert s.k == 0 and s.trace == 0.0

    def test_clustered_spectrum_at_larger_size(self):
        # repeated and near-repeated eigenvalues, k = 100
        rng = np.random.default_rng(19)
        eigs = np.concatenate([
            np.full(40, 0.25), np.full(30, 0.25 - 1e-9),
            rng.random(30) * 0.2,
        ])
        q, _ = np.linalg.qr(rng.standard_normal((100, 100)))
        sigma = (q * eigs) @ q.T
        ours = np.sort(jacobi_eigenvalues(sigma))
        assert np.allclose(ours, np.sort(eigs), atol=1e-10)


class TestFamilyBounds:
    def test_bernoulli_eigenvalue_bound_suite(self):
        rng = np.random.default_rng(17)
        k = 6
        for _ in range(1000):
            states = rng.integers(0, 2, size=(rng.integers(2, 30), k)).astype(np.int8)
            s = eigenvalues_symmetric(
                bernoulli_from_states(states).sigma, family=FAMILY_BERNOULLI)
            lam = s.eigenvalues
            assert -1e-9 <= lam.sum() <= k / 4 + 1e-9
            assert lam.max() <= k / 4 + 1e-9

    def test_trinomial_eigenvalue_bound_suite(self):
        rng = np.random.default_rng(18)
        k = 6
        for _ in range(1000):
            states = rng.integers(-1, 2, size=(rng.integers(2, 30), k)).astype(np.int8)
            s = eigenvalues_symmetric(
                trinomial_from_states(states).sigma, family=FAMILY_TRINOMIAL)
            lam = s.eigenvalues
            assert -1e-9 <= lam.sum() <= k + 1e-9
            assert lam.max() <= k + 1e-9

    def test_family_bound_property(self):
        s = eigenvalues_symmetric(0.25 * np.eye(4), family=FAMILY_BERNOULLI)
        assert s.family_bound == 1.0
        t = eigenvalues_symmetric(np.eye(4), family=FAMILY_TRINOMIAL)
        assert t.family_bound == 4.0

    def test_violating_bernoulli_bound_rejected(self):
        with pytest.raises(ValueError):
            eigenvalues_symmetric(np.eye(2), family=FAMILY_BERNOULLI)


class TestSimplexPosition:
    def test_origin(self):
        s = eigenvalues_symmetric(np.zeros((4, 4)), family=FAMILY_BERNOULLI)
        pos = simplex_position(s)
        assert pos.coordinate == 0.0
        assert pos.distance_to_origin == 0.0
        assert pos.distance_to_maxent == pytest.approx(np.sqrt(4) / 4, abs=1e-15)

    def test_maxent_point(self):
        s = eigenvalues_symmetric(0.25 * np.eye(5), family=FAMILY_BERNOULLI)
        pos = simplex_position(s)
        assert pos.distance_to_maxent == 0.0
        assert pos.coordinate == pytest.approx(1.25)

    def test_example_ordering(self):
        distances = []
        for weights in (EXAMPLE1_B1_WEIGHTS, EXAMPLE1_B2_WEIGHTS):
            sigma = bernoulli_from_states(EXAMPLE1_STATES, weights=weights).sigma
            s = eigenvalues_symmetric(sigma, family=FAMILY_BERNOULLI)
            distances.append(simplex_position(s).distance_to_maxent)
        s3 = eigenvalues_symmetric(EXAMPLE1_SIGMA3)
        distances.append(simplex_position(s3, family=FAMILY_BERNOULLI).distance_to_maxent)
        assert distances[0] < distances[1] < distances[2]

    def test_trinomial_requires_reference_variance(self):
        s = eigenvalues_symmetric(0.5 * np.eye(3), family=FAMILY_TRINOMIAL)
        with pytest.raises(ValueError):
            simplex_position(s)
        pos = simplex_position(s, maxent_variance=0.6)
        assert pos.distance_to_maxent == pytest.approx(np.sqrt(3 * 0.01), abs=1e-12)

    def test_family_required(self):
        s = eigenvalues_symmetric(np.zeros((2, 2)))
        with pytest.raises(ValueError):
            simplex_position(s)
