import numpy as np
import pytest
import scipy.linalg as sla

from ilse import (
    GenParams,
    GenerationError,
    SignatureMatrix,
    check_well_posedness,
    gen_conditioned_matrix,
    gen_geometric_diagonal,
    gen_ilse_instance,
    gen_perturbation,
    gen_random_orthogonal,
    gen_sigma_orthogonal,
)


def signature_residual(Q, p, q):
    S = np.diag(SignatureMatrix(p, q).diagonal())
    return np.max(np.abs(Q.T @ S @ Q - S))


class TestSigmaOrthogonal:
    def test_hyperbolic_identity_2x2(self):
        t = 0.73
        H = np.array([[np.cosh(t), np.sinh(t)], [np.sinh(t), np.cosh(t)]])
        S = np.diag([1.0, -1.0])
        assert np.max(np.abs(H.T @ S @ H - S)) <= 1e-15

    def test_orthogonal_when_no_rotations(self):
        Q = gen_sigma_orthogonal(3, 2, seed=1, hyper_bound=0.0)
        assert np.max(np.abs(Q.T @ Q - np.eye(5))) <= 1e-13 * 5
        assert signature_residual(Q, 3, 2) <= 1e-13 * 5

    def test_paper_scale_residual(self):
        Q = gen_sigma_orthogonal(60, 40, seed=7, hyper_bound=1.0)
        assert signature_residual(Q, 60, 40) <= 1e-12 * 100

    def test_residual_across_seeds_and_bounds(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            p = int(rng.integers(1, 15))
            q = int(rng.integers(1, 15))
            hb = float(rng.uniform(0, 2))
            Q = gen_sigma_orthogonal(p, q, seed=int(rng.integers(0, 2**32)), hyper_bound=hb)
            assert signature_residual(Q, p, q) <= 1e-12 * (p + q)

    def test_definite_cases(self):
        Q = gen_sigma_orthogonal(4, 0, seed=3)
        assert np.max(np.abs(Q.T @ Q - np.eye(4))) <= 1e-13 * 4
        Q = gen_sigma_orthogonal(0, 3, seed=3)
        assert np.max(np.abs(Q.T @ Q - np.eye(3))) <= 1e-13 * 3

    def test_deterministic(self):
        a = gen_sigma_orthogonal(6, 4, seed=11, hyper_bound=0.8)
        b = gen_sigma_orthogonal(6, 4, seed=11, hyper_bound=0.8)
        assert np.array_equal(a, b)


class TestRandomOrthogonal:
    def test_one_dimensional(self):
        Q = gen_random_orthogonal(1, seed=0)
        assert Q.shape == (1, 1)
        assert abs(abs(Q[0, 0]) - 1.0) == 0.0

    def test_orthonormal_columns(self):
        for n in (2, 5, 17, 50):
            Q = gen_random_orthogonal(n, seed=n)
            assert np.max(np.abs(Q.T @ Q - np.eye(n))) <= 1e-13 * n

    def test_deterministic(self):
        assert np.array_equal(gen_random_orthogonal(8, 5), gen_random_orthogonal(8, 5))

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            gen_random_orthogonal(0, seed=1)


class TestGeometricDiagonal:
    def test_hand_ladder(self):
        D = gen_geometric_diagonal(3, 3, 100.0)
        np.testing.assert_allclose(np.diag(D), [1.0, 0.1, 0.01], rtol=1e-14)

    def test_single_column(self):
        D = gen_geometric_diagonal(4, 1, 123.0)
        assert D.shape == (4, 1)
        assert D[0, 0] == 1.0

    def test_endpoint_ratio(self):
        for kappa in (10.0, 1e4, 1e8):
            ladder = np.diag(gen_geometric_diagonal(9, 9, kappa))
            assert ladder[0] / ladder[-1] == pytest.approx(kappa, rel=1e-12)

    def test_strictly_decreasing(self):
        ladder = np.diag(gen_geometric_diagonal(12, 12, 37.0))
        assert np.all(np.diff(ladder) < 0)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            gen_geometric_diagonal(3, 3, 0.5)
        with pytest.raises(ValueError):
            gen_geometric_diagonal(2, 3, 10.0)


class TestConditionedMatrix:
    def test_isometric_rows_at_kappa_one(self):
        B = gen_conditioned_matrix(4, 9, 1.0, seed=2)
        assert np.max(np.abs(B @ B.T - np.eye(4))) <= 1e-12

    def test_condition_number(self):
        B = gen_conditioned_matrix(5, 12, 1e4, seed=3)
        sv = sla.svdvals(B)
        assert sv[0] / sv[-1] == pytest.approx(1e4, rel=1e-8)

    def test_unit_spectral_norm(self):
        B = gen_conditioned_matrix(5, 12, 100.0, seed=4)
        assert sla.svdvals(B)[0] == pytest.approx(1.0, abs=1e-12)


class TestGenInstance:
    def test_orthogonal_factor_preserves_nominal_kappa(self):
        params = GenParams(m=20, n=10, s=4, p=12, q=8, kappa_a=50.0, kappa_b=10.0,
                           seed=5, hyper_bound=0.0)
        problem, achieved = gen_ilse_instance(params)
        assert achieved == pytest.approx(50.0, rel=1e-6)

    def test_paper_dimensions_well_posed_and_normalized(self):
        params = GenParams(m=100, n=50, s=20, p=60, q=40, kappa_a=1e2, kappa_b=1e2, seed=6)
        problem, achieved = gen_ilse_instance(params)
        assert check_well_posedness(problem).well_posed
        assert sla.svdvals(problem.A)[0] == pytest.approx(1.0, abs=1e-12)
        assert sla.svdvals(problem.B)[0] == pytest.approx(1.0, abs=1e-12)
        assert achieved >= 1.0

    def test_deterministic(self):
        params = GenParams(m=12, n=6, s=2, p=7, q=5, kappa_a=30.0, kappa_b=20.0, seed=9)
        p1, k1 = gen_ilse_instance(params)
        p2, k2 = gen_ilse_instance(params)
        assert np.array_equal(p1.A, p2.A)
        assert np.array_equal(p1.b, p2.b)
        assert np.array_equal(p1.B, p2.B)
        assert np.array_equal(p1.d, p2.d)
        assert k1 == k2

    def test_hopeless_family_errors_after_retries(self):
        # q = m makes A^T S A negative definite, so the uniqueness condition
        # fails on every draw whenever the constraint null space is nontrivial.
        params = GenParams(m=4, n=2, s=1, p=0, q=4, kappa_a=2.0, kappa_b=2.0, seed=1)
        with pytest.raises(GenerationError):
            gen_ilse_instance(params)

    def test_params_validation(self):
        with pytest.raises(ValueError):
            GenParams(m=4, n=2, s=1, p=1, q=1, kappa_a=2.0, kappa_b=2.0, seed=0)
        with pytest.raises(ValueError):
            GenParams(m=2, n=4, s=1, p=1, q=1, kappa_a=2.0, kappa_b=2.0, seed=0)
        with pytest.raises(ValueError):
            GenParams(m=4, n=2, s=3, p=2, q=2, kappa_a=2.0, kappa_b=2.0, seed=0)
        with pytest.raises(ValueError):
            GenParams(m=4, n=2, s=1, p=2, q=2, kappa_a=0.5, kappa_b=2.0, seed=0)


class TestGenPerturbation:
    def test_zero_eps(self, t1):
        pert = gen_perturbation(t1, 0.0, seed=1)
        assert np.all(pert.E == 0.0) and np.all(pert.f == 0.0)
        assert np.all(pert.F == 0.0) and np.all(pert.g == 0.0)

    def test_expected_magnitude(self):
        params = GenParams(m=100, n=50, s=20, p=60, q=40, kappa_a=1e2, kappa_b=1e2, seed=8)
        problem, _ = gen_ilse_instance(params)
        eps = 1e-6
        pert = gen_perturbation(problem, eps, seed=10)
        # ||E||_F^2 concentrates around eps^2 * m * n
        assert np.sum(pert.E**2) == pytest.approx(eps**2 * 100 * 50, rel=0.25)
        assert np.sum(pert.f**2) == pytest.approx(
            eps**2 * np.sum(problem.b**2) * 100, rel=0.4
        )

    def test_deterministic(self, t1):
        a = gen_perturbation(t1, 1e-3, seed=2)
        b = gen_perturbation(t1, 1e-3, seed=2)
        assert np.array_equal(a.E, b.E) and np.array_equal(a.g, b.g)

    def test_negative_eps_rejected(self, t1):
        with pytest.raises(ValueError):
            gen_perturbation(t1, -1.0, seed=0)
