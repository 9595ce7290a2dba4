"""Dense eigensolver, finite differences, and spectrum bookkeeping."""

import numpy as np
import pytest

from splaylab import construct, models, oracle


class TestDenseEigenvalues:
    def test_identity(self):
        w = oracle.dense_eigenvalues(np.eye(5))
        assert w == pytest.approx(np.ones(5))

    def test_companion_of_quadratic(self):
        companion = np.array([[0.0, 1.0], [1.0, 0.0]])  # mu^2 - 1
        w = np.sort(oracle.dense_eigenvalues(companion).real)
        assert w == pytest.approx([-1.0, 1.0])

    def test_splay_jacobian_kernel_dimension(self):
        s = construct.random_splay(6, 1, seed=0)
        blocks = models.model_jacobian(s.theta, models.KuramotoSakaguchi(0, 0.9))
        w = oracle.dense_eigenvalues(blocks.l_matrix)
        assert np.sum(np.abs(w) < 1e-8) == 4

    def test_conjugate_pair_symmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            a = rng.standard_normal((7, 7))
            w = oracle.dense_eigenvalues(a)
            conjugates = np.conj(w)
            rep = oracle.spectrum_compare(w, conjugates, tol=1e-8)
            assert rep.all_matched

    def test_backward_error_spot_checks(self):
        rng = np.random.default_rng(1)
        a = rng.standard_normal((20, 20))
        assert oracle.eigen_backward_errors(a).max() < 1e-8

    def test_input_validation(self):
        with pytest.raises(ValueError):
            oracle.dense_eigenvalues(np.ones((2, 3)))
        with pytest.raises(ValueError):
            oracle.dense_eigenvalues(np.array([[np.nan, 0], [0, 1]]))
        with pytest.raises(ValueError):
            oracle.dense_eigenvalues(np.zeros((3000, 3000)))


class TestFdJacobian:
    def test_linear_map_recovered(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((6, 6))
        jac = oracle.fd_jacobian(lambda x: a @ x, np.zeros(6), h=1e-6)
        assert np.abs(jac - a).max() < 1e-10

    def test_ks_rhs_at_splay(self):
        s = construct.random_splay(8, 1, seed=3)
        params = models.KuramotoSakaguchi(0.5, 1.3, 0.9)
        blocks = models.model_jacobian(s.theta, params)
        fd = oracle.fd_jacobian(lambda x: models.rhs_flat(x, params, 8),
                                s.theta.phases, h=1e-6)
        assert np.abs(fd - blocks.l_matrix).max() < 1e-5

    def test_adaptive_full_matrix(self):
        s = construct.random_splay(4, 2, seed=5)
        params = models.Adaptive(omega=0.1, epsilon=0.6, alpha=0.4, beta=1.0)
        blocks = models.model_jacobian(s.theta, params)
        assembled = models.variational_matrix(blocks, params)
        x0 = models.pack_state(models.steady_state(s.theta, params), params)
        fd = oracle.fd_jacobian(lambda x: models.rhs_flat(x, params, 4), x0,
                                h=1e-6)
        assert fd.shape == (20, 20)
        assert np.abs(fd - assembled).max() < 1e-5

    def test_spectra_agree_between_fd_and_analytic(self):
        s = construct.random_splay(5, 1, seed=8)
        params = models.Inertia(gamma=0.9, p=1.0, alpha=0.6)
        blocks = models.model_jacobian(s.theta, params)
        assembled = models.variational_matrix(blocks, params)
        x0 = models.pack_state(models.steady_state(s.theta, params), params)
        fd = oracle.fd_jacobian(lambda x: models.rhs_flat(x, params, 5), x0,
                                h=1e-6)
        rep = oracle.spectrum_compare(oracle.dense_eigenvalues(assembled),
                                      oracle.dense_eigenvalues(fd), tol=1e-4)
        assert rep.all_matched

    def test_rejects_bad_step(self):
        with pytest.raises(ValueError):
            oracle.fd_jacobian(lambda x: x, np.zeros(2), h=0.0)


class TestSpectrumCompare:
    def test_inertia_zero_block_case(self):
        gamma = 0.8
        block = np.block([[np.zeros((3, 3)), np.eye(3)],
                          [np.zeros((3, 3)), -gamma * np.eye(3)]])
        w = oracle.dense_eigenvalues(block)
        rep = oracle.spectrum_compare([0.0, -gamma], w, tol=1e-9)
        assert rep.all_matched
        assert rep.max_distance < 1e-9

    def test_adaptive_decomposition_counts(self):
        n, eps = 4, 0.5
        s = construct.random_splay(n, 2, seed=11)
        params = models.Adaptive(omega=0.0, epsilon=eps, alpha=0.8, beta=0.8)
        blocks = models.model_jacobian(s.theta, params)
        w = oracle.dense_eigenvalues(models.variational_matrix(blocks, params))
        rep = oracle.spectrum_compare([], w, tol=1e-9, eps=eps)
        assert len(w) == 20
        assert rep.zero_count == n - 2
        assert rep.minus_eps_count == (n * n - n) + (n - 2)

    def test_shuffled_spectrum_distances_zero(self):
        rng = np.random.default_rng(4)
        w = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        shuffled = w[rng.permutation(8)]
        rep = oracle.spectrum_compare(w, shuffled, tol=1e-12)
        assert rep.all_matched
        assert rep.max_distance == 0.0

    def test_crowded_values_use_optimal_assignment(self):
        # two analytic values closer than 2*tol: greedy could steal the
        # wrong partner, optimal assignment may not
        analytic = [1.0 + 0.0j, 1.0 + 1e-7j]
        numeric = [1.0 + 1e-7j, 1.0 + 0.0j]
        rep = oracle.spectrum_compare(analytic, numeric, tol=1e-6)
        assert rep.all_matched
        assert rep.max_distance == 0.0

    def test_more_analytic_than_numeric_rejected(self):
        with pytest.raises(ValueError):
            oracle.spectrum_compare([1.0, 2.0], [1.0], tol=1e-6)


class TestNontrivialMaxReal:
    def test_drops_smallest_magnitudes(self):
        eigs = [0.0, 1e-12, -0.5, 0.2]
        assert oracle.nontrivial_max_real(eigs, 2) == pytest.approx(0.2)

    def test_inertia_spectrum_structure(self):
        # at a splay state the 2N spectrum carries N-2 zeros and N-2 copies
        # of -gamma
        s = construct.random_splay(6, 1, seed=13)
        params = models.Inertia(gamma=0.7, p=1.0, alpha=2.6)
        blocks = models.model_jacobian(s.theta, params)
        w = oracle.dense_eigenvalues(models.variational_matrix(blocks, params))
        scale = max(1.0, np.abs(w).max())
        assert np.sum(np.abs(w) < 1e-8 * scale) >= 4
        assert np.sum(np.abs(w + 0.7) < 1e-7 * scale) >= 4
