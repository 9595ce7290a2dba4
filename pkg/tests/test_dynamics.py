"""Time integration, frequency measurement, and decay-rate fits."""

import numpy as np
import pytest

from splaylab import construct, dynamics, models


class TestIntegrate:
    def test_ks_splay_is_exact_rotating_solution(self):
        omega = 0.9
        s = construct.random_splay(5, 1, seed=0)
        params = models.KuramotoSakaguchi(omega, 1.1)
        traj = dynamics.integrate(models.steady_state(s.theta, params), params,
                                  dt=1e-3, t_end=10.0, stride=50)
        expected = s.theta.phases[None, :] + omega * traj.times[:, None]
        assert np.abs(traj.phase_block() - expected).max() < 1e-8

    def test_inertia_splay_rotation(self):
        s = construct.twisted_state(4, 1)
        params = models.Inertia(gamma=0.5, p=2.0, alpha=0.4)
        traj = dynamics.integrate(models.steady_state(s.theta, params), params,
                                  dt=1e-3, t_end=10.0, stride=50)
        expected = s.theta.phases[None, :] + 4.0 * traj.times[:, None]
        assert np.abs(traj.phase_block() - expected).max() < 1e-8

    def test_adaptive_splay_rotation(self):
        s = construct.random_splay(4, 2, seed=2)
        params = models.Adaptive(omega=0.3, epsilon=0.8, alpha=0.5, beta=1.0)
        omega = models.collective_frequency(s.theta, params)
        traj = dynamics.integrate(models.steady_state(s.theta, params), params,
                                  dt=1e-3, t_end=10.0, stride=50)
        expected = s.theta.phases[None, :] + omega * traj.times[:, None]
        assert np.abs(traj.phase_block() - expected).max() < 1e-7

    def test_uniform_times_and_shapes(self):
        s = construct.twisted_state(4, 1)
        params = models.KuramotoSakaguchi(1.0, 2.5)
        traj = dynamics.integrate(models.steady_state(s.theta, params), params,
                                  dt=1e-2, t_end=1.0, stride=5)
        gaps = np.diff(traj.times)
        assert np.all(gaps > 0)
        assert gaps == pytest.approx(np.full_like(gaps, 5e-2))
        assert traj.samples.shape == (len(traj.times), 4)
        assert all(state.theta.n == 4 for state in traj.states)

    def test_convergence_order_is_fourth(self):
        # perturbed trajectory compared against a much finer reference; the
        # steps are chosen large enough that truncation dominates roundoff
        s = construct.twisted_state(4, 1)
        params = models.KuramotoSakaguchi(0.5, 2.8, 3.0)
        x0 = dynamics.transverse_perturbation(s, params, size=0.3,
                                              rng=np.random.default_rng(1))
        t_end = 2.0

        def final_state(dt):
            traj = dynamics.integrate(x0, params, dt=dt, t_end=t_end,
                                      stride=max(1, int(round(t_end / dt))), n=4)
            return traj.samples[-1]

        reference = final_state(1e-2 / 16)
        errors = [np.linalg.norm(final_state(dt) - reference)
                  for dt in (4e-2, 2e-2, 1e-2)]
        orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
        assert np.all(orders > 3.7) and np.all(orders < 4.3)

    def test_blowup_reported_with_time(self):
        s = construct.random_splay(3, 2, seed=1)
        params = models.Adaptive(omega=0.0, epsilon=1e155, alpha=0.4, beta=0.9)
        state = models.DynamicState(
            theta=s.theta, weights=models.stationary_kappa(s.theta, params) + 1.0)
        with pytest.raises(dynamics.BlowupError) as info:
            dynamics.integrate(state, params, dt=1e-3, t_end=1.0)
        assert info.value.time > 0

    def test_argument_validation(self):
        s = construct.twisted_state(4, 1)
        params = models.KuramotoSakaguchi(1.0, 0.0)
        state = models.steady_state(s.theta, params)
        with pytest.raises(ValueError):
            dynamics.integrate(state, params, dt=0.0, t_end=1.0)
        with pytest.raises(ValueError):
            dynamics.integrate(state, params, dt=1e-2, t_end=1e-3)


class TestMeasureFrequency:
    def test_ks_frequency(self):
        s = construct.random_splay(6, 1, seed=4)
        params = models.KuramotoSakaguchi(1.3, 0.8)
        traj = dynamics.integrate(models.steady_state(s.theta, params), params,
                                  dt=1e-3, t_end=20.0, stride=10)
        assert dynamics.measure_frequency(traj) == pytest.approx(1.3, abs=1e-6)

    def test_inertia_frequency(self):
        s = construct.twisted_state(5, 1)
        params = models.Inertia(gamma=0.5, p=2.0, alpha=0.9)
        traj = dynamics.integrate(models.steady_state(s.theta, params), params,
                                  dt=1e-3, t_end=20.0, stride=10)
        assert dynamics.measure_frequency(traj) == pytest.approx(4.0, abs=1e-5)

    def test_static_splay(self):
        s = construct.twisted_state(4, 1)
        params = models.KuramotoSakaguchi(0.0, 1.0)
        traj = dynamics.integrate(models.steady_state(s.theta, params), params,
                                  dt=1e-3, t_end=10.0, stride=10)
        assert dynamics.measure_frequency(traj) == pytest.approx(0.0, abs=1e-12)

    def test_too_short_rejected(self):
        s = construct.twisted_state(4, 1)
        params = models.KuramotoSakaguchi(0.0, 1.0)
        traj = dynamics.integrate(models.steady_state(s.theta, params), params,
                                  dt=1e-3, t_end=5e-3)
        with pytest.raises(ValueError):
            dynamics.measure_frequency(traj)


class TestDecayRate:
    def test_stable_node_rate(self):
        # alpha = pi at the 4-twist: double eigenvalue at -sigma/2
        s = construct.twisted_state(4, 1)
        params = models.KuramotoSakaguchi(1.0, np.pi, 1.0)
        _, fit = dynamics.decay_study(s, params, t_end=60.0,
                                      rng=np.random.default_rng(3))
        assert fit.rate == pytest.approx(-0.5, rel=0.05)

    def test_growth_for_zero_lag(self):
        s = construct.twisted_state(4, 1)
        params = models.KuramotoSakaguchi(1.0, 0.0)
        _, fit = dynamics.decay_study(s, params, t_end=30.0,
                                      rng=np.random.default_rng(3))
        assert fit.rate > 0.2

    def test_defective_inertia_quadruple(self):
        s = construct.twisted_state(4, 1)
        params = models.Inertia(gamma=2.0, p=1.0, alpha=np.pi, sigma=2.0)
        direction = construct.transverse_directions(s.theta, 1)[0]
        _, fit = dynamics.decay_study(s, params, t_end=40.0,
                                      direction=direction,
                                      velocity_direction=-direction)
        assert fit.rate == pytest.approx(-1.0, rel=0.10)

    def test_tangent_perturbations_are_neutral(self):
        # a kick along the manifold neither grows nor decays at leading order
        s = construct.random_splay(5, 1, seed=6)
        params = models.KuramotoSakaguchi(0.4, 2.4)
        tangent = construct.splay_tangent_basis(s.theta, 1).vectors
        direction = tangent[1] if np.abs(tangent[1].mean()) < 0.3 else tangent[0]
        direction = direction - direction.mean()
        size = 1e-6
        x0 = models.pack_state(models.steady_state(s.theta, params), params)
        x0[:5] += size * direction / np.linalg.norm(direction)
        traj = dynamics.integrate(x0, params, dt=1e-3, t_end=10.0, stride=10,
                                  n=5)
        deviation = traj.samples - dynamics.reference_samples(s, params,
                                                              traj.times)
        deviation -= deviation.mean(axis=1, keepdims=True)
        norms = np.linalg.norm(deviation, axis=1)
        assert abs(norms[-1] - norms[0]) < 0.01 * norms[0]

    def test_no_linear_regime_reported(self):
        s = construct.twisted_state(4, 1)
        params = models.KuramotoSakaguchi(1.0, np.pi)
        traj = dynamics.integrate(models.steady_state(s.theta, params), params,
                                  dt=1e-3, t_end=5.0, stride=10)
        with pytest.raises(dynamics.NoLinearRegimeError):
            dynamics.measure_decay_rate(traj, s)  # unperturbed: norm ~ 0

    def test_perturbation_is_transverse_and_sized(self):
        s = construct.random_splay(6, 1, seed=9)
        params = models.KuramotoSakaguchi(0.0, 1.0)
        x0 = dynamics.transverse_perturbation(s, params, size=1e-4,
                                              rng=np.random.default_rng(0))
        # recovering the kick by subtraction reintroduces phase-sized roundoff
        kick = x0[:6] - s.theta.phases
        assert np.linalg.norm(kick) == pytest.approx(1e-4, rel=1e-8)
        assert abs(kick.sum()) < 1e-14
        tangent = construct.splay_tangent_basis(s.theta, 1).vectors
        assert np.abs(tangent @ kick).max() < 1e-14


class TestTrajectoryCsvHeader:
    def test_plain(self):
        s = construct.twisted_state(4, 1)
        params = models.KuramotoSakaguchi(1.0, 0.0)
        traj = dynamics.integrate(models.steady_state(s.theta, params), params,
                                  dt=1e-2, t_end=0.1)
        assert dynamics.trajectory_csv_header(traj) == [
            "t", "phi_0", "phi_1", "phi_2", "phi_3"]

    def test_inertia_and_adaptive(self):
        s = construct.twisted_state(4, 1)
        pi = models.Inertia(gamma=1.0, p=1.0, alpha=0.0)
        ti = dynamics.integrate(models.steady_state(s.theta, pi), pi,
                                dt=1e-2, t_end=0.1)
        cols = dynamics.trajectory_csv_header(ti)
        assert cols[5] == "psi_0" and len(cols) == 9
        sa = construct.random_splay(3, 2, seed=0)
        pa = models.Adaptive(omega=0.0, epsilon=1.0, alpha=0.0, beta=0.0)
        ta = dynamics.integrate(models.steady_state(sa.theta, pa), pa,
                                dt=1e-2, t_end=0.1)
        cols = dynamics.trajectory_csv_header(ta)
        assert cols[4] == "kappa_0" and len(cols) == 1 + 3 + 9
