import math

import numpy as np
import pytest

from fireball import (DomainError, DynamicalSymmetry, IntegratorConfig,
                      ModelKind, PointSymmetry, State, Trajectory,
                      UnsupportedModelError, dynamical_symmetry_check,
                      energies, ermakov_invariant, extended_generator_apply,
                      integrate, noether_condition_residual, noether_invariant,
                      noether_invariant_from, ode_residual, one_d_solution,
                      scaled_trajectory, scaling_symmetry, time_translation)
from fireball.invariants import ermakov_values


def random_states(kind, n=10, seed=11):
    rng = np.random.default_rng(seed)
    return [State(t=rng.uniform(0.0, 4.0), q=rng.uniform(0.5, 2.0, kind.dim),
                  qdot=rng.uniform(-1.0, 1.0, kind.dim)) for _ in range(n)]


def perturbed_scaling(factor=1.1):
    """Scaling generator with eta scaled by a wrong factor: not a symmetry."""
    return PointSymmetry(
        tau=lambda t, q: 2.0 * t,
        eta=lambda t, q: factor * np.asarray(q, dtype=float),
        gauge=lambda t, q: 0.0,
        tau_grad=lambda t, q: (2.0, np.zeros_like(q)),
        eta_grad=lambda t, q: (np.zeros_like(q), factor * np.eye(len(q))),
        gauge_grad=lambda t, q: (0.0, np.zeros_like(q)),
    )


class TestNoetherCondition:
    @pytest.mark.parametrize("kind", list(ModelKind))
    def test_scaling_symmetry_residual(self, kind):
        sym = scaling_symmetry()
        for s in random_states(kind):
            assert abs(noether_condition_residual(sym, kind, s)) <= 1e-10

    @pytest.mark.parametrize("kind", list(ModelKind))
    def test_time_translation_residual_is_exactly_zero(self, kind):
        sym = time_translation()
        for s in random_states(kind):
            assert noether_condition_residual(sym, kind, s) == 0.0

    def test_perturbed_symmetry_is_detected(self):
        sym = perturbed_scaling()
        for s in random_states(ModelKind.TWO_D, n=10, seed=12):
            assert abs(noether_condition_residual(sym, ModelKind.TWO_D, s)) > 1e-3


class TestNoetherInvariant:
    @pytest.mark.parametrize("kind", list(ModelKind))
    def test_scaling_reproduces_model_formula(self, kind):
        sym = scaling_symmetry()
        for s in random_states(kind):
            expected = noether_invariant(s, kind)
            got = noether_invariant_from(sym, kind, s)
            assert abs(got - expected) <= 1e-12 * max(1.0, abs(expected))

    @pytest.mark.parametrize("kind", list(ModelKind))
    def test_time_translation_gives_energy(self, kind):
        sym = time_translation()
        for s in random_states(kind):
            H = energies(s, kind).hamiltonian
            assert abs(noether_invariant_from(sym, kind, s) - H) <= 1e-12 * H

    def test_1d_reference_value(self):
        s = State(t=2.0, q=[1.0], qdot=[0.0])
        assert noether_invariant_from(scaling_symmetry(), ModelKind.ONE_D, s) == \
            pytest.approx(2.0, rel=1e-15)

    def test_elliptic_weighting(self):
        sym = scaling_symmetry()
        for s in random_states(ModelKind.ELLIPTIC_3D):
            H = energies(s, ModelKind.ELLIPTIC_3D).hamiltonian
            expected = 2 * s.t * H - (2 * s.q[0] * s.qdot[0] + s.q[1] * s.qdot[1])
            got = noether_invariant_from(sym, ModelKind.ELLIPTIC_3D, s)
            assert abs(got - expected) <= 1e-12 * max(1.0, abs(expected))


class TestExtendedGenerator:
    def test_annihilates_the_ermakov_invariant(self):
        sym = scaling_symmetry()

        def field(t, q, qd):
            return float(ermakov_values(q, qd, ModelKind.TWO_D))

        for s in random_states(ModelKind.TWO_D):
            assert abs(extended_generator_apply(sym, field, s)) <= 1e-6

    def test_energy_has_scaling_degree_minus_two(self):
        sym = scaling_symmetry()

        def field(t, q, qd):
            from fireball.dynamics import kinetic, potential
            return float(kinetic(qd, ModelKind.TWO_D) + potential(q, ModelKind.TWO_D))

        for s in random_states(ModelKind.TWO_D, n=5):
            H = energies(s, ModelKind.TWO_D).hamiltonian
            got = extended_generator_apply(sym, field, s)
            assert got == pytest.approx(-2.0 * H, rel=1e-6)

    def test_constant_field_maps_to_exact_zero(self):
        sym = scaling_symmetry()
        s = State(t=1.0, q=[1.0, 2.0], qdot=[0.3, -0.4])
        assert extended_generator_apply(sym, lambda t, q, qd: 4.2, s) == 0.0


class TestScaledTrajectory:
    def test_beta_one_is_identity(self):
        s = State(t=0.0, q=[1.0], qdot=[0.2])
        traj = integrate(s, ModelKind.ONE_D,
                         IntegratorConfig(t_end=1.0, sample_interval=0.1))
        mapped = scaled_trajectory(traj, 1.0)
        assert np.array_equal(mapped.times, traj.times)
        assert np.array_equal(mapped.qs, traj.qs)
        assert np.array_equal(mapped.qdots, traj.qdots)

    def test_rejects_nonpositive_beta(self):
        s = State(t=0.0, q=[1.0], qdot=[0.0])
        traj = integrate(s, ModelKind.ONE_D,
                         IntegratorConfig(t_end=1.0, sample_interval=0.5))
        with pytest.raises(DomainError):
            scaled_trajectory(traj, 0.0)

    def test_mapped_1d_solution_still_solves_the_ode(self):
        times = np.arange(0.0, 2.0 + 1e-12, 2.5e-4)
        X, Xd = one_d_solution(0.5, 0.0, times)
        traj = Trajectory(kind=ModelKind.ONE_D, times=times,
                          qs=X[:, None], qdots=Xd[:, None])
        mapped = scaled_trajectory(traj, 2.0)
        assert ode_residual(mapped) <= 1e-5

    def test_ermakov_invariant_is_scaling_invariant(self):
        s = State(t=0.0, q=[1.0, 1.4], qdot=[-0.3, 0.2])
        traj = integrate(s, ModelKind.TWO_D,
                         IntegratorConfig(t_end=5.0, sample_interval=0.25))
        mapped = scaled_trajectory(traj, 3.0)
        src = ermakov_values(traj.qs, traj.qdots, ModelKind.TWO_D)
        img = ermakov_values(mapped.qs, mapped.qdots, ModelKind.TWO_D)
        assert np.max(np.abs(src - img)) <= 1e-10

    @pytest.mark.parametrize("kind", list(ModelKind))
    @pytest.mark.parametrize("beta", [0.5, 2.0, 5.0])
    def test_form_invariance(self, kind, beta):
        initial = State(t=0.0, q=np.full(kind.dim, 1.1),
                        qdot=np.linspace(-0.2, 0.3, kind.dim))
        span = 4.0 / beta ** 2
        # mapped-grid spacing sized so the second-difference stencil stays
        # below the residual bound (derivatives grow like beta**-7)
        mapped_dt = 1e-3 * min(1.0, beta ** 2)
        cfg = IntegratorConfig(t_end=span, sample_interval=mapped_dt / beta ** 2,
                               rel_tol=1e-11, abs_tol=1e-13)
        traj = integrate(initial, kind, cfg)
        assert ode_residual(scaled_trajectory(traj, beta)) <= 1e-5

    def test_near_identity_matches_generator(self):
        s = State(t=0.0, q=[1.0, 1.2], qdot=[0.1, -0.2])
        traj = integrate(s, ModelKind.TWO_D,
                         IntegratorConfig(t_end=5.0, sample_interval=0.5))
        eps = 1e-6
        mapped = scaled_trajectory(traj, 1.0 + eps)
        assert np.max(np.abs(mapped.times - traj.times - eps * 2 * traj.times)) <= 1e-10
        assert np.max(np.abs(mapped.qs - traj.qs - eps * traj.qs)) <= 1e-10
        assert np.max(np.abs(mapped.qdots - traj.qdots + eps * traj.qdots)) <= 1e-6


class TestOdeResidual:
    def test_requires_uniform_grid(self):
        traj = Trajectory(kind=ModelKind.ONE_D, times=[0.0, 0.1, 0.3],
                          qs=[[1.0]] * 3, qdots=[[0.0]] * 3)
        with pytest.raises(DomainError):
            ode_residual(traj)

    def test_requires_three_samples(self):
        traj = Trajectory(kind=ModelKind.ONE_D, times=[0.0, 0.1],
                          qs=[[1.0]] * 2, qdots=[[0.0]] * 2)
        with pytest.raises(DomainError):
            ode_residual(traj)

    def test_detects_a_non_solution(self):
        times = np.arange(0.0, 1.0 + 1e-12, 1e-3)
        qs = np.exp(times)[:, None]  # not a solution of Xdd = 1/X^3
        traj = Trajectory(kind=ModelKind.ONE_D, times=times, qs=qs,
                          qdots=qs.copy())
        assert ode_residual(traj) > 1e-2


class TestDynamicalSymmetry:
    taus = [lambda t, q, qd: 0.0,
            lambda t, q, qd: 1.0,
            lambda t, q, qd: q[0] * qd[1]]

    @pytest.mark.parametrize("tau", taus)
    def test_residual_and_invariant(self, tau):
        for s in random_states(ModelKind.TWO_D, n=8, seed=13):
            residual, inv = dynamical_symmetry_check(tau, s)
            assert abs(residual) <= 1e-8
            assert abs(inv - ermakov_invariant(s, ModelKind.TWO_D)) <= 1e-10

    def test_invariant_is_tau_independent(self):
        for s in random_states(ModelKind.TWO_D, n=5, seed=14):
            values = [dynamical_symmetry_check(tau, s)[1] for tau in self.taus]
            assert max(values) - min(values) <= 1e-10

    def test_broken_gauge_is_detected(self):
        def broken_gauge(t, q, qd):
            # drops the X/Y contribution of the standard gauge
            w = q[0] * qd[1] - q[1] * qd[0]
            L = energies(State(t=t, q=q, qdot=qd), ModelKind.TWO_D).lagrangian
            return -0.5 * w ** 2 + q[1] / q[0]

        sym = DynamicalSymmetry(tau=lambda t, q, qd: 0.0, gauge=broken_gauge)
        detected = [abs(dynamical_symmetry_check(sym, s)[0]) > 1e-3
                    for s in random_states(ModelKind.TWO_D, n=8, seed=15)]
        assert all(detected)

    def test_unsupported_kind(self):
        s = State(t=0.0, q=[1.0], qdot=[0.0])
        with pytest.raises(UnsupportedModelError):
            dynamical_symmetry_check(lambda t, q, qd: 0.0, s, ModelKind.ONE_D)
