import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fireball import (DomainError, IntegratorConfig, ModelKind, State,
                      Trajectory, UnsupportedModelError, elliptic_coupling,
                      ermakov_invariant, general_ermakov_invariant, integrate,
                      invariant_report, itilde_invariant, noether_invariant,
                      one_d_solution, pinney_coupling, polar_invariants,
                      to_polar, two_d_coupling)
from fireball.invariants import (ELLIPTIC_POLAR_COEFF, ERMAKOV_MIN_2D,
                                 ERMAKOV_MIN_ELLIPTIC)

positive = st.floats(min_value=0.1, max_value=8.0)
rate = st.floats(min_value=-3.0, max_value=3.0)


class TestErmakov:
    def test_2d_values(self):
        assert ermakov_invariant(State(t=0, q=[1, 1], qdot=[0, 0]),
                                 ModelKind.TWO_D) == 2.0
        assert ermakov_invariant(State(t=0, q=[1, 2], qdot=[0, 0]),
                                 ModelKind.TWO_D) == pytest.approx(2.5, rel=1e-15)

    def test_elliptic_values(self):
        s = State(t=0, q=[1, 1], qdot=[0, 0])
        assert ermakov_invariant(s, ModelKind.ELLIPTIC_3D) == pytest.approx(2.25)
        assert itilde_invariant(s) == pytest.approx(4.5)

    def test_unsupported_kinds(self):
        with pytest.raises(UnsupportedModelError):
            ermakov_invariant(State(t=0, q=[1], qdot=[0]), ModelKind.ONE_D)
        with pytest.raises(UnsupportedModelError):
            ermakov_invariant(State(t=0, q=[1, 1, 1], qdot=[0, 0, 0]),
                              ModelKind.THREE_D)

    @settings(max_examples=300, deadline=None)
    @given(X=positive, Y=positive, Xd=rate, Yd=rate)
    def test_2d_lower_bound(self, X, Y, Xd, Yd):
        value = ermakov_invariant(State(t=0, q=[X, Y], qdot=[Xd, Yd]),
                                  ModelKind.TWO_D)
        assert value >= ERMAKOV_MIN_2D - 1e-12  # fp slack at the AM-GM minimum

    @settings(max_examples=300, deadline=None)
    @given(X=positive, Y=positive, Xd=rate, Yd=rate)
    def test_elliptic_lower_bound(self, X, Y, Xd, Yd):
        value = ermakov_invariant(State(t=0, q=[X, Y], qdot=[Xd, Yd]),
                                  ModelKind.ELLIPTIC_3D)
        assert value >= ERMAKOV_MIN_ELLIPTIC - 1e-12


class TestGeneralErmakov:
    def test_unit_couplings_reduce_to_2d(self):
        spec = two_d_coupling()
        assert general_ermakov_invariant(spec, 1.0, 2.0, 0.0, 0.0) == \
            pytest.approx(2.5, rel=1e-15)
        rng = np.random.default_rng(5)
        for _ in range(20):
            X, Y = rng.uniform(0.2, 4.0, 2)
            Xd, Yd = rng.uniform(-2, 2, 2)
            direct = ermakov_invariant(State(t=0, q=[X, Y], qdot=[Xd, Yd]),
                                       ModelKind.TWO_D)
            assert general_ermakov_invariant(spec, X, Y, Xd, Yd) == \
                pytest.approx(direct, rel=1e-14)

    def test_degenerate_pair_recovers_the_invariant(self):
        spec = pinney_coupling()
        for i0 in (0.5, 1.0, 3.75):
            got = general_ermakov_invariant(spec, 1.0, 0.0, 0.0,
                                            math.sqrt(2.0 * i0))
            assert got == pytest.approx(i0, rel=1e-15)

    def test_elliptic_couplings_match_closed_form(self):
        spec = elliptic_coupling()
        assert general_ermakov_invariant(spec, 1.0, 1.0, 0.0, 0.0) == \
            pytest.approx(2.25, rel=1e-15)
        rng = np.random.default_rng(6)
        for _ in range(20):
            X, Y = rng.uniform(0.2, 4.0, 2)
            Xd, Yd = rng.uniform(-2, 2, 2)
            direct = ermakov_invariant(State(t=0, q=[X, Y], qdot=[Xd, Yd]),
                                       ModelKind.ELLIPTIC_3D)
            assert general_ermakov_invariant(spec, X, Y, Xd, Yd) == \
                pytest.approx(direct, rel=1e-13)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            general_ermakov_invariant(two_d_coupling(), -1.0, 1.0, 0.0, 0.0)
        with pytest.raises(DomainError):
            general_ermakov_invariant(two_d_coupling(), 1.0, 0.0, 0.0, 0.0)


class TestNoether:
    def test_3d_at_t_zero(self):
        s = State(t=0.0, q=[1.2, 0.8, 1.5], qdot=[0.3, -0.2, 0.4])
        expected = -(1.2 * 0.3 - 0.8 * 0.2 + 1.5 * 0.4)
        assert noether_invariant(s, ModelKind.THREE_D) == pytest.approx(
            expected, rel=1e-14)
        rest = State(t=0.0, q=[1, 1, 1], qdot=[0, 0, 0])
        assert noether_invariant(rest, ModelKind.THREE_D) == 0.0

    def test_1d_value(self):
        s = State(t=2.0, q=[1.0], qdot=[0.0])
        assert noether_invariant(s, ModelKind.ONE_D) == pytest.approx(2.0, rel=1e-15)

    def test_elliptic_weights_momentum(self):
        s = State(t=1.0, q=[1.0, 2.0], qdot=[0.5, -0.25])
        from fireball import energies
        H = energies(s, ModelKind.ELLIPTIC_3D).hamiltonian
        expected = 2 * 1.0 * H - (2 * 1.0 * 0.5 + 2.0 * (-0.25))
        assert noether_invariant(s, ModelKind.ELLIPTIC_3D) == pytest.approx(
            expected, rel=1e-14)


class TestPolarInvariants:
    def test_2d_symmetric_point(self):
        s = State(t=0, q=[1, 1], qdot=[0, 0])
        H, inv = polar_invariants(to_polar(s, ModelKind.TWO_D), ModelKind.TWO_D)
        assert inv == pytest.approx(2.0, rel=1e-14)
        assert H == pytest.approx(1.0, rel=1e-14)

    def test_elliptic_symmetric_point(self):
        s = State(t=0, q=[1, 1], qdot=[0, 0])
        H, itil = polar_invariants(to_polar(s, ModelKind.ELLIPTIC_3D),
                                   ModelKind.ELLIPTIC_3D)
        assert itil == pytest.approx(4.5, rel=1e-13)
        assert H == pytest.approx(1.5, rel=1e-13)

    def test_minimum_of_angular_potential(self):
        from fireball.models import PolarState
        p = PolarState(r=3.7, phi=math.pi / 4.0, rdot=0.0, phidot=0.0)
        _, inv = polar_invariants(p, ModelKind.TWO_D)
        assert inv == pytest.approx(2.0, rel=1e-15)

    @pytest.mark.parametrize("kind", [ModelKind.TWO_D, ModelKind.ELLIPTIC_3D])
    def test_agrees_with_cartesian(self, kind):
        from fireball import energies
        rng = np.random.default_rng(8)
        for _ in range(100):
            s = State(t=0, q=rng.uniform(0.3, 3.0, 2), qdot=rng.uniform(-1.5, 1.5, 2))
            Hp, inv_p = polar_invariants(to_polar(s, kind), kind)
            H = energies(s, kind).hamiltonian
            inv = ermakov_invariant(s, kind)
            if kind is ModelKind.ELLIPTIC_3D:
                inv *= 2.0
            assert abs(Hp - H) <= 1e-10 * max(1.0, abs(H))
            assert abs(inv_p - inv) <= 1e-10 * max(1.0, abs(inv))

    def test_naive_polar_coefficient_fails_the_substitution_oracle(self):
        # with the coefficient 3/2 instead of 3 * 2**(-1/3) the polar form
        # does not reproduce the doubled cartesian invariant
        s = State(t=0, q=[1, 1], qdot=[0, 0])
        p = to_polar(s, ModelKind.ELLIPTIC_3D)
        naive = 1.5 * (math.cos(p.phi) ** 2 * math.sin(p.phi)) ** (-2.0 / 3.0)
        assert naive == pytest.approx(9.0 * 2.0 ** (-5.0 / 3.0), rel=1e-12)
        assert abs(naive - itilde_invariant(s)) > 1.0
        assert ELLIPTIC_POLAR_COEFF == pytest.approx(3.0 * 2 ** (-1.0 / 3.0))


class TestReport:
    def test_exact_1d_trajectory_has_zero_drift(self):
        times = np.linspace(0.0, 10.0, 201)
        X, Xd = one_d_solution(0.5, 0.0, times)
        traj = Trajectory(kind=ModelKind.ONE_D, times=times,
                          qs=X[:, None], qdots=Xd[:, None])
        report = invariant_report(traj)
        assert set(report.values) == {"H", "J"}
        assert all(d <= 1e-12 for d in report.drift.values())

    def test_2d_integration_drift(self):
        s = State(t=0.0, q=[1.0, 1.4], qdot=[-0.3, 0.2])
        cfg = IntegratorConfig(t_end=100.0, sample_interval=0.5,
                               rel_tol=1e-10, abs_tol=1e-12)
        report = invariant_report(integrate(s, ModelKind.TWO_D, cfg))
        assert set(report.values) == {"H", "I", "J"}
        assert all(d <= 1e-8 for d in report.drift.values())

    def test_elliptic_itilde(self):
        s = State(t=0.0, q=[1.0, 1.4], qdot=[-0.3, 0.2])
        cfg = IntegratorConfig(t_end=50.0, sample_interval=0.5,
                               rel_tol=1e-10, abs_tol=1e-12)
        report = invariant_report(integrate(s, ModelKind.ELLIPTIC_3D, cfg))
        assert np.max(np.abs(report.values["Itilde"]
                             - 2.0 * report.values["I"])) <= 1e-12
        assert report.drift["Itilde"] <= 1e-8

    def test_bound_holds_along_trajectories(self):
        s = State(t=0.0, q=[0.7, 1.6], qdot=[0.5, -0.6])
        cfg = IntegratorConfig(t_end=50.0, sample_interval=0.1)
        report = invariant_report(integrate(s, ModelKind.TWO_D, cfg))
        assert np.all(report.values["I"] >= ERMAKOV_MIN_2D)
