import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fireball import (DomainError, ModelKind, PhysicalParams, PolarState,
                      State, UnsupportedModelError, dimensionalize,
                      nondimensionalize, reference_scales,
                      state_from_components, to_cartesian, to_polar)

positive = st.floats(min_value=0.05, max_value=10.0)
rate = st.floats(min_value=-3.0, max_value=3.0)


class TestState:
    def test_rejects_nonpositive_variance(self):
        with pytest.raises(DomainError):
            State(t=0.0, q=[1.0, 0.0], qdot=[0.0, 0.0])
        with pytest.raises(DomainError):
            State(t=0.0, q=[-0.5], qdot=[0.0])

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(DomainError):
            State(t=0.0, q=[1.0, 2.0], qdot=[0.0])

    def test_rejects_nonfinite(self):
        with pytest.raises(DomainError):
            State(t=0.0, q=[np.nan], qdot=[0.0])

    def test_immutable_arrays(self):
        s = State(t=0.0, q=[1.0], qdot=[0.0])
        with pytest.raises(ValueError):
            s.q[0] = 2.0

    def test_does_not_freeze_caller_arrays(self):
        q = np.array([1.0, 2.0])
        State(t=0.0, q=q, qdot=np.zeros(2))
        q[0] = 5.0  # caller's array stays writable

    def test_from_components(self):
        s = state_from_components(ModelKind.THREE_D, X=1.0, Y=2.0, Z=3.0, Ydot=0.5)
        assert s.q.tolist() == [1.0, 2.0, 3.0]
        assert s.qdot.tolist() == [0.0, 0.5, 0.0]

    def test_from_components_missing_or_extra(self):
        with pytest.raises(DomainError):
            state_from_components(ModelKind.TWO_D, X=1.0)
        with pytest.raises(DomainError):
            state_from_components(ModelKind.ONE_D, X=1.0, Y=2.0)


class TestModelKind:
    def test_dims(self):
        assert [k.dim for k in ModelKind] == [1, 2, 3, 2]

    def test_from_name(self):
        assert ModelKind.from_name("elliptic") is ModelKind.ELLIPTIC_3D
        with pytest.raises(UnsupportedModelError):
            ModelKind.from_name("4d")


class TestRescaling:
    def test_identity_scaling_2d(self):
        params = PhysicalParams(n0=1.0, T0=1.0, X0=1.0, Y0=1.0, m=1.0)
        s = State(t=3.0, q=[2.0, 1.0], qdot=[0.0, 0.0])
        bar = nondimensionalize(params, s, ModelKind.TWO_D)
        assert bar.t == pytest.approx(3.0, abs=0)
        assert bar.q[0] == pytest.approx(2.0, abs=0)

    def test_2d_length_scale(self):
        params = PhysicalParams(X0=4.0, Y0=1.0, T0=1.0, m=1.0)
        s = State(t=0.0, q=[2.0, 1.0], qdot=[0.0, 0.0])
        bar = nondimensionalize(params, s, ModelKind.TWO_D)
        assert bar.q[0] == pytest.approx(1.0, rel=1e-15)

    def test_1d_scaling(self):
        params = PhysicalParams(X0=2.0, T0=4.0, m=1.0)
        s = State(t=1.0, q=[2.0], qdot=[0.0])
        bar = nondimensionalize(params, s, ModelKind.ONE_D)
        assert bar.q[0] == pytest.approx(1.0, rel=1e-15)
        assert bar.t == pytest.approx(1.0, rel=1e-15)

    def test_missing_reference_value(self):
        params = PhysicalParams(X0=1.0)
        with pytest.raises(DomainError):
            reference_scales(params, ModelKind.TWO_D)

    def test_nonpositive_reference_value(self):
        with pytest.raises(DomainError):
            PhysicalParams(T0=-1.0)

    @pytest.mark.parametrize("kind", list(ModelKind))
    def test_round_trip(self, kind):
        params = PhysicalParams(n0=2.0, T0=3.5, X0=1.2, Y0=0.7, Z0=2.1, m=1.8)
        rng = np.random.default_rng(7)
        for _ in range(20):
            s = State(t=rng.uniform(0, 5), q=rng.uniform(0.1, 8, kind.dim),
                      qdot=rng.uniform(-2, 2, kind.dim))
            back = dimensionalize(params, nondimensionalize(params, s, kind), kind)
            assert abs(back.t - s.t) <= 1e-14 * max(1.0, abs(s.t))
            assert np.all(np.abs(back.q - s.q) <= 1e-14 * np.maximum(1.0, s.q))
            assert np.all(np.abs(back.qdot - s.qdot) <= 1e-14)

    def test_velocity_scale_is_sqrt_T0_over_m(self):
        # the time and length scales always combine to sqrt(T0/m)
        params = PhysicalParams(T0=9.0, X0=5.0, Y0=0.3, Z0=1.1, m=4.0)
        for kind in ModelKind:
            length, time = reference_scales(params, kind)
            assert length / time == pytest.approx(math.sqrt(9.0 / 4.0), rel=1e-14)


class TestPolar:
    def test_symmetric_point_2d(self):
        s = State(t=0.0, q=[1.0, 1.0], qdot=[0.0, 0.0])
        p = to_polar(s, ModelKind.TWO_D)
        assert p.r == pytest.approx(math.sqrt(2.0), rel=1e-15)
        assert p.phi == pytest.approx(math.pi / 4.0, rel=1e-15)
        assert p.rdot == 0.0 and p.phidot == 0.0

    def test_elliptic_stretched_map(self):
        s = State(t=0.0, q=[1.0, 1.0], qdot=[0.0, 0.0])
        p = to_polar(s, ModelKind.ELLIPTIC_3D)
        assert p.r == pytest.approx(math.sqrt(3.0), rel=1e-15)
        assert math.tan(p.phi) == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-14)

    def test_axis_is_rejected(self):
        with pytest.raises(DomainError):
            State(t=0.0, q=[1.0, 0.0], qdot=[0.0, 0.0])

    def test_unsupported_kinds(self):
        s1 = State(t=0.0, q=[1.0], qdot=[0.0])
        with pytest.raises(UnsupportedModelError):
            to_polar(s1, ModelKind.ONE_D)
        s3 = State(t=0.0, q=[1.0, 1.0, 1.0], qdot=[0.0, 0.0, 0.0])
        with pytest.raises(UnsupportedModelError):
            to_polar(s3, ModelKind.THREE_D)

    def test_polar_state_validation(self):
        with pytest.raises(DomainError):
            PolarState(r=-1.0, phi=0.5)
        with pytest.raises(DomainError):
            PolarState(r=1.0, phi=math.pi / 2.0)

    @settings(max_examples=200, deadline=None)
    @given(X=positive, Y=positive, Xd=rate, Yd=rate,
           kind=st.sampled_from([ModelKind.TWO_D, ModelKind.ELLIPTIC_3D]))
    def test_round_trip(self, X, Y, Xd, Yd, kind):
        s = State(t=0.5, q=[X, Y], qdot=[Xd, Yd])
        back = to_cartesian(to_polar(s, kind), kind, t=s.t)
        assert np.all(np.abs(back.q - s.q) <= 1e-12 * np.maximum(1.0, np.abs(s.q)))
        assert np.all(np.abs(back.qdot - s.qdot)
                      <= 1e-12 * np.maximum(1.0, np.abs(s.qdot)))
