"""Model kinds, state containers, physical reference values and rescalings.

The dynamical variables are the Gaussian variances of an expanding blob,
one per spatial direction.  Everything downstream works in dimensionless
variables; :func:`nondimensionalize` / :func:`dimensionalize` convert to and
from laboratory units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, UnsupportedModelError


class ModelKind(Enum):
    """The four reduced variance-dynamics systems.

    ``ELLIPTIC_3D`` is the three-dimensional system restricted to states whose
    two transverse variances coincide; only the two independent variances
    (X, Y) are stored, so the constraint holds by construction.
    """

    ONE_D = "1d"
    TWO_D = "2d"
    THREE_D = "3d"
    ELLIPTIC_3D = "elliptic"

    @property
    def dim(self) -> int:
        """Number of independent variance coordinates."""
        return {ModelKind.ONE_D: 1, ModelKind.TWO_D: 2,
                ModelKind.THREE_D: 3, ModelKind.ELLIPTIC_3D: 2}[self]

    @property
    def labels(self) -> tuple[str, ...]:
        return {ModelKind.ONE_D: ("X",),
                ModelKind.TWO_D: ("X", "Y"),
                ModelKind.THREE_D: ("X", "Y", "Z"),
                ModelKind.ELLIPTIC_3D: ("X", "Y")}[self]

    @property
    def has_ermakov_invariant(self) -> bool:
        return self in (ModelKind.TWO_D, ModelKind.ELLIPTIC_3D)

    @classmethod
    def from_name(cls, name: str) -> "ModelKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise UnsupportedModelError(
                f"unknown model {name!r}; expected one of: {valid}") from None


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)  # copy: the state owns (and freezes) it
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DomainError(f"{name} must be a 1-d sequence, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries: {arr}")
    return arr


@dataclass(frozen=True, eq=False)
class State:
    """Variances and their rates at a single time.

    ``q`` holds the variances (strictly positive), ``qdot`` their time
    derivatives.  Units are whatever the caller is working in; the ODE layer
    uses the dimensionless form throughout.
    """

    t: float
    q: np.ndarray
    qdot: np.ndarray

    def __post_init__(self):
        q = _as_vector(self.q, "q")
        qdot = _as_vector(self.qdot, "qdot")
        if q.shape != qdot.shape:
            raise DomainError(f"q and qdot lengths differ: {q.shape} vs {qdot.shape}")
        if np.any(q <= 0.0):
            raise DomainError(f"variances must be strictly positive, got {q}")
        q.flags.writeable = False
        qdot.flags.writeable = False
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "qdot", qdot)

    @property
    def dim(self) -> int:
        return self.q.shape[0]


def check_state(state: State, kind: ModelKind) -> State:
    """Validate that ``state`` has the coordinate count of ``kind``."""
    if state.dim != kind.dim:
        raise DomainError(
            f"state has {state.dim} coordinates but model {kind.value!r} "
            f"expects {kind.dim}")
    return state


def state_from_components(kind: ModelKind, *, t=0.0, X=None, Y=None, Z=None,
                          Xdot=0.0, Ydot=0.0, Zdot=0.0) -> State:
    """Build a State from named components, requiring exactly those of ``kind``."""
    given = {"X": X, "Y": Y, "Z": Z}
    rates = {"X": Xdot, "Y": Ydot, "Z": Zdot}
    q, qdot = [], []
    for label in kind.labels:
        if given[label] is None:
            raise DomainError(f"model {kind.value!r} requires component {label}")
        q.append(float(given[label]))
        qdot.append(float(rates[label]))
    extra = [lbl for lbl, v in given.items() if v is not None and lbl not in kind.labels]
    if extra:
        raise DomainError(f"model {kind.value!r} does not take components {extra}")
    return State(t=t, q=np.array(q), qdot=np.array(qdot))


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional reference values: density, temperature (energy units),
    variances and particle mass.  ``Y0``/``Z0`` are required only when the
    model has the corresponding coordinate."""

    n0: float = 1.0
    T0: float = 1.0
    X0: float = 1.0
    Y0: float | None = None
    Z0: float | None = None
    m: float = 1.0

    def __post_init__(self):
        for name in ("n0", "T0", "X0", "m"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be strictly positive")
        for name in ("Y0", "Z0"):
            val = getattr(self, name)
            if val is not None and val <= 0.0:
                raise DomainError(f"{name} must be strictly positive when given")

    def _require(self, name: str, kind: ModelKind) -> float:
        val = getattr(self, name)
        if val is None:
            raise DomainError(f"model {kind.value!r} requires reference value {name}")
        return val


def reference_scales(params: PhysicalParams, kind: ModelKind) -> tuple[float, float]:
    """Return ``(length_scale, time_scale)`` of the rescaling for ``kind``.

    Dimensionless variables are ``q/length_scale`` and ``t/time_scale``; the
    velocity scale is ``sqrt(T0/m)`` for every model.
    """
    if kind is ModelKind.ONE_D:
        length = params.X0
    elif kind is ModelKind.TWO_D:
        length = math.sqrt(params.X0 * params._require("Y0", kind))
    elif kind is ModelKind.THREE_D:
        length = (params.X0 * params._require("Y0", kind)
                  * params._require("Z0", kind)) ** (1.0 / 3.0)
    elif kind is ModelKind.ELLIPTIC_3D:
        # Z is slaved to X, so the geometric mean uses X0 twice.
        length = (params.X0 ** 2 * params._require("Y0", kind)) ** (1.0 / 3.0)
    else:  # pragma: no cover
        raise UnsupportedModelError(str(kind))
    time = length * math.sqrt(params.m / params.T0)
    return length, time


def nondimensionalize(params: PhysicalParams, state: State, kind: ModelKind) -> State:
    """Map a dimensional state to the dimensionless variables of ``kind``."""
    check_state(state, kind)
    length, time = reference_scales(params, kind)
    vel = length / time  # = sqrt(T0/m)
    return State(t=state.t / time, q=state.q / length, qdot=state.qdot / vel)


def dimensionalize(params: PhysicalParams, state: State, kind: ModelKind) -> State:
    """Inverse of :func:`nondimensionalize`."""
    check_state(state, kind)
    length, time = reference_scales(params, kind)
    vel = length / time
    return State(t=state.t * time, q=state.q * length, qdot=state.qdot * vel)


_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class PolarState:
    """Polar view of a planar state: ``r`` radial, ``phi`` in (0, pi/2).

    ``ttilde`` is the reparametrized time where known (0.0 otherwise); it is
    carried along for bookkeeping and never used by the coordinate maps.
    """

    r: float
    phi: float
    rdot: float = 0.0
    phidot: float = 0.0
    ttilde: float = 0.0

    def __post_init__(self):
        if self.r <= 0.0:
            raise DomainError(f"r must be strictly positive, got {self.r}")
        if not 0.0 < self.phi < math.pi / 2.0:
            raise DomainError(f"phi must lie strictly inside (0, pi/2), got {self.phi}")


def to_polar(state: State, kind: ModelKind) -> PolarState:
    """Convert a planar state to polar coordinates.

    For the true 2-d model: X = r cos(phi), Y = r sin(phi).
    For the elliptic model the stretched map X = r cos(phi)/sqrt(2),
    Y = r sin(phi) is used, so r**2 = 2 X**2 + Y**2.
    """
    if kind not in (ModelKind.TWO_D, ModelKind.ELLIPTIC_3D):
        raise UnsupportedModelError(
            f"polar coordinates are defined for 2d/elliptic models, not {kind.value!r}")
    check_state(state, kind)
    X, Y = state.q
    Xd, Yd = state.qdot
    if kind is ModelKind.TWO_D:
        r = math.hypot(X, Y)
        phi = math.atan2(Y, X)
        rdot = (X * Xd + Y * Yd) / r
        phidot = (X * Yd - Y * Xd) / r ** 2
    elif kind is ModelKind.ELLIPTIC_3D:
        r = math.sqrt(2.0 * X * X + Y * Y)
        phi = math.atan2(Y, _SQRT2 * X)
        rdot = (2.0 * X * Xd + Y * Yd) / r
        phidot = _SQRT2 * (X * Yd - Y * Xd) / r ** 2
    return PolarState(r=r, phi=phi, rdot=rdot, phidot=phidot)


def to_cartesian(polar: PolarState, kind: ModelKind, t: float = 0.0) -> State:
    """Inverse of :func:`to_polar`; ``t`` restores the time stamp."""
    r, phi, rdot, phidot = polar.r, polar.phi, polar.rdot, polar.phidot
    c, s = math.cos(phi), math.sin(phi)
    if kind is ModelKind.TWO_D:
        q = np.array([r * c, r * s])
        qdot = np.array([rdot * c - r * phidot * s,
                         rdot * s + r * phidot * c])
    elif kind is ModelKind.ELLIPTIC_3D:
        q = np.array([r * c / _SQRT2, r * s])
        qdot = np.array([(rdot * c - r * phidot * s) / _SQRT2,
                         rdot * s + r * phidot * c])
    else:
        raise UnsupportedModelError(
            f"polar coordinates are defined for 2d/elliptic models, not {kind.value!r}")
    return State(t=t, q=q, qdot=qdot)
