"""Equations of motion, momenta and energy bookkeeping in the PDM frame.

The PDM damped oscillator obeys, component by component,

    xddot_i = -k(r) v^2 x_i - 2 eta omega0 xdot_i - sqrt(Q/m) omega0^2 x_i

with k(r) = m'(r) / (2 r m(r)) and v^2 = sum_j xdot_j^2.  In one dimension
this is the mixed Lienard equation xddot + f xdot^2 + h xdot + g = 0.

The Rayleigh function is R = (b/2) m(r) sum xdot_j^2 with b = 2 m0 eta omega0,
so that its velocity gradient reproduces the 2 eta omega0 xdot damping term
and the dissipated power equals -2R.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dho_core import DhoParams
from .profiles import ProfilePair

__all__ = [
    "PhaseState",
    "LienardCoefficients",
    "EnergyLedger",
    "lienard_coefficients",
    "eom_rhs",
    "acceleration",
    "momentum",
    "energy",
    "energy_series",
    "hamiltonian",
    "rayleigh",
]


@dataclass(frozen=True, eq=False)
class PhaseState:
    t: float
    x: np.ndarray
    xdot: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float)).copy()
        v = np.atleast_1d(np.asarray(self.xdot, dtype=float)).copy()
        if x.shape != v.shape:
            raise ValueError(f"x has shape {x.shape}, xdot has shape {v.shape}")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xdot", v)

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def r(self) -> float:
        return float(np.sqrt(self.x @ self.x))

    @property
    def speed_squared(self) -> float:
        return float(self.xdot @ self.xdot)


@dataclass(frozen=True)
class LienardCoefficients:
    """f, h, g of xddot + f(x) xdot^2 + h(x) xdot + g(x) = 0 (one dimension)."""

    f: Callable[[float], float]
    h: Callable[[float], float]
    g: Callable[[float], float]


@dataclass(frozen=True)
class EnergyLedger:
    kinetic: float
    potential: float
    total: float
    rayleigh_power: float


def lienard_coefficients(profile: ProfilePair, params: DhoParams) -> LienardCoefficients:
    if profile.dimension != 1:
        raise ValueError("Lienard coefficients are defined for one-dimensional motion")
    w2 = params.omega0 ** 2
    damping = 2.0 * params.eta * params.omega0

    if profile.radial:
        # the radial coupling carries an explicit 1/r, so f = k(|x|) x
        def f(x):
            return float(profile.velocity_coupling(abs(x))) * x

        def g(x):
            return float(profile.restoring_ratio(abs(x))) * w2 * x
    else:
        def f(x):
            return float(profile.velocity_coupling(x))

        def g(x):
            return float(profile.restoring_ratio(x)) * w2 * x

    return LienardCoefficients(f=f, h=lambda x: damping, g=g)


def eom_rhs(profile: ProfilePair, params: DhoParams, s: PhaseState) -> np.ndarray:
    """Accelerations of the PDM damped oscillator at one phase state."""
    if s.n != profile.dimension:
        raise ValueError(f"{profile.family} has dimension {profile.dimension}, state has {s.n}")
    if s.n == 1:
        c = lienard_coefficients(profile, params)
        x, v = float(s.x[0]), float(s.xdot[0])
        return np.array([-c.f(x) * v * v - c.h(x) * v - c.g(x)])
    r = s.r
    k = float(profile.velocity_coupling(r))
    ratio = float(profile.restoring_ratio(r))
    return (-k * s.speed_squared * s.x
            - 2.0 * params.eta * params.omega0 * s.xdot
            - ratio * params.omega0 ** 2 * s.x)


def acceleration(profile: ProfilePair, params: DhoParams) -> Callable:
    """Fast ``accel(t, x, xdot)`` closure for the integrator.

    Same formula as :func:`eom_rhs`, without building PhaseState objects.
    """
    damping = 2.0 * params.eta * params.omega0
    w2 = params.omega0 ** 2
    radial = profile.radial

    def accel(t, x, xdot):
        if radial:
            s = float(np.sqrt(x @ x))
            k = float(profile.velocity_coupling(s))
            ratio = float(profile.restoring_ratio(s))
            return -k * float(xdot @ xdot) * x - damping * xdot - ratio * w2 * x
        s = float(x[0])
        f = float(profile.velocity_coupling(s))
        ratio = float(profile.restoring_ratio(s))
        return -f * xdot * xdot - damping * xdot - ratio * w2 * x

    return accel


def momentum(profile: ProfilePair, s: PhaseState, m0: float = 1.0) -> np.ndarray:
    """p_i = m0 m(r) xdot_i."""
    return m0 * float(profile.mass(profile.coordinate(s.x))) * s.xdot


def rayleigh(profile: ProfilePair, params: DhoParams, s: PhaseState) -> float:
    return 0.5 * params.b * float(profile.mass(profile.coordinate(s.x))) * s.speed_squared


def energy(profile: ProfilePair, params: DhoParams, s: PhaseState) -> EnergyLedger:
    c = profile.coordinate(s.x)
    m = float(profile.mass(c))
    # sqrt(Q) r in closed form, so V = (1/2) m0 omega0^2 Q r^2 without cancellation
    qr = float(profile.radial_map(c))
    kinetic = 0.5 * params.m0 * m * s.speed_squared
    potential = 0.5 * params.m0 * params.omega0 ** 2 * qr * qr
    return EnergyLedger(kinetic=kinetic, potential=potential, total=kinetic + potential,
                        rayleigh_power=-2.0 * rayleigh(profile, params, s))


def energy_series(profile: ProfilePair, params: DhoParams, x, xdot) -> EnergyLedger:
    """Vectorised :func:`energy` over rows of ``x`` and ``xdot`` (shape (T, n)).

    Fields of the returned ledger are arrays of length T.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    v = np.atleast_2d(np.asarray(xdot, dtype=float))
    c = np.sqrt(np.sum(x * x, axis=1)) if profile.radial else x[:, 0]
    profile.check(c)
    m = profile._mass(c)
    qr = profile._radial_map(c)
    v2 = np.sum(v * v, axis=1)
    kinetic = 0.5 * params.m0 * m * v2
    potential = 0.5 * params.m0 * params.omega0 ** 2 * qr * qr
    return EnergyLedger(kinetic=kinetic, potential=potential, total=kinetic + potential,
                        rayleigh_power=-params.b * m * v2)


def hamiltonian(profile: ProfilePair, params: DhoParams, x, p) -> float:
    """H = |p|^2 / (2 m0 m(r)) + V(r)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    c = profile.coordinate(x)
    qr = float(profile.radial_map(c))
    return (float(p @ p) / (2.0 * params.m0 * float(profile.mass(c)))
            + 0.5 * params.m0 * params.omega0 ** 2 * qr * qr)
