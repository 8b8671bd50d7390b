"""Constant-mass damped harmonic oscillator in n dimensions.

Each component obeys

    q'' + 2 eta omega0 q' + omega0^2 q = 0,      eta = b / (2 m0 omega0).

Solutions are evaluated in real arithmetic for every regime.  The hyperbolic
pair cosh(beta t), sinh(beta t)/beta is computed through a single
regime-continuous kernel so nothing jumps at the critical point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence

import numpy as np

__all__ = [
    "DampingRegime",
    "Damping",
    "SolutionForm",
    "DhoParams",
    "AmplitudeVector",
    "classify_damping",
    "reference_solution",
    "reference_path",
    "reference_energy",
    "reference_energy_rate",
]

CRITICAL_TOL = 1e-12
# |beta^2| t^2 below this switches the kernel to its Taylor series
_KERNEL_SERIES = 1e-2


class DampingRegime(str, Enum):
    UNDER = "under"
    CRITICAL = "critical"
    OVER = "over"


class Damping(NamedTuple):
    regime: DampingRegime
    # damped angular frequency for UNDER, decay-rate spread beta for OVER, 0 at CRITICAL
    frequency: float


class SolutionForm(str, Enum):
    """Which reading of the reference solution to evaluate.

    PAPER keeps only the cosh term (plus optional B sinh terms);
    IC_CONSISTENT adds the sinh term that makes q'(0) = 0.
    """

    PAPER = "paper"
    IC_CONSISTENT = "ic_consistent"

    @classmethod
    def parse(cls, value) -> "SolutionForm":
        if isinstance(value, SolutionForm):
            return value
        v = str(value).strip().lower().replace("-", "_")
        if v in ("ic", "icconsistent"):
            v = "ic_consistent"
        try:
            return cls(v)
        except ValueError:
            raise ValueError(f"unknown form {value!r}; expected 'paper' or 'ic_consistent'") from None


@dataclass(frozen=True)
class DhoParams:
    omega0: float
    eta: float = 0.0
    m0: float = 1.0

    def __post_init__(self):
        for name, value in (("omega0", self.omega0), ("m0", self.m0)):
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
        if not (math.isfinite(self.eta) and self.eta >= 0):
            raise ValueError(f"eta must be finite and >= 0, got {self.eta!r}")

    @classmethod
    def from_damping_coefficient(cls, omega0: float, b: float, m0: float = 1.0) -> "DhoParams":
        if not b >= 0:
            raise ValueError(f"damping coefficient b must be >= 0, got {b!r}")
        return cls(omega0=omega0, eta=b / (2.0 * m0 * omega0), m0=m0)

    @property
    def b(self) -> float:
        return 2.0 * self.m0 * self.eta * self.omega0

    @property
    def decay_rate(self) -> float:
        """eta * omega0, the exponential envelope rate."""
        return self.eta * self.omega0

    @property
    def regime(self) -> DampingRegime:
        if abs(self.eta - 1.0) <= CRITICAL_TOL:
            return DampingRegime.CRITICAL
        return DampingRegime.UNDER if self.eta < 1.0 else DampingRegime.OVER

    @property
    def beta_squared(self) -> float:
        """omega0^2 (eta^2 - 1), forced to exactly 0 in the critical band."""
        if self.regime is DampingRegime.CRITICAL:
            return 0.0
        return self.omega0 ** 2 * (self.eta - 1.0) * (self.eta + 1.0)

    @property
    def beta(self) -> tuple[DampingRegime, float]:
        """beta = omega0 sqrt(eta^2 - 1) as (regime, magnitude)."""
        return self.regime, math.sqrt(abs(self.beta_squared))

    def with_omega(self, omega0: float) -> "DhoParams":
        return DhoParams(omega0=omega0, eta=self.eta, m0=self.m0)


@dataclass(frozen=True)
class AmplitudeVector:
    """Constants of the reference solution.

    ``B`` multiplies sinh(beta t)/beta (so it stays real and finite in
    every regime).  ``phase`` is only honoured when eta = 0.
    """

    A: tuple
    B: Optional[tuple] = None
    phase: float = 0.0

    def __post_init__(self):
        a = tuple(float(v) for v in np.atleast_1d(self.A))
        if not a or not all(math.isfinite(v) for v in a):
            raise ValueError("A must be a non-empty vector of finite reals")
        if math.sqrt(sum(v * v for v in a)) == 0.0:
            raise ValueError("A must not be the zero vector")
        object.__setattr__(self, "A", a)
        if self.B is not None:
            b = tuple(float(v) for v in np.atleast_1d(self.B))
            if len(b) != len(a):
                raise ValueError(f"B has length {len(b)}, A has length {len(a)}")
            object.__setattr__(self, "B", b)

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def a(self) -> np.ndarray:
        return np.array(self.A)

    @property
    def b(self) -> np.ndarray:
        return np.zeros(self.n) if self.B is None else np.array(self.B)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.A))

    def scaled(self, factor: float) -> "AmplitudeVector":
        b = None if self.B is None else tuple(factor * v for v in self.B)
        return AmplitudeVector(tuple(factor * v for v in self.A), b, self.phase)


def classify_damping(params: DhoParams) -> Damping:
    regime, mag = params.beta
    return Damping(regime, 0.0 if regime is DampingRegime.CRITICAL else mag)


def _kernel(params: DhoParams, t):
    """e^{-gamma t} C(t) and e^{-gamma t} S(t) with C = cosh(beta t), S = sinh(beta t)/beta."""
    t = np.asarray(t, dtype=float)
    gamma = params.decay_rate
    b2 = params.beta_squared
    z = b2 * t * t
    series = np.abs(z) < _KERNEL_SERIES
    # Taylor branch: C = sum z^k/(2k)!, S = t sum z^k/(2k+1)!
    c_ser = np.ones_like(t)
    s_ser = np.ones_like(t)
    term_c = np.ones_like(t)
    term_s = np.ones_like(t)
    for k in range(1, 9):
        term_c = term_c * z / ((2 * k - 1) * (2 * k))
        term_s = term_s * z / ((2 * k) * (2 * k + 1))
        c_ser = c_ser + term_c
        s_ser = s_ser + term_s
    env = np.exp(-gamma * t)
    ec = env * c_ser
    es = env * t * s_ser
    if b2 > 0:
        beta = math.sqrt(b2)
        # split the exponentials so large t cannot overflow cosh
        grow = np.exp((beta - gamma) * t)
        fall = np.exp(-(beta + gamma) * t)
        ec = np.where(series, ec, 0.5 * (grow + fall))
        es = np.where(series, es, 0.5 * (grow - fall) / beta)
    elif b2 < 0:
        wd = math.sqrt(-b2)
        ec = np.where(series, ec, env * np.cos(wd * t))
        es = np.where(series, es, env * np.sin(wd * t) / wd)
    return ec, es


def reference_path(params: DhoParams, amps: AmplitudeVector, t,
                   form: SolutionForm = SolutionForm.PAPER):
    """Vectorised reference solution.

    Returns ``(q, qdot)``, each of shape ``t.shape + (n,)``.
    """
    form = SolutionForm.parse(form)
    t = np.asarray(t, dtype=float)
    a = amps.a
    w = params.omega0
    if params.eta == 0.0 and amps.phase != 0.0:
        arg = (w * t + amps.phase)[..., None]
        return a * np.cos(arg), -w * a * np.sin(arg)
    gamma = params.decay_rate
    b2 = params.beta_squared
    ec, es = _kernel(params, t)
    ec = ec[..., None]
    es = es[..., None]
    dec = -gamma * ec + b2 * es
    des = ec - gamma * es
    if form is SolutionForm.IC_CONSISTENT:
        q = a * (ec + gamma * es)
        # (b2 - gamma^2) = -omega0^2 keeps qdot(0) exactly zero
        qdot = -(w * w) * a * es
        return q, qdot
    bb = amps.b
    return a * ec + bb * es, a * dec + bb * des


def reference_solution(params: DhoParams, amps: AmplitudeVector, t: float,
                       form: SolutionForm = SolutionForm.PAPER):
    """q(t) and q'(t) for one time; both length-n arrays."""
    q, qdot = reference_path(params, amps, np.float64(t), form)
    return np.asarray(q).reshape(-1), np.asarray(qdot).reshape(-1)


def reference_energy(params: DhoParams, q, qdot) -> float:
    q = np.asarray(q, dtype=float)
    qdot = np.asarray(qdot, dtype=float)
    return 0.5 * params.m0 * (float(np.sum(qdot ** 2)) + params.omega0 ** 2 * float(np.sum(q ** 2)))


def reference_energy_rate(params: DhoParams, qdot: Sequence[float]) -> float:
    """dE/dt = -2 eta omega0 m0 sum(qdot^2)."""
    qdot = np.asarray(qdot, dtype=float)
    return -2.0 * params.eta * params.omega0 * params.m0 * float(np.sum(qdot ** 2))
