"""Point canonical transformation between the constant-mass and PDM frames.

The forward map sends a PDM position x to q = sqrt(Q(r)) x and velocities
transform as qdot = sqrt(m(r)) xdot.  Mapping the damped-oscillator
reference solution q(t) back through the inverse gives closed-form PDM
trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dho_core import AmplitudeVector, DampingRegime, DhoParams, SolutionForm, reference_path
from .errors import DomainError
from .profiles import Branch, MorseExp, NdimML, ProfilePair, SingularRational

__all__ = [
    "PdmScenario",
    "forward_map",
    "inverse_map",
    "pdm_solution",
    "pdm_path",
    "crosses_origin",
    "admissible_amplitude",
]


def _as_vector(v) -> np.ndarray:
    return np.atleast_1d(np.asarray(v, dtype=float))


def _check_dimension(profile: ProfilePair, n: int) -> None:
    if n != profile.dimension:
        raise ValueError(f"{profile.family} has dimension {profile.dimension}, got a {n}-vector")


@dataclass(frozen=True)
class PdmScenario:
    """A PDM oscillator together with the reference solution it inherits."""

    profile: ProfilePair
    params: DhoParams
    amps: AmplitudeVector
    branch: Branch = Branch.PLUS
    t_span: tuple = (0.0, 20.0)
    form: SolutionForm = SolutionForm.PAPER
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "branch", Branch.parse(self.branch))
        object.__setattr__(self, "form", SolutionForm.parse(self.form))
        t0, t1 = (float(v) for v in self.t_span)
        if not t1 > t0:
            raise ValueError(f"t_span must be increasing, got {self.t_span!r}")
        object.__setattr__(self, "t_span", (t0, t1))
        _check_dimension(self.profile, self.amps.n)
        if self.amps.B is not None:
            a, b = self.amps.a, self.amps.b
            # the motion must stay on the line spanned by A
            cross = b - (b @ a) / (a @ a) * a
            if np.linalg.norm(cross) > 1e-12 * max(1.0, np.linalg.norm(b)):
                raise ValueError("B must be collinear with A (no rotational motion)")
        if isinstance(self.profile, NdimML) and self.profile.lam * self.amps.norm >= 1.0:
            raise DomainError(
                f"ndim_ml requires lambda*|A| < 1; got {self.profile.lam}*{self.amps.norm:g}")

    @property
    def n(self) -> int:
        return self.amps.n

    @property
    def regime(self) -> DampingRegime:
        return self.params.regime

    def describe(self) -> str:
        if self.label:
            return self.label
        return (f"{self.profile.family} eta={self.params.eta:g} |A|={self.amps.norm:g} "
                f"branch={self.branch.value}")

    def replace(self, **changes) -> "PdmScenario":
        from dataclasses import replace
        return replace(self, **changes)


def forward_map(profile: ProfilePair, x) -> np.ndarray:
    """q = sqrt(Q(r)) x."""
    x = _as_vector(x)
    _check_dimension(profile, x.size)
    s = profile.coordinate(x)
    profile.check(s)
    if not profile.radial:
        return np.array([float(profile._radial_map(np.asarray(s)))])
    return math.sqrt(float(profile._deformation(np.asarray(s)))) * x


def inverse_map(profile: ProfilePair, q, branch: Branch = Branch.PLUS) -> np.ndarray:
    """x with forward_map(x) = q.

    For the singular family the MINUS branch returns the second root of
    q^2 = x^2/(1 - lam x), which the forward map sends to -q.
    """
    q = _as_vector(q)
    _check_dimension(profile, q.size)
    branch = Branch.parse(branch)
    x = _inverse_rows(profile, q[None, :], branch)[0]
    return x


def _inverse_rows(profile: ProfilePair, q: np.ndarray, branch: Branch) -> np.ndarray:
    """Row-wise inverse map for an array of shape (T, n)."""
    if not profile.radial:
        return np.asarray(profile._inverse(q, branch), dtype=float).reshape(q.shape)
    s = np.sqrt(np.sum(q * q, axis=-1))
    r = np.asarray(profile._inverse(s, branch), dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(s > 0.0, r / np.where(s > 0.0, s, 1.0), 1.0)
    return q * scale[:, None]


def pdm_path(s: PdmScenario, t, oracle_params: DhoParams | None = None):
    """Closed-form PDM trajectory at an array of times.

    Returns ``(x, xdot, q)`` with shape ``(T, n)`` each; ``q`` is the
    reference solution.  ``oracle_params`` swaps the oscillator parameters
    used for the reference (mutation testing only).
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    params = s.params if oracle_params is None else oracle_params
    q, qdot = reference_path(params, s.amps, t, s.form)
    x = _inverse_rows(s.profile, q, s.branch)
    coord = (np.sqrt(np.sum(x * x, axis=-1)) if s.profile.radial else x[:, 0])
    s.profile.check(coord)
    sign = -1.0 if (isinstance(s.profile, SingularRational) and s.branch is Branch.MINUS) else 1.0
    xdot = sign * qdot / np.sqrt(s.profile._mass(coord))[:, None]
    return x, xdot, q


def pdm_solution(s: PdmScenario, t: float):
    """x(t) and xdot(t) of the closed-form PDM trajectory."""
    x, xdot, _ = pdm_path(s, np.array([float(t)]))
    return x[0], xdot[0]


def crosses_origin(s: PdmScenario, samples: int = 4001) -> bool:
    """True if the reference q(t) changes sign (or vanishes) inside t_span."""
    t = np.linspace(*s.t_span, samples)
    q, _ = reference_path(s.params, s.amps, t, s.form)
    proj = q @ (s.amps.a / s.amps.norm)
    return bool(np.any(proj <= 0.0))


def admissible_amplitude(profile: ProfilePair, params: DhoParams, t_span=(0.0, 20.0),
                         form: SolutionForm = SolutionForm.PAPER, samples: int = 20001) -> float:
    """Supremum of |A| keeping the inverse map defined along the whole span.

    Only the Morse family (lam q + 1 > 0) and the n-dimensional ML family
    (lam |q| < 1) restrict the amplitude; every other family returns inf.
    """
    if not isinstance(profile, (MorseExp, NdimML)):
        return math.inf
    t = np.linspace(float(t_span[0]), float(t_span[1]), samples)
    unit = AmplitudeVector((1.0,))
    q, _ = reference_path(params, unit, t, form)
    q = q[:, 0]
    if isinstance(profile, MorseExp):
        worst = -float(np.min(q))
    else:
        worst = float(np.max(np.abs(q)))
    if worst <= 0.0:
        return math.inf
    return 1.0 / (profile.lam * worst)
