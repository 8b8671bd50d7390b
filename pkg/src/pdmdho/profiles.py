"""Mass profiles m(r) and their partner coordinate deformations Q(r).

A profile pair ties a position-dependent mass to the deformation of the
coordinates that produces it through the point transformation

    q = sqrt(Q(r)) * r,        sqrt(m) = sqrt(Q) * (1 + Q' r / (2 Q)).

Two kinds of profile exist.  *Radial* profiles (``radial = True``) are
functions of the Euclidean norm r = |x| and work in any dimension.  The
one-dimensional families (``radial = False``) are functions of the signed
coordinate x and only make sense for n = 1.

All closed-form methods are vectorised over numpy arrays.  The public
accessors (``mass``, ``deformation`` and their derivatives) check the
validity domain first and raise :class:`DomainError` outside of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, ClassVar

import numpy as np
from scipy import integrate as _quad
from scipy import optimize

from .errors import ConvergenceError, DomainError, QuadratureError

__all__ = [
    "Branch",
    "Domain",
    "ProfilePair",
    "Uniform",
    "MathewsLakshmanan",
    "SingularRational",
    "MorseExp",
    "NdimML",
    "PowerLaw",
    "CustomProfile",
    "FAMILIES",
    "make_profile",
    "eval_mass",
    "eval_mass_deriv",
    "eval_deformation",
    "eval_deformation_deriv",
    "deformation_from_mass",
    "mass_from_deformation",
]

# below this |u| the removable singularities of Q are replaced by their limit
_LIMIT_CUTOFF = 1e-8
# below this |u| derivative quotients switch to a Taylor series
_SERIES_CUTOFF = 1e-2


class Branch(str, Enum):
    """Root selector for the two-valued inverse of the singular family."""

    PLUS = "plus"
    MINUS = "minus"

    @classmethod
    def parse(cls, value) -> "Branch":
        if isinstance(value, Branch):
            return value
        v = str(value).strip().lower()
        aliases = {"+": "plus", "-": "minus"}
        try:
            return cls(aliases.get(v, v))
        except ValueError:
            raise ValueError(f"unknown branch {value!r}; expected 'plus' or 'minus'") from None


@dataclass(frozen=True)
class Domain:
    """Real interval of admissible coordinates."""

    lo: float = -math.inf
    hi: float = math.inf
    lo_open: bool = True
    hi_open: bool = True

    def contains(self, r):
        r = np.asarray(r, dtype=float)
        above = (r > self.lo) if self.lo_open else (r >= self.lo)
        below = (r < self.hi) if self.hi_open else (r <= self.hi)
        return above & below & np.isfinite(r)

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


def _asinhc(u):
    """asinh(u)/u with its limit 1 at u = 0."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < _LIMIT_CUTOFF
    safe = np.where(small, 1.0, u)
    return np.where(small, 1.0 - u * u / 6.0, np.arcsinh(safe) / safe)


def _asinhc_deriv(u):
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < _SERIES_CUTOFF
    safe = np.where(small, 1.0, u)
    closed = (safe / np.sqrt(1.0 + safe * safe) - np.arcsinh(safe)) / (safe * safe)
    u2 = u * u
    series = u * (-1.0 / 3.0 + u2 * (3.0 / 10.0 + u2 * (-15.0 / 56.0
                  + u2 * (35.0 / 144.0 - u2 * 315.0 / 1408.0))))
    return np.where(small, series, closed)


def _expm1c(u):
    """expm1(u)/u with its limit 1 at u = 0."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < _LIMIT_CUTOFF
    safe = np.where(small, 1.0, u)
    return np.where(small, 1.0 + 0.5 * u, np.expm1(safe) / safe)


def _expm1c_deriv(u):
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < _SERIES_CUTOFF
    safe = np.where(small, 1.0, u)
    closed = (safe * np.exp(safe) - np.expm1(safe)) / (safe * safe)
    series = 0.5 + u * (1.0 / 3.0 + u * (1.0 / 8.0 + u * (1.0 / 30.0 + u * (
        1.0 / 144.0 + u * (1.0 / 840.0 + u * (1.0 / 5760.0))))))
    return np.where(small, series, closed)


def _as_output(value, like):
    return float(value) if np.ndim(like) == 0 else np.asarray(value, dtype=float)


def _require_positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be a finite positive number, got {value!r}")


def _require_dimension(n):
    if not (isinstance(n, int) and n >= 1):
        raise ValueError(f"dimension must be a positive integer, got {n!r}")


class ProfilePair:
    """Base class of every mass/deformation pair.

    Subclasses provide the closed forms ``_mass``, ``_mass_deriv``,
    ``_deformation`` and ``_deformation_deriv`` (no domain checks) plus,
    where one exists, a closed-form inverse of the radial map.
    """

    family: ClassVar[str] = "abstract"
    radial: ClassVar[bool] = True

    # -- validity ---------------------------------------------------------

    @property
    def domain(self) -> Domain:
        raise NotImplementedError

    def check(self, r) -> None:
        inside = self.domain.contains(r)
        if not np.all(inside):
            bad = np.asarray(r, dtype=float)[~np.asarray(inside)]
            raise DomainError(
                f"{self.family}: coordinate {float(bad.flat[0])!r} outside validity domain {self.domain}"
            )

    def boundary_distance(self, s: float) -> float:
        """Distance from a finite singular edge of the domain.

        The origin is never reported: for profiles that exclude r = 0 it is
        the equilibrium the motion relaxes towards, not a wall.
        """
        return math.inf

    def coordinate(self, x) -> float:
        """Scalar argument of the profile for an n-vector position."""
        x = np.asarray(x, dtype=float).reshape(-1)
        if self.radial:
            return float(np.sqrt(np.dot(x, x)))
        if x.size != 1:
            raise ValueError(f"{self.family} is one-dimensional; got a {x.size}-vector")
        return float(x[0])

    # -- checked accessors ------------------------------------------------

    def mass(self, r):
        self.check(r)
        return _as_output(self._mass(np.asarray(r, dtype=float)), r)

    def mass_deriv(self, r):
        self.check(r)
        return _as_output(self._mass_deriv(np.asarray(r, dtype=float)), r)

    def deformation(self, r):
        self.check(r)
        return _as_output(self._deformation(np.asarray(r, dtype=float)), r)

    def deformation_deriv(self, r):
        self.check(r)
        return _as_output(self._deformation_deriv(np.asarray(r, dtype=float)), r)

    def radial_map(self, r):
        """sqrt(Q(r)) * r, the scalar part of the point transformation."""
        self.check(r)
        return _as_output(self._radial_map(np.asarray(r, dtype=float)), r)

    def restoring_ratio(self, r):
        """sqrt(Q/m), the factor in front of omega0^2 x in the equation of motion."""
        self.check(r)
        r = np.asarray(r, dtype=float)
        return _as_output(np.sqrt(self._deformation(r) / self._mass(r)), r)

    def velocity_coupling(self, r):
        """Coefficient of the velocity-squared term.

        Radial profiles return m'(r) / (2 r m(r)), finite at r = 0 for smooth
        even masses; one-dimensional profiles return m'(x) / (2 m(x)).
        """
        self.check(r)
        r = np.asarray(r, dtype=float)
        return _as_output(self._coupling(r), r)

    # -- closed forms, overridden per family -------------------------------

    def _mass(self, r):
        raise NotImplementedError

    def _mass_deriv(self, r):
        raise NotImplementedError

    def _deformation(self, r):
        raise NotImplementedError

    def _deformation_deriv(self, r):
        raise NotImplementedError

    def _radial_map(self, r):
        return np.sqrt(self._deformation(r)) * r

    def _coupling(self, r):
        if self.radial:
            return self._mass_deriv(r) / (2.0 * r * self._mass(r))
        return self._mass_deriv(r) / (2.0 * self._mass(r))

    def _inverse(self, s, branch: Branch = Branch.PLUS):
        """Solve radial_map(r) = s; numeric unless a family overrides it."""
        return np.vectorize(lambda v: _solve_radial(self, float(v)), otypes=[float])(s)

    def inverse_radial(self, s, branch: Branch = Branch.PLUS):
        out = self._inverse(np.asarray(s, dtype=float), branch)
        return _as_output(out, s)


def _solve_radial(profile: ProfilePair, s: float, max_iter: int = 200) -> float:
    """Safeguarded root solve of sqrt(Q(r)) r = s on the profile's domain."""
    dom = profile.domain

    def phi(r):
        return float(profile._radial_map(np.asarray(r, dtype=float))) - s

    if profile.radial and s < 0:
        raise DomainError(f"{profile.family}: radial image is non-negative, got {s!r}")
    origin = 0.0 if dom.contains(0.0) else dom.lo + 1e-300
    if s == 0.0 and dom.contains(0.0):
        return 0.0
    # march outward from the origin until the bracket changes sign
    edge = dom.hi if s > 0 else dom.lo
    inner, outer = origin, (1.0 if s > 0 else -1.0)
    for _ in range(max_iter):
        if not dom.contains(outer):
            outer = 0.5 * (inner + edge)
        try:
            reached = phi(outer) * np.sign(s) >= 0.0
        except (QuadratureError, FloatingPointError, OverflowError) as exc:
            # a saturating map: the profile cannot be evaluated far enough out
            raise DomainError(f"{profile.family}: value {s!r} is outside the reachable image "
                              f"of the radial map (failed at r = {outer!r})") from exc
        if reached:
            break
        inner, outer = outer, 2.0 * outer
    else:
        raise DomainError(f"{profile.family}: value {s!r} is outside the image of the radial map")
    a, b = sorted((inner, outer))
    root, info = optimize.brentq(phi, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                                 maxiter=max_iter, full_output=True, disp=False)
    if not info.converged:
        raise ConvergenceError(
            f"{profile.family}: radial inverse did not converge in {max_iter} iterations")
    return root


# -- built-in families ------------------------------------------------------


@dataclass(frozen=True)
class Uniform(ProfilePair):
    """Constant mass m = 1, Q = 1."""

    dimension: int = 1

    family: ClassVar[str] = "uniform"
    radial: ClassVar[bool] = True

    def __post_init__(self):
        _require_dimension(self.dimension)

    @property
    def domain(self) -> Domain:
        return Domain()

    def _mass(self, r):
        return np.ones_like(r, dtype=float)

    def _mass_deriv(self, r):
        return np.zeros_like(r, dtype=float)

    _deformation = _mass
    _deformation_deriv = _mass_deriv

    def _radial_map(self, r):
        return np.asarray(r, dtype=float) * 1.0

    def _coupling(self, r):
        return np.zeros_like(r, dtype=float)

    def _inverse(self, s, branch=Branch.PLUS):
        return np.asarray(s, dtype=float) * 1.0


@dataclass(frozen=True)
class MathewsLakshmanan(ProfilePair):
    """m(x) = 1/(1 + lam^2 x^2); sqrt(Q) x = asinh(lam x)/lam."""

    lam: float

    family: ClassVar[str] = "mathews_lakshmanan"
    radial: ClassVar[bool] = False
    dimension: ClassVar[int] = 1

    def __post_init__(self):
        _require_positive("lambda", self.lam)

    @property
    def domain(self) -> Domain:
        return Domain()

    def _mass(self, x):
        u = self.lam * x
        return 1.0 / (1.0 + u * u)

    def _mass_deriv(self, x):
        u = self.lam * x
        return -2.0 * self.lam * u / (1.0 + u * u) ** 2

    def _deformation(self, x):
        g = _asinhc(self.lam * x)
        return g * g

    def _deformation_deriv(self, x):
        u = self.lam * x
        return 2.0 * self.lam * _asinhc(u) * _asinhc_deriv(u)

    def _radial_map(self, x):
        return np.arcsinh(self.lam * x) / self.lam

    def _coupling(self, x):
        u = self.lam * x
        return -self.lam * u / (1.0 + u * u)

    def _inverse(self, q, branch=Branch.PLUS):
        return np.sinh(self.lam * np.asarray(q, dtype=float)) / self.lam


def _plus_root(q, lam):
    """x_+ solving x / sqrt(1 - lam x) = q, in a cancellation-free form."""
    q = np.asarray(q, dtype=float)
    disc = np.sqrt((lam * q) ** 2 + 4.0)
    pos = 2.0 * q / (disc + lam * q)
    neg = 0.5 * q * (disc - lam * q)
    return np.where(q >= 0.0, pos, neg)


@dataclass(frozen=True)
class SingularRational(ProfilePair):
    """Q(x) = 1/(1 - lam x), m(x) = (2 - lam x)^2 / (4 (1 - lam x)^3).

    Valid for lam x < 1.  The mass diverges at the wall x = 1/lam.
    """

    lam: float

    family: ClassVar[str] = "singular_rational"
    radial: ClassVar[bool] = False
    dimension: ClassVar[int] = 1

    def __post_init__(self):
        _require_positive("lambda", self.lam)

    @property
    def domain(self) -> Domain:
        return Domain(-math.inf, 1.0 / self.lam)

    def boundary_distance(self, s: float) -> float:
        return 1.0 / self.lam - s

    def _mass(self, x):
        u = self.lam * x
        return (2.0 - u) ** 2 / (4.0 * (1.0 - u) ** 3)

    def _mass_deriv(self, x):
        u = self.lam * x
        return self.lam * (2.0 - u) * (4.0 - u) / (4.0 * (1.0 - u) ** 4)

    def _deformation(self, x):
        return 1.0 / (1.0 - self.lam * x)

    def _deformation_deriv(self, x):
        return self.lam / (1.0 - self.lam * x) ** 2

    def _radial_map(self, x):
        return x / np.sqrt(1.0 - self.lam * x)

    def _coupling(self, x):
        u = self.lam * x
        return self.lam * (4.0 - u) / (2.0 * (1.0 - u) * (2.0 - u))

    def _inverse(self, q, branch=Branch.PLUS):
        q = np.asarray(q, dtype=float)
        if branch == Branch.MINUS:
            # x_- of the two-root formula equals x_+ evaluated at -q
            return _plus_root(-q, self.lam)
        return _plus_root(q, self.lam)


@dataclass(frozen=True)
class MorseExp(ProfilePair):
    """m(x) = exp(2 lam x); sqrt(Q) x = (exp(lam x) - 1)/lam."""

    lam: float

    family: ClassVar[str] = "morse_exp"
    radial: ClassVar[bool] = False
    dimension: ClassVar[int] = 1

    def __post_init__(self):
        _require_positive("lambda", self.lam)

    @property
    def domain(self) -> Domain:
        return Domain()

    def _mass(self, x):
        return np.exp(2.0 * self.lam * x)

    def _mass_deriv(self, x):
        return 2.0 * self.lam * np.exp(2.0 * self.lam * x)

    def _deformation(self, x):
        h = _expm1c(self.lam * x)
        return h * h

    def _deformation_deriv(self, x):
        u = self.lam * x
        return 2.0 * self.lam * _expm1c(u) * _expm1c_deriv(u)

    def _radial_map(self, x):
        return np.expm1(self.lam * x) / self.lam

    def _coupling(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.lam)

    def _inverse(self, q, branch=Branch.PLUS):
        q = np.asarray(q, dtype=float)
        arg = self.lam * q
        if np.any(arg <= -1.0):
            raise DomainError(
                f"morse_exp: lam*q + 1 must stay positive (lam={self.lam}, min q={np.min(q)!r})")
        return np.log1p(arg) / self.lam


@dataclass(frozen=True)
class NdimML(ProfilePair):
    """Radial Q(r) = 1/(1 + lam^2 r^2), m(r) = (1 + lam^2 r^2)^-3."""

    lam: float
    dimension: int = 1

    family: ClassVar[str] = "ndim_ml"
    radial: ClassVar[bool] = True

    def __post_init__(self):
        _require_positive("lambda", self.lam)
        _require_dimension(self.dimension)

    @property
    def domain(self) -> Domain:
        return Domain(0.0, math.inf, lo_open=False)

    def _mass(self, r):
        return (1.0 + (self.lam * r) ** 2) ** -3

    def _mass_deriv(self, r):
        u = self.lam * r
        return -6.0 * self.lam * u * (1.0 + u * u) ** -4

    def _deformation(self, r):
        return 1.0 / (1.0 + (self.lam * r) ** 2)

    def _deformation_deriv(self, r):
        u = self.lam * r
        return -2.0 * self.lam * u / (1.0 + u * u) ** 2

    def _radial_map(self, r):
        return r / np.sqrt(1.0 + (self.lam * r) ** 2)

    def _coupling(self, r):
        return -3.0 * self.lam ** 2 / (1.0 + (self.lam * r) ** 2)

    def _inverse(self, s, branch=Branch.PLUS):
        s = np.asarray(s, dtype=float)
        if np.any(self.lam * s >= 1.0):
            raise DomainError(
                f"ndim_ml: |q| must stay below 1/lam = {1.0 / self.lam!r}, got {np.max(s)!r}")
        return s / np.sqrt(1.0 - (self.lam * s) ** 2)


@dataclass(frozen=True)
class PowerLaw(ProfilePair):
    """Radial power law with sqrt(Q) = alpha r^sigma, m = alpha^2 (sigma+1)^2 r^(2 sigma).

    The radial map is q = alpha r^(sigma+1).  For sigma != 0 the origin is
    excluded (the mass vanishes or diverges there).
    """

    alpha: float
    sigma: float
    dimension: int = 1

    family: ClassVar[str] = "power_law"
    radial: ClassVar[bool] = True

    def __post_init__(self):
        _require_positive("alpha", self.alpha)
        if not (math.isfinite(self.sigma) and self.sigma > -1.0):
            raise ValueError(f"sigma must be > -1, got {self.sigma!r}")
        _require_dimension(self.dimension)

    @property
    def domain(self) -> Domain:
        if self.sigma == 0.0:
            return Domain(0.0, math.inf, lo_open=False)
        return Domain(0.0, math.inf, lo_open=True)

    def _mass(self, r):
        a, s = self.alpha, self.sigma
        return a * a * (s + 1.0) ** 2 * np.asarray(r, dtype=float) ** (2.0 * s)

    def _mass_deriv(self, r):
        a, s = self.alpha, self.sigma
        if s == 0.0:
            return np.zeros_like(np.asarray(r, dtype=float))
        return 2.0 * s * a * a * (s + 1.0) ** 2 * np.asarray(r, dtype=float) ** (2.0 * s - 1.0)

    def _deformation(self, r):
        return self.alpha ** 2 * np.asarray(r, dtype=float) ** (2.0 * self.sigma)

    def _deformation_deriv(self, r):
        s = self.sigma
        if s == 0.0:
            return np.zeros_like(np.asarray(r, dtype=float))
        return 2.0 * s * self.alpha ** 2 * np.asarray(r, dtype=float) ** (2.0 * s - 1.0)

    def _radial_map(self, r):
        return self.alpha * np.asarray(r, dtype=float) ** (self.sigma + 1.0)

    def _coupling(self, r):
        if self.sigma == 0.0:
            return np.zeros_like(np.asarray(r, dtype=float))
        return self.sigma / np.asarray(r, dtype=float) ** 2

    def _inverse(self, s, branch=Branch.PLUS):
        s = np.asarray(s, dtype=float)
        if self.sigma != 0.0 and np.any(s <= 0.0):
            raise DomainError("power_law: the origin q = 0 is outside the domain for sigma != 0")
        return (s / self.alpha) ** (1.0 / (self.sigma + 1.0))


@dataclass(frozen=True)
class CustomProfile(ProfilePair):
    """User-supplied mass with Q reconstructed by quadrature.

    ``mass_fn`` and ``mass_deriv_fn`` take and return floats.  Q follows from
    the integral mean of sqrt(m); Q' from the algebraic m-Q relation.  The
    inverse map is a numeric radial root solve.
    """

    mass_fn: Callable[[float], float]
    mass_deriv_fn: Callable[[float], float]
    is_radial: bool = True
    dimension: int = 1
    valid: Domain = Domain(0.0, math.inf, lo_open=False)
    quad_tol: float = 1e-12

    family: ClassVar[str] = "custom"

    def __post_init__(self):
        _require_dimension(self.dimension)
        if not self.is_radial and self.dimension != 1:
            raise ValueError("a non-radial custom profile must be one-dimensional")

    @property
    def radial(self) -> bool:  # type: ignore[override]
        return self.is_radial

    @property
    def domain(self) -> Domain:
        return self.valid

    def _mass(self, r):
        return np.vectorize(lambda v: float(self.mass_fn(float(v))), otypes=[float])(r)

    def _mass_deriv(self, r):
        return np.vectorize(lambda v: float(self.mass_deriv_fn(float(v))), otypes=[float])(r)

    def _deformation(self, r):
        return np.vectorize(
            lambda v: deformation_from_mass(self.mass_fn, float(v), self.quad_tol),
            otypes=[float])(r)

    def _deformation_deriv(self, r):
        def one(v):
            if v == 0.0:
                return 0.5 * float(self.mass_deriv_fn(0.0))
            sq = math.sqrt(deformation_from_mass(self.mass_fn, v, self.quad_tol))
            return 2.0 * sq * (math.sqrt(self.mass_fn(v)) - sq) / v
        return np.vectorize(one, otypes=[float])(r)

    def _coupling(self, r):
        if not self.is_radial:
            return self._mass_deriv(r) / (2.0 * self._mass(r))
        # m'(r)/(2 r m) -> m''(0)/(2 m(0)) near the origin for even masses
        h = 1e-6
        r = np.asarray(r, dtype=float)
        reff = np.where(np.abs(r) < 1e-8, h, r)
        return self._mass_deriv(reff) / (2.0 * reff * self._mass(reff))


FAMILIES = {
    "uniform": Uniform,
    "mathews_lakshmanan": MathewsLakshmanan,
    "singular_rational": SingularRational,
    "morse_exp": MorseExp,
    "ndim_ml": NdimML,
    "power_law": PowerLaw,
}


def make_profile(family: str, *, lam=None, alpha=None, sigma=None, dimension: int = 1) -> ProfilePair:
    """Build a built-in profile from its config tag and parameters."""
    key = family.strip().lower()
    if key not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    if key == "uniform":
        return Uniform(dimension=dimension)
    if key == "power_law":
        if alpha is None or sigma is None:
            raise ValueError("power_law needs both alpha and sigma")
        return PowerLaw(float(alpha), float(sigma), dimension=dimension)
    if lam is None:
        raise ValueError(f"{key} needs lambda")
    if key == "ndim_ml":
        return NdimML(float(lam), dimension=dimension)
    if dimension != 1:
        raise ValueError(f"{key} is one-dimensional; dimension must be 1")
    return FAMILIES[key](float(lam))


# -- function-style wrappers over the profile methods ----------------------


def eval_mass(p: ProfilePair, r):
    return p.mass(r)


def eval_mass_deriv(p: ProfilePair, r):
    return p.mass_deriv(r)


def eval_deformation(p: ProfilePair, r):
    return p.deformation(r)


def eval_deformation_deriv(p: ProfilePair, r):
    return p.deformation_deriv(r)


def deformation_from_mass(m: Callable[[float], float], x: float, tol: float = 1e-12,
                          limit: int = 200) -> float:
    """Q(x) = ((1/x) * integral_0^x sqrt(m(s)) ds)^2 by adaptive Gauss-Kronrod.

    Raises
    ------
    DomainError
        If m is non-positive anywhere the quadrature samples it.
    QuadratureError
        If the relative tolerance is not met within ``limit`` subintervals.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    x = float(x)

    def root_mass(s):
        v = float(m(s))
        if not v > 0.0:
            raise DomainError(f"mass must be positive on the integration path; m({s!r}) = {v!r}")
        return math.sqrt(v)

    if abs(x) < _LIMIT_CUTOFF:
        # integral mean over a vanishing interval: midpoint value
        return float(m(0.5 * x))
    value, abserr, info, *rest = _quad.quad(
        root_mass, 0.0, x, epsabs=0.0, epsrel=tol, limit=limit, full_output=1)
    if info.get("last", 0) >= limit or abserr > tol * abs(value) * 10.0:
        msg = rest[0] if rest else "tolerance not reached"
        raise QuadratureError(
            f"quadrature of sqrt(m) on [0, {x!r}] failed: error estimate {abserr:.3e}; {msg}")
    mean = value / x
    return mean * mean


def mass_from_deformation(Q: Callable[[float], float], Qprime: Callable[[float], float], r: float) -> float:
    """m(r) from sqrt(m) = sqrt(Q) (1 + Q' r / (2 Q))."""
    qv = float(Q(r))
    if not qv > 0.0:
        raise DomainError(f"deformation must be positive, Q({r!r}) = {qv!r}")
    paren = 1.0 + float(Qprime(r)) * r / (2.0 * qv)
    if not paren > 0.0:
        raise DomainError(f"1 + Q'r/(2Q) = {paren!r} <= 0 at r = {r!r}; mass would not stay positive")
    return qv * paren * paren
