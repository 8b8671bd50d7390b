"""Adaptive Dormand-Prince 5(4) integration with dense output and events.

This is the explicit embedded pair of Dormand & Prince (the same tableau as
DOPRI5 / ``RK45``): fifth-order propagation, fourth-order error estimate,
FSAL, a PI step-size controller and Hairer's fourth-order continuous
extension.  Second-order systems xddot = a(t, x, xdot) are integrated as
first-order systems in y = (x, xdot).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .dynamics import PhaseState
from .errors import DomainError, StepBudgetExceeded, StepUnderflow

__all__ = [
    "IntegratorConfig",
    "Event",
    "Trajectory",
    "integrate",
    "integrate_fixed",
    "find_zero_crossings",
    "DOMAIN_BOUNDARY",
    "ZERO_CROSSING",
]

DOMAIN_BOUNDARY = "domain_boundary"
ZERO_CROSSING = "zero_crossing"

# Dormand-Prince tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# fifth-order weights minus fourth-order weights
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
# continuous extension (Hairer, Norsett & Wanner)
_D = (-12715105075 / 11282082432, 0.0, 87487479700 / 32700410799,
      -10690763975 / 1880347072, 701980252875 / 199316789632,
      -1453857185 / 822651844, 69997945 / 29380423)

_SAFE = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 10.0
_BETA = 0.04
_EXPO = 0.2 - 0.75 * _BETA


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    max_steps: int = 10_000_000
    event_tol: float = 1e-12
    # DomainBoundary fires once the state is this close to a singular wall
    boundary_tol: float = 1e-9
    first_step: Optional[float] = None

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "event_tol", "boundary_tol"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be > 0, got {value!r}")
        if not (isinstance(self.max_steps, int) and self.max_steps > 0):
            raise ValueError(f"max_steps must be a positive integer, got {self.max_steps!r}")

    def with_tolerance(self, rel_tol: float, abs_tol: Optional[float] = None) -> "IntegratorConfig":
        from dataclasses import replace
        return replace(self, rel_tol=rel_tol, abs_tol=abs_tol if abs_tol is not None else self.abs_tol)


@dataclass(frozen=True)
class Event:
    time: float
    kind: str
    component: Optional[int] = None


@dataclass
class Trajectory:
    """Accepted steps of an integration plus their dense-output polynomials.

    ``t`` has shape (N,), ``y`` has shape (N, 2n) holding (x, xdot).
    Step k spans [t[k], t[k] + h[k]]; the final step may be cut short by a
    terminal event, in which case t[-1] < t[-2] + h[-1].
    """

    n: int
    t: np.ndarray
    y: np.ndarray
    h: np.ndarray
    coeffs: np.ndarray
    events: list = field(default_factory=list)
    event_tol: float = 1e-12
    rejected: int = 0

    @property
    def x(self) -> np.ndarray:
        return self.y[:, : self.n]

    @property
    def xdot(self) -> np.ndarray:
        return self.y[:, self.n:]

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    @property
    def terminated(self) -> bool:
        return any(e.kind == DOMAIN_BOUNDARY for e in self.events)

    def states(self) -> list:
        return [PhaseState(t, y[: self.n], y[self.n:]) for t, y in zip(self.t, self.y)]

    def __call__(self, t):
        """Dense state y(t); shape (2n,) for scalar t, (T, 2n) for arrays."""
        scalar = np.ndim(t) == 0
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(tt < self.t[0]) or np.any(tt > self.t[-1]):
            raise ValueError(f"time outside integrated span [{self.t[0]}, {self.t[-1]}]")
        if len(self.t) == 1:
            out = np.repeat(self.y[:1], tt.size, axis=0)
            return out[0] if scalar else out
        k = np.clip(np.searchsorted(self.t, tt, side="right") - 1, 0, len(self.h) - 1)
        theta = ((tt - self.t[k]) / self.h[k])[:, None]
        c = self.coeffs[k]
        out = c[:, 0] + theta * (c[:, 1] + (1.0 - theta) * (
            c[:, 2] + theta * (c[:, 3] + (1.0 - theta) * c[:, 4])))
        # sample times return the stored samples bit for bit
        j = np.searchsorted(self.t, tt, side="left")
        hit = (j < len(self.t)) & (self.t[np.minimum(j, len(self.t) - 1)] == tt)
        out[hit] = self.y[j[hit]]
        return out[0] if scalar else out

    def sample(self, t):
        y = np.atleast_2d(self(np.atleast_1d(np.asarray(t, dtype=float))))
        return y[:, : self.n], y[:, self.n:]

    def state(self, t: float) -> PhaseState:
        y = self(float(t))
        return PhaseState(t, y[: self.n], y[self.n:])


def _stages(f, t, y, h, k1):
    ks = [k1]
    for i in range(1, 7):
        acc = y.copy()
        for a, k in zip(_A[i], ks):
            if a:
                acc += (h * a) * k
        ks.append(f(t + _C[i] * h, acc))
        if i == 6:
            y_new = acc
    return ks, y_new


def _wrap(rhs, n):
    def f(t, y):
        a = np.asarray(rhs(t, y[:n], y[n:]), dtype=float)
        return np.concatenate((y[n:], a))
    return f


def _rms(v):
    return math.sqrt(float(np.mean(v * v)))


def _initial_step(f, t0, y0, f0, span, cfg):
    sk = cfg.abs_tol + cfg.rel_tol * np.abs(y0)
    d0 = _rms(y0 / sk)
    d1 = _rms(f0 / sk)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = f(t0 + h0, y0 + h0 * f0)
    d2 = _rms((f1 - f0) / sk) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1, cfg.max_step, span)


def integrate(rhs: Callable, s0: PhaseState, t1: float, cfg: Optional[IntegratorConfig] = None,
              boundary: Optional[Callable[[np.ndarray], float]] = None) -> Trajectory:
    """Integrate xddot = rhs(t, x, xdot) from ``s0`` to ``t1``.

    Parameters
    ----------
    rhs
        Acceleration function ``rhs(t, x, xdot) -> xddot``.
    boundary
        Optional distance-to-singular-wall function of the position.  When
        it drops below ``cfg.boundary_tol`` the integration stops with a
        DomainBoundary event located on the dense output.

    Raises
    ------
    StepBudgetExceeded, StepUnderflow
        See :mod:`pdmdho.errors`.  A DomainError raised by ``rhs`` at the
        initial state propagates; inside a trial step it rejects the step.
    """
    cfg = cfg or IntegratorConfig()
    n = s0.n
    t0 = s0.t
    t1 = float(t1)
    if not t1 > t0:
        raise ValueError(f"t1 must exceed the initial time {t0}, got {t1}")
    span = t1 - t0
    h_min = 1e-14 * span
    f = _wrap(rhs, n)

    if boundary is not None:
        user_boundary = boundary

        def boundary(x):
            return float(np.squeeze(user_boundary(x)))

    y = np.concatenate((s0.x, s0.xdot))
    k1 = f(t0, y)
    times, states, steps, polys = [t0], [y.copy()], [], []
    events = []

    if boundary is not None and boundary(y[:n]) < cfg.boundary_tol:
        events.append(Event(t0, DOMAIN_BOUNDARY))
        return Trajectory(n, np.array(times), np.array(states), np.zeros(0),
                          np.zeros((0, 5, 2 * n)), events, cfg.event_tol)

    h = cfg.first_step if cfg.first_step else _initial_step(f, t0, y, k1, span, cfg)
    t = t0
    facold = 1e-4
    rejected_last = False
    attempts = 0
    rejected = 0
    done = False
    while not done:
        if attempts >= cfg.max_steps:
            raise StepBudgetExceeded(
                f"step budget of {cfg.max_steps} exhausted at t = {t!r} (target {t1!r})")
        attempts += 1
        last = t + 1.01 * h >= t1
        if last:
            h = t1 - t
        try:
            ks, y_new = _stages(f, t, y, h, k1)
            if not np.all(np.isfinite(ks[-1])):
                raise DomainError("non-finite derivative")
        except DomainError as exc:
            rejected += 1
            h *= 0.25
            rejected_last = True
            if h < h_min:
                raise StepUnderflow(
                    f"step size {h:.3e} underflowed near t = {t!r} (domain edge ahead)") from exc
            continue

        sk = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err_vec = sum((h * e) * k for e, k in zip(_E, ks) if e)
        err = _rms(err_vec / sk)
        fac11 = err ** _EXPO
        if err <= 1.0:
            fac = fac11 / facold ** _BETA
            fac = min(1.0 / _FAC_MIN, max(1.0 / _FAC_MAX, fac / _SAFE))
            h_new = h / fac
            if rejected_last:
                h_new = min(h_new, h)
            facold = max(err, 1e-4)
            r2 = y_new - y
            r3 = h * ks[0] - r2
            r4 = r2 - h * ks[6] - r3
            r5 = h * sum(d * k for d, k in zip(_D, ks) if d)
            poly = np.stack((y, r2, r3, r4, r5))
            t_new = t1 if last else t + h

            if boundary is not None and boundary(y_new[:n]) < cfg.boundary_tol:
                def gap(theta):
                    yy = poly[0] + theta * (poly[1] + (1 - theta) * (
                        poly[2] + theta * (poly[3] + (1 - theta) * poly[4])))
                    return boundary(yy[:n]) - cfg.boundary_tol
                theta = optimize.brentq(gap, 0.0, 1.0, xtol=max(cfg.event_tol / h, 1e-15))
                y_ev = poly[0] + theta * (poly[1] + (1 - theta) * (
                    poly[2] + theta * (poly[3] + (1 - theta) * poly[4])))
                t_ev = t + theta * h
                if t_ev > t:
                    times.append(t_ev)
                    states.append(y_ev)
                    steps.append(h)
                    polys.append(poly)
                events.append(Event(t_ev, DOMAIN_BOUNDARY))
                break

            times.append(t_new)
            states.append(y_new)
            steps.append(h)
            polys.append(poly)
            t, y, k1 = t_new, y_new, ks[6]
            done = last
            h = min(h_new, cfg.max_step)
            rejected_last = False
        else:
            rejected += 1
            h = h / min(1.0 / _FAC_MIN, fac11 / _SAFE)
            rejected_last = True
            if h < h_min:
                raise StepUnderflow(f"step size {h:.3e} underflowed at t = {t!r}")

    return Trajectory(n, np.array(times), np.array(states), np.array(steps),
                      np.array(polys).reshape(-1, 5, 2 * n), events, cfg.event_tol, rejected)


def integrate_fixed(rhs: Callable, s0: PhaseState, t1: float, steps: int) -> PhaseState:
    """Same tableau with a fixed step; used to measure the convergence order."""
    n = s0.n
    f = _wrap(rhs, n)
    h = (float(t1) - s0.t) / steps
    t = s0.t
    y = np.concatenate((s0.x, s0.xdot))
    k1 = f(t, y)
    for _ in range(steps):
        ks, y = _stages(f, t, y, h, k1)
        k1 = ks[6]
        t += h
    return PhaseState(t1, y[:n], y[n:])


def find_zero_crossings(traj: Trajectory, component: int = 0,
                        event_tol: Optional[float] = None) -> list:
    """Times at which x_component changes sign, ascending.

    Sign changes are bracketed between accepted steps and refined on the
    dense output to ``event_tol``.
    """
    if not 0 <= component < traj.n:
        raise IndexError(f"component {component} out of range for n = {traj.n}")
    tol = traj.event_tol if event_tol is None else event_tol
    xs = traj.x[:, component]
    out = []
    prev_sign = 0.0
    for k in range(len(traj.t)):
        s = math.copysign(1.0, xs[k]) if xs[k] != 0.0 else 0.0
        if s == 0.0:
            if k > 0 and prev_sign != 0.0:
                # exact zero at a sample counts when the sign flips across it
                nxt = next((np.sign(v) for v in xs[k + 1:] if v != 0.0), 0.0)
                if nxt == -prev_sign:
                    out.append(float(traj.t[k]))
                    prev_sign = 0.0
            continue
        if prev_sign != 0.0 and s != prev_sign and xs[k - 1] != 0.0:
            a, b = float(traj.t[k - 1]), float(traj.t[k])
            root = optimize.brentq(lambda tt: float(traj(tt)[component]), a, b,
                                   xtol=tol, rtol=4 * np.finfo(float).eps)
            out.append(root)
        prev_sign = s
    return out
