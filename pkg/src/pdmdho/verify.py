"""Machine checks of the closed-form PDM solutions and their physical claims.

Every check returns a :class:`CheckReport` whose ``passed`` flag is exactly
``metric <= threshold``.  Checks are deterministic for a given scenario,
grid and integrator configuration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import optimize

from .dho_core import AmplitudeVector, DampingRegime, DhoParams
from .dynamics import PhaseState, acceleration, energy_series, eom_rhs, momentum
from .errors import InsufficientCrossings
from .integrate import IntegratorConfig, find_zero_crossings, integrate
from .presets import PRESETS, all_scenarios
from .profiles import (MathewsLakshmanan, MorseExp, NdimML, PowerLaw, ProfilePair,
                       SingularRational, Uniform, deformation_from_mass, mass_from_deformation)
from .transform import PdmScenario, crosses_origin, pdm_path, pdm_solution

__all__ = [
    "CheckReport",
    "residual_check",
    "oracle_compare",
    "dissipation_check",
    "isochronicity_check",
    "phase_shrink_check",
    "roundtrip_check",
    "integrate_scenario",
    "SUITES",
    "suite_scenarios",
    "run_suite",
    "write_reports",
]

SUITES = ("residual", "oracle", "energy", "isochrony", "phase", "roundtrip")

RESIDUAL_TOL = 1e-6
ORACLE_TOL = 1e-6
CONSERVATION_TOL = 1e-8
POWER_TOL = 1e-5
CROSSING_TOL = 1e-9
QUAD_TOL = 1e-8
ALGEBRAIC_TOL = 1e-12
# strict decrease: every successive-maximum ratio must sit below this
SHRINK_TOL = 1.0 - 1e-12

_ISO_FAMILIES = ("uniform", "mathews_lakshmanan", "morse_exp")


@dataclass
class CheckReport:
    name: str
    passed: bool
    metric: float
    threshold: float
    details: dict = field(default_factory=dict)

    @classmethod
    def make(cls, name: str, metric: float, threshold: float, **details) -> "CheckReport":
        metric = float(metric)
        return cls(name, bool(metric <= threshold), metric, float(threshold), details)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "metric": _jsonable(self.metric),
                "threshold": _jsonable(self.threshold), "details": _jsonable(self.details)}

    def summary(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.name}: metric={self.metric:.3e} threshold={self.threshold:.3e}"


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        # keep the file strict JSON
        return v if math.isfinite(v) else str(v)
    return v


def _default_grid(s: PdmScenario, points: int = 1000) -> np.ndarray:
    return np.linspace(s.t_span[0], s.t_span[1], points)


# -- exactness -----------------------------------------------------------


def _time_scale(params: DhoParams) -> float:
    """2 pi over the fastest rate of the reference solution."""
    rate = params.omega0
    if params.regime is DampingRegime.OVER:
        rate = params.omega0 * (params.eta + math.sqrt(params.eta ** 2 - 1.0))
    return 2.0 * math.pi / rate


# step ladder for the residual stencil, in units of 1e-4 of the time scale
_LADDER = (0.5, 1.0, 2.0, 4.0, 8.0, 16.0)


def _second_derivative(s: PdmScenario, t: np.ndarray, oracle_params):
    """5-point second derivative of the closed-form x(t), step chosen per point.

    Each point uses the ladder step with the smallest estimated error
    (Richardson truncation estimate plus a rounding bound), which never
    looks at the equation of motion.
    """
    base = 1e-4 * _time_scale(s.params)
    offsets = np.arange(-2, 3)
    steps = [base * f for f in _LADDER]
    times = np.concatenate([(t[None, :] + h * offsets[:, None]).ravel() for h in steps])
    x_all = pdm_path(s, times, oracle_params)[0].reshape(len(steps), 5, t.size, s.n)
    d = np.stack([(-x[4] + 16.0 * x[3] - 30.0 * x[2] + 16.0 * x[1] - x[0]) / (12.0 * h * h)
                  for x, h in zip(x_all, steps)])
    # truncation from the Richardson difference (D(2h) - D(h) ~ 15 c h^4) plus
    # rounding of the 64/12-weighted stencil, including the rounding of t itself
    x, xdot, _ = pdm_path(s, t, oracle_params)
    mag = np.max(np.abs(x) + np.abs(t)[:, None] * np.abs(xdot), axis=1)
    eps = np.finfo(float).eps
    h = np.asarray(steps[:-1])[:, None]
    est = (np.max(np.abs(d[:-1] - d[1:]), axis=2) / 15.0
           + (64.0 / 12.0) * eps * mag[None, :] / (h * h))
    pick = np.argmin(est, axis=0)
    cols = np.arange(t.size)
    return d[pick, cols], np.asarray(steps)[pick]


def residual_check(s: PdmScenario, grid=None, threshold: float = RESIDUAL_TOL,
                   oracle_params: Optional[DhoParams] = None) -> CheckReport:
    """Plug the closed-form trajectory into the equation of motion.

    The acceleration comes from a 5-point central stencil on the closed-form
    positions (step from 5e-5 to 8e-4 of the fastest reference time scale),
    the velocity from the analytic derivative.
    """
    t = _default_grid(s) if grid is None else np.asarray(grid, dtype=float)
    acc_fd, used = _second_derivative(s, t, oracle_params)
    x, xdot, _ = pdm_path(s, t, oracle_params)
    worst, where = 0.0, (float(t[0]), 0, float(used[0]))
    for k in range(t.size):
        res = np.abs(acc_fd[k] - eom_rhs(s.profile, s.params, PhaseState(t[k], x[k], xdot[k])))
        j = int(np.argmax(res))
        if not res[j] <= worst:
            worst, where = float(res[j]), (float(t[k]), j, float(used[k]))
    return CheckReport.make(f"residual[{s.describe()}]", worst, threshold,
                            worst_time=where[0], worst_component=where[1], fd_step=where[2])


# -- integration oracle -----------------------------------------------------


def _boundary_fn(profile: ProfilePair):
    if math.isinf(profile.boundary_distance(0.0)):
        return None
    return lambda x: profile.boundary_distance(profile.coordinate(x))


def integrate_scenario(s: PdmScenario, cfg: Optional[IntegratorConfig] = None):
    """Integrate the equation of motion from the closed-form initial state."""
    x0, v0 = pdm_solution(s, s.t_span[0])
    return integrate(acceleration(s.profile, s.params), PhaseState(s.t_span[0], x0, v0),
                     s.t_span[1], cfg or IntegratorConfig(), _boundary_fn(s.profile))


def oracle_compare(s: PdmScenario, cfg: Optional[IntegratorConfig] = None,
                   threshold: float = ORACLE_TOL, samples: int = 2001,
                   oracle_params: Optional[DhoParams] = None) -> CheckReport:
    """Max deviation of the integrated trajectory from the mapped closed form.

    Compared at every accepted step and on a uniform grid via dense output.
    """
    traj = integrate_scenario(s, cfg)
    name = f"oracle[{s.describe()}]"
    if traj.terminated:
        return CheckReport.make(name, math.inf, threshold, reason="domain boundary reached",
                                t_end=traj.t_end)
    grid = np.unique(np.concatenate((traj.t, np.linspace(*s.t_span, samples))))
    x_num, v_num = traj.sample(grid)
    x_ref, v_ref, _ = pdm_path(s, grid, oracle_params)
    dev = np.max(np.abs(x_num - x_ref), axis=1)
    k = int(np.argmax(dev))
    return CheckReport.make(name, dev[k], threshold, worst_time=float(grid[k]),
                            velocity_deviation=float(np.max(np.abs(v_num - v_ref))),
                            steps=int(traj.h.size), rejected=traj.rejected)


# -- energy ----------------------------------------------------------------


def _path(s: PdmScenario, t: np.ndarray, source: str, traj=None):
    if source == "analytic":
        x, v, _ = pdm_path(s, t)
        return x, v
    if source == "integrated":
        return traj.sample(t)
    raise ValueError(f"source must be 'analytic' or 'integrated', got {source!r}")


def dissipation_check(s: PdmScenario, grid=None, source: str = "analytic",
                      cfg: Optional[IntegratorConfig] = None, fd_step: float = 1e-5) -> CheckReport:
    """Energy balance dE/dt = -2R, strict decay for eta > 0, conservation at eta = 0.

    The finite-difference error is measured relative to max |rayleigh_power|
    over the grid.  A non-monotone energy makes the metric infinite.
    """
    t = np.linspace(s.t_span[0], s.t_span[1], 2001) if grid is None else np.asarray(grid, dtype=float)
    traj = None
    if source == "integrated":
        traj = integrate_scenario(s, cfg)
        # the dense output has no data outside the integrated span
        t = t[(t - fd_step >= traj.t[0]) & (t + fd_step <= traj.t[-1])]

    def ledger(times):
        return energy_series(s.profile, s.params, *_path(s, times, source, traj))

    led = ledger(t)
    e, power = led.total, led.rayleigh_power
    fd = (ledger(t + fd_step).total - ledger(t - fd_step).total) / (2.0 * fd_step)
    name = f"energy[{s.describe()}]"
    if s.params.eta == 0.0:
        drift = np.abs(e - e[0]) / abs(e[0])
        k = int(np.argmax(drift))
        return CheckReport.make(name, drift[k], CONSERVATION_TOL, worst_time=float(t[k]),
                                initial_energy=float(e[0]), source=source)
    scale = float(np.max(np.abs(power)))
    rel = np.abs(fd - power) / scale
    k = int(np.argmax(rel))
    increases = np.nonzero(np.diff(e) >= 0.0)[0]
    details = dict(worst_time=float(t[k]), power_scale=scale, source=source,
                   initial_energy=float(e[0]), final_energy=float(e[-1]))
    metric = float(rel[k])
    if increases.size:
        metric = math.inf
        details["first_non_decrease_time"] = float(t[increases[0]])
    return CheckReport.make(name, metric, POWER_TOL, **details)


# -- isochronicity ------------------------------------------------------------


def _analytic_crossings(s: PdmScenario, samples: int = 20001) -> list:
    t = np.linspace(*s.t_span, samples)
    x = pdm_path(s, t)[0][:, 0]
    out = []
    for k in np.nonzero(np.signbit(x[:-1]) != np.signbit(x[1:]))[0]:
        if x[k] == 0.0:
            out.append(float(t[k]))
            continue
        out.append(optimize.brentq(lambda tt: float(pdm_path(s, tt)[0][0, 0]), t[k], t[k + 1],
                                   xtol=1e-14, rtol=4 * np.finfo(float).eps))
    return out


def isochronicity_check(scenarios: Sequence[PdmScenario], cfg: Optional[IntegratorConfig] = None,
                        crossings: int = 5, threshold: float = CROSSING_TOL,
                        source: str = "integrated") -> CheckReport:
    """Zero-crossing times of x(t) must not depend on amplitude or lambda.

    The metric is the largest spread of the k-th crossing time across the
    scenarios, over the first ``crossings`` crossings.
    """
    scenarios = list(scenarios)
    if len(scenarios) < 2:
        raise ValueError("isochronicity needs at least two scenarios")
    ref = scenarios[0].params
    for s in scenarios:
        if s.profile.family not in _ISO_FAMILIES:
            raise ValueError(f"{s.profile.family} does not preserve the origin; "
                             f"use one of {', '.join(_ISO_FAMILIES)}")
        if (s.params.omega0, s.params.eta) != (ref.omega0, ref.eta):
            raise ValueError("all scenarios must share omega0 and eta")
    cfg = cfg or IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
    times = []
    for s in scenarios:
        if source == "integrated":
            zs = find_zero_crossings(integrate_scenario(s, cfg), 0)
        elif source == "analytic":
            zs = _analytic_crossings(s)
        else:
            raise ValueError(f"source must be 'analytic' or 'integrated', got {source!r}")
        if len(zs) < 3:
            raise InsufficientCrossings(
                f"{s.describe()}: {len(zs)} zero crossing(s) in {s.t_span}, need at least 3")
        times.append(zs)
    count = min(crossings, min(len(z) for z in times))
    table = np.array([z[:count] for z in times])
    spread = table.max(axis=0) - table.min(axis=0)
    k = int(np.argmax(spread))
    return CheckReport.make(f"isochrony[{len(scenarios)} scenarios, eta={ref.eta:g}]",
                            spread[k], threshold, worst_crossing=k + 1, crossings_used=count,
                            first_crossings=table[:, 0].tolist(), source=source)


# -- phase-space shrinkage -------------------------------------------------------


def _interior_maxima(v: np.ndarray) -> np.ndarray:
    mid = v[1:-1]
    return mid[(mid > v[:-2]) & (mid >= v[2:]) & (mid > 0.0)]


def phase_shrink_check(s: PdmScenario, samples: int = 4001) -> CheckReport:
    """Successive same-sign extrema of x and p shrink; the orbit ends inside its start.

    Positive and negative lobes are compared separately because the mapped
    solutions of asymmetric profiles swing further on one side.
    """
    if s.params.regime is not DampingRegime.UNDER or s.params.eta <= 0.0:
        raise ValueError("phase shrinkage applies to under-damped scenarios with eta > 0")
    t = np.linspace(*s.t_span, samples)
    x, v, _ = pdm_path(s, t)
    p = np.array([momentum(s.profile, PhaseState(tk, xk, vk), s.params.m0)
                  for tk, xk, vk in zip(t, x, v)])
    worst, where, checked = -math.inf, "", 0
    for label, series in (("x", x), ("p", p)):
        for i in range(s.n):
            for sign, lobe in ((1.0, "+"), (-1.0, "-")):
                peaks = _interior_maxima(sign * series[:, i])
                if peaks.size < 2:
                    continue
                checked += 1
                ratio = float(np.max(peaks[1:] / peaks[:-1]))
                if ratio > worst:
                    worst, where = ratio, f"{label}_{i + 1}{lobe}"
    radius = np.sqrt(np.sum(x * x, axis=1) + np.sum(p * p, axis=1))
    end_ratio = float(radius[-1] / radius[0])
    if end_ratio > worst:
        worst, where = end_ratio, "phase_radius"
    if checked == 0:
        worst, where = math.inf, "fewer than two extrema per lobe"
    return CheckReport.make(f"phase[{s.describe()}]", worst, SHRINK_TOL, worst_sequence=where,
                            sequences=checked, radius_ratio=end_ratio)


# -- mass/deformation round trip ------------------------------------------------


def _roundtrip_grid(profile: ProfilePair, points: int = 100) -> np.ndarray:
    if isinstance(profile, PowerLaw):
        return np.linspace(0.05, 3.0, points)
    if isinstance(profile, SingularRational):
        return np.linspace(-2.0, 0.9 / profile.lam, points)
    if isinstance(profile, (MathewsLakshmanan, MorseExp)):
        return np.linspace(-2.0, 2.0, points) / max(profile.lam, 1.0)
    if isinstance(profile, NdimML):
        return np.linspace(0.0, 3.0 / profile.lam, points)
    return np.linspace(0.0, 2.0, points)


def roundtrip_check(profile: ProfilePair, grid=None) -> CheckReport:
    """Q from m by quadrature (to 1e-8) and m from (Q, Q') algebraically (to 1e-12).

    The metric is the larger of the two relative errors, each divided by its
    own tolerance, so the report passes at 1.
    """
    r = _roundtrip_grid(profile) if grid is None else np.asarray(grid, dtype=float)
    err_q = err_m = 0.0
    at_q = at_m = float(r[0])
    for v in r:
        v = float(v)
        q = float(profile.deformation(v))
        m = float(profile.mass(v))
        eq = abs(deformation_from_mass(profile.mass, v) - q) / q
        em = abs(mass_from_deformation(profile.deformation, profile.deformation_deriv, v) - m) / m
        if eq > err_q:
            err_q, at_q = eq, v
        if em > err_m:
            err_m, at_m = em, v
    metric = max(err_q / QUAD_TOL, err_m / ALGEBRAIC_TOL)
    return CheckReport.make(f"roundtrip[{_profile_tag(profile)}]", metric, 1.0,
                            quadrature_error=err_q, quadrature_worst=at_q,
                            algebraic_error=err_m, algebraic_worst=at_m)


def _profile_tag(profile: ProfilePair) -> str:
    fields = {k: v for k, v in vars(profile).items() if isinstance(v, (int, float))}
    return profile.family + "".join(f" {k}={v:g}" for k, v in fields.items())


# -- suites ------------------------------------------------------------------


def _singular_at_origin(s: PdmScenario) -> bool:
    # power-law motion through r = 0 hits the mass singularity
    return isinstance(s.profile, PowerLaw) and s.profile.sigma != 0.0 and crosses_origin(s)


def isochrony_groups() -> list:
    """Scenario groups for the isochrony suite."""
    base = DhoParams(omega0=1.0, eta=0.05)
    ml = [PdmScenario(MathewsLakshmanan(lam), base, AmplitudeVector((a,)),
                      label=f"ml_lam{lam:g}_A{a:g}")
          for a in (0.5, 0.9) for lam in (0.5, 2.0, 4.0)]
    uniform = [PdmScenario(Uniform(), base, AmplitudeVector((a,)), label=f"uniform_A{a:g}")
               for a in (1.0, 2.0)]
    return [ml, list(PRESETS["fig3b"].scenarios), uniform]


def suite_scenarios(name: str) -> list:
    """Scenarios (or profiles, for the round trip) a suite runs over."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or 'all'")
    scenarios = all_scenarios()
    if name in ("residual", "oracle"):
        return [s for s in scenarios if not _singular_at_origin(s)]
    if name == "energy":
        return scenarios
    if name == "phase":
        return [s for s in scenarios if s.params.regime is DampingRegime.UNDER
                and s.params.eta > 0.0 and not _singular_at_origin(s)]
    if name == "isochrony":
        return isochrony_groups()
    profiles = {}
    for s in scenarios:
        profiles.setdefault(s.profile, s.profile)
    return [Uniform()] + list(profiles)


def run_suite(name: str, perturb_omega: float = 0.0,
              cfg: Optional[IntegratorConfig] = None) -> list:
    """Run one suite (or ``all``) and return its reports.

    ``perturb_omega`` scales omega0 of the closed-form reference by
    (1 + perturb_omega) in the residual and oracle suites; it exists so that
    a broken oracle can be shown to fail.
    """
    if name == "all":
        return [r for suite in SUITES for r in run_suite(suite, perturb_omega, cfg)]
    items = suite_scenarios(name)

    def mutated(s):
        if perturb_omega == 0.0:
            return None
        return s.params.with_omega(s.params.omega0 * (1.0 + perturb_omega))

    if name == "residual":
        return [residual_check(s, oracle_params=mutated(s)) for s in items]
    if name == "oracle":
        return [oracle_compare(s, cfg, oracle_params=mutated(s)) for s in items]
    if name == "energy":
        return [dissipation_check(s) for s in items]
    if name == "phase":
        return [phase_shrink_check(s) for s in items]
    if name == "isochrony":
        iso_cfg = None
        if cfg is not None:
            iso_cfg = cfg.with_tolerance(min(cfg.rel_tol, 1e-12), min(cfg.abs_tol, 1e-14))
        return [isochronicity_check(g, iso_cfg) for g in items]
    return [roundtrip_check(p) for p in items]


def write_reports(reports: Iterable[CheckReport], out_dir, suite: str) -> tuple:
    """Write ``<suite>_report.txt`` and ``<suite>_report.json``; return both paths."""
    reports = list(reports)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ok = all(r.passed for r in reports)
    text = out / f"{suite}_report.txt"
    lines = [r.summary() for r in reports]
    lines.append(f"{sum(r.passed for r in reports)}/{len(reports)} checks passed")
    text.write_text("\n".join(lines) + "\n", encoding="utf-8")
    js = out / f"{suite}_report.json"
    js.write_text(json.dumps({"suite": suite, "passed": ok,
                              "checks": [r.to_dict() for r in reports]}, indent=2) + "\n",
                  encoding="utf-8")
    return text, js
