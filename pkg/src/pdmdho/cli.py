"""Command-line front end: scenario runs, figure presets and verification suites.

Exit codes: 0 success, 1 invalid input, 2 a verification check failed,
3 numerical or runtime failure.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .dho_core import AmplitudeVector, DhoParams, SolutionForm
from .dynamics import energy_series
from .errors import ConfigError, PdmError
from .integrate import IntegratorConfig
from .presets import DEFAULT_SAMPLES, PRESETS, build_preset, preset_names
from .profiles import Branch, make_profile
from .transform import PdmScenario, pdm_path
from .verify import SUITES, integrate_scenario, run_suite, write_reports

__all__ = ["ScenarioConfig", "load_config", "trajectory_table", "write_outputs", "main",
           "EXIT_OK", "EXIT_VALIDATION", "EXIT_CHECK", "EXIT_NUMERICS"]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CHECK = 2
EXIT_NUMERICS = 3

_FLOAT_FMT = "%.16e"

_KEYS = {
    "family", "lambda", "alpha", "sigma", "dimension", "omega0", "eta", "b", "m0",
    "amplitudes", "B", "phase", "branch", "form", "t_span", "sample_count",
    "rel_tol", "abs_tol", "max_step", "source", "output_dir", "plot",
}


@dataclass
class ScenarioConfig:
    scenario: PdmScenario
    sample_count: int = DEFAULT_SAMPLES
    source: str = "analytic"
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    output_dir: Optional[str] = None
    plot: bool = False

    def times(self) -> np.ndarray:
        return np.linspace(*self.scenario.t_span, self.sample_count)


def _line_of(text: str, key: str) -> str:
    if not text:
        return ""
    for no, line in enumerate(text.splitlines(), start=1):
        if re.match(rf"\s*{re.escape(key)}\s*=", line):
            return f" (line {no})"
    return ""


def _vector(value, key: str) -> tuple:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return (float(value),)
    if isinstance(value, list) and value and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return tuple(float(v) for v in value)
    raise ValueError(f"expected a number or a non-empty list of numbers, got {value!r}")


def _number(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"expected a number, got {value!r}")
    return float(value)


def load_config(data: dict, text: str = "") -> ScenarioConfig:
    """Validate a flat key/value mapping into a :class:`ScenarioConfig`.

    Errors are raised as :class:`ConfigError` naming the offending field and,
    when the source text is given, its line.
    """
    unknown = sorted(set(data) - _KEYS)
    if unknown:
        raise ConfigError(f"config field {unknown[0]!r}{_line_of(text, unknown[0])}: unknown key; "
                          f"allowed keys are {', '.join(sorted(_KEYS))}")
    current = "family"

    def get(key, conv=None, default=None):
        nonlocal current
        current = key
        if key not in data:
            return default
        return conv(data[key], key) if conv else data[key]

    try:
        family = get("family")
        if family is None:
            raise ValueError("missing required key")
        if not isinstance(family, str):
            raise ValueError(f"expected a string, got {family!r}")
        amps = get("amplitudes", _vector)
        if amps is None:
            current = "amplitudes"
            raise ValueError("missing required key")
        dimension = get("dimension", default=len(amps))
        if isinstance(dimension, bool) or not isinstance(dimension, int):
            raise ValueError(f"expected an integer, got {dimension!r}")
        current = "family"
        profile = make_profile(family, lam=get("lambda", _number), alpha=get("alpha", _number),
                               sigma=get("sigma", _number), dimension=dimension)
        omega0 = get("omega0", _number, 1.0)
        m0 = get("m0", _number, 1.0)
        if "eta" in data and "b" in data:
            current = "b"
            raise ValueError("give either eta or b, not both")
        if "b" in data:
            params = DhoParams.from_damping_coefficient(omega0, get("b", _number), m0)
        else:
            params = DhoParams(omega0, get("eta", _number, 0.0), m0)
        current = "amplitudes"
        if len(amps) != profile.dimension:
            raise ValueError(f"{len(amps)} amplitude(s) given for dimension {profile.dimension}")
        b_vec = get("B", _vector)
        amplitude = AmplitudeVector(amps, b_vec, get("phase", _number, 0.0))
        branch = Branch.parse(get("branch", default="plus"))
        form = SolutionForm.parse(get("form", default="paper"))
        t_span = get("t_span", _vector, (0.0, 20.0))
        if len(t_span) != 2:
            raise ValueError(f"expected [t0, t1], got {list(t_span)}")
        samples = get("sample_count", default=DEFAULT_SAMPLES)
        if isinstance(samples, bool) or not isinstance(samples, int) or samples < 2:
            raise ValueError(f"expected an integer >= 2, got {samples!r}")
        source = get("source", default="analytic")
        if source not in ("analytic", "integrated"):
            raise ValueError(f"expected 'analytic' or 'integrated', got {source!r}")
        defaults = IntegratorConfig()
        integrator = IntegratorConfig(rel_tol=get("rel_tol", _number, defaults.rel_tol),
                                      abs_tol=get("abs_tol", _number, defaults.abs_tol),
                                      max_step=get("max_step", _number, defaults.max_step))
        output_dir = get("output_dir")
        if output_dir is not None and not isinstance(output_dir, str):
            raise ValueError(f"expected a path string, got {output_dir!r}")
        plot = get("plot", default=False)
        if not isinstance(plot, bool):
            raise ValueError(f"expected true or false, got {plot!r}")
        current = "t_span"
        scenario = PdmScenario(profile, params, amplitude, branch=branch, t_span=t_span, form=form,
                               label="run")
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        raise ConfigError(f"config field {current!r}{_line_of(text, current)}: {msg}") from exc
    return ScenarioConfig(scenario, samples, source, integrator, output_dir, plot)


def read_config(path) -> ScenarioConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return load_config(data, text)


def trajectory_table(s: PdmScenario, t: np.ndarray, source: str = "analytic",
                     cfg: Optional[IntegratorConfig] = None) -> dict:
    """Columns of the exported trajectory: t, x, xdot, p, E and q_ref."""
    x, xdot, q = pdm_path(s, t)
    if source == "integrated":
        traj = integrate_scenario(s, cfg)
        if traj.terminated:
            raise PdmError(f"integration stopped at the domain boundary at t = {traj.t_end!r}")
        x, xdot = traj.sample(t)
    elif source != "analytic":
        raise ValueError(f"unknown source {source!r}")
    coord = np.sqrt(np.sum(x * x, axis=1)) if s.profile.radial else x[:, 0]
    s.profile.check(coord)
    p = s.params.m0 * s.profile._mass(coord)[:, None] * xdot
    e = energy_series(s.profile, s.params, x, xdot).total
    return {"t": t, "x": x, "xdot": xdot, "p": p, "E": e, "q_ref": q}


def _write_csv(path: Path, header: list, columns: list) -> None:
    data = np.column_stack(columns)
    lines = [",".join(header)]
    lines.extend(",".join(_FLOAT_FMT % v for v in row) for row in data)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _polyline(xs, ys, box) -> str:
    x0, y0, w, h = box
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    xr = (xs.max() - xs.min()) or 1.0
    yr = (ys.max() - ys.min()) or 1.0
    px = x0 + (xs - xs.min()) / xr * w
    py = y0 + h - (ys - ys.min()) / yr * h
    pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
    return f'<polyline fill="none" stroke="black" stroke-width="1" points="{pts}"/>'


def _write_svg(path: Path, table: dict, title: str) -> None:
    n = table["x"].shape[1]
    parts = ['<svg xmlns="http://www.w3.org/2000/svg" width="840" height="360">',
             f'<text x="10" y="20" font-size="14">{title}</text>',
             '<text x="20" y="345" font-size="12">x(t)</text>',
             '<text x="440" y="345" font-size="12">p vs x</text>']
    for i in range(n):
        parts.append(_polyline(table["t"], table["x"][:, i], (20, 40, 380, 280)))
        parts.append(_polyline(table["x"][:, i], table["p"][:, i], (440, 40, 380, 280)))
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")


def write_outputs(out_dir, table: dict, plot: bool = False, title: str = "") -> list:
    """Write trajectory.csv, phase.csv and optionally plot.svg into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n = table["x"].shape[1]
    idx = range(1, n + 1)
    header = (["t"] + [f"x_{i}" for i in idx] + [f"xdot_{i}" for i in idx]
              + [f"p_{i}" for i in idx] + ["E"] + [f"q_ref_{i}" for i in idx])
    traj = out / "trajectory.csv"
    _write_csv(traj, header, [table["t"], table["x"], table["xdot"], table["p"], table["E"],
                              table["q_ref"]])
    phase = out / "phase.csv"
    ph_header = ["t"] + [c for i in idx for c in (f"x_{i}", f"p_{i}")]
    ph_cols = [table["t"]] + [col for i in range(n) for col in (table["x"][:, i], table["p"][:, i])]
    _write_csv(phase, ph_header, ph_cols)
    written = [traj, phase]
    if plot:
        svg = out / "plot.svg"
        _write_svg(svg, table, title)
        written.append(svg)
    return written


# -- verbs -------------------------------------------------------------------


def _cmd_run(args) -> int:
    cfg = read_config(args.config)
    integrator = cfg.integrator
    if args.tol is not None:
        integrator = integrator.with_tolerance(args.tol)
    out = args.out or cfg.output_dir or "out"
    table = trajectory_table(cfg.scenario, cfg.times(), cfg.source, integrator)
    for path in write_outputs(out, table, args.plot or cfg.plot, cfg.scenario.describe()):
        print(path)
    return EXIT_OK


def _cmd_figure(args) -> int:
    try:
        preset = build_preset(args.name, args.eta)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from exc
    out = Path(args.out or Path("out") / preset.name)
    cfg = IntegratorConfig() if args.tol is None else IntegratorConfig(rel_tol=args.tol)
    for s in preset.scenarios:
        table = trajectory_table(s, preset.times(), args.source, cfg)
        for path in write_outputs(out / s.label, table, args.plot, s.describe()):
            print(path)
    return EXIT_OK


def _cmd_verify(args) -> int:
    cfg = None if args.tol is None else IntegratorConfig(rel_tol=args.tol)
    suites = SUITES if args.suite == "all" else (args.suite,)
    out = Path(args.out or "reports")
    ok = True
    for suite in suites:
        reports = run_suite(suite, perturb_omega=args.perturb_omega, cfg=cfg)
        write_reports(reports, out, suite)
        for r in reports:
            print(r.summary())
        ok = ok and all(r.passed for r in reports)
    print("all checks passed" if ok else "verification FAILED")
    return EXIT_OK if ok else EXIT_CHECK


def _cmd_list(_args) -> int:
    for name in preset_names():
        p = PRESETS[name]
        labels = ", ".join(s.label for s in p.scenarios)
        print(f"{name:6s} {p.caption}  [{labels}]")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdmdho", description="Position-dependent-mass damped oscillators: run, export, verify.")
    parser.add_argument("--list-presets", action="store_true", help="list figure presets and exit")
    sub = parser.add_subparsers(dest="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory")
    common.add_argument("--tol", type=float, help="integrator relative tolerance")

    run = sub.add_parser("run", parents=[common], help="run a scenario from a TOML config")
    run.add_argument("config", help="path to the scenario config")
    run.add_argument("--plot", action="store_true", help="also write plot.svg")
    run.set_defaults(func=_cmd_run)

    fig = sub.add_parser("figure", parents=[common], help="export a figure preset")
    fig.add_argument("name", help="preset name, e.g. fig1a")
    fig.add_argument("--eta", type=float, nargs="+", help="override the eta sweep")
    fig.add_argument("--source", choices=("analytic", "integrated"), default="analytic")
    fig.add_argument("--plot", action="store_true", help="also write plot.svg per scenario")
    fig.set_defaults(func=_cmd_figure)

    ver = sub.add_parser("verify", parents=[common], help="run a verification suite")
    ver.add_argument("suite", choices=SUITES + ("all",))
    ver.add_argument("--perturb-omega", type=float, default=0.0,
                     help="relative omega0 error injected into the closed-form reference")
    ver.set_defaults(func=_cmd_verify)

    lst = sub.add_parser("list-presets", help="list figure presets")
    lst.set_defaults(func=_cmd_list)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_presets:
        return _cmd_list(args)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_VALIDATION
    if getattr(args, "tol", None) is not None and not (math.isfinite(args.tol) and args.tol > 0):
        print(f"error: --tol must be a positive number, got {args.tol}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (PdmError, ArithmeticError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
