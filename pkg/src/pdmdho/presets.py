"""Built-in scenario sets mirroring the parameter choices of Figures 1-5.

Each preset expands to one scenario per swept parameter value.  Where the
captioned amplitude would drive the reference solution outside the inverse
map's domain (Morse with large lam, the n-dimensional ML family with
lam |A| >= 1) the amplitude is reduced to 0.9 of the admissible bound and
the preset's note says so.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .dho_core import AmplitudeVector, DhoParams, SolutionForm
from .profiles import (Branch, MathewsLakshmanan, MorseExp, NdimML, PowerLaw, ProfilePair,
                       SingularRational)
from .transform import PdmScenario, admissible_amplitude

__all__ = ["Preset", "PRESETS", "preset_names", "build_preset", "all_scenarios",
           "DEFAULT_T_SPAN", "DEFAULT_SAMPLES", "DEFAULT_ETAS"]

DEFAULT_T_SPAN = (0.0, 20.0)
DEFAULT_SAMPLES = 2001
DEFAULT_ETAS = (0.0, 0.2, 1.0, 1.5)
_MARGIN = 0.9
_NDIM = 3


@dataclass(frozen=True)
class Preset:
    name: str
    caption: str
    sweep: str
    scenarios: tuple
    note: str = ""
    t_span: tuple = DEFAULT_T_SPAN
    samples: int = DEFAULT_SAMPLES

    def times(self) -> np.ndarray:
        return np.linspace(self.t_span[0], self.t_span[1], self.samples)


def _fit_amplitude(profile: ProfilePair, params: DhoParams, amplitude: float) -> float:
    bound = admissible_amplitude(profile, params, DEFAULT_T_SPAN, SolutionForm.PAPER)
    return min(amplitude, _MARGIN * bound)


def _scenario(profile: ProfilePair, eta: float, amplitude: float, label: str,
              branch: Branch = Branch.PLUS) -> PdmScenario:
    params = DhoParams(omega0=1.0, eta=eta)
    a = _fit_amplitude(profile, params, amplitude)
    if profile.dimension == 1:
        amps = AmplitudeVector((a,))
    else:
        amps = AmplitudeVector(tuple(a / math.sqrt(profile.dimension) for _ in range(profile.dimension)))
    return PdmScenario(profile, params, amps, branch=branch, t_span=DEFAULT_T_SPAN,
                       form=SolutionForm.PAPER, label=label)


def _tag(key: str, value: float) -> str:
    return f"{key}{value:g}"


# each builder takes the eta sweep (used only by eta-sweep panels)
_Builder = Callable[[Sequence[float]], tuple]


def _eta_sweep(name, make_profile, amplitude=1.0, branch=Branch.PLUS) -> _Builder:
    def build(etas):
        return tuple(_scenario(make_profile(), eta, amplitude, f"{name}_{_tag('eta', eta)}", branch)
                     for eta in etas)
    return build


def _lam_sweep(name, cls, lams, amplitude, eta=0.05, branch=Branch.PLUS, **kw) -> _Builder:
    def build(_etas):
        return tuple(_scenario(cls(lam, **kw), eta, amplitude, f"{name}_{_tag('lam', lam)}", branch)
                     for lam in lams)
    return build


def _amp_sweep(name, profile, amps, eta=0.05) -> _Builder:
    def build(_etas):
        return tuple(_scenario(profile, eta, a, f"{name}_{_tag('A', a)}") for a in amps)
    return build


def _power_single(name, alpha, sigma, eta=0.05) -> _Builder:
    def build(_etas):
        return (_scenario(PowerLaw(alpha, sigma), eta, 1.0,
                          f"{name}_{_tag('sigma', sigma)}_{_tag('alpha', alpha)}"),)
    return build


_CLIP_NOTE = "amplitude reduced to 0.9 of the admissible bound where the caption value leaves the domain"

_TABLE = {
    "fig1a": ("mathews_lakshmanan omega=1 lambda=2 A=1, eta sweep", "eta",
              _eta_sweep("fig1a", lambda: MathewsLakshmanan(2.0)),
              "eta values {0, 0.2, 1, 1.5} assumed; the caption names only the swept parameter"),
    "fig1b": ("mathews_lakshmanan omega=1 lambda=0.5 eta=0.05, A in {0.5, 0.9}", "A",
              _amp_sweep("fig1b", MathewsLakshmanan(0.5), (0.5, 0.9)), ""),
    "fig1c": ("mathews_lakshmanan omega=1 A=0.9 eta=0.05, lambda in {0.5, 2, 4}", "lambda",
              _lam_sweep("fig1c", MathewsLakshmanan, (0.5, 2.0, 4.0), 0.9), ""),
    "fig1d": ("mathews_lakshmanan phase space A=0.9 eta=0.05, lambda in {1, 2, 3}", "lambda",
              _lam_sweep("fig1d", MathewsLakshmanan, (1.0, 2.0, 3.0), 0.9), ""),
    "fig1e": ("mathews_lakshmanan phase space A=0.9 eta=0.05 lambda=0.5", "lambda",
              _lam_sweep("fig1e", MathewsLakshmanan, (0.5,), 0.9), ""),
    "fig1f": ("mathews_lakshmanan phase space A=0.9 eta=0.05 lambda=4", "lambda",
              _lam_sweep("fig1f", MathewsLakshmanan, (4.0,), 0.9), ""),
    "fig2a": ("singular_rational x_+ lambda=1 A=1, eta sweep", "eta",
              _eta_sweep("fig2a", lambda: SingularRational(1.0)), ""),
    "fig2b": ("singular_rational x_- lambda=1 A=1, eta sweep", "eta",
              _eta_sweep("fig2b", lambda: SingularRational(1.0), branch=Branch.MINUS), ""),
    "fig2c": ("singular_rational x_+ phase space A=1 eta=0.05, lambda in {0.1, 0.3, 0.5}", "lambda",
              _lam_sweep("fig2c", SingularRational, (0.1, 0.3, 0.5), 1.0), ""),
    "fig2d": ("singular_rational x_- phase space A=1 eta=0.05, lambda in {0.1, 0.3, 0.5}", "lambda",
              _lam_sweep("fig2d", SingularRational, (0.1, 0.3, 0.5), 1.0, branch=Branch.MINUS), ""),
    "fig3a": ("morse_exp lambda=1 A=1, eta sweep", "eta",
              _eta_sweep("fig3a", lambda: MorseExp(1.0)), _CLIP_NOTE),
    "fig3b": ("morse_exp phase space A=1 eta=0.05, lambda in {1, 3, 5}", "lambda",
              _lam_sweep("fig3b", MorseExp, (1.0, 3.0, 5.0), 1.0), _CLIP_NOTE),
    "fig4a": ("ndim_ml n=3 lambda=1 A=1, eta sweep", "eta",
              _eta_sweep("fig4a", lambda: NdimML(1.0, dimension=_NDIM)), _CLIP_NOTE),
    "fig4b": ("ndim_ml n=3 phase space A=1 eta=0.05, lambda in {1, 3, 5}", "lambda",
              _lam_sweep("fig4b", NdimML, (1.0, 3.0, 5.0), 1.0, dimension=_NDIM), _CLIP_NOTE),
    "fig5a": ("power_law sigma=-0.5 alpha=1 A=1, eta sweep", "eta",
              _eta_sweep("fig5a", lambda: PowerLaw(1.0, -0.5)), ""),
    "fig5b": ("power_law sigma=2 alpha=1 A=1, eta sweep", "eta",
              _eta_sweep("fig5b", lambda: PowerLaw(1.0, 2.0)), ""),
    "fig5c": ("power_law phase space sigma=0.5 alpha=1 eta=0.05", "alpha",
              _power_single("fig5c", 1.0, 0.5), ""),
    "fig5d": ("power_law phase space sigma=0.5 alpha=3 eta=0.05", "alpha",
              _power_single("fig5d", 3.0, 0.5), ""),
    "fig5e": ("power_law phase space sigma=-0.5 alpha=1 eta=0.05", "alpha",
              _power_single("fig5e", 1.0, -0.5), ""),
    "fig5f": ("power_law phase space sigma=-0.5 alpha=3 eta=0.05", "alpha",
              _power_single("fig5f", 3.0, -0.5), ""),
}


def preset_names() -> list:
    return sorted(_TABLE)


def build_preset(name: str, etas: Optional[Sequence[float]] = None) -> Preset:
    """Expand a preset; ``etas`` overrides the default sweep of eta-sweep panels."""
    key = name.strip().lower()
    if key not in _TABLE:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    caption, sweep, builder, note = _TABLE[key]
    if etas is not None and sweep != "eta":
        raise ValueError(f"preset {key} sweeps {sweep}, not eta")
    scenarios = builder(tuple(DEFAULT_ETAS if etas is None else etas))
    return Preset(key, caption, sweep, scenarios, note)


PRESETS = {name: build_preset(name) for name in preset_names()}


def all_scenarios() -> list:
    """Every distinct preset scenario, in preset order."""
    seen = {}
    for name in preset_names():
        for s in PRESETS[name].scenarios:
            seen.setdefault(s, s)
    return list(seen.values())
