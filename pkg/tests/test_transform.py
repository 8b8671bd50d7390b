"""Point transformation, inverse maps and closed-form PDM trajectories."""

import math

import numpy as np
import pytest
from scipy import optimize

from pdmdho.dho_core import AmplitudeVector, DhoParams, SolutionForm, reference_path
from pdmdho.errors import DomainError
from pdmdho.profiles import (Branch, MathewsLakshmanan, MorseExp, NdimML, PowerLaw,
                             SingularRational, Uniform)
from pdmdho.transform import (PdmScenario, admissible_amplitude, crosses_origin, forward_map,
                              inverse_map, pdm_path, pdm_solution)

RNG = np.random.default_rng(20240611)


def _scenario(profile, eta=0.05, a=(1.0,), **kw):
    return PdmScenario(profile, DhoParams(1.0, eta), AmplitudeVector(a), **kw)


def test_forward_examples():
    np.testing.assert_array_equal(forward_map(Uniform(dimension=2), [1.0, 2.0]), [1.0, 2.0])
    assert forward_map(MathewsLakshmanan(1.0), [math.sinh(1.0)])[0] == pytest.approx(1.0, rel=1e-15)
    assert forward_map(SingularRational(1.0), [0.5])[0] == pytest.approx(0.70710678118654752, rel=1e-15)
    with pytest.raises(DomainError):
        forward_map(SingularRational(1.0), [1.2])


def test_inverse_examples():
    assert inverse_map(Uniform(), [3.0])[0] == 3.0
    assert inverse_map(MathewsLakshmanan(2.0), [1.0])[0] == pytest.approx(1.8134302039235093838, rel=1e-15)
    assert inverse_map(SingularRational(1.0), [1.0], Branch.PLUS)[0] == pytest.approx(0.61803398874989484820, rel=1e-15)
    assert inverse_map(SingularRational(1.0), [1.0], "-")[0] == pytest.approx(-1.6180339887498948482, rel=1e-15)
    with pytest.raises(DomainError):
        inverse_map(MorseExp(1.0), [-1.0])
    with pytest.raises(DomainError):
        inverse_map(NdimML(1.0, dimension=2), [0.8, 0.6])


@pytest.mark.parametrize("profile,lo,hi", [
    (Uniform(dimension=3), -3.0, 3.0),
    (MathewsLakshmanan(2.0), -2.0, 2.0),
    (SingularRational(1.0), -3.0, 0.95),
    (MorseExp(3.0), -1.0, 1.0),
    (NdimML(1.5, dimension=3), -2.0, 2.0),
    (PowerLaw(1.0, -0.5, dimension=2), -3.0, 3.0),
    (PowerLaw(3.0, 2.0, dimension=3), -2.0, 2.0),
], ids=lambda v: getattr(v, "family", None))
def test_map_roundtrip(profile, lo, hi):
    for _ in range(100):
        x = RNG.uniform(lo, hi, size=profile.dimension)
        back = inverse_map(profile, forward_map(profile, x), Branch.PLUS)
        np.testing.assert_allclose(back, x, rtol=1e-10, atol=1e-12)


def test_minus_branch_maps_to_negated_q():
    sr = SingularRational(0.5)
    for q in np.linspace(-3.0, 3.0, 13):
        x = inverse_map(sr, [q], Branch.MINUS)
        assert forward_map(sr, x)[0] == pytest.approx(-q, abs=1e-14)


def test_uniform_is_harmonic():
    s = _scenario(Uniform(), eta=0.0, a=(1.3,))
    t = np.linspace(0, 20, 101)
    x, xdot, _ = pdm_path(s, t)
    np.testing.assert_allclose(x[:, 0], 1.3 * np.cos(t), atol=1e-14)
    np.testing.assert_allclose(xdot[:, 0], -1.3 * np.sin(t), atol=1e-14)


def test_ndim_ml_closed_form():
    a = np.array([0.3, -0.2, 0.1])
    lam, eta = 2.0, 1.5
    s = PdmScenario(NdimML(lam, dimension=3), DhoParams(1.0, eta), AmplitudeVector(tuple(a)))
    x0, _ = pdm_solution(s, 0.0)
    a2 = float(a @ a)
    np.testing.assert_allclose(x0, a / math.sqrt(1 - lam ** 2 * a2), rtol=1e-15)
    beta = math.sqrt(eta ** 2 - 1)
    for t in (0.5, 3.0, 12.0):
        ch = math.cosh(beta * t)
        expect = a * ch / math.sqrt(math.exp(2 * eta * t) - lam ** 2 * a2 * ch ** 2)
        np.testing.assert_allclose(pdm_solution(s, t)[0], expect, rtol=1e-12)


def test_morse_initial_value():
    s = _scenario(MorseExp(1.0), eta=0.0)
    assert pdm_solution(s, 0.0)[0][0] == pytest.approx(0.69314718055994530942, rel=1e-15)


FD_SCENARIOS = [
    _scenario(MathewsLakshmanan(2.0), eta=0.2),
    _scenario(SingularRational(1.0), eta=0.2),
    _scenario(SingularRational(1.0), eta=0.2, branch=Branch.MINUS),
    _scenario(MorseExp(1.0), eta=0.2),
    _scenario(NdimML(1.0, dimension=3), eta=0.2, a=(0.5, 0.3, 0.2)),
    _scenario(PowerLaw(1.0, -0.5), eta=1.5),
    _scenario(PowerLaw(2.0, 2.0, dimension=2), eta=1.0, a=(0.6, 0.8)),
    _scenario(MathewsLakshmanan(1.0), eta=0.3, form=SolutionForm.IC_CONSISTENT),
]


@pytest.mark.parametrize("s", FD_SCENARIOS, ids=lambda s: s.describe())
def test_velocity_matches_finite_differences(s):
    t = np.linspace(0.0, 20.0, 400)
    h = 1e-6
    xp = pdm_path(s, t + h)[0]
    xm = pdm_path(s, t - h)[0]
    _, xdot, _ = pdm_path(s, t)
    fd = (xp - xm) / (2 * h)
    scale = np.max(np.abs(xdot))
    assert np.max(np.abs(fd - xdot)) / scale <= 1e-5


@pytest.mark.parametrize("s", [FD_SCENARIOS[4], FD_SCENARIOS[6]], ids=lambda s: s.describe())
def test_ndim_collinear(s):
    t = np.linspace(0.0, 20.0, 2001)
    x, _, _ = pdm_path(s, t)
    u = s.amps.a / s.amps.norm
    perp = x - np.outer(x @ u, u)
    assert np.max(np.linalg.norm(perp, axis=1)) <= 1e-12


@pytest.mark.parametrize("profile", [MathewsLakshmanan(4.0), MorseExp(2.0)], ids=lambda p: p.family)
def test_zero_crossings_transport(profile):
    s = _scenario(profile, eta=0.05, a=(0.4,))
    t = np.linspace(0.0, 20.0, 4001)
    x = pdm_path(s, t)[0][:, 0]
    q = reference_path(s.params, s.amps, t)[0][:, 0]
    np.testing.assert_array_equal(np.signbit(x), np.signbit(q))
    idx = np.nonzero(np.signbit(x[:-1]) != np.signbit(x[1:]))[0]
    assert idx.size >= 5
    for k in idx:
        tx = optimize.brentq(lambda tt: pdm_path(s, tt)[0][0, 0], t[k], t[k + 1], xtol=1e-14)
        tq = optimize.brentq(lambda tt: reference_path(s.params, s.amps, tt)[0][0], t[k], t[k + 1],
                             xtol=1e-14)
        assert abs(tx - tq) <= 1e-9


def test_scenario_invariants():
    with pytest.raises(DomainError):
        _scenario(NdimML(1.0, dimension=2), a=(0.8, 0.6))
    with pytest.raises(ValueError, match="collinear"):
        PdmScenario(Uniform(dimension=2), DhoParams(1.0), AmplitudeVector((1.0, 0.0), B=(0.0, 1.0)))
    with pytest.raises(ValueError):
        _scenario(Uniform(dimension=2))
    with pytest.raises(ValueError):
        _scenario(Uniform(), t_span=(1.0, 1.0))
    s = _scenario(MathewsLakshmanan(1.0), branch="minus", form="ic_consistent")
    assert s.branch is Branch.MINUS and s.form is SolutionForm.IC_CONSISTENT
    assert s.replace(label="x").label == "x"


def test_domain_exit_raises():
    s = _scenario(MorseExp(1.0), eta=0.0, a=(1.5,))
    with pytest.raises(DomainError):
        pdm_path(s, np.linspace(0, 20, 201))


def test_admissible_amplitude_is_sharp():
    params = DhoParams(1.0, 0.05)
    for profile in (MorseExp(3.0), NdimML(2.0)):
        bound = admissible_amplitude(profile, params)
        t = np.linspace(0, 20, 20001)
        ok = PdmScenario(profile, params, AmplitudeVector((0.999 * bound,)))
        pdm_path(ok, t)
        with pytest.raises(DomainError):
            pdm_path(PdmScenario(profile, params, AmplitudeVector((1.001 * bound,))), t)
    assert admissible_amplitude(MathewsLakshmanan(1.0), params) == math.inf


def test_crosses_origin():
    assert crosses_origin(_scenario(Uniform(), eta=0.05))
    assert not crosses_origin(_scenario(Uniform(), eta=1.0))
