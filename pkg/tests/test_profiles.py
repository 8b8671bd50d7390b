"""Mass/deformation pairs: closed forms, domains, derivatives and the m-Q relation."""

import math

import numpy as np
import pytest

from pdmdho.errors import ConvergenceError, DomainError, QuadratureError
from pdmdho.profiles import (Branch, CustomProfile, Domain, MathewsLakshmanan, MorseExp, NdimML,
                             PowerLaw, SingularRational, Uniform, deformation_from_mass,
                             eval_deformation, eval_deformation_deriv, eval_mass, eval_mass_deriv,
                             make_profile, mass_from_deformation)

FAMILIES = [
    (Uniform(), np.linspace(0.0, 3.0, 100)),
    (MathewsLakshmanan(2.0), np.linspace(-2.0, 2.0, 100)),
    (MathewsLakshmanan(0.5), np.linspace(-2.0, 2.0, 100)),
    (SingularRational(1.0), np.linspace(-2.0, 0.9, 100)),
    (SingularRational(0.3), np.linspace(-2.0, 3.0, 100)),
    (MorseExp(1.0), np.linspace(-2.0, 2.0, 100)),
    (MorseExp(5.0), np.linspace(-0.4, 0.4, 100)),
    (NdimML(1.0, dimension=3), np.linspace(0.0, 3.0, 100)),
    (PowerLaw(1.0, -0.5), np.linspace(0.05, 3.0, 100)),
    (PowerLaw(3.0, 0.5), np.linspace(0.05, 3.0, 100)),
    (PowerLaw(1.0, 2.0), np.linspace(0.05, 3.0, 100)),
]
IDS = [f"{p.family}-{i}" for i, (p, _) in enumerate(FAMILIES)]


def test_eval_mass_examples():
    assert eval_mass(Uniform(), 3.7) == 1.0
    assert eval_mass(MathewsLakshmanan(1.0), 1.0) == pytest.approx(0.5, rel=1e-15)
    assert eval_mass(NdimML(1.0), 1.0) == pytest.approx(0.125, rel=1e-15)
    with pytest.raises(DomainError):
        eval_mass(SingularRational(1.0), 1.0)


def test_eval_deformation_examples():
    assert eval_deformation(Uniform(), 2.0) == 1.0
    assert eval_deformation(SingularRational(0.5), 1.0) == pytest.approx(2.0, rel=1e-15)
    ml = MathewsLakshmanan(1.0)
    assert eval_deformation(ml, 0.0) == 1.0
    assert eval_deformation(ml, 1e-12) == pytest.approx(1.0, abs=1e-15)
    # continuity across the limit/series cutoffs
    for x in (1e-9, 1e-7, 5e-3, 2e-2):
        exact = (math.asinh(x) / x) ** 2
        assert eval_deformation(ml, x) == pytest.approx(exact, rel=1e-14)


def test_domain_errors_name_the_family():
    with pytest.raises(DomainError, match="singular_rational"):
        SingularRational(2.0).deformation(0.6)
    with pytest.raises(DomainError):
        PowerLaw(1.0, -0.5).mass(0.0)
    with pytest.raises(DomainError):
        NdimML(1.0).mass(-1.0)
    # sigma = 0 keeps the origin
    assert PowerLaw(2.0, 0.0).mass(0.0) == 4.0


def test_power_law_sigma_zero_is_constant():
    p = PowerLaw(1.5, 0.0)
    r = np.linspace(0.0, 4.0, 9)
    np.testing.assert_allclose(p.mass(r), 1.5 ** 2)
    # sqrt(Q) = alpha, so Q = alpha^2 (see the m-Q relation)
    np.testing.assert_allclose(p.deformation(r), 1.5 ** 2)
    np.testing.assert_allclose(p.velocity_coupling(r[1:]), 0.0)


@pytest.mark.parametrize("profile,grid", FAMILIES, ids=IDS)
def test_positive_on_domain(profile, grid):
    assert np.all(profile.mass(grid) > 0)
    assert np.all(profile.deformation(grid) > 0)


@pytest.mark.parametrize("profile,grid", FAMILIES, ids=IDS)
def test_m_q_relation_pointwise(profile, grid):
    m = profile.mass(grid)
    q = profile.deformation(grid)
    dq = profile.deformation_deriv(grid)
    rhs = np.sqrt(q) * (1.0 + dq * grid / (2.0 * q))
    np.testing.assert_allclose(np.sqrt(m), rhs, rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("profile,grid", FAMILIES, ids=IDS)
def test_derivatives_match_central_differences(profile, grid):
    h = 1e-6
    inner = grid[2:-2]
    for f, df in ((profile.mass, profile.mass_deriv),
                  (profile.deformation, profile.deformation_deriv)):
        fd = (f(inner + h) - f(inner - h)) / (2 * h)
        exact = df(inner)
        scale = np.maximum(np.abs(exact), np.abs(f(inner)))
        assert np.max(np.abs(fd - exact) / scale) <= 1e-5


@pytest.mark.parametrize("profile,grid", FAMILIES, ids=IDS)
def test_roundtrip_quadrature_and_algebraic(profile, grid):
    for r in grid:
        r = float(r)
        q = profile.deformation(r)
        m = profile.mass(r)
        assert abs(deformation_from_mass(profile.mass, r) - q) / q <= 1e-8
        assert abs(mass_from_deformation(profile.deformation, profile.deformation_deriv, r) - m) / m <= 1e-12


@pytest.mark.parametrize("profile,grid", FAMILIES, ids=IDS)
def test_radial_map_inverse_roundtrip(profile, grid):
    s = profile.radial_map(grid)
    back = profile.inverse_radial(s, Branch.PLUS)
    np.testing.assert_allclose(back, grid, rtol=1e-10, atol=1e-12)


def test_deformation_from_mass_examples():
    assert deformation_from_mass(lambda s: 1.0, 5.0) == pytest.approx(1.0, rel=1e-14)
    # (e - 1)^2, evaluated with mpmath
    morse = MorseExp(1.0)
    assert deformation_from_mass(morse.mass, 1.0) == pytest.approx(2.95249244201255975650985, rel=1e-12)
    ml = MathewsLakshmanan(2.0)
    assert deformation_from_mass(ml.mass, 0.5) == pytest.approx(math.asinh(1.0) ** 2, rel=1e-12)
    # limit at the origin is m(0)
    assert deformation_from_mass(lambda s: 4.0 + s, 0.0) == pytest.approx(4.0)


def test_deformation_from_mass_errors():
    with pytest.raises(DomainError):
        deformation_from_mass(lambda s: 1.0 - s, 2.0)
    with pytest.raises(QuadratureError):
        deformation_from_mass(lambda s: 1.0 + math.sin(1.0 / (s + 1e-9)) ** 2, 1.0, limit=3)


def test_mass_from_deformation_examples():
    assert mass_from_deformation(lambda r: 1.0, lambda r: 0.0, 7.0) == 1.0
    sr = SingularRational(1.0)
    assert mass_from_deformation(sr.deformation, sr.deformation_deriv, 0.5) == pytest.approx(4.5, rel=1e-14)
    pl = PowerLaw(1.0, 2.0)
    assert mass_from_deformation(pl.deformation, pl.deformation_deriv, 2.0) == pytest.approx(144.0, rel=1e-14)
    with pytest.raises(DomainError):
        mass_from_deformation(lambda r: -1.0, lambda r: 0.0, 1.0)
    with pytest.raises(DomainError):
        # bracket 1 + Q' r / (2Q) = 1 - 2 r vanishes at r = 0.5
        mass_from_deformation(lambda r: 1.0, lambda r: -4.0, 0.5)


def test_derivative_accessors_are_checked():
    assert eval_mass_deriv(Uniform(), 2.0) == 0.0
    assert eval_deformation_deriv(SingularRational(1.0), 0.0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        eval_mass_deriv(SingularRational(1.0), 2.0)


def test_radial_coupling_finite_at_origin():
    nd = NdimML(2.0, dimension=2)
    assert nd.velocity_coupling(0.0) == pytest.approx(-12.0)
    custom = CustomProfile(lambda r: 1.0 / (1.0 + r * r), lambda r: -2.0 * r / (1.0 + r * r) ** 2)
    # m''(0) / (2 m(0)) = -1
    assert custom.velocity_coupling(0.0) == pytest.approx(-1.0, rel=1e-6)


def test_custom_profile_matches_builtin():
    ml = NdimML(1.0)
    custom = CustomProfile(lambda r: float(ml.mass(r)), lambda r: float(ml.mass_deriv(r)))
    r = np.linspace(0.0, 2.0, 11)
    np.testing.assert_allclose(custom.deformation(r), ml.deformation(r), rtol=1e-10)
    np.testing.assert_allclose(custom.deformation_deriv(r), ml.deformation_deriv(r), rtol=1e-8, atol=1e-12)
    s = ml.radial_map(r)
    np.testing.assert_allclose(custom.inverse_radial(s), r, rtol=1e-10, atol=1e-14)


def test_numeric_inverse_outside_image():
    # the radial map of NdimML saturates at 1/lam
    custom = CustomProfile(lambda r: float(NdimML(1.0).mass(r)), lambda r: 0.0)
    with pytest.raises((DomainError, ConvergenceError)):
        custom.inverse_radial(1.5)


def test_singular_rational_branches():
    sr = SingularRational(1.0)
    plus = sr.inverse_radial(1.0, Branch.PLUS)
    minus = sr.inverse_radial(1.0, Branch.MINUS)
    assert plus == pytest.approx((math.sqrt(5) - 1) / 2, rel=1e-15)
    assert minus == pytest.approx(-(math.sqrt(5) + 1) / 2, rel=1e-15)
    # both roots solve x^2 / (1 - lam x) = q^2
    for x in (plus, minus):
        assert x * x / (1 - x) == pytest.approx(1.0, rel=1e-14)
    # the textbook (q/2)(sqrt(q^2 + 4) - q) loses 8 digits here; reference from mpmath
    assert sr.inverse_radial(1e4) == pytest.approx(0.99999999000000019999999500, rel=1e-15)


def test_domain_contains_and_str():
    d = Domain(0.0, 1.0, lo_open=False)
    assert d.contains(0.0) and not d.contains(1.0)
    assert str(d) == "[0, 1)"


@pytest.mark.parametrize("kwargs", [dict(lam=0.0), dict(lam=-1.0), dict(lam=math.nan)])
def test_invalid_lambda(kwargs):
    with pytest.raises(ValueError):
        MathewsLakshmanan(**kwargs)


def test_make_profile():
    assert make_profile("Mathews_Lakshmanan", lam=2) == MathewsLakshmanan(2.0)
    assert make_profile("power_law", alpha=1, sigma=-0.5, dimension=3) == PowerLaw(1.0, -0.5, 3)
    with pytest.raises(ValueError, match="unknown family"):
        make_profile("harmonic")
    with pytest.raises(ValueError):
        make_profile("morse_exp", lam=1.0, dimension=2)
    with pytest.raises(ValueError):
        PowerLaw(1.0, -1.0)
