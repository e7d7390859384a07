import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st
from scipy import integrate

from conftest import BUILTINS
from copula_mixing import (
    CdfCopula,
    Clayton,
    Frechet,
    HoeffdingM,
    HoeffdingW,
    Independence,
    Mardia,
    Mixture,
    check_axioms,
    mix,
    parse_copula,
)
from copula_mixing.errors import BoundaryEvaluationError, InvalidParameterError, SpecParseError

unit = st.floats(min_value=0.0, max_value=1.0)


def fd_dudv(cdf, u, v, h=1e-4):
    return (cdf(u + h, v + h) - cdf(u - h, v + h) - cdf(u + h, v - h) + cdf(u - h, v - h)) / (4 * h * h)


# ---------------------------------------------------------------- cdf

def test_cdf_examples():
    assert Independence().cdf(0.5, 0.5) == 0.25
    assert HoeffdingM().cdf(0.3, 0.7) == 0.3
    assert Clayton(1.0).cdf(0.5, 0.5) == pytest.approx(1 / 3, abs=1e-15)


def test_clayton_cdf_matches_formula():
    for a in (0.5, 1.0, 4.0):
        for u, v in [(0.2, 0.9), (0.7, 0.4)]:
            expected = (u**-a + v**-a - 1) ** (-1 / a)
            assert Clayton(a).cdf(u, v) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("alpha", [0.0, -1.0, float("nan"), float("inf")])
def test_clayton_rejects_bad_alpha(alpha):
    with pytest.raises(InvalidParameterError):
        Clayton(alpha)


@pytest.mark.parametrize("a,b", [(-0.1, 0.2), (0.7, 0.5), (0.3, -0.01)])
def test_frechet_rejects_bad_weights(a, b):
    with pytest.raises(InvalidParameterError):
        Frechet(a, b)


def test_mardia_rejects_theta():
    with pytest.raises(InvalidParameterError):
        Mardia(1.5)


@pytest.mark.parametrize("name", list(BUILTINS))
@given(u=unit, v=unit)
def test_cdf_within_frechet_bounds(name, u, v):
    c = float(BUILTINS[name].cdf(u, v))
    assert max(u + v - 1, 0) - 1e-12 <= c <= min(u, v) + 1e-12


# ---------------------------------------------------------------- conditional cdf

def test_conditional_cdf_examples():
    assert Independence().conditional_cdf(0.4, 0.5) == 0.5
    assert HoeffdingM().conditional_cdf(0.3, 0.5) == 1.0
    fr = Frechet(0.3, 0.2)
    assert fr.conditional_cdf(0.4, 0.5) == pytest.approx(0.55, abs=1e-15)


def test_frechet_conditional_cdf_against_finite_difference():
    fr = Frechet(0.3, 0.2)
    h = 1e-6
    oracle = (fr.cdf(0.4 + h, 0.5) - fr.cdf(0.4 - h, 0.5)) / (2 * h)
    assert oracle == pytest.approx(0.55, abs=1e-8)
    assert fr.conditional_cdf(0.4, 0.5) == pytest.approx(oracle, abs=1e-8)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0])
def test_clayton_conditional_cdf_against_finite_difference(alpha):
    c = Clayton(alpha)
    h = 1e-6
    for u, v in [(0.2, 0.3), (0.5, 0.9), (0.8, 0.1)]:
        oracle = (c.cdf(u + h, v) - c.cdf(u - h, v)) / (2 * h)
        assert c.conditional_cdf(u, v) == pytest.approx(oracle, abs=1e-7)


@pytest.mark.parametrize("u", [0.0, 1.0])
def test_conditional_cdf_boundary_error(u):
    with pytest.raises(BoundaryEvaluationError):
        Independence().conditional_cdf(u, 0.5)


def test_conditional_cdf_monotone_and_normalized(builtin):
    v = np.linspace(0.0, 1.0, 1001)
    for u in np.arange(0.01, 1.0, 0.01):
        g = builtin.conditional_cdf(float(u), v)
        assert g[-1] == pytest.approx(1.0, abs=1e-9)
        assert g[0] == pytest.approx(0.0, abs=1e-9) or builtin.atoms(float(u))[0][0] == 0.0
        assert np.all(np.diff(g) >= -1e-9)


def test_custom_cdf_uses_finite_differences():
    c = CdfCopula(lambda u, v: u * v)
    assert c.conditional_cdf(0.3, 0.6) == pytest.approx(0.6, abs=1e-9)
    assert c.ac_density(0.3, 0.6) == pytest.approx(1.0, abs=1e-4)


# ---------------------------------------------------------------- densities

def test_ac_density_examples():
    assert Independence().ac_density(0.3, 0.8) == 1.0
    assert Frechet(0.3, 0.2).ac_density(0.2, 0.9) == pytest.approx(0.5)
    assert Clayton(1.0).ac_density(0.5, 0.5) == pytest.approx(32 / 27, rel=1e-13)


def test_clayton_density_symbolic_and_fd():
    u, v, a = sympy.symbols("u v a", positive=True)
    C = (u**-a + v**-a - 1) ** (-1 / a)
    dens = sympy.lambdify((u, v, a), sympy.diff(C, u, v))
    for alpha in (0.5, 1.0, 2.5):
        cl = Clayton(alpha)
        for pt in [(0.5, 0.5), (0.2, 0.7), (0.9, 0.35)]:
            sym = float(dens(*pt, alpha))
            assert cl.ac_density(*pt) == pytest.approx(sym, rel=1e-12)
            assert fd_dudv(cl.cdf, *pt) == pytest.approx(sym, rel=1e-5)
    assert float(dens(0.5, 0.5, 1.0)) == pytest.approx(32 / 27, rel=1e-14)


def test_clayton_density_integrates_to_one():
    c = Clayton(1.0)
    inner = lambda x: integrate.quad(lambda y: float(c.ac_density(x, y)), 0, 1,
                                     points=[x], epsabs=1e-12, limit=200)[0]
    total = integrate.quad(inner, 0, 1, epsabs=1e-10, limit=200)[0]
    assert total == pytest.approx(1.0, abs=1e-6)


def test_row_mass_ac_plus_atoms(builtin):
    for u in (0.1, 0.37, 0.5, 0.9):
        ac = integrate.quad(lambda y: float(builtin.ac_density(u, y)), 0, 1,
                            points=[u], epsabs=1e-11, limit=200)[0]
        atoms = sum(m for _, m in builtin.atoms(u))
        assert ac + atoms == pytest.approx(1.0, abs=1e-7)


# ---------------------------------------------------------------- mixtures

def test_mix_examples():
    theta = 0.5
    t2 = theta**2
    m = mix([HoeffdingM(), Independence(), HoeffdingW()],
            [t2 * (1 + theta) / 2, 1 - t2, t2 * (1 - theta) / 2])
    g = np.linspace(0, 1, 101)
    U, V = np.meshgrid(g, g)
    assert np.max(np.abs(m.cdf(U, V) - Mardia(theta).cdf(U, V))) <= 1e-12
    assert mix([Independence()], [1.0]) == Independence()
    assert mix([HoeffdingM(), HoeffdingW()], [0.5, 0.5]).cdf(0.5, 0.5) == pytest.approx(0.25)


@pytest.mark.parametrize("weights", [[0.5, 0.6], [-0.1, 1.1], [1.0]])
def test_mix_weight_validation(weights):
    with pytest.raises(InvalidParameterError):
        mix([Independence(), HoeffdingM()], weights)


@given(w=st.lists(st.floats(0.0, 1.0), min_size=3, max_size=3).filter(lambda w: sum(w) > 0.1),
       u=unit, v=unit)
def test_mixture_is_weighted_sum(w, u, v):
    w = np.array(w) / sum(w)
    w[-1] = 1.0 - w[:-1].sum()
    if w[-1] < 0:
        return
    comps = [Clayton(2.0), HoeffdingM(), Frechet(0.1, 0.4)]
    m = mix(comps, w)
    expected = sum(wi * float(c.cdf(u, v)) for wi, c in zip(w, comps))
    assert float(m.cdf(u, v)) == pytest.approx(expected, abs=1e-12)


def test_mixture_atoms_merge_at_half():
    m = mix([HoeffdingM(), HoeffdingW(), Independence()], [0.2, 0.3, 0.5])
    assert m.atoms(0.5) == [(0.5, pytest.approx(0.5))]
    assert len(m.atoms(0.2)) == 2


@given(theta=st.floats(-1.0, 1.0), u=unit, v=unit)
def test_mardia_is_frechet(theta, u, v):
    t2 = theta * theta
    fr = Frechet(t2 * (1 + theta) / 2, t2 * (1 - theta) / 2)
    assert float(Mardia(theta).cdf(u, v)) == pytest.approx(float(fr.cdf(u, v)), abs=1e-12)


# ---------------------------------------------------------------- axioms

def test_axioms_independence():
    r = check_axioms(Independence(), 50)
    assert r.passed
    assert r.min_rectangle_mass == pytest.approx(1 / 2500, rel=1e-10)


def test_axioms_builtins(builtin):
    assert check_axioms(builtin, 50).passed


def test_axioms_corrupted():
    bad = CdfCopula(lambda u, v: np.where((u > 0) & (v > 0), u * v - 0.01, u * v))
    r = check_axioms(bad, 50)
    assert not r.passed
    assert r.margin_violation == pytest.approx(0.01)


@settings(max_examples=30)
@given(a=st.floats(0, 1), b=st.floats(0, 1), alpha=st.floats(0.05, 10))
def test_axioms_random_params(a, b, alpha):
    if a + b > 1:
        a, b = a / (a + b), b / (a + b)
    assert check_axioms(Frechet(a, b), 20).passed
    assert check_axioms(Clayton(alpha), 20).passed


# ---------------------------------------------------------------- spec strings

@pytest.mark.parametrize("spec,cls", [
    ("indep", Independence), ("m", HoeffdingM), ("w", HoeffdingW),
    ("clayton:alpha=1.0", Clayton), ("frechet:a=0.3,b=0.2", Frechet),
    ("mardia:theta=0.5", Mardia), ("mix:0.5*clayton:alpha=1.0+0.5*indep", Mixture),
])
def test_parse_roundtrip(spec, cls):
    c = parse_copula(spec)
    assert type(c) is cls
    again = parse_copula(c.spec)
    assert again.cdf(0.3, 0.6) == c.cdf(0.3, 0.6)


@pytest.mark.parametrize("spec", ["gumbel:theta=2", "clayton:beta=1", "frechet:a=0.3",
                                  "mix:0.5*indep+0.4*m", "mix:indep", "clayton:alpha=x"])
def test_parse_errors(spec):
    with pytest.raises((SpecParseError, InvalidParameterError)):
        parse_copula(spec)


def test_builtins_are_immutable():
    c = BUILTINS["frechet"]
    with pytest.raises(Exception):
        c.a = 0.9
    assert math.isclose(c.a, 0.3)
