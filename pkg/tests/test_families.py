"""Tests for the Panjer/power-series families and their Stein machinery."""

import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.stats as st
from hypothesis import given, settings
from hypothesis import strategies as hs

from psdapprox.errors import (
    InvalidFamilyError,
    LemmaConditionError,
    NonNormalizableError,
    UndefinedMomentsError,
)
from psdapprox.families import (
    PMFTable,
    PSDSpec,
    PanjerPSD,
    binomial_family,
    delta_g_exact_sup,
    delta_g_uniform_bound,
    dgm_to_psd,
    family_from_json,
    family_to_json,
    g_norm_bound,
    geometric_family,
    indicator,
    negative_binomial_family,
    pmf_panjer,
    poisson_family,
    stein_apply,
    stein_solve,
)


# -- mass tables ---------------------------------------------------------------


def test_poisson_masses_match_closed_form():
    spec = poisson_family(2.0)
    table = pmf_panjer(spec, 10)
    expected = [math.exp(-2.0) * 2.0**k / math.factorial(k) for k in range(11)]
    assert np.allclose(table.as_array(), expected, rtol=1e-13, atol=0)


def test_binomial_masses_symmetric_case():
    spec = binomial_family(4, 0.5)
    table = pmf_panjer(spec)
    assert table.tail_mass_bound == 0.0
    assert np.allclose(table.as_array(), np.array([1, 4, 6, 4, 1]) / 16.0, rtol=1e-12)


def test_geometric_masses_are_halving():
    spec = PanjerPSD(0.5, 0.5)  # NB n=1, q=1/2
    table = pmf_panjer(spec, 8)
    assert np.allclose(table.as_array(), [0.5**(k + 1) for k in range(9)], rtol=1e-12)


@pytest.mark.parametrize(
    "spec,frozen",
    [
        (poisson_family(3.1), st.poisson(3.1)),
        (negative_binomial_family(2.0, 0.4), st.nbinom(2.0, 0.4)),
        (binomial_family(9, 0.37), st.binom(9, 0.37)),
        (geometric_family(0.55), st.nbinom(1, 0.55)),
    ],
)
def test_recursion_matches_scipy_pointwise(spec, frozen):
    table = spec.pmf(25)
    ks = np.arange(len(table.masses))
    assert np.allclose(table.as_array(), frozen.pmf(ks), rtol=1e-11, atol=1e-15)


def test_tail_bound_is_honest_and_small():
    spec = poisson_family(4.0)
    table = spec.pmf(12)
    actual_tail = 1.0 - st.poisson(4.0).cdf(12)
    assert table.tail_mass_bound >= actual_tail
    auto = spec.pmf()
    assert auto.tail_mass_bound < 1e-13


def test_normalization_invariant():
    for spec in [
        poisson_family(0.5),
        poisson_family(8.0),
        negative_binomial_family(3, 0.3),
        binomial_family(20, 0.2),
    ]:
        assert abs(spec.pmf().total_with_tail() - 1.0) < 1e-10


def test_divergent_family_rejected():
    with pytest.raises(NonNormalizableError):
        PanjerPSD(1.0, 1.0)
    with pytest.raises(NonNormalizableError):
        PanjerPSD(0.5, 1.2)


def test_negative_mass_rejected():
    with pytest.raises(InvalidFamilyError):
        PanjerPSD(2.5, -1.0, max_support=5)  # a+bk < 0 from k=3 on
    with pytest.raises(InvalidFamilyError):
        PanjerPSD(2.5, -1.0)  # zero crossing not an integer
    with pytest.raises(InvalidFamilyError):
        PanjerPSD(-1.0, 0.0)


def test_pmf_exact_binomial():
    spec = binomial_family(4, 0.5)
    table = spec.pmf_exact()
    assert table.exact
    assert list(table.masses) == [
        Fraction(1, 16),
        Fraction(4, 16),
        Fraction(6, 16),
        Fraction(4, 16),
        Fraction(1, 16),
    ]


def test_pmf_table_validation():
    with pytest.raises(InvalidFamilyError):
        PMFTable(0, (0.5, -0.1, 0.6))
    with pytest.raises(InvalidFamilyError):
        PMFTable(0, (0.5, 0.1))  # mass 0.6, no tail


@given(
    a=hs.floats(0.2, 5.0),
    b=hs.floats(0.0, 0.8),
)
@settings(max_examples=40, deadline=None)
def test_recursion_invariant_property(a, b):
    spec = PanjerPSD(a, b)
    table = spec.pmf()
    p = table.as_array()
    for k in range(min(len(p) - 1, 40)):
        assert (k + 1) * p[k + 1] == pytest.approx((a + b * k) * p[k], rel=1e-12)
    assert abs(table.total_with_tail() - 1.0) < 1e-10
    mean_table = float(np.dot(p, np.arange(len(p))))
    assert mean_table == pytest.approx(a / (1 - b), rel=1e-8, abs=1e-8)


# -- moments ---------------------------------------------------------------------


def test_mean_var_examples():
    assert PanjerPSD(3.0, 0.0).mean_var() == (3.0, 3.0)
    mean, var = PanjerPSD(2.0, 0.5).mean_var()
    assert (mean, var) == pytest.approx((4.0, 8.0))
    mean, var = PanjerPSD(0.5 * 5, 0.5).mean_var()
    assert (mean, var) == pytest.approx((5.0, 10.0))


def test_mean_var_undefined():
    spec = binomial_family(6, 0.3)
    assert spec.mean_var() == pytest.approx((1.8, 1.26))
    bad = PanjerPSD.__new__(PanjerPSD)
    object.__setattr__(bad, "a", 1.0)
    object.__setattr__(bad, "b", 1.0)
    with pytest.raises(UndefinedMomentsError):
        PanjerPSD.mean_var(bad)


# -- Stein operator ---------------------------------------------------------------


def test_stein_apply_zero_function():
    spec = poisson_family(1.7)
    assert stein_apply(spec, lambda k: 0.0, 5) == 0.0


def test_stein_apply_direct_value():
    spec = PanjerPSD(2.0, 0.0)
    assert stein_apply(spec, lambda k: float(k), 1) == pytest.approx(3.0)


@pytest.mark.parametrize(
    "spec",
    [poisson_family(1.0), negative_binomial_family(2, 0.45), binomial_family(7, 0.3)],
)
def test_stein_identity_random_g(spec):
    rng = np.random.default_rng(42)
    table = spec.pmf(tail_target=1e-18)
    p = table.as_array()
    k_top = len(p) - 1
    for _ in range(10):
        gv = rng.uniform(-1, 1, size=k_top + 2)
        gv[0] = 0.0
        if spec.max_support is not None:
            gv[spec.max_support + 1 :] = 0.0  # stay in the admissible class

        def g(k, gv=gv):
            return gv[k] if k < len(gv) else 0.0

        val = math.fsum(p[k] * stein_apply(spec, g, k) for k in range(len(p)))
        slack = table.tail_mass_bound * (abs(spec.a) + (abs(spec.b) + 1) * len(p)) * 2
        assert abs(val) < 1e-10 + slack


# -- Stein equation solution -------------------------------------------------------


def test_solution_constant_f_is_zero():
    spec = poisson_family(2.0)
    g = stein_solve(spec, lambda k: 3.25)
    assert all(g(k) == pytest.approx(0.0, abs=1e-12) for k in range(30))


def test_solution_residual_poisson():
    spec = poisson_family(1.0)
    f = indicator({0})
    g = stein_solve(spec, f)
    assert g.ef == pytest.approx(math.exp(-1.0), rel=1e-12)
    for k in range(51):
        resid = stein_apply(spec, g, k) - (f(k) - g.ef)
        assert abs(resid) < 1e-12, f"k={k}"


def test_solution_dual_forms_agree():
    # Float64 forms agree up to the roundoff envelope eps/(k p_k): the two
    # displayed sums share the tiny nonzero float total of p*h.
    spec = negative_binomial_family(2, 0.4)
    f = indicator(range(4))
    g = stein_solve(spec, f)
    p = spec.pmf(60).as_array()
    for k in range(1, 51):
        slack = 1e-12 + 1e-16 / (k * p[k])
        assert abs(g.forward_form(k) - g.tail_form(k)) < slack, f"k={k}"


def test_solution_dual_forms_agree_highprec_oracle():
    # Independent oracle: evaluate both displayed forms in 60-digit arithmetic
    # where the k-range of the check is not limited by float cancellation.
    import mpmath as mp

    with mp.workdps(60):
        alpha, pbar = 2, mp.mpf("0.4")
        q = 1 - pbar
        a, b = alpha * q, q
        K = 400  # table long enough that the dropped tail is ~q^K
        p = [pbar**alpha]
        for k in range(K):
            p.append(p[-1] * (a + b * k) / (k + 1))
        fv = [1 if k < 4 else 0 for k in range(K + 1)]
        ef = mp.fsum(pk * f for pk, f in zip(p, fv))
        h = [f - ef for f in fv]
        for k in range(1, 51):
            fwd = mp.fsum(p[j] * h[j] for j in range(k)) / (k * p[k])
            tail = -mp.fsum(p[j] * h[j] for j in range(k, K + 1)) / (k * p[k])
            assert abs(fwd - tail) < 1e-12, f"k={k}"


def test_solution_residual_binomial_support():
    spec = binomial_family(6, 0.35)
    f = indicator({1, 4})
    g = stein_solve(spec, f)
    for k in range(7):
        resid = stein_apply(spec, g, k) - (f(k) - g.ef)
        assert abs(resid) < 1e-12
    assert g(8) == 0.0  # off support by convention


def test_solution_residual_random_sets():
    rng = np.random.default_rng(7)
    specs = [poisson_family(4.0), negative_binomial_family(3, 0.6), geometric_family(0.5)]
    for spec in specs:
        for _ in range(5):
            A = {int(k) for k in rng.choice(31, size=rng.integers(1, 12), replace=False)}
            f = indicator(A)
            g = stein_solve(spec, f, f_bound=1.0)
            for k in range(51):
                resid = stein_apply(spec, g, k) - (f(k) - g.ef)
                assert abs(resid) < 1e-10


# -- forward-difference bounds ------------------------------------------------------


def test_uniform_bound_examples():
    assert delta_g_uniform_bound(poisson_family(4.0)) == pytest.approx(0.25)
    assert delta_g_uniform_bound(PanjerPSD(0.5, 0.5)) == pytest.approx(1.0)
    assert delta_g_uniform_bound(binomial_family(10, 0.5)) == pytest.approx(0.2)


def test_uniform_bound_binomial_conventions():
    raw = delta_g_uniform_bound(binomial_family(10, 0.5, convention="panjer"))
    std = delta_g_uniform_bound(binomial_family(10, 0.5, convention="standard"))
    assert raw == pytest.approx(1 / (10 * 0.5))
    assert std == pytest.approx(1 / (10 * 0.5 * 0.5))


def test_uniform_bound_requires_positive_a():
    with pytest.raises(InvalidFamilyError):
        delta_g_uniform_bound(PanjerPSD(0.0, 0.5))


def test_exact_sup_dominated_by_uniform():
    cases = [
        (poisson_family(1.0), 40),
        (poisson_family(4.0), 60),
        (geometric_family(0.7), 60),  # (a,b) = (0.3, 0.3)
        (negative_binomial_family(2, 0.5), 60),
        (binomial_family(12, 0.25), 12),
    ]
    for spec, k_max in cases:
        exact = delta_g_exact_sup(spec, k_max)
        assert exact <= delta_g_uniform_bound(spec) + 1e-12
        assert exact <= 1.0 + 1e-12


def test_exact_sup_poisson4_value():
    assert delta_g_exact_sup(poisson_family(4.0), 60) <= 0.25 + 1e-12


def test_exact_sup_condition_failure_reported():
    # Two-point family with a gap-heavy shape violates the ratio monotonicity.
    spec = PSDSpec(theta=1.0, coeff=lambda k: [1.0, 0.05, 1.0][k] if k < 3 else 0.0)
    with pytest.raises(LemmaConditionError):
        delta_g_exact_sup(spec, 2)


def test_solution_delta_sup_within_uniform_bound():
    rng = np.random.default_rng(123)
    for spec in [poisson_family(0.5), poisson_family(4.0), binomial_family(8, 0.4)]:
        ub = delta_g_uniform_bound(spec)
        for _ in range(10):
            A = {int(k) for k in rng.choice(31, size=rng.integers(1, 16), replace=False)}
            g = stein_solve(spec, indicator(A), f_bound=1.0)
            assert g.sup_abs_delta(60) <= ub + 1e-12


def test_g_norm_bound_dominates_observed_sup():
    rng = np.random.default_rng(5)
    spec = poisson_family(1.5)
    cap = g_norm_bound(spec)
    observed = 0.0
    for _ in range(25):
        A = {int(k) for k in rng.choice(25, size=rng.integers(1, 10), replace=False)}
        g = stein_solve(spec, indicator(A), f_bound=1.0)
        observed = max(observed, max(abs(g(k)) for k in range(40)))
    assert 0 < observed <= cap


# -- Gibbs-measure mapping -----------------------------------------------------------


def test_dgm_poisson():
    spec = dgm_to_psd(lambda k: 0.0, 2.5)
    ref = poisson_family(2.5).pmf(15).as_array()
    assert np.allclose(spec.pmf(15).as_array(), ref, rtol=1e-10)


def test_dgm_constant_coefficients():
    spec = dgm_to_psd(lambda k: math.lgamma(k + 1), 0.5)
    ref = geometric_family(0.5).pmf(15).as_array()
    assert np.allclose(spec.pmf(15).as_array(), ref, rtol=1e-10)


def test_dgm_negative_binomial():
    n, q = 3, 0.4

    def V(k):
        # ln C(n+k-1, k) + ln k!
        return math.lgamma(n + k) - math.lgamma(n)

    spec = dgm_to_psd(V, q)
    ref = pmf_panjer(PanjerPSD(n * q, q), 20).as_array()
    assert np.allclose(spec.pmf(20).as_array(), ref, rtol=1e-10)


def test_dgm_divergent_rejected():
    with pytest.raises(NonNormalizableError):
        dgm_to_psd(lambda k: math.lgamma(k + 1), 1.5)  # geometric ratio 1.5


# -- serialization --------------------------------------------------------------------


def test_json_round_trip_panjer():
    spec = binomial_family(11, 0.3, convention="standard")
    clone = family_from_json(family_to_json(spec))
    assert clone == spec


def test_json_round_trip_series():
    spec = PSDSpec(theta=0.6, coeff=lambda k: 1.0 if k < 20 else 0.0)
    obj = family_to_json(spec)
    clone = family_from_json(obj)
    assert np.allclose(clone.pmf(10).as_array(), spec.pmf(10).as_array(), rtol=1e-12)


def test_stein_solution_off_support_and_origin():
    spec = poisson_family(3.0)
    g = stein_solve(spec, indicator({2}))
    assert g(0) == 0.0
    assert g(-3) == 0.0
