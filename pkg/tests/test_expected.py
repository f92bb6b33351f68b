import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixdist._rng import rng_for
from mixdist.catdissim import eskin, hl_factor, indicator_sd, matching, of_dissim
from mixdist.data import CategoricalColumn, indicator
from mixdist.distance import categorical_contrib
from mixdist.expected import (
    NORMAL_Q75,
    NoClosedForm,
    cat_expected,
    eta_limits,
    mean_abs_difference,
    normal_mean,
    sample_distribution,
    skew_profile,
    table1,
    table3,
    uniform_mean,
)

mpmath.mp.dps = 30


def mp_normal_robust():
    # folded normal mean of N(0, 2) divided by the standard normal IQR
    q75 = mpmath.sqrt(2) * mpmath.erfinv(mpmath.mpf(1) / 2)
    return float(mpmath.sqrt(2) * mpmath.sqrt(2 / mpmath.pi) / (2 * q75))


def mp_uniform_mad():
    return float(mpmath.quad(lambda x: mpmath.quad(lambda y: abs(x - y), [0, x, 1]), [0, 1]))


def test_uniform_closed_forms():
    mad = mp_uniform_mad()  # 1/3 on the unit interval
    assert mad == pytest.approx(1 / 3, abs=1e-14)
    assert uniform_mean("sd") == pytest.approx(mad * math.sqrt(12), abs=1e-14)
    assert uniform_mean("range") == pytest.approx(mad, abs=1e-14)
    assert uniform_mean("robust_range") == pytest.approx(mad / 0.5, abs=1e-14)
    with pytest.raises(ValueError):
        uniform_mean("pc")


def test_normal_closed_forms():
    assert normal_mean("sd") == pytest.approx(2 / math.sqrt(math.pi), abs=1e-15)
    assert NORMAL_Q75 == pytest.approx(0.6744897501960817, abs=1e-12)
    assert normal_mean("robust_range") == pytest.approx(mp_normal_robust(), abs=1e-12)
    assert normal_mean("robust_range") == pytest.approx(0.8364687, abs=1e-7)
    with pytest.raises(NoClosedForm):
        normal_mean("range")


def test_eta_limits():
    assert eta_limits(2) == pytest.approx((1.0, math.sqrt(1.5)), abs=1e-15)
    inf5, _ = eta_limits(5)
    assert inf5 == pytest.approx(math.sqrt(5 / 8), abs=1e-15)
    assert 2 * inf5 == pytest.approx(math.sqrt(10 / 4), abs=1e-15)
    n = 100_000
    for q in (2, 4, 5, 10):
        counts = np.full(q, n // q)
        assert abs(hl_factor(counts) - eta_limits(q)[0]) < 1e-3


# frozen from the independent closed forms (q-1)/q, 2(q-1)/q^3, ...
TABLE3_FORMULA = {
    2: {
        "matching": 0.5,
        "eskin": 0.25,
        "of": 0.5 * math.log(2) ** 2,
        "iof": 0.5 * math.log(80) ** 2,
        "indicator_plain": 1.0,
        "indicator_hl": 1.0,
        "indicator_sd": math.sqrt(2),
        "indicator_cds": 1.0,
        "tvd_assoc": 0.5,
        "kl_assoc": 0.5 * 2 * math.log2(1e5),
    },
    5: {
        "matching": 0.8,
        "eskin": 0.064,
        "of": 0.8 * math.log(5) ** 2,
        "iof": 0.8 * math.log(32) ** 2,
        "indicator_plain": 1.6,
        "indicator_hl": 0.8 * math.sqrt(10 / 4),
        "indicator_sd": 2 * math.sqrt(0.8),
        "indicator_cds": 1.0,
        "tvd_assoc": 0.8,
        "kl_assoc": 0.8 * 2 * math.log2(1e5),
    },
}


@pytest.mark.parametrize("q", [2, 5])
def test_table3_matches_closed_forms(q):
    rows = {r["dissimilarity"]: r for r in table3(q, 160)}
    assert set(rows) == set(TABLE3_FORMULA[q])
    for k, v in TABLE3_FORMULA[q].items():
        assert rows[k]["expected"] == pytest.approx(v, abs=1e-9), k
        # uniform p: every entry is a multiple of matching
        assert rows[k]["expected"] == pytest.approx(rows[k]["offdiag"] * (q - 1) / q, abs=1e-12)


def test_cat_expected_examples():
    assert cat_expected(np.full(5, 0.2), matching(5)) == pytest.approx(0.8, abs=1e-15)
    assert cat_expected([0.5, 0.5], indicator_sd([0.5, 0.5])) == pytest.approx(1.41421356, abs=1e-8)


@settings(max_examples=40)
@given(st.integers(2, 8), st.integers(0, 2**31), st.floats(0.1, 10))
def test_cat_expected_bilinear_and_nonneg(q, seed, c):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(q))
    A = rng.uniform(0, 3, (q, q))
    D = A + A.T
    np.fill_diagonal(D, 0)
    e = cat_expected(p, D)
    assert e >= 0
    assert cat_expected(p, c * D) == pytest.approx(c * e, rel=1e-12)
    # zero off the support of p
    p2 = np.zeros(q)
    p2[0] = 1
    assert cat_expected(p2, D) == 0


@pytest.mark.parametrize("delta_fn", [matching, eskin, lambda q: of_dissim([0.5, 0.3, 0.2][:q])])
def test_cat_expected_sampling_oracle(delta_fn):
    q = 3
    p = np.array([0.5, 0.3, 0.2])
    D = delta_fn(q)
    rng = np.random.default_rng(2024)
    # independent draws of pairs: mean of delta(a, b) within 3 standard errors
    m = 200_000
    a = rng.choice(q, size=m, p=p)
    b = rng.choice(q, size=m, p=p)
    vals = D[a, b]
    se = vals.std() / math.sqrt(m)
    assert abs(vals.mean() - cat_expected(p, D)) < 3 * se
    # and via the contribution matrix of one sample (with-replacement pairs)
    codes = rng.choice(q, size=400, p=p)
    codes[:3] = [0, 1, 2]
    col = CategoricalColumn("c", codes, ("a", "b", "c"))
    C = categorical_contrib(indicator(col), D)
    phat = col.counts() / 400
    assert C.mean() == pytest.approx(cat_expected(phat, D), rel=1e-12)


def test_skew_profile():
    grid = (0.05, 0.5, 0.95)
    m = skew_profile(2, "matching", grid)
    np.testing.assert_allclose(m, [2 * 0.05 * 0.95, 0.5, 2 * 0.95 * 0.05], atol=1e-15)
    full = skew_profile(2, "matching")
    assert np.argmax(full) == 4  # p1 = 0.5
    for q in (3, 5):
        tvd = skew_profile(q, "tvd_assoc", np.linspace(0.05, 0.95, 91))
        assert np.nanargmax(tvd) == pytest.approx(np.argmin(np.abs(np.linspace(0.05, 0.95, 91) - 1 / q)), abs=1)
    iof = skew_profile(10, "iof", (0.5, 0.95))
    assert np.isfinite(iof[0]) and np.isnan(iof[1])
    with pytest.raises(ValueError):
        skew_profile(3, "nope")
    for kind in ("eskin", "of", "indicator_plain", "indicator_hl", "indicator_sd", "indicator_cds", "kl_assoc"):
        assert np.all(skew_profile(4, kind) >= 0)


@settings(max_examples=40)
@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=60))
def test_mean_abs_difference_brute_force(xs):
    n = len(xs)
    brute = sum(abs(a - b) for a in xs for b in xs) / (n * (n - 1))
    assert mean_abs_difference(xs) == pytest.approx(brute, rel=1e-9, abs=1e-9)


def test_sample_distributions():
    rng = rng_for(1, 0)
    b = sample_distribution("bimodal", 10_001, rng)
    assert b.size == 10_001 and b.min() >= 0 and b.max() <= 10
    assert np.all(b[:5000] <= 10) and np.mean(b[:5000]) < 1 and np.mean(b[5000:]) > 9
    s = sample_distribution("skewed", 200_000, rng_for(1, 1))
    assert s.mean() == pytest.approx(0.5, abs=0.01)  # chi-square mean = df
    assert s.var() == pytest.approx(1.0, abs=0.05)  # variance = 2 df
    u = sample_distribution("uniform", 1000, rng_for(1, 2))
    assert 0 <= u.min() and u.max() <= 1
    with pytest.raises(ValueError):
        sample_distribution("cauchy", 10, rng)


def test_table1_deterministic_and_thread_independent():
    a = table1((50,), reps=5, seed=3, threads=1)
    b = table1((50,), reps=5, seed=3, threads=4)
    assert a == b
    assert [r["distribution"] for r in a] == ["normal", "uniform", "skewed", "bimodal"]
    c = table1((50,), reps=5, seed=4, threads=1)
    assert a != c
