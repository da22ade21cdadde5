import json
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from conftest import identical_groups, make_grouped, random_spd
from covhomog import numcore
from covhomog.covstats import (
    POOLED,
    box_m,
    box_m_constants,
    eig_size_stats,
    eig_stats,
    eig_stats_to_json,
    logdet_ci,
    logdet_sd,
    scree_data,
    summarize,
    summarize_groups,
)
from covhomog.data import GroupedDataset
from covhomog.errors import DegenerateGroup, InsufficientSample, NotPositiveDefinite, ValidationError


def box_m_oracle(groups):
    """Box's M from raw group arrays using numpy/scipy only."""
    ns = np.array([len(Y) for Y in groups])
    covs = [np.cov(Y, rowvar=False) for Y in groups]
    g, N, p = len(groups), ns.sum(), covs[0].shape[0]
    Sp = sum((n - 1) * S for n, S in zip(ns, covs)) / (N - g)
    M = (N - g) * np.linalg.slogdet(Sp)[1] - sum((n - 1) * np.linalg.slogdet(S)[1] for n, S in zip(ns, covs))
    c1 = (np.sum(1 / (ns - 1)) - 1 / (N - g)) * (2 * p**2 + 3 * p - 1) / (6 * (p + 1) * (g - 1))
    df = (g - 1) * p * (p + 1) / 2
    chi = (1 - c1) * M
    return M, chi, df, stats.chi2.sf(chi, df)


class TestSummarize:
    def test_identical_copies(self, rng=np.random.default_rng(1)):
        base = rng.normal(size=(12, 3))
        cs = summarize(identical_groups(base, 2))
        np.testing.assert_allclose(cs.pooled, cs.groups[0].cov, rtol=1e-12)
        np.testing.assert_allclose(cs.groups[0].cov, np.cov(base, rowvar=False), rtol=1e-12)

    def test_pooled_weights(self):
        rng = np.random.default_rng(2)
        a, b = rng.normal(size=(3, 2)), rng.normal(size=(5, 2))
        d = GroupedDataset(np.vstack([a, b]), ["a"] * 3 + ["b"] * 5, ["x", "y"])
        cs = summarize(d)
        expected = (2 / 6) * np.cov(a, rowvar=False) + (4 / 6) * np.cov(b, rowvar=False)
        np.testing.assert_allclose(cs.pooled, expected, rtol=1e-10)
        assert (cs.N, cs.g, cs.p) == (8, 2, 2)

    def test_iris_matrices_pd(self, iris):
        cs = summarize(iris)
        mats = cs.matrices()
        assert len(mats) == 4
        for _, _, S, _ in mats:
            assert S.shape == (4, 4)
            assert np.all(np.linalg.eigvalsh(S) > 0)
            np.linalg.cholesky(S)

    def test_pooled_effective_n(self, iris):
        label, n, _, pooled = summarize(iris).matrices()[-1]
        assert (label, n, pooled) == (POOLED, 148, True)

    def test_grand_mean(self, wine):
        np.testing.assert_allclose(summarize(wine).grand_mean, wine.values.mean(axis=0), rtol=1e-12)

    def test_singleton_group(self):
        d = GroupedDataset([[1.0], [2.0], [3.0]], ["a", "a", "b"], ["x"])
        with pytest.raises(DegenerateGroup):
            summarize(d)


class TestBoxM:
    def test_iris(self, iris):
        r = box_m(summarize(iris))
        assert r.chisq == pytest.approx(140.94, abs=0.05)
        assert r.df == 20
        assert r.p_value < 1e-15

    def test_wine(self, wine):
        r = box_m(summarize(wine))
        assert r.chisq == pytest.approx(684.2, abs=1.0)
        assert r.df == 182

    def test_skulls(self, skulls):
        r = box_m(summarize(skulls))
        assert r.chisq == pytest.approx(45.67, abs=0.5)
        assert r.p_value == pytest.approx(0.248, abs=0.01)

    @pytest.mark.parametrize("seed", range(5))
    def test_against_oracle(self, seed):
        rng = np.random.default_rng(seed)
        d = make_grouped(rng, [15, 20, 11], 3, scales=[1.0, 1.5, 0.7])
        r = box_m(summarize(d))
        M, chi, df, pv = box_m_oracle([d.group_values(n) for n in d.group_names])
        assert r.M == pytest.approx(M, rel=1e-10)
        assert r.chisq == pytest.approx(chi, rel=1e-10)
        assert r.df == df
        assert r.p_value == pytest.approx(pv, rel=1e-8)

    @pytest.mark.parametrize("g", [2, 3, 5])
    def test_identical_groups(self, g):
        base = np.random.default_rng(g).normal(size=(10, 3))
        r = box_m(summarize(identical_groups(base, g)))
        assert r.M == 0.0
        assert r.chisq == 0.0
        assert r.p_value == 1.0

    @pytest.mark.parametrize("c", [1e-3, 0.5, 7.0, 1e4])
    def test_scale_invariance(self, c):
        rng = np.random.default_rng(3)
        cs = summarize(make_grouped(rng, [10, 14, 9], 4, scales=[1, 2, 0.5]))
        scaled = summarize_groups([(gr.name, gr.n, gr.mean, c * gr.cov) for gr in cs.groups], cs.variable_names)
        assert box_m(scaled).M == pytest.approx(box_m(cs).M, abs=1e-8)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(1, 4))
    def test_nonnegative(self, seed, g, p):
        rng = np.random.default_rng(seed)
        groups = [(f"g{i}", int(n), np.zeros(p), random_spd(rng, p, 0.05))
                  for i, n in enumerate(rng.integers(p + 2, 30, size=g))]
        r = box_m(summarize_groups(groups, [f"v{j}" for j in range(p)]))
        assert r.M >= 0.0
        assert r.chisq >= 0.0
        assert 0.0 <= r.p_value <= 1.0

    @pytest.mark.parametrize("g", range(2, 7))
    @pytest.mark.parametrize("p", range(1, 9))
    def test_df_closed_form(self, g, p):
        _, df = box_m_constants([p + 5] * g, p)
        assert df == (g - 1) * p * (p + 1) // 2

    def test_c1_hand_value(self):
        # g=2, n=(10, 10), p=2: (2/9 - 1/18) * 13 / 18
        c1, _ = box_m_constants([10, 10], 2)
        assert c1 == pytest.approx((2 / 9 - 1 / 18) * 13 / 18, rel=1e-14)

    def test_singular_group_named(self):
        rng = np.random.default_rng(4)
        a = rng.normal(size=(8, 2))
        b = rng.normal(size=(6, 1)) @ np.array([[1.0, 2.0]])
        d = GroupedDataset(np.vstack([a, b]), ["ok"] * 8 + ["flat"] * 6, ["x", "y"])
        with pytest.raises(NotPositiveDefinite) as info:
            box_m(summarize(d))
        assert info.value.label == "flat"
        assert "flat" in str(info.value)

    def test_single_group_rejected(self):
        d = GroupedDataset(np.random.default_rng(5).normal(size=(9, 2)), ["a"] * 9, ["x", "y"])
        with pytest.raises(ValidationError):
            box_m(summarize(d))

    def test_logdet_entries_order(self, skulls):
        r = box_m(summarize(skulls))
        assert [e.label for e in r.logdets] == list(skulls.group_names) + [POOLED]
        assert [e.pooled for e in r.logdets] == [False] * 5 + [True]

    def test_ci_nan_when_sample_small(self):
        rng = np.random.default_rng(6)
        d = make_grouped(rng, [4, 30], 3)
        r = box_m(summarize(d))
        assert math.isnan(r.logdets[0].lower)
        assert json.loads(r.to_json())["ci_lower"][0] is None

    def test_json_keys(self, iris):
        doc = json.loads(box_m(summarize(iris)).to_json())
        for key in ("statistic", "df", "p_value", "logdet", "ci_lower", "ci_upper", "groups"):
            assert key in doc
        assert len(doc["logdet"]) == 4

    def test_text_report(self, iris):
        text = box_m(summarize(iris)).to_text()
        assert "chisq 140.94" in text
        assert "df 20" in text.splitlines()


class TestLogdetCi:
    def test_single_term(self):
        assert logdet_sd(101, 1) ** 2 == pytest.approx(0.02, rel=1e-14)

    def test_setosa_variance(self):
        expected = 2 * (1 / 49 + 1 / 48 + 1 / 47 + 1 / 46)
        assert logdet_sd(50, 4) ** 2 == pytest.approx(expected, rel=1e-14)
        # the quoted rounding 0.16847 is slightly low; the explicit sum is 0.168514
        assert expected == pytest.approx(0.16851, abs=1e-5)

    def test_half_width(self):
        lo, hi = logdet_ci(1.5, 50, 4, 0.95)
        sd = logdet_sd(50, 4)
        assert (hi - lo) / 2 == pytest.approx(stats.norm.ppf(0.975) * sd, rel=1e-10)
        assert (hi + lo) / 2 == pytest.approx(1.5, rel=1e-14)

    @pytest.mark.parametrize("p", [1, 3, 6])
    def test_width_decreasing_in_n(self, p):
        widths = [np.diff(logdet_ci(0.0, n, p))[0] for n in range(p + 2, p + 60)]
        assert np.all(np.diff(widths) < 0)

    @pytest.mark.parametrize("n,p", [(2, 1), (5, 4), (3, 4)])
    def test_insufficient(self, n, p):
        with pytest.raises(InsufficientSample):
            logdet_sd(n, p)

    def test_iris_setosa_below_pooled(self, iris):
        r = box_m(summarize(iris))
        setosa = next(e for e in r.logdets if e.label == "setosa")
        assert setosa.upper < r.logdets[-1].logdet

    def test_skulls_intervals_overlap_pooled(self, skulls):
        r = box_m(summarize(skulls))
        pooled = r.logdets[-1]
        for e in r.logdets[:-1]:
            assert e.lower <= pooled.upper and pooled.lower <= e.upper


class TestEigSizeStats:
    def test_identity(self):
        # precision is 1 / sum(1/lambda), so three unit roots give 1/3
        s = eig_size_stats(np.eye(3))
        assert (s.log_product, s.sum, s.precision, s.max) == pytest.approx((0.0, 3.0, 1 / 3, 1.0), abs=1e-14)

    def test_diag(self):
        s = eig_size_stats(np.diag([1.0, 4.0]))
        assert s.precision == pytest.approx(0.8, rel=1e-14)
        assert s.max == pytest.approx(4.0, rel=1e-14)
        assert s.sum == pytest.approx(5.0, rel=1e-14)
        assert s.log_product == pytest.approx(math.log(4.0), rel=1e-14)

    @pytest.mark.parametrize("seed", range(10))
    def test_against_direct_formulas(self, seed):
        rng = np.random.default_rng(seed)
        S = random_spd(rng, int(rng.integers(1, 7)))
        s = eig_size_stats(S)
        assert s.log_product == pytest.approx(numcore.log_det(S), abs=1e-8)
        assert s.log_product == pytest.approx(np.linalg.slogdet(S)[1], abs=1e-8)
        assert s.sum == pytest.approx(np.trace(S), rel=1e-10)
        assert s.precision == pytest.approx(1 / np.trace(np.linalg.inv(S)), rel=1e-8)
        assert s.max == pytest.approx(scipy.linalg.eigvalsh(S)[-1], rel=1e-10)
        assert s.precision <= s.sum / S.shape[0] * (1 + 1e-12)

    def test_not_pd(self):
        with pytest.raises(NotPositiveDefinite):
            eig_size_stats(np.diag([1.0, 0.0]))

    def test_wine_grignolino_closest(self, wine):
        st_ = eig_stats(summarize(wine))
        pooled = st_[-1].log_product
        gaps = {s.label: abs(s.log_product - pooled) for s in st_[:-1]}
        assert min(gaps, key=gaps.get) == "grignolino"

    def test_json(self, iris):
        doc = json.loads(eig_stats_to_json(eig_stats(summarize(iris))))
        assert [m["label"] for m in doc["matrices"]] == ["setosa", "versicolor", "virginica", POOLED]
        assert set(doc["matrices"][0]) >= {"log_product", "sum", "precision", "max", "eigenvalues"}


class TestScree:
    def test_diag_single(self):
        cs = summarize_groups([("a", 10, [0, 0], np.diag([1.0, 4.0])), ("b", 10, [0, 0], np.diag([1.0, 4.0]))],
                              ["x", "y"])
        for s in scree_data(cs):
            np.testing.assert_allclose(s.log_eigenvalues, [math.log(4.0), 0.0], atol=1e-14)

    def test_identical_groups_coincide(self):
        base = np.random.default_rng(7).normal(size=(15, 4))
        series = scree_data(summarize(identical_groups(base, 3)))
        assert len(series) == 4
        for s in series[1:]:
            np.testing.assert_allclose(s.log_eigenvalues, series[0].log_eigenvalues, rtol=1e-12, atol=1e-12)

    def test_descending(self, wine):
        for s in scree_data(summarize(wine)):
            assert len(s.log_eigenvalues) == 13
            assert np.all(np.diff(s.log_eigenvalues) <= 0)

    def test_wine_divergence_grows(self, wine):
        groups = np.array([s.log_eigenvalues for s in scree_data(summarize(wine))[:-1]])
        spread = groups.max(axis=0) - groups.min(axis=0)
        assert spread[-3:].mean() > spread[:3].mean()
