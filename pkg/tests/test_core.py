"""Tests for the Bayes factor core.

Frozen reference values were computed with mpmath at 40 digits directly from
the defining formulas (not through this package).
"""

import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from bicbf.core import (
    AnovaSummary,
    BayesFactorResult,
    Path,
    SumsOfSquares,
    bf01_from_delta_bic,
    bf01_from_sse,
    bf01_from_summary,
    bf10_from_bf01,
    bic_from_loglik,
    classify_evidence,
    critical_f,
    delta_bic_from_f,
    delta_bic_from_sse,
)
from bicbf.errors import DegenerateDataError, InvalidArgumentError, ValidationError

# mpmath, 40 digits
BIC_100_3_50 = 211.73606901628443818
DBIC_SSE_2_4_10 = -4.6288867126054074102
DBIC_FAYOL = 1.1267244074124973450
DBIC_4_35 = -0.97928168018422689373
BF01_FAYOL = 1.7565685241273563537
BF01_4_35 = 0.61284646454157913865
BF10_4_35 = 1.6317300626805754698
FSTAR_18_1_17 = 2.9611833026942460017
FSTAR_300_2_294 = 5.6973416767580220476

FAYOL = AnovaSummary(1.75, 1, 17, 18)


class TestBicFromLoglik:
    def test_zero(self):
        assert bic_from_loglik(0.0, 1, 1) == 0.0

    def test_unit_n(self):
        assert bic_from_loglik(-10.0, 2, 1) == 20.0

    def test_oracle(self):
        assert bic_from_loglik(-100.0, 3, 50) == pytest.approx(BIC_100_3_50, rel=1e-14)

    @pytest.mark.parametrize("args", [(math.nan, 1, 5), (math.inf, 1, 5), (0.0, 0, 5), (0.0, 1, 0)])
    def test_invalid(self, args):
        with pytest.raises(InvalidArgumentError):
            bic_from_loglik(*args)


class TestDeltaBicFromSse:
    def test_equal_sse(self):
        assert delta_bic_from_sse(5.0, 5.0, 20, 1) == pytest.approx(math.log(20), rel=1e-15)

    def test_oracle(self):
        assert delta_bic_from_sse(2.0, 4.0, 10, 1) == pytest.approx(DBIC_SSE_2_4_10, rel=1e-13)

    def test_fayol_reconstruction(self):
        # any pair with sse_h0/sse_h1 = 1 + 1.75/17; ln(1.757) is the rounded paper value
        for sse_h1 in (1.0, 17.0, 3.3e4):
            d = delta_bic_from_sse(sse_h1, sse_h1 * (1 + 1.75 / 17), 18, 1)
            assert d == pytest.approx(DBIC_FAYOL, rel=1e-12)
            assert d == pytest.approx(2 * math.log(1.757), abs=1e-3)

    def test_h0_smaller_rejected(self):
        with pytest.raises(InvalidArgumentError):
            delta_bic_from_sse(4.0, 2.0, 10, 1)

    @pytest.mark.parametrize("sse_h1", [0.0, -1.0])
    def test_degenerate(self, sse_h1):
        with pytest.raises(DegenerateDataError):
            delta_bic_from_sse(sse_h1, 1.0, 10, 1)

    @given(
        st.floats(1e-6, 1e6), st.floats(0, 1e6), st.floats(1e-3, 1e3),
        st.integers(2, 10_000), st.integers(1, 20),
    )
    def test_scale_free(self, ss_err, ss_eff, c, n, k):
        a = delta_bic_from_sse(ss_err, ss_eff + ss_err, n, k)
        b = delta_bic_from_sse(c * ss_err, c * ss_eff + c * ss_err, n, k)
        assert a == pytest.approx(b, rel=1e-10, abs=1e-10)


class TestDeltaBicFromF:
    def test_zero_f(self):
        assert delta_bic_from_f(AnovaSummary(0.0, 1, 17, 18)) == pytest.approx(math.log(18), rel=1e-15)

    def test_fayol(self):
        assert delta_bic_from_f(FAYOL) == pytest.approx(DBIC_FAYOL, rel=1e-13)
        assert delta_bic_from_f(FAYOL) == pytest.approx(2 * math.log(1.757), abs=1e-3)

    def test_paper_notation_example(self):
        assert delta_bic_from_f(AnovaSummary(4.35, 1, 23, 24)) == pytest.approx(DBIC_4_35, rel=1e-12)

    def test_missing_n(self):
        with pytest.raises(InvalidArgumentError, match="N_MISSING"):
            delta_bic_from_f(AnovaSummary(1.0, 1, 10))


class TestBf01FromDeltaBic:
    def test_equal_bics(self):
        r = bf01_from_delta_bic(0.0)
        assert r.bf01 == 1.0 and r.log_bf10 == 0.0 and r.category == "equivocal"

    def test_fayol(self):
        assert bf01_from_delta_bic(2 * math.log(1.757)).bf01 == pytest.approx(1.757, rel=1e-14)

    def test_hundredfold(self):
        r = bf01_from_delta_bic(-9.2103)
        assert r.bf01 == pytest.approx(0.01, rel=1e-4)
        assert r.bf10 == pytest.approx(100.0, rel=1e-4)

    def test_saturates_instead_of_overflowing(self):
        r = bf01_from_delta_bic(1e5)
        assert r.log_bf10 == -5e4
        assert math.isfinite(r.bf01) and r.bf10 > 0

    def test_non_finite(self):
        with pytest.raises(InvalidArgumentError):
            bf01_from_delta_bic(math.inf)


class TestBf01FromSummary:
    def test_fayol(self):
        r = bf01_from_summary(FAYOL)
        assert r.bf01 == pytest.approx(1.757, abs=5e-4)
        assert r.bf01 == pytest.approx(BF01_FAYOL, rel=1e-13)
        assert r.path is Path.FROM_SUMMARY
        assert r.category == "weak evidence for the null"

    def test_f_zero_maximum(self):
        assert bf01_from_summary(AnovaSummary(0.0, 2, 294, 300)).bf01 == pytest.approx(300.0, rel=1e-13)

    def test_oracle(self):
        r = bf01_from_summary(AnovaSummary(4.35, 1, 23, 24))
        assert r.bf01 == pytest.approx(BF01_4_35, rel=1e-12)
        assert r.bf10 == pytest.approx(BF10_4_35, rel=1e-12)

    def test_large_n_no_overflow(self):
        # raw n**df1 would overflow a double here
        r = bf01_from_summary(AnovaSummary(0.5, 150, 10_000, 10_000))
        assert math.isfinite(r.log_bf10)
        assert r.log_bf10 == pytest.approx(-(-10_000 * math.log1p(0.5 * 150 / 10_000) + 150 * math.log(10_000)) / 2)

    def test_equals_delta_bic_route(self):
        s = AnovaSummary(3.1, 2, 40, 45)
        assert bf01_from_summary(s).log_bf10 == bf01_from_delta_bic(delta_bic_from_f(s)).log_bf10


class TestBf10FromBf01:
    def test_identity_at_one(self):
        assert bf10_from_bf01(bf01_from_delta_bic(0.0)).bf01 == 1.0

    def test_fayol_inverted(self):
        r = bf01_from_delta_bic(2 * math.log(1.757))
        flipped = bf10_from_bf01(r)
        assert r.bf10 == pytest.approx(0.5692, abs=5e-5)
        assert flipped.bf01 == pytest.approx(0.5692, abs=5e-5)
        assert flipped.log_bf10 == -r.log_bf10

    def test_from_oracle(self):
        r = bf01_from_summary(AnovaSummary(4.35, 1, 23, 24))
        assert bf10_from_bf01(r).bf01 == pytest.approx(BF10_4_35, rel=1e-12)

    @given(st.floats(-700, 700, allow_nan=False))
    def test_involution(self, x):
        r = BayesFactorResult(x)
        assert bf10_from_bf01(bf10_from_bf01(r)).log_bf10 == r.log_bf10


class TestClassifyEvidence:
    def test_equivocal(self):
        assert classify_evidence(0.0) == "equivocal"

    def test_fayol_weak_null(self):
        assert classify_evidence(-math.log(1.757)) == "weak evidence for the null"

    def test_strong_alternative(self):
        assert classify_evidence(4.0) == "strong evidence for the alternative"

    @pytest.mark.parametrize(
        "log_bf10, label",
        [
            (1.0, "weak evidence for the alternative"),
            (1.0001, "positive evidence for the alternative"),
            (-3.0, "positive evidence for the null"),
            (-3.0001, "strong evidence for the null"),
            (5.0, "strong evidence for the alternative"),
            (5.0001, "very strong evidence for the alternative"),
        ],
    )
    def test_band_edges(self, log_bf10, label):
        assert classify_evidence(log_bf10) == label


class TestCriticalF:
    def test_fayol_design(self):
        f_star = critical_f(18, 1, 17)
        assert f_star == pytest.approx(FSTAR_18_1_17, rel=1e-13)
        assert bf01_from_summary(AnovaSummary(f_star, 1, 17, 18)).bf01 == pytest.approx(1.0, abs=1e-10)

    def test_simulation_design(self):
        f_star = critical_f(300, 2, 294)
        assert f_star == pytest.approx(FSTAR_300_2_294, rel=1e-13)
        assert bf01_from_summary(AnovaSummary(f_star, 2, 294, 300)).bf01 == pytest.approx(1.0, abs=1e-10)

    @given(st.integers(2, 100_000), st.integers(1, 30), st.integers(1, 100_000))
    def test_round_trip(self, n, df1, df2):
        f_star = critical_f(n, df1, df2)
        assert bf01_from_summary(AnovaSummary(f_star, df1, df2, n)).bf01 == pytest.approx(1.0, abs=1e-10)

    def test_invalid(self):
        with pytest.raises(InvalidArgumentError):
            critical_f(1, 1, 1)


class TestDomainTypes:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(f_value=-0.1, df1=1, df2=2),
            dict(f_value=math.inf, df1=1, df2=2),
            dict(f_value=1.0, df1=0, df2=2),
            dict(f_value=1.0, df1=1, df2=0),
            dict(f_value=1.0, df1=1, df2=2, n=1),
            dict(f_value=1.0, df1=1, df2=2, reported_p=1.0),
            dict(f_value=1.0, df1=1.5, df2=2),
        ],
    )
    def test_summary_invariants(self, kwargs):
        with pytest.raises(ValidationError):
            AnovaSummary(**kwargs)

    def test_sums_of_squares(self):
        s = SumsOfSquares(13.5, 4.0)
        assert (s.sse_h1, s.sse_h0) == (4.0, 17.5)
        with pytest.raises(DegenerateDataError):
            SumsOfSquares(1.0, 0.0)
        with pytest.raises(InvalidArgumentError):
            SumsOfSquares(-1.0, 1.0)

    @given(st.floats(-700, 700))
    def test_result_invariants(self, x):
        r = BayesFactorResult(x)
        assert r.bf01 * r.bf10 == pytest.approx(1.0, rel=1e-12)
        assert r.bf01 == pytest.approx(math.exp(-x), rel=1e-12)
        assert r.category == classify_evidence(x)


summaries = st.builds(
    AnovaSummary,
    f_value=st.floats(0, 1e4),
    df1=st.integers(1, 20),
    df2=st.integers(1, 2000),
    n=st.integers(2, 5000),
)


@given(summaries)
def test_bounds(s):
    r = bf01_from_summary(s)
    assert r.bf01 > 0
    assert -r.log_bf10 <= s.df1 / 2 * math.log(s.n) * (1 + 1e-15)


@given(summaries, st.floats(1e-6, 10))
def test_strictly_decreasing_in_f(s, step):
    bigger = AnovaSummary(s.f_value * (1 + step) + step, s.df1, s.df2, s.n)
    assume(bigger.f_value * bigger.df1 / bigger.df2 - s.f_value * s.df1 / s.df2 > 1e-9)
    assert bf01_from_summary(bigger).log_bf10 > bf01_from_summary(s).log_bf10


@given(summaries)
def test_sign_matches_critical_f(s):
    f_star = critical_f(s.n, s.df1, s.df2)
    assume(abs(s.f_value - f_star) > 1e-8 * f_star)
    r = bf01_from_summary(s)
    assert (r.log_bf10 > 0) == (s.f_value > f_star)


@settings(max_examples=300)
@given(st.floats(0, 1e6), st.floats(1e-6, 1e6), st.integers(1, 10), st.integers(1, 500), st.integers(2, 5000))
def test_path_equivalence(ss_eff, ss_err, df1, df2, n):
    via_sse = bf01_from_sse(SumsOfSquares(ss_eff, ss_err), n, df1).log_bf10
    f = (ss_eff / df1) / (ss_err / df2)
    assume(math.isfinite(f))
    via_f = bf01_from_summary(AnovaSummary(f, df1, df2, n)).log_bf10
    assert via_sse == pytest.approx(via_f, rel=1e-9, abs=1e-9)
