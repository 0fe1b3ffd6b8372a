import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from repsig.distributions import Rates, xi_exponential
from repsig.signature import (
    Signature,
    Truncation,
    parallel2_signature,
    parallel2_signature_general,
    parallel_n_signature,
    remark5_signature,
    serial2_xi,
    truncate,
)

from oracles import signature_product_terms

XIS = [i / 10 for i in range(10)]


def head(sig, upto):
    return [sig[j] for j in range(1, upto + 1)]


class TestParallel2:
    def test_two_thirds(self):
        sig = parallel2_signature(2 / 3)
        expected = [0, Fraction(1, 3), Fraction(2, 9), Fraction(4, 27)]
        assert head(sig, 4) == pytest.approx([float(v) for v in expected], abs=1e-15)
        assert sig.tail_start == 2
        assert sig.tail_coefficient == pytest.approx(1 / 3)

    def test_non_repairable(self):
        sig = parallel2_signature(0.0)
        assert head(sig, 5) == [0.0, 1.0, 0.0, 0.0, 0.0]

    def test_point_six(self):
        sig = parallel2_signature(0.6)
        brute = signature_product_terms([0.6] * 5)
        assert sig[2] == pytest.approx(0.4, abs=1e-15)
        assert sig[3] == pytest.approx(0.24, abs=1e-15)
        assert sig[4] == pytest.approx(0.144, abs=1e-15)
        for j in range(2, 7):
            assert sig[j] == pytest.approx(brute[j], abs=1e-15)

    @pytest.mark.parametrize("xi", [-0.1, 1.0, 1.5])
    def test_domain(self, xi):
        with pytest.raises(ValueError):
            parallel2_signature(xi)

    def test_index_from_one(self):
        with pytest.raises(IndexError):
            parallel2_signature(0.5)[0]


class TestGeneral:
    @pytest.mark.parametrize("xi", XIS)
    def test_constant_sequence_reduces(self, xi):
        general = parallel2_signature_general([xi] * 30)
        geometric = parallel2_signature(xi)
        for j in range(1, 32):
            assert general[j] == pytest.approx(geometric[j], abs=1e-15)
        assert general.residual_mass == pytest.approx(xi**30, abs=1e-15)

    def test_first_gap_never_survives(self):
        sig = parallel2_signature_general([0.0, 0.7, 0.3])
        assert head(sig, 4) == [0.0, 1.0, 0.0, 0.0]

    def test_varying_sequence(self):
        sig = parallel2_signature_general([0.5, 0.25, 0.1])
        brute = signature_product_terms([0.5, 0.25, 0.1])
        assert sig[2] == pytest.approx(0.5, abs=1e-15)
        assert sig[3] == pytest.approx(0.375, abs=1e-15)
        assert sig[4] == pytest.approx(0.1125, abs=1e-15)
        assert [sig[j] for j in (2, 3, 4)] == pytest.approx([brute[j] for j in (2, 3, 4)])
        assert sig.residual_mass == pytest.approx(0.5 * 0.25 * 0.1)
        assert len(sig.prefix) == 4

    def test_domain(self):
        with pytest.raises(ValueError):
            parallel2_signature_general([0.5, 1.2])


class TestParallelN:
    @pytest.mark.parametrize("xi", XIS)
    def test_n2_is_parallel2(self, xi):
        assert parallel_n_signature(2, xi) == parallel2_signature(xi)

    def test_three_no_repair(self):
        assert head(parallel_n_signature(3, 0.0), 5) == [0.0, 0.0, 1.0, 0.0, 0.0]

    def test_three_half(self):
        sig = parallel_n_signature(3, 0.5)
        assert head(sig, 5) == [0.0, 0.0, 0.5, 0.25, 0.125]
        assert sig.total_mass() == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("n, xi", [(1, 0.5), (2.5, 0.5), (3, 1.0)])
    def test_domain(self, n, xi):
        with pytest.raises(ValueError):
            parallel_n_signature(n, xi)


class TestSerial:
    def test_table1_rates(self):
        assert serial2_xi(Rates(0.1, 0.2)) == pytest.approx(4 / 9, abs=1e-15)

    def test_equal_rates(self):
        assert serial2_xi(Rates(3.0, 3.0)) == 0.25

    def test_scale_free(self):
        assert serial2_xi(Rates(0.05, 0.1)) == pytest.approx(4 / 9, abs=1e-15)

    @given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
    def test_square_of_xi(self, lam, mu):
        r = Rates(lam, mu)
        assert serial2_xi(r) == xi_exponential(r) ** 2


class TestRemark5:
    def test_series_always_first(self):
        sig = remark5_signature(1.0, 0.4)
        assert head(sig, 4) == [1.0, 0.0, 0.0, 0.0]
        assert list(sig.nonzero_terms()) == [(1, 1.0)]

    @pytest.mark.parametrize("xi", XIS)
    def test_no_series_failure(self, xi):
        sig = remark5_signature(0.0, xi)
        ref = parallel2_signature(xi)
        assert head(sig, 12) == pytest.approx(head(ref, 12), abs=1e-15)

    def test_example(self):
        sig = remark5_signature(0.3, 0.5)
        assert head(sig, 4) == pytest.approx([0.3, 0.35, 0.175, 0.0875], abs=1e-15)
        assert sig.total_mass() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("q, xi", [(-0.1, 0.5), (1.1, 0.5), (0.5, 1.0)])
    def test_domain(self, q, xi):
        with pytest.raises(ValueError):
            remark5_signature(q, xi)


BUILDERS = [
    ("parallel2", lambda xi: parallel2_signature(xi)),
    ("parallel3", lambda xi: parallel_n_signature(3, xi)),
    ("parallel7", lambda xi: parallel_n_signature(7, xi)),
    ("remark5", lambda xi: remark5_signature(0.3, xi)),
    ("general", lambda xi: parallel2_signature_general([xi] * 20)),
]


@pytest.mark.parametrize("name, build", BUILDERS)
@pytest.mark.parametrize("xi", XIS)
def test_mass_conservation(name, build, xi):
    assert build(xi).total_mass() == pytest.approx(1.0, abs=1e-12)


def test_signature_rejects_bad_mass():
    with pytest.raises(ValueError):
        Signature((0.0,), 0.5, 0.2)


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_rate_scaling_invariance(lam, mu, c):
    a = parallel2_signature(xi_exponential(Rates(lam, mu)))
    b = parallel2_signature(xi_exponential(Rates(c * lam, c * mu)))
    assert head(a, 8) == pytest.approx(head(b, 8), rel=1e-12, abs=1e-15)


class TestTruncate:
    def test_nine_terms(self):
        kept = truncate(parallel2_signature(2 / 3), Truncation.by_count(9))
        assert [j for j, _ in kept.terms] == list(range(2, 11))
        assert kept.retained_mass == pytest.approx(1 - (2 / 3) ** 9, abs=1e-12)
        assert kept.retained_mass == pytest.approx(0.97399, abs=1e-5)
        assert kept.tail_mass == pytest.approx((2 / 3) ** 9, abs=1e-15)

    def test_eps_one_keeps_a_term(self):
        for sig in (parallel2_signature(0.9), remark5_signature(0.2, 0.5)):
            kept = truncate(sig, Truncation.by_mass(1.0))
            assert len(kept.terms) == 1

    @pytest.mark.parametrize("k", [1, 3, 50])
    def test_non_repairable_single_term(self, k):
        kept = truncate(parallel2_signature(0.0), Truncation.by_count(k))
        assert kept.terms == ((2, 1.0),)
        assert kept.tail_mass == 0.0

    @pytest.mark.parametrize("eps", [0.5, 1e-3, 1e-9, 1e-13])
    @pytest.mark.parametrize("xi", [0.1, 0.5, 0.9])
    def test_by_mass_bound(self, eps, xi):
        kept = truncate(parallel2_signature(xi), Truncation.by_mass(eps))
        assert kept.tail_mass <= eps
        # one fewer term would not have met the bound
        last = kept.terms[-1]
        if len(kept.terms) > 1:
            assert kept.tail_mass + last[1] > eps

    @pytest.mark.parametrize("k", range(1, 51))
    @pytest.mark.parametrize("xi", [0.3, 2 / 3, 0.95])
    def test_tail_mass_matches_direct_sum(self, k, xi):
        sig = remark5_signature(0.2, xi)
        kept = truncate(sig, Truncation.by_count(k))
        last = kept.terms[-1][0]
        direct = math.fsum(sig[j] for j in range(last + 1, last + 3000))
        assert kept.tail_mass == pytest.approx(direct, abs=1e-12)
        assert kept.retained_mass + kept.tail_mass == pytest.approx(1.0, abs=1e-12)

    def test_general_residual_counts_as_discarded(self):
        sig = parallel2_signature_general([0.5, 0.5])
        kept = truncate(sig, Truncation.by_mass(1e-9))
        assert [j for j, _ in kept.terms] == [2, 3]
        assert kept.tail_mass == pytest.approx(0.25)

    @pytest.mark.parametrize("kw", [{}, {"terms": 0}, {"eps": 0.0}, {"eps": 1.5}, {"terms": 2, "eps": 0.1}])
    def test_invalid_truncation(self, kw):
        with pytest.raises(ValueError):
            Truncation(**kw)
