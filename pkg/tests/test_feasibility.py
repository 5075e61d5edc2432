from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from abcd_waves.feasibility import (
    ABCDParams,
    Verdict,
    WellPosedClass,
    classify,
    divisor_degrees,
    divisor_limit_test,
    kernel_limit_test,
    sign_pattern_sweep,
    sweep_counts,
    wellposedness_class,
)

F = Fraction
SIXTH, THIRD = F(1, 6), F(1, 3)
negative = st.fractions(min_value=-20, max_value=F(-1, 50), max_denominator=50)


def bona_smith_coeffs(mu):
    return ABCDParams(0, (1 - mu) / (3 * (2 - mu)), mu / (3 * (2 - mu)), (1 - mu) / (3 * (2 - mu)))


class TestProvenance:
    def test_from_provenance(self):
        p = ABCDParams.from_provenance(F(1, 2), F(1, 3), F(1, 4))
        assert p.a + p.b == (F(1, 2) - THIRD) / 2
        assert p.c + p.d == (1 - F(1, 2)) / 2

    @given(st.fractions(0, 1, max_denominator=30), st.fractions(-5, 5, max_denominator=30), st.fractions(-5, 5, max_denominator=30))
    def test_sum_identities_exact(self, t, lam, mu):
        p = ABCDParams.from_provenance(t, lam, mu)
        assert p.a + p.b + p.c + p.d == THIRD
        assert p.c + p.d >= 0

    def test_inconsistent_provenance_rejected(self):
        with pytest.raises(ValueError):
            ABCDParams(0, 0, 0, THIRD, theta2=F(1, 2), lam=0, mu=0)

    def test_partial_provenance_rejected(self):
        with pytest.raises(ValueError):
            ABCDParams(0, 0, 0, THIRD, theta2=F(1, 2))

    @given(negative)
    def test_bona_smith_map(self, mu):
        p = ABCDParams.bona_smith(mu)
        assert p.coeffs == bona_smith_coeffs(mu).coeffs
        assert p.a == 0 and p.b == p.d > 0 and p.c < 0
        assert classify(p).verdict is Verdict.FEASIBLE

    def test_bona_smith_needs_negative_mu(self):
        with pytest.raises(ValueError):
            ABCDParams.bona_smith(0)


class TestWellPosedness:
    @pytest.mark.parametrize(
        "coeffs, expected",
        [
            ((0, SIXTH, 0, SIXTH), WellPosedClass.C1),
            ((SIXTH, 0, SIXTH, 0), WellPosedClass.C2),
            ((1, -1, 1, -1), WellPosedClass.C3),
            ((1, 0, 0, 0), WellPosedClass.NONE),
        ],
    )
    def test_classes(self, coeffs, expected):
        assert wellposedness_class(ABCDParams(*coeffs)) is expected


class TestKernelLimit:
    def test_bona_smith_limit(self):
        p = bona_smith_coeffs(F(-1))
        alpha, beta = F(2), F(3)
        kl = kernel_limit_test(p, alpha, beta)
        assert kl.finite
        assert kl.limit == -beta**2 * p.c / (alpha * p.b * p.d)

    def test_case_three_infinite(self):
        kl = kernel_limit_test(ABCDParams(F(-1, 12), F(1, 4), F(-1, 12), F(1, 4)))
        assert not kl.finite and kl.label == "+inf"

    def test_bbm_limit_zero(self):
        kl = kernel_limit_test(ABCDParams(0, SIXTH, 0, SIXTH))
        assert kl.finite and kl.limit == 0
        assert (kl.num_degree, kl.den_degree) == (2, 4)

    def test_degenerate_denominator_is_infinite(self):
        kl = kernel_limit_test(ABCDParams(SIXTH, 0, SIXTH, 0))
        assert not kl.finite and kl.den_degree == 0

    def test_requires_wellposed(self):
        with pytest.raises(ValueError):
            kernel_limit_test(ABCDParams(1, 0, 0, 0))

    def test_sequence_tends_to_limit(self):
        p = bona_smith_coeffs(F(-2))
        kl = kernel_limit_test(p, 1, 1, P=400)
        assert kl.sequence[-1] == pytest.approx(float(kl.limit), rel=1e-3)


class TestDivisorLimit:
    def test_case_two_witness(self):
        dl = divisor_limit_test(ABCDParams(0, THIRD, 0, 0))
        assert not dl.bounded and dl.witness == "B"
        # b_p grows without bound along the sampled sequence
        assert dl.witness_sequence[-1] > 10 * dl.witness_sequence[9]

    def test_classical_boussinesq_unbounded(self):
        dl = divisor_limit_test(ABCDParams(0, 0, 0, THIRD))
        assert not dl.bounded and dl.witness == "A"

    def test_bona_smith_bounded(self):
        dl = divisor_limit_test(bona_smith_coeffs(F(-1)), 2, 3)
        assert dl.bounded and dl.witness is None

    def test_degrees(self):
        assert divisor_degrees(ABCDParams(0, THIRD, 0, 0)) == {"delta": 2, "A": 2, "B": 3}


class TestClassify:
    @pytest.mark.parametrize(
        "coeffs, verdict",
        [
            ((0, SIXTH, 0, SIXTH), Verdict.FEASIBLE),
            ((0, THIRD, 0, 0), Verdict.INFEASIBLE),
            ((0, 0, 0, THIRD), Verdict.INFEASIBLE),
            ((SIXTH, 0, SIXTH, 0), Verdict.UNCERTAIN),
            ((1, -1, 1, -1), Verdict.NONE),
        ],
    )
    def test_table(self, coeffs, verdict):
        assert classify(ABCDParams(*coeffs)).verdict is verdict

    def test_sweep_counts(self):
        assert sweep_counts() == {"Feasible": 3, "Infeasible": 2, "Uncertain": 11}

    def test_verdict_invariants(self):
        for _, v in sign_pattern_sweep():
            if v.verdict is Verdict.INFEASIBLE:
                assert v.divisor_bounded == "no"
            if v.verdict is Verdict.FEASIBLE:
                assert v.kernel_limit.finite and v.divisor_bounded == "yes"

    @pytest.mark.parametrize("coeffs", [(0, SIXTH, 0, SIXTH), (0, THIRD, 0, 0), (SIXTH, 0, SIXTH, 0)])
    def test_scan_depth_does_not_flip_verdict(self, coeffs):
        p = ABCDParams(*coeffs)
        assert classify(p, P=10, Q=3).verdict is classify(p, P=120, Q=30).verdict

    def test_uncertain_gets_resonance_scan_with_parameters(self):
        v = classify(ABCDParams(SIXTH, 0, SIXTH, 0), alpha=1, beta=1)
        scan = v.evidence["resonance_scan"]
        assert scan["complete"] is False and scan["scanned_p"] == 50

    def test_exceptional_q_downgrades(self):
        # leading coefficient cancels when q^2 = beta^2 c / (alpha b d); pick it to be 1
        p = bona_smith_coeffs(F(-1))
        alpha = -p.c / (p.b * p.d)
        v = classify(p, alpha=alpha, beta=1)
        assert v.divisor_bounded == "parameter-dependent"
        assert v.verdict is Verdict.UNCERTAIN

    def test_as_dict(self):
        doc = classify(ABCDParams(0, SIXTH, 0, SIXTH)).as_dict()
        assert doc["wellposed_class"] == "C1" and doc["kernel_limit"] == "0"
