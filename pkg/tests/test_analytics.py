"""Closed-form excess-distribution model and its internal cross-checks.

The dependence probability is pinned against brute-force enumeration of the
allowed candidate set, the series pmf against an exact-rational rebuild of
the same DP, and the baseline against both a hand product and a Monte Carlo
rank experiment.
"""

import math
import random
from fractions import Fraction

import pytest

import oracles
from rlfc import analytics
from rlfc.analytics import (
    ExcessDistribution,
    ModelParams,
    baseline_traditional,
    excess_distribution,
    expected_excess_closed_form,
    feasibility_bound,
    infeasible_from,
    prob_dependent,
    prob_dependent_exact,
)


def _enumerated_dependence(k, gamma, history_bits):
    """P(next dependent) by enumerating every candidate against the rule."""
    excl = oracles.excluded_set(history_bits, gamma)
    span = oracles.span_bits(history_bits)
    allowed = [v for v in range(1 << k) if v not in excl]
    dependent = [v for v in allowed if v in span]
    return Fraction(len(dependent), len(allowed))


# -------------------------------------------------------- prob_dependent


def test_prob_dependent_pinned_k3():
    p = ModelParams(k=3, gamma=1)
    assert prob_dependent_exact(2, p) == Fraction(1, 5)
    assert prob_dependent(2, p) == pytest.approx(0.2)
    # independent route: two independent vectors transmitted, enumerate
    assert _enumerated_dependence(3, 1, [0b001, 0b010]) == Fraction(1, 5)


def test_prob_dependent_pinned_k5():
    assert prob_dependent_exact(4, ModelParams(k=5, gamma=2)) == Fraction(5, 21)


def test_prob_dependent_zero_at_low_rank():
    for k in range(2, 8):
        for gamma in range(4):
            p = ModelParams(k=k, gamma=gamma)
            for u in range(0, min(gamma + 1, k)):
                assert prob_dependent(u, p) == 0.0


def test_prob_dependent_range_errors():
    p = ModelParams(k=4, gamma=1)
    with pytest.raises(ValueError):
        prob_dependent(4, p)
    with pytest.raises(ValueError):
        prob_dependent(-1, p)


def test_prob_dependent_enumeration_grid():
    """Formula equals candidate enumeration for every small (k, gamma, u).

    The history is u linearly independent vectors; both a unit-vector
    history and random independent histories must give the same rational.
    """
    rng = random.Random(43)
    for k in range(1, 5):
        for gamma in range(3):
            p = ModelParams(k=k, gamma=gamma)
            for u in range(k):
                expect = prob_dependent_exact(u, p)
                units = [1 << i for i in range(u)]
                assert _enumerated_dependence(k, gamma, units) == expect
                # random independent history of the same size
                hist = []
                while len(hist) < u:
                    v = rng.getrandbits(k)
                    if oracles.rank_bits(hist + [v]) == len(hist) + 1:
                        hist.append(v)
                assert _enumerated_dependence(k, gamma, hist) == expect


def test_prob_dependent_strictly_decreasing_in_gamma():
    # raising gamma removes equal mass from numerator and denominator
    for k, u in ((5, 4), (6, 3), (8, 5)):
        last = prob_dependent(u, ModelParams(k=k, gamma=0))
        for gamma in range(1, u + 1):
            cur = prob_dependent(u, ModelParams(k=k, gamma=gamma))
            assert cur < last or (cur == 0.0 and last == 0.0)
            last = cur


# ------------------------------------------------------------ feasibility


def test_feasibility_bound_examples():
    assert feasibility_bound(3, 2, 1, 3) == 4
    assert feasibility_bound(3, 2, 3, 7) == -56
    for u in (0, 5, 1000):
        assert feasibility_bound(4, 2, 0, u) == 15


def test_feasibility_bound_big_inputs():
    # binomial blow-up must stay exact, not overflow or round
    big = 1 + 10**6 + math.comb(10**6, 2) + math.comb(10**6, 3)
    assert feasibility_bound(64, 2, 3, 10**6) == 2**64 - big
    assert feasibility_bound(10, 2, 3, 10**6) == 2**10 - big < 0


def test_feasibility_bound_validation():
    with pytest.raises(ValueError):
        feasibility_bound(3, 2, -1, 0)


def test_infeasible_from_pinned():
    assert infeasible_from(3, 2, 1) == 7
    assert infeasible_from(3, 2, 3) == 3
    assert infeasible_from(5, 2, 0) is None


def test_infeasible_from_is_threshold():
    for k in range(1, 9):
        for gamma in range(4):
            at = infeasible_from(k, 2, gamma)
            if gamma == 0:
                assert at is None
                continue
            assert feasibility_bound(k, 2, gamma, at) <= 0
            if at > 0:
                assert feasibility_bound(k, 2, gamma, at - 1) > 0


# ---------------------------------------------------- excess_distribution


def test_distribution_trivial_when_k_small():
    for k, gamma in ((1, 0), (2, 1), (3, 2), (4, 3), (2, 3)):
        d = excess_distribution(ModelParams(k=k, gamma=gamma))
        assert d.pmf[0] == 1.0
        assert d.expected_excess == 0.0
        assert all(c == 1.0 for c in d.cdf)


def test_distribution_pinned_k5_g2():
    d = excess_distribution(ModelParams(k=5, gamma=2))
    assert d.pmf[0] == pytest.approx(384 / 525, abs=1e-12)
    assert d.pmf[1] == pytest.approx((384 / 525) * (1 / 25 + 5 / 21), abs=1e-12)
    assert d.expected_excess == pytest.approx(1 / 24 + 5 / 16, abs=1e-9)
    assert d.expected_total == pytest.approx(5 + 1 / 24 + 5 / 16, abs=1e-9)


def test_distribution_pinned_k5_g2_blockack():
    d = excess_distribution(ModelParams(k=5, gamma=2, blockack=True))
    assert d.pmf[0] == pytest.approx(0.96, abs=1e-12)
    assert d.expected_excess == pytest.approx(1 / 24, abs=1e-9)


def test_closed_form_pinned():
    assert expected_excess_closed_form(ModelParams(k=5, gamma=2)) == pytest.approx(
        1 / 24 + 5 / 16, abs=1e-12
    )
    assert expected_excess_closed_form(
        ModelParams(k=5, gamma=2, blockack=True)
    ) == pytest.approx(1 / 24, abs=1e-12)
    assert expected_excess_closed_form(ModelParams(k=3, gamma=2)) == 0.0


def test_distribution_matches_exact_rational_rebuild():
    # same DP rebuilt on Fractions; catches float slips, not model drift
    for k in (2, 5, 9, 14):
        for gamma in range(4):
            for blockack in (False, True):
                d = excess_distribution(
                    ModelParams(k=k, gamma=gamma, blockack=blockack, delta_max=30)
                )
                ref = oracles.model_excess_pmf(k, gamma, blockack, cap=30)
                for delta in range(31):
                    assert d.pmf[delta] == pytest.approx(
                        float(ref[delta]), abs=1e-12
                    )


def test_normalization_and_series_agreement():
    for k in range(1, 31):
        for gamma in range(4):
            for blockack in (False, True):
                p = ModelParams(k=k, gamma=gamma, blockack=blockack)
                d = excess_distribution(p)
                assert sum(d.pmf) >= 1 - 1e-9
                assert abs(d.cdf[-1] + d.truncated_mass - 1.0) <= 1e-12
                for a, b in zip(d.cdf, d.cdf[1:]):
                    assert b >= a
                closed = expected_excess_closed_form(p)
                assert abs(d.expected_excess - closed) < 1e-9


def test_gamma_dominance():
    # larger gamma never hurts: cdf moves up pointwise
    for k in (5, 10, 17):
        prev = excess_distribution(ModelParams(k=k, gamma=0))
        for gamma in range(1, 4):
            cur = excess_distribution(ModelParams(k=k, gamma=gamma))
            assert all(c >= p - 1e-15 for c, p in zip(cur.cdf, prev.cdf))
            prev = cur


def test_baseline_dominance():
    for k in (4, 8, 16):
        base = baseline_traditional(k)
        for gamma in (1, 2, 3):
            d = excess_distribution(ModelParams(k=k, gamma=gamma))
            assert all(c >= b - 1e-15 for c, b in zip(d.cdf, base.cdf))


def test_blockack_dominance_and_exact_gap():
    for k in (3, 5, 10, 20):
        for gamma in range(3):
            plain = excess_distribution(ModelParams(k=k, gamma=gamma))
            acked = excess_distribution(ModelParams(k=k, gamma=gamma, blockack=True))
            assert all(a >= p - 1e-15 for a, p in zip(acked.cdf, plain.cdf))
            last = prob_dependent(k - 1, ModelParams(k=k, gamma=gamma))
            gap = last / (1.0 - last)
            assert plain.expected_excess - acked.expected_excess == pytest.approx(
                gap, abs=1e-9
            )


def test_tail_warning_flag():
    tight = excess_distribution(ModelParams(k=20, gamma=0, delta_max=1))
    assert tight.truncated_mass > 1e-9
    assert tight.tail_warning
    wide = excess_distribution(ModelParams(k=20, gamma=0, delta_max=64))
    assert not wide.tail_warning


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams(k=0)
    with pytest.raises(ValueError):
        ModelParams(k=3, q=1)
    with pytest.raises(ValueError):
        ModelParams(k=3, gamma=-1)
    with pytest.raises(ValueError):
        ModelParams(k=3, delta_max=-1)
    with pytest.raises(ValueError):
        ModelParams(k=3, tail_tolerance=0.0)


# ---------------------------------------------------------------- baseline


def test_baseline_pinned_k5():
    d = baseline_traditional(5)
    exact = Fraction(1)
    for j in range(1, 6):
        exact *= 1 - Fraction(1, 2**j)
    assert exact == Fraction(9765, 32768)
    assert d.cdf[0] == pytest.approx(float(exact), abs=1e-12)
    assert d.cdf[0] == pytest.approx(0.298004, abs=5e-7)


def test_baseline_monte_carlo_cross_check():
    """Random 5x5 GF(2) matrices hit full rank at the predicted rate."""
    rng = random.Random(2024)
    hits = 0
    trials = 100_000
    for _ in range(trials):
        rows = [rng.getrandbits(5) for _ in range(5)]
        if oracles.rank_bits(rows) == 5:
            hits += 1
    assert hits / trials == pytest.approx(0.298004, abs=0.005)


def test_baseline_asymptotes():
    assert 1.55 <= baseline_traditional(20).expected_excess <= 1.65
    assert 0.003 <= baseline_traditional(20, q=256).expected_excess <= 0.005


def test_baseline_validation():
    with pytest.raises(ValueError):
        baseline_traditional(0)
    with pytest.raises(ValueError):
        baseline_traditional(5, q=1)
    with pytest.raises(ValueError):
        baseline_traditional(5, delta_max=-1)


def test_baseline_fields():
    d = baseline_traditional(6, delta_max=10)
    assert isinstance(d, ExcessDistribution)
    assert d.gamma is None and d.blockack is False
    assert d.delta_max == 10 and len(d.pmf) == 11
    assert d.expected_total == pytest.approx(6 + d.expected_excess, abs=1e-12)
