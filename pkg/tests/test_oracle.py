import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from latshift.kernel import LatticeRule, bernoulli2
from latshift.oracle import (
    MAX_GRID,
    brute_half_shift_avg,
    brute_shift_avg,
    brute_sq_wce,
    midpoint_rule,
    pair_kernel_integral,
    proof_term_table,
    proof_terms,
    simpson_rule,
    verify_suite,
)
from latshift.weights import ProductWeights, SubsetWeights


def _sw(*gam):
    return SubsetWeights.from_product(ProductWeights(tuple(gam)), len(gam))


def test_small_hand_values():
    rule = LatticeRule(2, [1])
    sw = _sw(1.0)
    assert brute_sq_wce(rule, [0.25], sw) == pytest.approx(1 / 48, rel=1e-14)
    assert brute_sq_wce(rule, [0.0], sw) == pytest.approx(1 / 12, rel=1e-14)
    assert brute_shift_avg(rule, sw) == pytest.approx(1 / 24, rel=1e-14)
    assert brute_half_shift_avg(rule, sw) == pytest.approx(1 / 48, rel=1e-14)


def test_half_shift_oracle_is_grid_mean_of_squared_error():
    rule = LatticeRule(5, [1, 2])
    sw = _sw(0.7, 0.3)
    grid = [(2 * m - 1) / 10 for m in range(1, 6)]
    mean = np.mean([brute_sq_wce(rule, [a, b], sw) for a in grid for b in grid])
    assert brute_half_shift_avg(rule, sw) == pytest.approx(mean, rel=1e-13)


def test_general_subset_weights():
    # weight only on the pair {1, 2}: e^2 = (1/N^2) sum theta_1 theta_2
    rule = LatticeRule(3, [1, 2])
    sw = SubsetWeights(2, {(1, 2): 1.0})
    full = _sw(1.0, 1.0)
    singles = SubsetWeights(2, {(1,): 1.0, (2,): 1.0})
    d = [0.1, 0.6]
    assert brute_sq_wce(rule, d, sw) == pytest.approx(brute_sq_wce(rule, d, full) - brute_sq_wce(rule, d, singles),
                                                      rel=1e-12, abs=1e-16)


def test_oracle_limits():
    with pytest.raises(ValueError):
        brute_half_shift_avg(LatticeRule(16, [1] * 5), _sw(*[1.0] * 5))
    assert 16 ** 5 > MAX_GRID
    with pytest.raises(ValueError):
        brute_sq_wce(LatticeRule(4, [1, 1]), [0.0, 0.0], _sw(1.0))


def test_proof_terms_match_table():
    for n in (2, 5, 8):
        for z in range(1, n):
            a, b, c = proof_term_table(n, z)
            for k, kp in itertools.product(range(1, n + 1), repeat=2):
                t = proof_terms(k, kp, z, n)
                assert (t.a, t.c) == (a[k - 1, kp - 1], c[k - 1, kp - 1])
                assert t.b == pytest.approx(b[k - 1, kp - 1], abs=1e-16)
                assert len(t.mu) == n


def test_proof_term_a_is_bernoulli():
    a, b, c = proof_term_table(7, 3)
    k = np.arange(1, 8)
    d = ((k[:, None] - k[None, :]) * 3 % 7) / 7
    np.testing.assert_allclose(a, bernoulli2(d), atol=1e-16)
    # the midpoint average sits below the exact integral by exactly 1/(12 N^2)
    np.testing.assert_allclose(a - b, 1 / (12 * 49), atol=1e-15)


def test_kernel_integral_identity_by_quadrature():
    # c + integral of A equals B2 of the difference; midpoint error shrinks like M^-2
    for k, kp, z, n in [(1, 2, 1, 4), (3, 7, 5, 11), (2, 2, 3, 5)]:
        t = proof_terms(k, kp, z, n)
        exact = t.a - t.c
        errs = [abs(pair_kernel_integral(k, kp, z, n, M) - exact) for M in (n * 8, n * 16, n * 32)]
        assert errs[0] > 0
        for e1, e2 in zip(errs, errs[1:]):
            assert e2 / e1 == pytest.approx(0.25, rel=1e-6)
        assert pair_kernel_integral(k, kp, z, n, n * 4, rule="simpson") == pytest.approx(exact, abs=1e-14)


def test_midpoint_exact_on_shifted_sawtooth():
    # the sawtooth is linear on every cell of width 1/N, so N midpoints integrate it exactly
    for n in (3, 8, 17):
        for k in range(1, n + 1):
            x = k % n / n
            val = midpoint_rule(lambda t: (x + t) % 1.0, n)
            assert val == pytest.approx(0.5, abs=1e-14)


def test_simpson_exact_on_quadratics():
    assert simpson_rule(lambda t, c: 3 * t * t, 1) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError):
        pair_kernel_integral(1, 1, 1, 2, 4, rule="gauss")
    with pytest.raises(ValueError):
        pair_kernel_integral(1, 1, 1, 3, 4, rule="simpson")


@given(st.integers(2, 10), st.data())
def test_proof_term_bounds_property(n, data):
    z = data.draw(st.integers(1, n - 1))
    k = data.draw(st.integers(1, n))
    kp = data.draw(st.integers(1, n))
    t = proof_terms(k, kp, z, n)
    assert abs(t.a - t.b) <= 1 / (12 * n * n) + 1e-15
    assert abs(t.a) <= 1 / 3 and abs(t.b) <= 1 / 3


def test_verify_suite_small():
    rep = verify_suite(max_n=6, max_s=2)
    assert rep.ok, rep.failures[:5]
    assert rep.checks > 100


def test_verify_report_records_failures():
    from latshift.oracle import VerifyReport

    r = VerifyReport()
    r.record(True, "a")
    r.record(False, "b")
    assert r.checks == 2 and r.failures == ["b"] and not r.ok


def test_zero_pair_weights_skipped():
    rule = LatticeRule(4, [1, 3])
    sw = SubsetWeights(2, {(1,): 1.0})
    one = LatticeRule(4, [1])
    assert brute_sq_wce(rule, [0.3, 0.9], sw) == pytest.approx(
        brute_sq_wce(one, [0.3], _sw(1.0)), rel=1e-14)
    assert math.isfinite(brute_shift_avg(rule, sw))
