import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latshift.cbc import cbc_shift, cbc_vector
from latshift.kernel import HalfShift, LatticeRule
from latshift.quadrature import INTEGRANDS, Integrand, apply_rule, make_integrand, random_shift_estimate
from latshift.weights import family_weights


def test_constant_is_exact():
    rule = LatticeRule(13, [1, 5, 8])
    f = make_integrand("constant", 3)
    assert apply_rule(rule, [0.3, 0.1, 0.9], f) == pytest.approx(1.0, abs=1e-15)


def test_symmetric_points_linear():
    f = Integrand(1, lambda x: x[:, 0], 0.5)
    assert apply_rule(LatticeRule(2, [1]), [0.25], f) == 0.5


@settings(max_examples=40)
@given(st.integers(2, 50), st.integers(1, 4), st.data())
def test_coordinatewise_constant_integrand_exact(n, s, data):
    # functions constant in every coordinate are integrated exactly
    z = data.draw(st.lists(st.integers(1, n - 1), min_size=s, max_size=s))
    delta = data.draw(st.lists(st.floats(0.0, 1.0, exclude_max=True), min_size=s, max_size=s))
    c = data.draw(st.floats(-100, 100))
    f = make_integrand("constant", s, [c])
    assert apply_rule(LatticeRule(n, z), delta, f) == pytest.approx(c, abs=1e-12)


def test_linear_product_exact_with_half_shift_one_dimension():
    # midpoints integrate linear functions exactly
    for n in (4, 9, 64):
        f = make_integrand("linprod", 1, [2.0])
        assert apply_rule(LatticeRule(n, [1]), HalfShift(n, [1]), f) == pytest.approx(1.0, abs=1e-14)


def test_product_error_decreases_with_n():
    errs = []
    w = family_weights("1/j^2", 2)
    f = make_integrand("product", 2)
    for n in (16, 64, 256, 1024):
        z = cbc_vector(n, 2, w).z
        res = cbc_shift(n, z, 2, w)
        errs.append(abs(apply_rule(LatticeRule(n, z), res.shift, f) - f.exact))
    assert errs[0] > errs[-1]
    assert errs[-1] < 1e-4


def test_dimension_mismatch_and_bad_values():
    rule = LatticeRule(4, [1, 3])
    with pytest.raises(ValueError):
        apply_rule(rule, [0.0, 0.0], make_integrand("product", 3))
    bad = Integrand(2, lambda x: np.where(x[:, 0] == 0.0, np.inf, x[:, 0]))
    with pytest.raises(ValueError, match="k=4"):
        apply_rule(rule, [0.0, 0.0], bad)
    wrong_shape = Integrand(2, lambda x: x)
    with pytest.raises(ValueError, match="shape"):
        apply_rule(rule, [0.0, 0.0], wrong_shape)


def test_random_shift_constant():
    est = random_shift_estimate(LatticeRule(32, [1, 7]), make_integrand("constant", 2), 8, 1)
    assert est.mean == pytest.approx(1.0, abs=1e-15)
    assert est.stderr == pytest.approx(0.0, abs=1e-15)


def test_random_shift_reproducible():
    rule = LatticeRule(64, [1, 19, 27])
    f = make_integrand("product", 3)
    a = random_shift_estimate(rule, f, 10, 42)
    b = random_shift_estimate(rule, f, 10, 42)
    assert a == b
    c = random_shift_estimate(rule, f, 10, 43)
    assert c.values != a.values


def test_random_shift_single_and_invalid_q():
    rule = LatticeRule(8, [1])
    est = random_shift_estimate(rule, make_integrand("product", 1), 1, 0)
    assert math.isnan(est.stderr) and est.q == 1
    with pytest.raises(ValueError):
        random_shift_estimate(rule, make_integrand("product", 1), 0, 0)


def test_random_shift_stderr_uses_unbiased_divisor():
    rule = LatticeRule(16, [1, 5])
    est = random_shift_estimate(rule, make_integrand("product", 2), 5, 3)
    vals = np.array(est.values)
    assert est.stderr == pytest.approx(np.std(vals, ddof=1) / math.sqrt(5), rel=1e-14)


def test_random_shift_coverage():
    n, s = 256, 3
    w = family_weights("1/j^2", s)
    rule = cbc_vector(n, s, w).rule
    f = make_integrand("product", s)
    hits = 0
    for seed in range(100):
        est = random_shift_estimate(rule, f, 16, seed)
        assert est.stderr > 0
        hits += abs(est.mean - 1 / 8) <= 4 * est.stderr
    assert hits >= 95


@pytest.mark.parametrize("name", sorted(INTEGRANDS))
def test_builtin_exact_integrals(name):
    # a fine product midpoint grid confirms each stated integral
    s = 2
    f = make_integrand(name, s, [0.7, 1.3] if name != "constant" else [2.5])
    g = (np.arange(400) + 0.5) / 400
    X = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, s)
    assert float(np.mean(f(X))) == pytest.approx(f.exact, rel=1e-5)


def test_unknown_integrand():
    with pytest.raises(ValueError):
        make_integrand("gaussian", 2)
