import random

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from oracles import pearson_mp, welch_mp
from narrative_net.errors import (
    DomainError,
    LengthMismatch,
    MissingMetadata,
    SampleTooSmall,
    TooFewDecades,
    ZeroVariance,
)
from narrative_net.stats import (
    decade_trend,
    group_compare,
    pearson,
    regularized_incomplete_beta,
    welch_t_test,
)


def test_incomplete_beta_boundaries():
    assert regularized_incomplete_beta(2.5, 3.0, 0.0) == 0.0
    assert regularized_incomplete_beta(2.5, 3.0, 1.0) == 1.0
    for x in (0.1, 0.37, 0.5, 0.99):
        assert regularized_incomplete_beta(1, 1, x) == pytest.approx(x, abs=1e-12)
    assert regularized_incomplete_beta(2, 2, 0.5) == pytest.approx(0.5, abs=1e-12)


def test_incomplete_beta_domain():
    with pytest.raises(DomainError):
        regularized_incomplete_beta(0, 1, 0.5)
    with pytest.raises(DomainError):
        regularized_incomplete_beta(1, 1, 1.5)


@given(st.floats(0.05, 200), st.floats(0.05, 200), st.floats(0, 1))
def test_incomplete_beta_reflection(a, b, x):
    # the identity only holds when 1 - x is exactly representable
    assume(1 - (1 - x) == x)
    total = regularized_incomplete_beta(a, b, x) + regularized_incomplete_beta(b, a, 1 - x)
    assert total == pytest.approx(1.0, abs=1e-10)


@given(st.floats(0.1, 50), st.floats(0.1, 50), st.floats(0, 1), st.floats(0, 1))
def test_incomplete_beta_monotone(a, b, x, y):
    lo, hi = sorted((x, y))
    assert regularized_incomplete_beta(a, b, lo) <= regularized_incomplete_beta(a, b, hi) + 1e-12


def test_incomplete_beta_against_mpmath():
    import mpmath

    rng = random.Random(21)
    for _ in range(200):
        a, b, x = rng.uniform(0.1, 500), rng.uniform(0.1, 500), rng.random()
        ref = float(mpmath.betainc(a, b, 0, x, regularized=True))
        assert regularized_incomplete_beta(a, b, x) == pytest.approx(ref, abs=1e-10)


def test_welch_identical_samples():
    xs = [1.0, 3.0, 4.0, 8.0]
    r = welch_t_test(xs, xs)
    assert r.t_statistic == 0.0 and r.p_value == 1.0


def test_welch_antisymmetry():
    a, b = [1, 2, 3, 4, 9], [2, 2.5, 7, 8]
    r1, r2 = welch_t_test(a, b), welch_t_test(b, a)
    assert r1.t_statistic == -r2.t_statistic and r1.p_value == r2.p_value
    assert r1.degrees_of_freedom == r2.degrees_of_freedom


def test_welch_reference_pair():
    # frozen from a 50-digit evaluation of the same closed forms
    r = welch_t_test([1, 2, 3, 4, 5], [2, 4, 6, 8, 10])
    assert r.t_statistic == pytest.approx(-1.8973665961010275992, abs=1e-12)
    assert r.degrees_of_freedom == pytest.approx(5.8823529411764705882, abs=1e-12)
    assert r.p_value == pytest.approx(0.10753119493062724041, abs=1e-9)
    assert (r.mean_x, r.mean_y, r.n_x, r.n_y) == (3.0, 6.0, 5, 5)


def test_welch_tiny_variance():
    r = welch_t_test([0.0, 0.0], [0.0, 4.746939527962373e-85])
    assert r.degrees_of_freedom == pytest.approx(1.0)
    assert r.t_statistic == pytest.approx(-1.0)
    tiny = pearson([1e-170, 2e-170, 3e-170], [1e-170, 2e-170, 3e-170])
    assert tiny.r == pytest.approx(1.0)
    base = welch_t_test([1, 2, 4], [3, 5, 9, 10])
    for factor in (1e-200, 1e200):
        r = welch_t_test([1 * factor, 2 * factor, 4 * factor], [3 * factor, 5 * factor, 9 * factor, 10 * factor])
        assert (r.t_statistic, r.degrees_of_freedom) == pytest.approx(
            (base.t_statistic, base.degrees_of_freedom), rel=1e-12)


def test_welch_errors():
    with pytest.raises(SampleTooSmall):
        welch_t_test([1], [1, 2])
    with pytest.raises(ZeroVariance):
        welch_t_test([1, 1], [2, 2])


sample = st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=12)


@given(sample, sample, st.floats(-100, 100), st.floats(0.1, 10))
def test_welch_shift_scale_invariance(xs, ys, shift, scale):
    try:
        base = welch_t_test(xs, ys)
    except ZeroVariance:
        return
    assume(abs(base.t_statistic) < 1e6)
    # ill-conditioned samples (variance far below the mean's rounding) are not comparable
    assume(min(max(xs) - min(xs), max(ys) - min(ys)) > 1e-6 * max(1.0, *map(abs, xs + ys)))
    moved = welch_t_test([x + shift for x in xs], [y + shift for y in ys])
    scaled = welch_t_test([x * scale for x in xs], [y * scale for y in ys])
    for r in (moved, scaled):
        assert r.t_statistic == pytest.approx(base.t_statistic, rel=1e-6, abs=1e-6)
        assert r.degrees_of_freedom == pytest.approx(base.degrees_of_freedom, rel=1e-6)
        assert r.p_value == pytest.approx(base.p_value, abs=1e-6)


def test_pearson_examples():
    xs = [1.0, 2.0, 3.5, 4.0, 7.0]
    assert pearson(xs, [2 * x + 1 for x in xs]).r == pytest.approx(1.0, abs=1e-15)
    assert pearson(xs, [-x for x in xs]).r == pytest.approx(-1.0, abs=1e-15)
    # frozen from a 50-digit direct summation
    r = pearson([1, 2, 3, 4, 5, 6], [2.1, 3.9, 6.2, 7.8, 9.7, 12.5])
    assert r.r == pytest.approx(0.99710316067928409029, abs=1e-12)
    assert r.p_value == pytest.approx(0.000012575362403597639165, abs=1e-12)


def test_pearson_errors():
    with pytest.raises(LengthMismatch):
        pearson([1, 2, 3], [1, 2])
    with pytest.raises(SampleTooSmall):
        pearson([1, 2], [1, 2])
    with pytest.raises(ZeroVariance):
        pearson([1, 1, 1], [1, 2, 3])


@given(st.lists(st.tuples(st.integers(-50, 50), st.integers(-50, 50)), min_size=3, max_size=10),
       st.floats(0.5, 4), st.floats(-10, 10))
def test_pearson_affine(points, scale, shift):
    xs, ys = [float(p[0]) for p in points], [float(p[1]) for p in points]
    try:
        base = pearson(xs, ys)
    except ZeroVariance:
        return
    assert pearson([x * scale + shift for x in xs], ys).r == pytest.approx(base.r, abs=1e-9)
    assert pearson([-x for x in xs], ys).r == pytest.approx(-base.r, abs=1e-12)


def test_random_pairs_against_extended_precision():
    rng = random.Random(22)
    for _ in range(30):
        xs = [rng.gauss(0, 1) for _ in range(rng.randint(3, 20))]
        ys = [rng.gauss(0.5, 2) for _ in range(rng.randint(3, 20))]
        t, df, p = welch_mp(xs, ys)
        r = welch_t_test(xs, ys)
        assert (r.t_statistic, r.degrees_of_freedom, r.p_value) == pytest.approx((t, df, p), abs=1e-9)


def rows(values, fiction):
    return [{"is_fiction": fiction, "decade": 1800 + 10 * i, "m": v} for i, v in enumerate(values)]


def test_group_compare():
    rng = random.Random(23)
    table = rows([1 + rng.uniform(-0.01, 0.01) for _ in range(5)], True) + \
        rows([2 + rng.uniform(-0.01, 0.01) for _ in range(5)], False)
    r = group_compare(table, "m")
    assert r.mean_y > r.mean_x and r.p_value < 1e-6
    same = rows([1, 2, 3, 4], True) + rows([1, 2, 3, 4], False)
    assert group_compare(same, "m").p_value == pytest.approx(1.0)


def test_group_compare_excludes_absent():
    table = rows([1, 2, None, 3], True) + rows([4, 5, 6], False) + [{"is_fiction": None, "m": 9}]
    r = group_compare(table, "m")
    assert (r.n_x, r.n_y, r.excluded) == (3, 3, 1)
    with pytest.raises(MissingMetadata):
        group_compare(rows([1, 2], True), "m")


def test_decade_trend():
    with pytest.raises(ZeroVariance):
        decade_trend(rows([2, 2, 2, 2], True), "m", True)
    assert decade_trend(rows([1, 3, 5, 7], True), "m", True).r == pytest.approx(1.0)
    with pytest.raises(TooFewDecades):
        decade_trend(rows([1, 2], True), "m", True)


def test_decade_trend_uses_decade_means():
    table = [
        {"is_fiction": False, "decade": 1800, "m": 1.0},
        {"is_fiction": False, "decade": 1800, "m": 3.0},
        {"is_fiction": False, "decade": 1810, "m": 5.0},
        {"is_fiction": False, "decade": 1820, "m": 2.0},
        {"is_fiction": False, "decade": 1820, "m": 4.0},
        {"is_fiction": False, "decade": 1820, "m": 9.0},
        {"is_fiction": True, "decade": 1830, "m": 100.0},
    ]
    # decade means 2, 5, 5
    res = decade_trend(table, "m", False)
    r_ref, p_ref = pearson_mp([1800, 1810, 1820], [2.0, 5.0, 5.0])
    assert res.n == 3
    assert res.r == pytest.approx(r_ref, abs=1e-12)
    assert res.p_value == pytest.approx(p_ref, abs=1e-12)


def test_decade_trend_single_row_equals_pearson():
    vals = [3.0, 1.0, 4.0, 1.5, 9.0]
    table = rows(vals, True)
    assert decade_trend(table, "m", True).r == pytest.approx(
        pearson([1800 + 10 * i for i in range(5)], vals).r, abs=1e-15)
