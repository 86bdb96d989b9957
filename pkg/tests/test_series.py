from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from toricmirror import errors
from toricmirror.series import (LogLaurentSeries, compose, exp_nilpotent, power_series,
                                scalar_part, series_sum)

R, N = 2, 3

coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)
key = st.tuples(
    st.tuples(st.integers(0, N), st.integers(0, N)),
    st.integers(-2, 2),
    st.tuples(st.integers(0, 1), st.integers(0, 1)),
    st.integers(0, 1),
)
log_free_key = st.tuples(st.tuples(st.integers(0, N), st.integers(0, N)), st.integers(-2, 2))


@st.composite
def series(draw, log_free=False, in_ideal=False):
    if log_free:
        keys = draw(st.lists(log_free_key, max_size=5))
        keys = [(e, j, (0, 0), 0) for e, j in keys]
    else:
        keys = draw(st.lists(key, max_size=5))
    if in_ideal:
        keys = [k for k in keys if any(k[0])]
    return LogLaurentSeries(R, N, {k: draw(coeff) for k in keys})


small = settings(max_examples=60, deadline=None)


@small
@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a - a == LogLaurentSeries.zero(R, N)


@small
@given(series(), series(), st.integers(0, R - 1))
def test_q_derivation_leibniz(a, b, idx):
    assert (a * b).q_derivative(idx) == a.q_derivative(idx) * b + a * b.q_derivative(idx)


@small
@given(series(), series())
def test_z_derivation_leibniz(a, b):
    assert (a * b).z_derivative() == a.z_derivative() * b + a * b.z_derivative()


@small
@given(series(), st.integers(0, R - 1))
def test_theta_and_euler_commutation(a, idx):
    # [E, theta_a] = z theta_a on functions
    lhs = a.theta(idx).euler_z() - a.euler_z().theta(idx)
    assert lhs == a.theta(idx).shift_z(1)


@small
@given(series(in_ideal=True), series(in_ideal=True))
def test_exp_is_multiplicative(x, y):
    assert exp_nilpotent(x + y) == exp_nilpotent(x) * exp_nilpotent(y)


@small
@given(series(log_free=True), series(log_free=True), series(log_free=True, in_ideal=True),
       series(log_free=True, in_ideal=True))
def test_compose_is_a_ring_map(a, b, s1, s2):
    # the substitutions must be z-free for compose to be a ring map
    s1 = s1.filter(lambda k: k[1] == 0)
    s2 = s2.filter(lambda k: k[1] == 0)
    subs = [s1 + LogLaurentSeries.q(R, N, 0), s2 + LogLaurentSeries.q(R, N, 1)]
    assert compose(a * b, subs) == compose(a, subs) * compose(b, subs)
    assert compose(a + b, subs) == compose(a, subs) + compose(b, subs)


@small
@given(series())
def test_compose_identity(a):
    qs = [LogLaurentSeries.q(R, N, i) for i in range(R)]
    logs = [LogLaurentSeries.log_q(R, N, i) for i in range(R)]
    assert compose(a, qs, logs) == a


def test_log_q_derivative():
    lq = LogLaurentSeries.log_q(R, N, 0)
    one = LogLaurentSeries.monomial(R, N)
    assert lq.q_derivative(0) == one
    assert lq.q_derivative(1).is_zero()
    assert (lq * lq).q_derivative(0) == lq * 2


def test_truncation_drops_out_of_box():
    q = LogLaurentSeries.q(1, 2, 0)
    cube = q ** 3
    assert cube.is_zero() and cube.dropped
    assert not (q ** 2).dropped


def test_z_window_overflow():
    with pytest.raises(errors.TruncationOverflow):
        LogLaurentSeries(1, 2, {((0,), 3, (0,), 0): Fraction(1)}, z_window=(-2, 2))


def test_power_series_roundtrip():
    s = power_series(2, 2, {(1, 0): 3, (0, 2): Fraction(1, 2)})
    assert scalar_part(s) == {(1, 0): 3, (0, 2): Fraction(1, 2)}
    with pytest.raises(ValueError):
        scalar_part(s.shift_z(1))


def test_series_sum_and_inspection():
    a = LogLaurentSeries.monomial(1, 3, 2, e=[1], j=-1)
    b = LogLaurentSeries.monomial(1, 3, 1, e=[2], j=-3, beta=1)
    s = series_sum([a, b, -a], 1, 3)
    assert s == b
    assert not s.is_log_free()
    assert (a + b).z_range() == (-3, -1)
    assert a.z_coefficient(-1) == LogLaurentSeries.monomial(1, 3, 2, e=[1])
    assert s.truncate(1).is_zero()


def test_compose_requires_log_substitution():
    lq = LogLaurentSeries.log_q(1, 2, 0)
    with pytest.raises(ValueError):
        compose(lq, [LogLaurentSeries.q(1, 2, 0)])
