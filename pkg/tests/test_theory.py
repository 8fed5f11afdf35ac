import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qtzopt.errors import DomainError
from qtzopt.theory import (TunnelingParams, adiabatic_residual, diagnostics, sup_limit, sup_recursion,
                           truncate_base, tunneling_factor, two_level_eigs)


def test_residual_hand_example():
    # 5.8125 = 101.1101 in base 2
    assert truncate_base(5.8125, 2, 2) == Fraction(23, 4)
    assert adiabatic_residual(5.8125, 2, 2, exact=True) == Fraction(9, 64)


@given(st.integers(0, 10**6), st.sampled_from([2, 3, 10]), st.integers(1, 20))
def test_residual_zero_on_integers(n, b, t):
    assert adiabatic_residual(n, b, t) == 0.0


@given(st.fractions(0, 100, max_denominator=10**9), st.sampled_from([2, 3, 10]), st.integers(1, 20))
def test_residual_bound(f, b, t):
    assert abs(adiabatic_residual(f, b, t, exact=True)) < Fraction(1, b**t)


def test_residual_domain():
    with pytest.raises(DomainError):
        adiabatic_residual(-1.0, 2, 3)
    with pytest.raises(DomainError):
        adiabatic_residual(1.0, 1, 3)


def test_sup_limit_examples():
    assert sup_limit(1.0, 0.3, 3) == pytest.approx(1.025, abs=1e-15)
    assert sup_limit(0.7, 0.25, 2) == 0.7
    with pytest.raises(DomainError):
        sup_limit(1.0, 0.3, 1)


@given(st.floats(-100, 100), st.floats(1e-6, 10), st.integers(2, 16))
def test_sup_recursion_monotone_to_limit(fq, q, b):
    seq = sup_recursion(fq, q, b)
    assert all(x >= y for x, y in zip(seq, seq[1:]))
    assert abs(seq[-1] - sup_limit(fq, q, b)) <= 1e-12 * max(1, abs(fq))


def test_tunneling_examples():
    assert tunneling_factor(TunnelingParams(v0=2.0, e=2.0)) == 1.0
    assert tunneling_factor(TunnelingParams()) == pytest.approx(math.exp(-2), abs=1e-12)
    assert tunneling_factor(TunnelingParams(width=2.0), width_inside=False) == pytest.approx(2 * math.exp(-2))
    with pytest.raises(DomainError):
        TunnelingParams(v0=0.0, e=1.0)


@given(st.floats(0.01, 5), st.floats(0.01, 5), st.floats(0.01, 5))
def test_tunneling_decreases_in_each_argument(d, m, gap):
    base = tunneling_factor(TunnelingParams(mass=m, v0=gap, width=d))
    assert 0 < base <= 1
    assert tunneling_factor(TunnelingParams(mass=m, v0=gap, width=d * 1.5)) < base
    assert tunneling_factor(TunnelingParams(mass=m * 1.5, v0=gap, width=d)) < base
    assert tunneling_factor(TunnelingParams(mass=m, v0=gap * 1.5, width=d)) < base


def test_two_level_examples():
    assert two_level_eigs(0, 0, 2) == (-1.0, 1.0)
    assert two_level_eigs(1, 3, 0) == (1.0, 3.0)
    assert two_level_eigs(0.5, 0.5, 0.2) == pytest.approx((0.4, 0.6))


def test_two_level_against_eigensolver():
    rng = np.random.default_rng(0)
    for e1, e2, d in rng.normal(scale=10, size=(10_000, 3)):
        ref = np.linalg.eigvalsh([[e1, d / 2], [d / 2, e2]])
        got = two_level_eigs(e1, e2, d)
        assert np.allclose(got, ref, rtol=0, atol=1e-12 * max(1, abs(e1), abs(e2), abs(d)))


def test_diagnostics_table_agrees():
    for name, _, value, ref in diagnostics():
        assert abs(value - ref) <= 1e-12, name
