import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quantcap.bounds import (
    prop1_upper,
    prop2_bounds,
    prop3_upper,
    theorem1_upper,
    unquantized_capacity,
    waterfilling,
)
from quantcap.geometry import HyperplaneArrangement

gains = st.lists(st.floats(0.05, 5.0), min_size=1, max_size=6)


def kkt_residual(lam, P, alloc):
    floor = np.asarray(lam) ** -2.0
    mu = alloc.water_level
    res = abs(alloc.per_channel.sum() - P)
    active = alloc.per_channel > 0
    res = max(res, np.abs(alloc.per_channel[active] + floor[active] - mu).max(initial=0))
    res = max(res, np.max(np.maximum(0, mu - floor[~active]), initial=0))
    return res


class TestWaterfilling:
    def test_closed_form_equal_gains(self):
        a = waterfilling([1.0, 1.0], 4.0)
        assert a.per_channel == pytest.approx([2.0, 2.0])
        assert a.water_level == pytest.approx(3.0)

    def test_closed_form_one_active(self):
        # floors 1 and 100: all power to the strong channel while mu < 100
        a = waterfilling([1.0, 0.1], 5.0)
        assert a.per_channel == pytest.approx([5.0, 0.0])

    def test_zero_power(self):
        assert waterfilling([1.0, 2.0], 0.0).per_channel.sum() == 0

    def test_errors(self):
        with pytest.raises(ValueError):
            waterfilling([], 1.0)
        with pytest.raises(ValueError):
            waterfilling([0.0, 1.0], 1.0)
        with pytest.raises(ValueError):
            waterfilling([1.0], -1.0)

    @given(gains, st.floats(0.0, 1e4))
    def test_kkt(self, lam, P):
        alloc = waterfilling(lam, P)
        assert np.all(alloc.per_channel >= 0)
        assert kkt_residual(lam, P, alloc) <= 1e-9

    @given(gains, st.floats(0.1, 1e3), st.randoms())
    def test_permutation_invariant(self, lam, P, rnd):
        perm = list(range(len(lam)))
        rnd.shuffle(perm)
        a = waterfilling(lam, P)
        b = waterfilling([lam[i] for i in perm], P)
        assert b.per_channel == pytest.approx(a.per_channel[perm], abs=1e-8 * max(1, P))


class TestProp1:
    def test_asymptote(self):
        assert prop1_upper(1.0, 1e6, 4) == pytest.approx(math.log2(5), abs=1e-3)

    def test_low_power(self):
        assert prop1_upper(1.0, 1.0, 4) == pytest.approx(0.5)

    @given(st.floats(0.1, 3), st.floats(0, 1e6), st.integers(1, 30))
    def test_monotone_capped(self, h, P, n):
        v = prop1_upper(h, P, n)
        assert v <= math.log2(n + 1) + 1e-12
        assert prop1_upper(h, P * 2 + 1, n) >= v
        assert prop1_upper(h, P, n + 1) >= v


class TestProp2:
    def test_values(self):
        lo, hi = prop2_bounds(3, 2)
        assert lo == pytest.approx(math.log2(6))
        assert hi == pytest.approx(math.log2(7))

    @given(st.integers(1, 20), st.integers(1, 6))
    def test_gap(self, n_r, n_t):
        lo, hi = prop2_bounds(n_r, n_t)
        assert 0 < hi - lo <= 1


class TestProp3:
    def test_branch_two_exact(self):
        rep = prop3_upper([1.0, 0.8], 1e6, 4)
        K = 2
        assert rep.details["branch"] == "quantizer-limited"
        assert rep.details["r_star"] == K * math.log2(4 / K + 1)
        assert rep.value_bits == K * math.log2(4 / K + 1) + K
        assert rep.gap_bits == 3 * K

    def test_k_conventions(self):
        lam = [1.2, 0.7]
        hi = prop3_upper(lam, 1e6, 4, n_t=2, n_r=3)
        lo = prop3_upper(lam, 1e6, 4, n_t=2, n_r=3, k_convention="min")
        assert hi.details["K"] == 3 and lo.details["K"] == 2
        assert lo.value_bits == pytest.approx(2 * math.log2(3) + 2)

    def test_branch_one(self):
        rep = prop3_upper([1.0], 1.0, 4)
        assert rep.details["branch"] == "noise-limited"
        # default form: 0.5 log2(1 + lam P)
        assert rep.value_bits == pytest.approx(0.5 * math.log2(2) + 1)

    def test_squared_exponent(self):
        a = prop3_upper([2.0], 0.5, 10, exponent="squared")
        b = prop3_upper([2.0], 0.5, 10)
        assert a.value_bits == pytest.approx(0.5 * math.log2(3) + 1)
        assert b.value_bits == pytest.approx(0.5 * math.log2(2) + 1)
        assert any("condition uses lambda_i^2" in s for s in b.assumptions)

    def test_bad_options(self):
        with pytest.raises(ValueError):
            prop3_upper([1.0], 1.0, 4, exponent="cubed")
        with pytest.raises(ValueError):
            prop3_upper([1.0], 1.0, 4, n_t=1, n_r=1, k_convention="avg")


class TestTheorem1:
    def test_fig2a(self):
        arr = HyperplaneArrangement([[1, 0]] * 4, [-3, -1, 1, 3])
        rep = theorem1_upper([arr], 25.0, 2, 3)
        assert rep.value_bits == pytest.approx(math.log2(5) + 4.5 + 3)
        assert rep.value_bits == pytest.approx(9.82, abs=5e-3)
        assert rep.gap_bits == 5.0

    def test_max_over_family(self):
        a = HyperplaneArrangement([[1, 0]] * 4, [-3, -1, 1, 3])
        b = HyperplaneArrangement([[1, 0]], [0])
        assert theorem1_upper([a, b], 25.0, 2, 3).value_bits == pytest.approx(
            theorem1_upper([a], 25.0, 2, 3).value_bits
        )

    def test_empty_family(self):
        with pytest.raises(ValueError):
            theorem1_upper([], 1.0, 2, 3)


class TestUnquantized:
    def test_scalar(self):
        assert unquantized_capacity([1.0], 3.0) == pytest.approx(1.0)

    def test_zero_power(self):
        assert unquantized_capacity([1.0, 2.0], 0.0) == 0.0

    @given(gains, st.floats(0.01, 1e4))
    def test_beats_equal_allocation(self, lam, P):
        lam = np.asarray(lam)
        equal = float(np.sum(0.5 * np.log2(1 + lam**2 * P / len(lam))))
        assert unquantized_capacity(lam, P) >= equal - 1e-9
