import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from korovkinlab import (
    E0,
    E1,
    E2,
    NEG_E1,
    DistortedMeasure,
    Func1D,
    OperatorSpec,
    SQRT_MEASURE,
    apply,
    bernstein_basis,
    choquet_integral,
    operator_moment,
)
from korovkinlab.operators import OPERATOR_KINDS, operator_moment_profiles

from oracles import bernstein_direct, layer_cake_choquet


class TestBasis:
    def test_midpoint(self):
        assert bernstein_basis(2, 1, 0.5) == pytest.approx(0.5, abs=1e-15)

    def test_endpoint_mass(self):
        assert bernstein_basis(5, 0, 0.0) == pytest.approx(1.0, abs=0)

    def test_partition_of_unity(self):
        total = sum(bernstein_basis(10, k, 0.3) for k in range(11))
        assert total == pytest.approx(1.0, abs=1e-14)

    def test_large_degree_stability(self):
        xs = np.linspace(0.0, 1.0, 17)
        total = sum(bernstein_basis(2048, k, xs) for k in range(2049))
        assert np.max(np.abs(total - 1.0)) < 5e-12

    def test_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            bernstein_basis(4, 5, 0.5)
        with pytest.raises(ValueError, match="out of range"):
            bernstein_basis(4, -1, 0.5)

    def test_matches_direct_expansion(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 7))
            k = int(rng.integers(0, n + 1))
            x = float(rng.uniform(0, 1))
            direct = math.comb(n, k) * x**k * (1 - x) ** (n - k)
            assert bernstein_basis(n, k, x) == pytest.approx(direct, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(min_value=1, max_value=64), x=st.floats(min_value=0.0, max_value=1.0))
def test_basis_partition_property(n, x):
    total = sum(bernstein_basis(n, k, x) for k in range(n + 1))
    assert total == pytest.approx(1.0, abs=1e-12)


class TestApply:
    def test_max_bernstein_e2(self):
        # T_n(e_2)(x) = e_2(x) + x(1-x)/n
        op = OperatorSpec("max-bernstein", 10)
        assert apply(op, E2, 0.5) == pytest.approx(0.275, abs=1e-10)

    def test_sup_bernstein_neg_e1(self):
        # closed form -(n/(n+1)) x
        op = OperatorSpec("sup-bernstein", 4)
        assert apply(op, NEG_E1, 0.5) == pytest.approx(-0.4, abs=1e-12)

    def test_sup_bernstein_e1_defining_sum(self):
        # the defining sum gives (nx+1)/(n+1); frozen from the direct
        # expansion sum_k p_{4,k}(1/2) (k+1)/5 = 48/80
        op = OperatorSpec("sup-bernstein", 4)
        assert apply(op, E1, 0.5) == pytest.approx(0.6, abs=1e-12)

    def test_kantorovich_choquet_cell_mean(self):
        # layer-cake closed form: int_0^{1/2} sqrt(1/2-s) ds / sqrt(1/2) = 1/3
        op = OperatorSpec("kantorovich-choquet", 1)
        val = apply(op, E1, 0.0)
        assert val == pytest.approx(1.0 / 3.0, abs=1e-4)
        oracle = layer_cake_choquet(lambda t: t, 0.0, 0.5) / math.sqrt(0.5)
        assert val == pytest.approx(oracle, abs=1e-4)

    def test_identity_kind(self, by_id):
        op = OperatorSpec("identity", 3)
        f = by_id["expx"]
        assert apply(op, f, 0.37) == f(0.37)

    def test_vectorised_matches_scalar(self, by_id):
        xs = np.linspace(0, 1, 11)
        f = by_id["abs_half"]
        for kind in OPERATOR_KINDS:
            op = OperatorSpec(kind, 6)
            vec = apply(op, f, xs)
            assert vec == pytest.approx([apply(op, f, float(x)) for x in xs], abs=1e-14)

    def test_max_bernstein_is_pointwise_max(self, suite):
        xs = np.linspace(0, 1, 23)
        for f in suite:
            got = apply(OperatorSpec("max-bernstein", 9), f, xs)
            want = np.maximum(
                apply(OperatorSpec("bernstein", 9), f, xs),
                apply(OperatorSpec("bernstein", 10), f, xs),
            )
            assert np.array_equal(got, want), f.id

    def test_bernstein_matches_brute_force(self, rng):
        for f, fn in ((E1, lambda t: t), (E2, lambda t: t * t)):
            for n in range(1, 7):
                for x in rng.uniform(0, 1, size=5):
                    got = apply(OperatorSpec("bernstein", n), f, float(x))
                    assert got == pytest.approx(bernstein_direct(n, fn, float(x)), abs=1e-13)

    def test_sup_bernstein_closed_forms(self):
        xs = np.linspace(0, 1, 101)
        for n in (4, 9, 33):
            op = OperatorSpec("sup-bernstein", n)
            assert apply(op, E1, xs) == pytest.approx((n * xs + 1) / (n + 1), abs=1e-12)
            assert apply(op, NEG_E1, xs) == pytest.approx(-n * xs / (n + 1), abs=1e-12)
            want_e2 = (n**2 * xs**2 + n * xs * (1 - xs) + 2 * n * xs + 1) / (n + 1) ** 2
            assert apply(op, E2, xs) == pytest.approx(want_e2, abs=1e-12)

    def test_domain_validation(self):
        with pytest.raises(ValueError, match=r"\[0,1\]"):
            apply(OperatorSpec("bernstein", 4), E1, 1.2)


class TestChoquetIntegral:
    def test_constant(self):
        assert choquet_integral(E0, 0.0, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_identity_layer_cake(self):
        val = choquet_integral(E1, 0.0, 1.0, samples=4096)
        assert val == pytest.approx(2.0 / 3.0, abs=1e-3)
        assert val == pytest.approx(layer_cake_choquet(lambda t: t, 0.0, 1.0), abs=1e-3)

    def test_scaled_constants(self, rng):
        for _ in range(10):
            c = float(rng.uniform(-2, 2))
            a = float(rng.uniform(0, 0.5))
            b = float(rng.uniform(a + 0.1, 1.0))
            got = choquet_integral(c * E0, a, b)
            assert got == pytest.approx(c * math.sqrt(b - a), abs=1e-12)

    def test_oracle_cross_check_nonmonotone(self, by_id):
        f = by_id["abs_half"]
        got = choquet_integral(f, 0.2, 0.9, samples=4096)
        want = layer_cake_choquet(lambda t: np.abs(t - 0.5), 0.2, 0.9)
        assert got == pytest.approx(want, abs=2e-3)

    def test_argument_errors(self):
        with pytest.raises(ValueError, match="a < b"):
            choquet_integral(E0, 0.5, 0.5)
        with pytest.raises(ValueError, match="16"):
            choquet_integral(E0, 0.0, 1.0, samples=8)

    def test_translation_covariance(self, by_id):
        f = by_id["pow32"]
        base = choquet_integral(f, 0.1, 0.8)
        shifted = choquet_integral(f + 0.7, 0.1, 0.8)
        assert shifted == pytest.approx(base + 0.7 * math.sqrt(0.7), abs=1e-12)


class TestMoments:
    def test_max_bernstein_second(self):
        # T_n((e_1-x)^2)(x) = x(1-x)/n
        op = OperatorSpec("max-bernstein", 10)
        assert operator_moment(op, "second", 0.5) == pytest.approx(0.025, abs=1e-10)

    def test_mass_at_x(self):
        assert operator_moment(OperatorSpec("bernstein", 1), "second", 0.0) == 0.0

    def test_sup_bernstein_second_bound(self):
        val = operator_moment(OperatorSpec("sup-bernstein", 20), "second", 0.3)
        assert val <= 9.0 / (4 * 20) + 1e-12

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="moment kind"):
            operator_moment(OperatorSpec("bernstein", 4), "third", 0.5)

    def test_moment_equals_apply_on_integrand(self, rng):
        for kind in OPERATOR_KINDS:
            op = OperatorSpec(kind, 7)
            for x in rng.uniform(0, 1, size=4):
                x = float(x)
                kinks = (x,) if 0.0 < x < 1.0 else ()
                absdev = Func1D("absdev", lambda t, x=x: np.abs(t - x), kinks=kinks)
                sqdev = Func1D("sqdev", lambda t, x=x: (t - x) ** 2)
                assert operator_moment(op, "abs_first", x) == pytest.approx(
                    apply(op, absdev, x), abs=1e-10
                )
                assert operator_moment(op, "second", x) == pytest.approx(
                    apply(op, sqdev, x), abs=1e-10
                )

    def test_combined_profiles_match(self):
        xs = np.linspace(0, 1, 41)
        for kind in OPERATOR_KINDS:
            op = OperatorSpec(kind, 12)
            m1, m2 = operator_moment_profiles(op, xs)
            assert m1 == pytest.approx(operator_moment(op, "abs_first", xs), abs=1e-13)
            assert m2 == pytest.approx(operator_moment(op, "second", xs), abs=1e-13)

    def test_nonnegative(self, rng):
        xs = rng.uniform(0, 1, size=16)
        for kind in OPERATOR_KINDS:
            op = OperatorSpec(kind, 5)
            assert np.all(operator_moment(op, "abs_first", xs) >= 0.0)
            assert np.all(operator_moment(op, "second", xs) >= 0.0)


class TestDistortedMeasure:
    def test_interval_measure(self):
        assert SQRT_MEASURE.measure(0.0, 1.0) == 1.0
        assert SQRT_MEASURE.measure(0.3, 0.3) == 0.0
        assert SQRT_MEASURE.measure(0.1, 0.35) == pytest.approx(0.5, abs=1e-15)

    def test_monotone(self, rng):
        for _ in range(20):
            a, b = sorted(rng.uniform(0, 1, size=2))
            inner = SQRT_MEASURE.measure(a, b)
            outer = SQRT_MEASURE.measure(max(0.0, a - 0.05), min(1.0, b + 0.05))
            assert inner <= outer + 1e-15

    def test_domain(self):
        with pytest.raises(ValueError):
            SQRT_MEASURE.measure(-0.1, 0.5)


class TestOperatorSpec:
    def test_kinds(self):
        for kind in OPERATOR_KINDS:
            OperatorSpec(kind, 1)
        with pytest.raises(ValueError, match="unknown operator kind"):
            OperatorSpec("fourier", 4)

    def test_degree(self):
        with pytest.raises(ValueError, match="positive integer"):
            OperatorSpec("bernstein", 0)
