import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from korovkinlab import (
    E0,
    E1,
    E2,
    INF,
    EvaluationError,
    Func1D,
    Grid,
    lp_norm,
    sobolev_norm,
)
from korovkinlab.funcspace import derivative_callable

P_MENU = (1.0, 1.5, 2.0, 4.0, INF)


class TestLpNorm:
    def test_constant_is_one(self, grid):
        assert lp_norm(E0, 2, grid) == pytest.approx(1.0, abs=1e-12)

    def test_identity_l1(self, grid):
        assert lp_norm(E1, 1, grid) == pytest.approx(0.5, abs=1e-6)

    def test_identity_l2(self, grid):
        # closed form: (int_0^1 x^2 dx)^(1/2) = 1/sqrt(3)
        assert lp_norm(E1, 2, grid) == pytest.approx(0.5773502691896258, abs=1e-6)

    def test_sup_norm(self, grid):
        assert lp_norm(E2, INF, grid) == pytest.approx(1.0, abs=1e-12)

    def test_nonfinite_value_names_node(self, grid):
        bad = Func1D("bad", lambda x: np.where(x > 0.5, np.nan, 1.0))
        with pytest.raises(EvaluationError, match="bad is not finite at node"):
            lp_norm(bad, 2, grid)

    def test_invalid_exponent(self, grid):
        with pytest.raises(ValueError, match="p must satisfy"):
            lp_norm(E1, 0.5, grid)

    def test_kink_refinement(self, grid, by_id):
        # |x-1/2| integrates exactly once the kink is a node
        assert lp_norm(by_id["abs_half"], 1, grid) == pytest.approx(0.25, abs=1e-12)


class TestSobolevNorm:
    def test_e2_order2(self, grid):
        assert sobolev_norm(E2, 2, INF, grid) == pytest.approx(2.0, abs=1e-12)

    def test_e1_order1(self, grid):
        assert sobolev_norm(E1, 1, INF, grid) == pytest.approx(1.0, abs=1e-12)

    def test_e0_order2_l1(self, grid):
        assert sobolev_norm(E0, 2, 1, grid) == pytest.approx(1.0, abs=1e-12)

    def test_finite_difference_fallback(self, grid, by_id):
        # abs_half has no analytic derivatives; order 1 falls back to FD
        val = sobolev_norm(by_id["abs_half"], 1, INF, grid)
        assert val == pytest.approx(1.0, abs=1e-6)

    def test_unsupported_order(self, grid, by_id):
        with pytest.raises(ValueError, match="unsupported derivative order"):
            sobolev_norm(by_id["abs_half"], 4, 2, grid)


class TestSuite:
    def test_minimum_members(self, by_id):
        for fid in ("e0", "e1", "e2", "neg_e1", "expx", "pow32", "abs_half", "step"):
            assert fid in by_id

    def test_point_values(self, by_id):
        assert by_id["e0"](0.7) == 1.0
        assert by_id["e2"](0.5) == 0.25
        assert by_id["abs_half"](0.25) == 0.25
        assert by_id["abs_half"].kinks == (0.5,)
        assert by_id["neg_e1"](0.3) == -0.3
        assert by_id["step"](0.59) == 0.0 and by_id["step"](0.6) == 1.0

    def test_metadata(self, suite):
        for f in suite:
            assert f.smoothness_class in ("Winf2", "Wp2", "C0", "Lp", "L1")
            assert all(0.0 < k < 1.0 for k in f.kinks)
            assert all(b > a for a, b in zip(f.kinks, f.kinks[1:]))

    def test_declared_derivatives_match_differences(self, suite, rng):
        # central difference of the previous level, step 1e-5, 32 points
        h = 1e-5
        xs = rng.uniform(0.02, 0.98, size=32)
        for f in suite:
            levels = [f] + [None] * len(f.derivatives)
            for j, deriv in enumerate(f.derivatives):
                base = derivative_callable(f, j)
                fd = (base(xs + h) - base(xs - h)) / (2 * h)
                assert np.max(np.abs(fd - deriv(xs))) < 1e-3, f.id

    def test_kink_validation(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            Func1D("x", lambda x: x, kinks=(0.5, 0.5))
        with pytest.raises(ValueError, match="inside"):
            Func1D("x", lambda x: x, kinks=(0.0,))
        with pytest.raises(ValueError, match="smoothness class"):
            Func1D("x", lambda x: x, smoothness_class="C17")


class TestGrid:
    def test_nodes_are_exact(self):
        g = Grid(8)
        assert np.array_equal(g.nodes, np.arange(9) / 8)

    def test_too_coarse(self):
        with pytest.raises(ValueError, match="m >= 2"):
            Grid(1)


@settings(max_examples=40, deadline=None)
@given(
    c=st.floats(min_value=-3.0, max_value=3.0, allow_nan=False).filter(
        lambda c: c == 0.0 or abs(c) > 1e-6
    ),
    fidx=st.integers(min_value=0, max_value=7),
    p=st.sampled_from(P_MENU),
)
def test_absolute_homogeneity(c, fidx, p):
    from korovkinlab import make_test_suite

    f = make_test_suite()[fidx]
    g = Grid(1024)
    lhs = lp_norm(c * f, p, g)
    rhs = abs(c) * lp_norm(f, p, g)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


@settings(max_examples=30, deadline=None)
@given(
    i=st.integers(min_value=0, max_value=7),
    j=st.integers(min_value=0, max_value=7),
    p=st.sampled_from(P_MENU),
)
def test_triangle_inequality(i, j, p):
    from korovkinlab import make_test_suite

    s = make_test_suite()
    g = Grid(1024)
    assert lp_norm(s[i] + s[j], p, g) <= lp_norm(s[i], p, g) + lp_norm(s[j], p, g) + 1e-10


def test_norm_monotone_in_p(suite, grid1k):
    # Hoelder on a probability space: p <= q implies ||f||_p <= ||f||_q
    for f in suite:
        norms = [lp_norm(f, p, grid1k) for p in P_MENU]
        for a, b in zip(norms, norms[1:]):
            assert a <= b + 1e-8, f.id


def test_grid_refinement_converged(suite):
    smooth = [f for f in suite if f.smoothness_class in ("Winf2", "Wp2")]
    assert smooth
    for f in smooth:
        for p in (1.0, 2.0, INF):
            a = lp_norm(f, p, Grid(4096))
            b = lp_norm(f, p, Grid(8192))
            assert abs(a - b) < 1e-6 * max(1.0, abs(b)), f.id
