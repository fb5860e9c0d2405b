import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pumadde.model import (Equilibrium, EquilibriumKind, ModelParams, State, admissible_interval,
                           equilibrium_gap, equilibrium_residual, find_equilibria,
                           functional_response, positive_existence_condition, residual_scale, rhs)

BASE = ModelParams(r=0.1, K=200, a=0.5, gamma=0.5, beta=0.1, N=2)

# 40-digit mpmath findroot on the nullcline gap, rounded to double
POSITIVE_ORACLE = [
    (0.26970705596157076587, 0.23900499455105532413),
    (17.626950314723072667, 3.2172672510960871543),
    (182.34781972578108064, 3.218860787659692293),
]

positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


def sweep_params():
    return st.builds(
        ModelParams,
        r=st.floats(0.05, 0.2), K=st.floats(200, 500), a=st.floats(0.1, 0.8),
        gamma=st.floats(0.1, 0.8), beta=st.floats(0.05, 0.1), N=st.floats(1, 2),
        tau=st.just(27.0),
    )


class TestParams:
    @pytest.mark.parametrize("field", ["r", "K", "a", "gamma", "beta", "N"])
    def test_rejects_nonpositive(self, field):
        with pytest.raises(ValueError, match=field):
            BASE.replace(**{field: 0.0})

    def test_tau_zero_allowed_negative_rejected(self):
        assert BASE.replace(tau=0.0).tau == 0.0
        with pytest.raises(ValueError, match="tau"):
            BASE.replace(tau=-1.0)

    def test_state_nonnegative(self):
        with pytest.raises(ValueError):
            State(-1e-3, 1.0)
        with pytest.raises(ValueError):
            State(1.0, math.nan)


class TestFunctionalResponse:
    def test_zero(self):
        assert functional_response(0.0, BASE) == 0.0

    def test_half_saturation(self):
        assert functional_response(BASE.a, BASE) == pytest.approx(BASE.gamma / 2, rel=1e-15)

    def test_arithmetic(self):
        p = BASE.replace(a=0.5, gamma=0.8)
        assert functional_response(1.0, p) == pytest.approx(0.64, rel=1e-15)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            functional_response(-1.0, BASE)

    def test_monotone_and_bounded_on_random_draws(self):
        rng = np.random.default_rng(7)
        n = 1_000_000
        a = rng.uniform(0.01, 10, n)
        g = rng.uniform(0.01, 2, n)
        x = np.sort(rng.uniform(0, 1e4, (n, 2)), axis=1)
        f = lambda xx: g * xx ** 2 / (a ** 2 + xx ** 2)  # noqa: E731
        lo, hi = f(x[:, 0]), f(x[:, 1])
        assert np.all(hi >= lo)
        assert np.all(hi <= g)
        # scalar routine agrees with the vectorised check on a sample
        for i in range(0, n, 100_000):
            p = BASE.replace(a=float(a[i]), gamma=float(g[i]))
            assert functional_response(float(x[i, 1]), p) == pytest.approx(hi[i], rel=1e-14)


class TestRhs:
    def test_boundary_fixed_point(self):
        s = State(BASE.K, 0.0)
        assert rhs(s, s, BASE) == (0.0, 0.0)

    def test_origin_fixed_point(self):
        s = State(0.0, 0.0)
        assert rhs(s, s, BASE) == (0.0, 0.0)

    def test_logistic_term(self):
        p = BASE.replace(r=0.2, K=200)
        assert rhs(State(100, 0), State(0, 0), p) == pytest.approx((10.0, 0.0), abs=1e-14)

    def test_delayed_recruitment_uses_delayed_state(self):
        cur, dl = State(3.0, 2.0), State(7.0, 5.0)
        dx, dy = rhs(cur, dl, BASE)
        expect = -BASE.beta * 2.0 + functional_response(7.0, BASE) * 5.0 * math.exp(-5.0 / BASE.N)
        assert dy == pytest.approx(expect, rel=1e-14)
        assert dx == pytest.approx(BASE.r * (1 - 3 / 200) * 3 - functional_response(3, BASE) * 2,
                                   rel=1e-14)


class TestExistence:
    def test_equal_rates_fail(self):
        assert not positive_existence_condition(BASE.replace(gamma=0.1, beta=0.1))

    def test_ratio_five_holds(self):
        assert positive_existence_condition(BASE)

    @given(st.floats(0.01, 1), st.floats(1.001, 10), positive, positive)
    def test_beta_above_gamma_never(self, g, ratio, K, a):
        p = ModelParams(0.1, K, a, g, g * ratio, 1.0)
        assert not positive_existence_condition(p)


class TestGap:
    def test_negative_at_capacity(self):
        lo, hi = admissible_interval(BASE)
        expect = -BASE.N * math.log(BASE.gamma / BASE.beta * BASE.K ** 2 / (BASE.a ** 2 + BASE.K ** 2))
        assert equilibrium_gap(hi, BASE) == pytest.approx(expect, rel=1e-12)
        assert equilibrium_gap(hi, BASE) < 0

    def test_positive_at_lower_end(self):
        lo, _ = admissible_interval(BASE)
        assert lo == pytest.approx(0.5 * math.sqrt(0.1 / 0.4), rel=1e-15)
        assert equilibrium_gap(lo, BASE) > 0

    def test_outside_interval_rejected(self):
        lo, hi = admissible_interval(BASE)
        with pytest.raises(ValueError):
            equilibrium_gap(lo * 0.5, BASE)
        with pytest.raises(ValueError):
            equilibrium_gap(hi * 1.01, BASE)

    def test_requires_existence(self):
        with pytest.raises(ValueError):
            equilibrium_gap(10.0, BASE.replace(beta=0.6))


class TestFindEquilibria:
    def test_matches_high_precision_roots(self):
        eqs = [e for e in find_equilibria(BASE) if e.kind is EquilibriumKind.POSITIVE]
        assert len(eqs) == 3
        for e, (x, y) in zip(eqs, POSITIVE_ORACLE):
            assert e.x == pytest.approx(x, rel=1e-10)
            assert e.y == pytest.approx(y, rel=1e-10)
            assert abs(equilibrium_gap(e.x, BASE)) <= 1e-10

    def test_boundary_present_at_k200(self):
        eqs = find_equilibria(BASE)
        assert (eqs[-1].x, eqs[-1].y) == (200.0, 0.0)
        assert eqs[-1].kind is EquilibriumKind.BOUNDARY

    def test_beta_above_gamma_only_trivial(self):
        eqs = find_equilibria(BASE.replace(gamma=0.05))
        assert [(e.x, e.y) for e in eqs] == [(0.0, 0.0), (200.0, 0.0)]

    def test_sorted_and_substitution(self):
        eqs = find_equilibria(BASE)
        xs = [e.x for e in eqs]
        assert xs == sorted(xs)
        for e in eqs:
            assert equilibrium_residual(e.x, e.y, BASE) <= 1e-8

    @settings(max_examples=150, deadline=None)
    @given(sweep_params())
    def test_invariants_on_sweep_ranges(self, p):
        eqs = find_equilibria(p)
        kinds = [e.kind for e in eqs]
        assert kinds.count(EquilibriumKind.ORIGIN) == 1
        assert kinds.count(EquilibriumKind.BOUNDARY) == 1
        if positive_existence_condition(p):
            assert len(eqs) >= 3
        else:
            assert len(eqs) == 2
        for e in eqs:
            assert isinstance(e, Equilibrium)
            assert e.residual <= 1e-10 * residual_scale(p)
            if e.kind is EquilibriumKind.POSITIVE:
                assert 0 < e.x < p.K and e.y > 0

    def test_tangent_root_is_flagged(self):
        # N at a local extremum of N(x) = first-curve / log-term (scipy bounded search):
        # the upper two roots merge into one double root near x = 100
        p = BASE.replace(N=6.213601206520136)
        pos = [e for e in find_equilibria(p) if e.kind is EquilibriumKind.POSITIVE]
        tangent = [e for e in pos if e.tangential]
        assert len(tangent) == 1
        assert tangent[0].x == pytest.approx(99.99594624613587, rel=1e-5)
        assert tangent[0].residual <= 1e-10 * residual_scale(p)

    def test_transversal_roots_not_flagged(self):
        assert not any(e.tangential for e in find_equilibria(BASE))
