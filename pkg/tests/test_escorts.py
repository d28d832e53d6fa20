import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from evodyn import (DomainError, EscortSpec, escort_divergence, escort_exp,
                    escort_log, escort_weights, kl_divergence, q_divergence)

BUILTIN = [
    EscortSpec.power(0.0),
    EscortSpec.power(0.5),
    EscortSpec.power(1.0),
    EscortSpec.power(2.0),
    EscortSpec.scaled(2.5),
    EscortSpec.constant_one(),
]


def pairs(n=3):
    pos = st.lists(st.floats(min_value=5e-3, max_value=1.0), min_size=n, max_size=n)
    return st.tuples(pos, pos).map(
        lambda xy: (np.array(xy[0]) / np.sum(xy[0]), np.array(xy[1]) / np.sum(xy[1]))
    )


class TestEscortSpec:
    @pytest.mark.parametrize("spec", BUILTIN)
    def test_positive_nondecreasing_on_unit_interval(self, spec):
        us = np.linspace(0.01, 1.0, 50)
        vals = [spec.value(u) for u in us]
        assert all(v > 0 for v in vals)
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_invalid_parameters(self):
        with pytest.raises(DomainError):
            EscortSpec.power(-0.5)
        with pytest.raises(DomainError):
            EscortSpec.scaled(0.0)


class TestEscortLog:
    def test_power_two_closed_form(self):
        assert escort_log(EscortSpec.power(2.0), 0.5) == pytest.approx(-1.0, abs=1e-15)

    @pytest.mark.parametrize("spec", BUILTIN)
    def test_log_at_one_is_zero(self, spec):
        assert escort_log(spec, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_power_one_is_natural_log(self):
        for x in (0.1, 0.5, 0.9):
            assert escort_log(EscortSpec.power(1.0), x) == pytest.approx(math.log(x))

    def test_scaled_divides_log(self):
        assert escort_log(EscortSpec.scaled(2.0), 0.5) == pytest.approx(math.log(0.5) / 2.0)

    def test_constant_one_shifts(self):
        assert escort_log(EscortSpec.constant_one(), 0.25) == pytest.approx(-0.75)

    def test_custom_matches_closed_form(self):
        custom = EscortSpec.custom("sqrt", lambda u: math.sqrt(u))
        for x in (0.2, 0.7, 1.0):
            assert escort_log(custom, x) == pytest.approx(
                escort_log(EscortSpec.power(0.5), x), abs=1e-10)

    @pytest.mark.parametrize("spec", BUILTIN)
    def test_strictly_increasing_and_negative_below_one(self, spec):
        us = np.linspace(0.02, 0.999, 40)
        vals = [escort_log(spec, u) for u in us]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert all(v < 0 for v in vals)

    def test_q_below_one_extends_to_zero(self):
        assert escort_log(EscortSpec.power(0.5), 0.0) == pytest.approx(-2.0)

    def test_q_above_one_diverges_at_zero(self):
        with pytest.raises(DomainError):
            escort_log(EscortSpec.power(1.5), 0.0)
        with pytest.raises(DomainError):
            escort_log(EscortSpec.power(1.0), 0.0)


class TestEscortExp:
    @pytest.mark.parametrize("spec", BUILTIN)
    def test_exp_at_zero_is_one(self, spec):
        assert escort_exp(spec, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_power_one_is_exp(self):
        assert escort_exp(EscortSpec.power(1.0), -0.3) == pytest.approx(math.exp(-0.3))

    def test_constant_one_shifts_back(self):
        assert escort_exp(EscortSpec.constant_one(), -0.4) == pytest.approx(0.6)

    @pytest.mark.parametrize("spec", BUILTIN)
    def test_inverts_log(self, spec):
        # y values inside the log's range for every built-in kind
        for y in (-0.9, -0.5, -0.1, 0.0):
            x = escort_exp(spec, y)
            assert escort_log(spec, x) == pytest.approx(y, abs=1e-10)

    def test_custom_numeric_inverse(self):
        custom = EscortSpec.custom("sqrt", lambda u: math.sqrt(u))
        for y in (-1.0, -0.25, 0.0):
            assert escort_log(custom, escort_exp(custom, y)) == pytest.approx(y, abs=1e-9)

    @pytest.mark.parametrize("spec", BUILTIN)
    def test_derivative_property(self, spec):
        # d/dy exp(y) = phi(exp(y)), by central differences
        eps = 1e-6
        for y in (-0.8, -0.3, -0.05):
            num = (escort_exp(spec, y + eps) - escort_exp(spec, y - eps)) / (2 * eps)
            assert num == pytest.approx(spec.value(escort_exp(spec, y)), rel=1e-5)

    def test_out_of_range_rejected(self):
        with pytest.raises(DomainError):
            escort_exp(EscortSpec.power(0.5), -3.0)   # log range is [-2, inf)


class TestEscortDivergence:
    @pytest.mark.parametrize("spec", BUILTIN)
    def test_zero_at_equal_arguments(self, spec):
        x = np.array([0.2, 0.3, 0.5])
        assert escort_divergence(spec, x, x) == pytest.approx(0.0, abs=1e-15)

    def test_constant_one_is_half_squared_distance(self):
        x, y = np.array([0.2, 0.3, 0.5]), np.array([0.4, 0.4, 0.2])
        expect = 0.5 * float(np.sum((x - y) ** 2))
        assert escort_divergence(EscortSpec.constant_one(), x, y) == pytest.approx(expect, abs=1e-15)

    def test_power_one_is_kl(self):
        # oracle: direct summation
        x, y = np.array([0.5, 0.5]), np.array([0.25, 0.75])
        direct = float(np.sum(x * np.log(x / y)))
        assert escort_divergence(EscortSpec.power(1.0), x, y) == pytest.approx(direct, abs=1e-14)
        assert direct == pytest.approx(0.14384103622589042, abs=1e-14)

    @settings(max_examples=60, deadline=None)
    @given(pairs())
    def test_positive_off_diagonal(self, xy):
        x, y = xy
        if np.allclose(x, y, atol=1e-12):
            return
        for spec in BUILTIN:
            assert escort_divergence(spec, x, y) > 0

    def test_per_coordinate_escort_vector(self):
        x, y = np.array([0.2, 0.3, 0.5]), np.array([0.4, 0.4, 0.2])
        mixed = (EscortSpec.power(1.0), EscortSpec.constant_one(), EscortSpec.power(2.0))
        total = escort_divergence(mixed, x, y)
        parts = sum(
            escort_divergence((e,), [xi], [yi])
            for e, xi, yi in zip(mixed, x, y)
        )
        assert total == pytest.approx(parts, abs=1e-14)

    def test_quadrature_matches_closed_forms(self):
        rng = np.random.default_rng(11)
        for q in (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 4.0):
            custom = EscortSpec.custom(f"pow{q}", lambda u, q=q: u ** q)
            for _ in range(5):
                x = rng.dirichlet([2, 2, 2])
                y = rng.dirichlet([2, 2, 2])
                closed = q_divergence(q, x, y)
                quadrature = escort_divergence(custom, x, y)
                assert closed == pytest.approx(quadrature, abs=1e-8)

    def test_boundary_second_argument_rejected_for_kl(self):
        with pytest.raises(DomainError):
            escort_divergence(EscortSpec.power(1.0), [0.5, 0.5, 0.0], [0.5, 0.0, 0.5])

    def test_boundary_allowed_below_q1(self):
        v = escort_divergence(EscortSpec.power(0.5), [0.0, 0.5, 0.5], [0.5, 0.0, 0.5])
        assert np.isfinite(v) and v > 0


class TestQDivergence:
    def test_q0_vertices(self):
        assert q_divergence(0.0, [1, 0, 0], [0, 1, 0]) == pytest.approx(1.0)

    def test_zero_on_diagonal(self):
        x = np.array([0.3, 0.3, 0.4])
        for q in (0.0, 0.5, 1.0, 2.0, 4.0):
            assert q_divergence(q, x, x) == pytest.approx(0.0, abs=1e-15)

    def test_kl_alias(self):
        x, y = np.array([0.5, 0.5]), np.array([0.25, 0.75])
        assert kl_divergence(x, y) == pytest.approx(q_divergence(1.0, x, y), abs=1e-15)

    def test_negative_q_rejected(self):
        with pytest.raises(DomainError):
            q_divergence(-0.5, [0.5, 0.5], [0.4, 0.6])

    def test_q2_needs_interior(self):
        with pytest.raises(DomainError):
            q_divergence(2.0, [0.0, 0.5, 0.5], [0.2, 0.3, 0.5])

    def test_matches_general_branch_limits(self):
        # the general branch approaches the q=1 and q=2 special cases
        x, y = np.array([0.2, 0.3, 0.5]), np.array([0.4, 0.4, 0.2])
        assert q_divergence(1.0 + 1e-7, x, y) == pytest.approx(q_divergence(1.0, x, y), abs=1e-6)
        assert q_divergence(2.0 + 1e-7, x, y) == pytest.approx(q_divergence(2.0, x, y), abs=1e-6)


class TestEscortWeights:
    def test_power_weights(self):
        w = escort_weights(EscortSpec.power(2.0), [0.5, 0.25, 0.25])
        assert np.allclose(w, [0.25, 0.0625, 0.0625])

    def test_vector_weights(self):
        w = escort_weights((EscortSpec.power(1.0), EscortSpec.constant_one()), [0.3, 0.7])
        assert np.allclose(w, [0.3, 1.0])

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            escort_weights((EscortSpec.power(1.0),) * 2, [0.3, 0.3, 0.4])
