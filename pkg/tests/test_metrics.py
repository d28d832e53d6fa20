import numpy as np
import pytest

from evodyn import (DomainError, EscortSpec, GeometryError, MetricField,
                    UnsupportedKindError, adaptive_coefficients, barycenter,
                    escort_divergence, ghat, kl_divergence, metric_divergence,
                    metric_log)

SHAH = MetricField.shahshahani()
EUC = MetricField.euclidean()
POW2 = MetricField.diagonal_escort(EscortSpec.power(2.0))


def interior_samples(count, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        x = rng.dirichlet([2, 2, 2])
        if np.all(x > 1e-4):
            out.append(x)
    return out


class TestGhat:
    def test_euclidean_is_uniform(self):
        assert np.allclose(ghat(EUC, [0.2, 0.3, 0.5]), 1 / 3)

    def test_shahshahani_returns_state(self):
        x = np.array([0.2, 0.3, 0.5])
        assert np.allclose(ghat(SHAH, x), x, atol=1e-15)

    def test_diagonal_escort_is_normalized_escort(self):
        x = np.array([0.5, 0.25, 0.25])
        w = x ** 2
        assert np.allclose(ghat(POW2, x), w / w.sum(), atol=1e-15)

    def test_constant_metric_solves(self):
        m = MetricField.constant(np.diag([1.0, 2.0, 4.0]))
        g = np.array([1.0, 0.5, 0.25])
        assert np.allclose(ghat(m, barycenter(3)), g / g.sum())

    def test_negative_weights_rejected(self):
        # SPD (eigenvalues 1 and 1 +- 0.7*sqrt(2)) but inverse row sums mix signs
        m = MetricField.constant(np.array([[1.0, 0.7, 0.0],
                                           [0.7, 1.0, 0.7],
                                           [0.0, 0.7, 1.0]]))
        with pytest.raises(GeometryError):
            ghat(m, barycenter(3))


class TestAdaptiveCoefficients:
    def test_euclidean_projector(self):
        c = adaptive_coefficients(EUC, barycenter(3))
        assert np.allclose(c, np.eye(3) - np.ones((3, 3)) / 3, atol=1e-15)

    @pytest.mark.parametrize("metric", [SHAH, EUC, POW2])
    def test_rows_sum_to_zero(self, metric):
        for x in interior_samples(20):
            c = adaptive_coefficients(metric, x)
            assert np.allclose(c @ np.ones(3), 0.0, atol=1e-12)

    def test_shahshahani_gives_replicator_field(self):
        rng = np.random.default_rng(1)
        a = rng.normal(size=(3, 3))
        for x in interior_samples(20, seed=2):
            f = a @ x
            field = adaptive_coefficients(SHAH, x) @ f
            expect = x * (f - float(x @ f))
            assert np.allclose(field, expect, atol=1e-12)


class TestMetricLog:
    def test_euclidean_diagonal(self):
        assert metric_log(EUC, 0, 0, 0.25) == pytest.approx(-0.75)

    def test_shahshahani_diagonal(self):
        assert metric_log(SHAH, 1, 1, 0.5) == pytest.approx(np.log(0.5))

    def test_any_entry_at_one_is_zero(self):
        for metric in (EUC, SHAH, POW2):
            assert metric_log(metric, 0, 0, 1.0) == pytest.approx(0.0)

    def test_off_diagonal_zero_for_diagonal_kinds(self):
        assert metric_log(SHAH, 0, 1, 0.3) == 0.0

    def test_constant_entries(self):
        m = MetricField.constant(np.array([[2.0, 0.5], [0.5, 2.0]]))
        assert metric_log(m, 0, 1, 0.0) == pytest.approx(-0.5)


class TestMetricDivergence:
    def test_euclidean_half_squared_distance(self):
        t, x = np.array([0.3, 0.3, 0.4]), np.array([0.2, 0.5, 0.3])
        assert metric_divergence(EUC, t, x) == pytest.approx(
            0.5 * float(np.sum((t - x) ** 2)), abs=1e-15)

    def test_diagonal_escort_equals_escort_divergence(self):
        esc = EscortSpec.power(2.0)
        t, x = np.array([0.3, 0.3, 0.4]), np.array([0.2, 0.5, 0.3])
        assert metric_divergence(POW2, t, x) == pytest.approx(
            escort_divergence(esc, t, x), abs=1e-15)

    def test_shahshahani_equals_kl(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            t, x = rng.dirichlet([2, 2, 2]), rng.dirichlet([2, 2, 2])
            assert metric_divergence(SHAH, t, x) == pytest.approx(
                kl_divergence(t, x), abs=1e-10)

    def test_zero_on_diagonal(self):
        x = np.array([0.25, 0.4, 0.35])
        for metric in (SHAH, EUC, POW2):
            assert metric_divergence(metric, x, x) == pytest.approx(0.0, abs=1e-15)

    def test_positive_for_constant_metric_with_escort_reciprocals(self):
        # off-diagonal entries positive, so reciprocals are valid escorts
        m = MetricField.constant(np.array([[2.0, 0.5, 0.25],
                                           [0.5, 2.0, 0.5],
                                           [0.25, 0.5, 2.0]]))
        rng = np.random.default_rng(5)
        for _ in range(300):
            t, x = rng.dirichlet([1, 1, 1]), rng.dirichlet([1, 1, 1])
            d = metric_divergence(m, t, x)
            if np.allclose(t, x):
                assert d == pytest.approx(0.0, abs=1e-12)
            else:
                assert d > 0

    def test_quadratic_form_bound(self):
        # D(target, x) <= (x-t)^T G(x) (x-t), sampled with interior targets.
        # For power escorts with q > 1 the bound needs target coordinates
        # comparable to the state's; q=4 with lopsided targets violates it.
        targets = [np.full(3, 1 / 3), np.array([0.2, 0.3, 0.5]),
                   np.array([0.15, 0.45, 0.4])]
        metrics = [SHAH, EUC,
                   MetricField.diagonal_escort(EscortSpec.power(0.5)),
                   MetricField.diagonal_escort(EscortSpec.power(1.5)),
                   POW2,
                   MetricField.diagonal_escort(EscortSpec.power(2.5))]
        rng = np.random.default_rng(6)
        for metric in metrics:
            for t in targets:
                for _ in range(150):
                    x = rng.dirichlet([1, 1, 1])
                    if np.any(x < 1e-6):
                        continue
                    d = metric_divergence(metric, t, x)
                    quad = float((x - t) @ metric.matrix_at(x) @ (x - t))
                    assert d <= quad + 1e-12

    def test_diagonal_ghat_matches_dynamic_weights(self):
        x = np.array([0.5, 0.25, 0.25])
        w = x ** 2
        assert np.allclose(ghat(POW2, x), w / w.sum(), atol=1e-12)


class TestValidation:
    def test_constant_metric_must_be_spd(self):
        with pytest.raises(GeometryError):
            MetricField.constant(np.array([[1.0, 2.0], [2.0, 1.0]]))
        with pytest.raises(GeometryError):
            MetricField.constant(np.array([[1.0, 0.5], [0.4, 1.0]]))

    def test_shahshahani_matrix_needs_interior(self):
        with pytest.raises(DomainError):
            SHAH.matrix_at([0.0, 0.5, 0.5])

    def test_metric_log_unsupported_for_constant_is_fine_but_custom_off_diag(self):
        # constant matrices integrate entrywise; only diagonal escort kinds
        # beyond that are supported
        m = MetricField.constant(np.array([[2.0, 0.5], [0.5, 2.0]]))
        assert metric_log(m, 0, 1, 0.5) == pytest.approx(-0.25)

    def test_no_escort_form_for_constant_matrices(self):
        # state-coupled entries have no single-variable escort reduction
        from evodyn.metrics import _diagonal_as_escorts
        with pytest.raises(UnsupportedKindError):
            _diagonal_as_escorts(MetricField.constant(np.eye(3)), 3)
