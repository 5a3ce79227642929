import numpy as np
import pytest

from rescurve.distcore import Distribution, DistributionKind, cost_at, cumulative
from rescurve.errors import DegenerateData, MonotonicityError
from rescurve.fitter import FitPoint, augment, fit


def _synthetic_points(d, fracs):
    return [FitPoint(cost_at(d, f * d.A), f * d.A) for f in fracs]


def test_augment_adds_zero_and_saturation_anchors():
    pts = [FitPoint(10.0, 100.0), FitPoint(40.0, 900.0)]
    out = augment(pts)
    assert out[0] == FitPoint(0.0, 0.0)
    assert out[-1] == FitPoint(80.0, 900.0)
    assert out[1:-1] == pts


def test_augment_is_idempotent():
    pts = [FitPoint(10.0, 100.0), FitPoint(40.0, 900.0)]
    once = augment(pts)
    assert augment(once) == once


def test_augment_uses_negative_first_cost_and_a_hint():
    out = augment([FitPoint(-2.0, 5.0), FitPoint(4.0, 9.0)], A_hint=20.0)
    assert out[0] == FitPoint(-2.0, 0.0)
    assert out[-1] == FitPoint(8.0, 20.0)


def test_augment_rejects_non_monotone_data():
    with pytest.raises(MonotonicityError):
        augment([FitPoint(10.0, 100.0), FitPoint(5.0, 200.0)])
    with pytest.raises(MonotonicityError):
        augment([FitPoint(10.0, 100.0)])


def test_fit_input_validation():
    with pytest.raises(DegenerateData):
        fit(DistributionKind.HIERARCHICAL, [FitPoint(1.0, 1.0), FitPoint(2.0, 2.0)])
    with pytest.raises(DegenerateData):
        fit(
            DistributionKind.HIERARCHICAL,
            [FitPoint(1.0, 1.0), FitPoint(1.0, 1.0), FitPoint(2.0, 2.0)],
        )
    with pytest.raises(MonotonicityError):
        fit(
            DistributionKind.HIERARCHICAL,
            [FitPoint(1.0, 5.0), FitPoint(2.0, 4.0), FitPoint(3.0, 6.0)],
        )


def test_fit_recovers_hierarchical_parameters():
    truth = Distribution(DistributionKind.HIERARCHICAL, 1000.0, 10.0, 5.0)
    pts = _synthetic_points(truth, [0.02, 0.1, 0.3, 0.5, 0.7, 0.9])
    result = fit(DistributionKind.HIERARCHICAL, pts)
    assert result.converged
    assert result.dist.A == pytest.approx(1000.0, rel=1e-4)
    assert result.dist.B == pytest.approx(10.0, rel=1e-4)
    assert result.dist.C0 == pytest.approx(5.0, abs=1e-4 * 10.0)


def test_fit_recovers_nearly_identical_parameters():
    truth = Distribution(DistributionKind.NEARLY_IDENTICAL, 400.0, 7.0, 20.0)
    pts = _synthetic_points(truth, [0.05, 0.2, 0.4, 0.6, 0.8, 0.95])
    result = fit(DistributionKind.NEARLY_IDENTICAL, pts)
    assert result.converged
    assert result.dist.A == pytest.approx(400.0, rel=1e-4)
    assert result.dist.B == pytest.approx(7.0, rel=1e-4)
    assert result.dist.C0 == pytest.approx(20.0, abs=1e-4 * 7.0)


def test_fitted_potential_never_below_largest_datum():
    pts = [FitPoint(5.0, 10.0), FitPoint(20.0, 500.0), FitPoint(40.0, 900.0)]
    result = fit(DistributionKind.HIERARCHICAL, pts)
    assert result.dist.A >= 900.0


def test_fit_report_fields():
    truth = Distribution(DistributionKind.HIERARCHICAL, 100.0, 3.0, 1.0)
    pts = _synthetic_points(truth, [0.1, 0.4, 0.8])
    result = fit(DistributionKind.HIERARCHICAL, pts)
    assert result.rmse >= 0.0
    assert len(result.per_point_residuals) == len(pts)
    assert result.iterations > 0
    fitted = [cumulative(result.dist, p.C) for p in pts]
    np.testing.assert_allclose(fitted, [p.N for p in pts], rtol=1e-6)


def test_relative_weighting_protects_small_data():
    # one order-of-magnitude spread; relative weighting must fit the small
    # points to a comparable relative accuracy as the large ones
    truth = Distribution(DistributionKind.HIERARCHICAL, 1000.0, 12.0, 2.0)
    pts = _synthetic_points(truth, [0.01, 0.05, 0.5, 0.95])
    result = fit(DistributionKind.HIERARCHICAL, pts, relative=True)
    assert max(abs(r) for r in result.per_point_residuals) < 1e-4


def test_fit_is_deterministic():
    pts = [FitPoint(5.0, 10.0), FitPoint(20.0, 500.0), FitPoint(40.0, 900.0)]
    r1 = fit(DistributionKind.HIERARCHICAL, pts)
    r2 = fit(DistributionKind.HIERARCHICAL, pts)
    assert (r1.dist.A, r1.dist.B, r1.dist.C0) == (r2.dist.A, r2.dist.B, r2.dist.C0)
