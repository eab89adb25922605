import math

import numpy as np
import pytest
from pydantic import ValidationError

from convex_sets import Ellipsoid, Simplex, box, euclidean_ball
from shared.errors import InputError, ResourceError
from tests.conftest import Quadratic, QuarticSum, quadratic_regularizer
from verify import (
    DerivativeBounds,
    SmoothedFunction,
    SmoothingProbe,
    derivative_bound_audit,
    finite_diff,
    gaussian_smooth_mc,
    sample_in_body,
    smoothed_derivative_bounds,
    smoothing_preserves_convexity_check,
    strong_convexity_sampled,
)


class Linear:
    globally_defined = True

    def __init__(self, a, b=0.0):
        self.a = np.asarray(a, dtype=float)
        self.b = b
        self.dim = len(self.a)

    def value(self, x):
        return float(self.a @ x + self.b)

    def subgradient(self, x):
        return self.a.copy()


class AbsoluteSum:
    globally_defined = True

    def __init__(self, dim):
        self.dim = dim

    def value(self, x):
        return float(np.abs(x).sum())

    def subgradient(self, x):
        return np.sign(x)


def within_stderr(estimate, expected, k=3.0):
    return abs(estimate.mean - expected) <= k * estimate.stderr


class TestSampling:
    def test_points_lie_in_body(self, rng):
        body = Ellipsoid.axis_aligned([2, 1])
        points = sample_in_body(body, 500, rng)
        assert points.shape == (500, 2)
        assert body.contains_many(points, 1e-12).all()

    def test_scaled_points(self, rng, ball2):
        points = sample_in_body(ball2, 200, rng, scale=0.5)
        assert np.linalg.norm(points, axis=1).max() <= 0.5

    def test_simplex(self, rng):
        points = sample_in_body(Simplex(4), 50, rng)
        np.testing.assert_allclose(points.sum(axis=1), 1.0)
        assert (points >= 0).all()

    def test_starvation(self, rng):
        with pytest.raises(ResourceError, match="starved"):
            sample_in_body(euclidean_ball(20), 10, rng)


class TestStrongConvexitySampled:
    def test_half_norm_squared_is_tight(self, ball2, half_norm_squared):
        report = strong_convexity_sampled(half_norm_squared, ball2, ball2, 1.0, n=300)
        assert report.passed
        assert report.min_slack == pytest.approx(0.0, abs=1e-6)

    def test_long_axis_fails(self, ball2, half_norm_squared):
        report = strong_convexity_sampled(half_norm_squared, ball2, Ellipsoid.axis_aligned([1, 10]), 1.0, n=300)
        assert not report.passed
        point, direction = report.worst_direction
        # the worst direction leans on the long axis
        assert abs(direction[1]) > abs(direction[0])

    def test_weaker_modulus_passes_with_room(self, ball2):
        report = strong_convexity_sampled(Quadratic(2, k=2.0), ball2, ball2, 1.0, n=200)
        assert report.passed
        assert report.min_slack > 0

    def test_piecewise_regularizer(self, ball2):
        centers = np.array([[i * 0.25, j * 0.25] for i in range(-4, 5) for j in range(-4, 5)])
        g = quadratic_regularizer(centers, cubic_L=1.0)
        report = strong_convexity_sampled(g, ball2, ball2, 0.5, n=200, inner_fraction=0.5)
        assert report.passed

    def test_deterministic(self, ball2, half_norm_squared):
        a = strong_convexity_sampled(half_norm_squared, ball2, box([1, 1]), 0.5, n=50, seed=3)
        b = strong_convexity_sampled(half_norm_squared, ball2, box([1, 1]), 0.5, n=50, seed=3)
        assert a.min_slack == b.min_slack


class TestGaussianSmoothing:
    def test_second_moment(self):
        probe = SmoothingProbe(sigma=0.5, n=4000, seed=1)
        x = np.array([0.3, -0.2, 0.1])
        estimate = gaussian_smooth_mc(Quadratic(3, k=2.0), probe, x)
        assert within_stderr(estimate, x @ x + 0.25 * 3)

    def test_linear_mean_preserved(self):
        probe = SmoothingProbe(sigma=2.0, n=2000, seed=2)
        f0 = Linear([1.0, -2.0], 0.5)
        x = np.array([0.4, 0.1])
        assert within_stderr(gaussian_smooth_mc(f0, probe, x), f0.value(x))

    def test_half_normal_mean(self):
        probe = SmoothingProbe(sigma=1.0, n=4000, seed=3)
        estimate = gaussian_smooth_mc(AbsoluteSum(1), probe, np.zeros(1))
        assert within_stderr(estimate, math.sqrt(2 / math.pi))

    def test_stein_gradient(self):
        smoothed = SmoothedFunction(Quadratic(2), SmoothingProbe(sigma=0.1, n=20_000, seed=4))
        x = np.array([0.5, -0.3])
        np.testing.assert_allclose(smoothed.stein_gradient(x), x, atol=0.05)
        np.testing.assert_allclose(smoothed.subgradient(x), x, atol=0.01)

    @pytest.mark.parametrize("fields", [{"sigma": 0.0}, {"sigma": 1.0, "n": 0}, {"sigma": -1.0}])
    def test_probe_validation(self, fields):
        with pytest.raises(ValidationError):
            SmoothingProbe(**fields)

    def test_derivative_bounds(self):
        bounds = smoothed_derivative_bounds(1.0, 1.0, 4, sigma=0.5)
        assert bounds["value"] == pytest.approx(2.0)
        assert bounds["third"] / bounds["hessian"] == pytest.approx(5.0 / (4.0 * 0.5))


class TestSmoothingPreservesConvexity:
    def test_quadratic_stays_strongly_convex(self, ball2):
        report = smoothing_preserves_convexity_check(Quadratic(2), SmoothingProbe(sigma=0.3, n=64), ball2, 1.0, n=60)
        assert report.passed
        assert report.worst_points.shape[1] == 2

    def test_planted_weak_modulus_fails(self, ball2):
        report = smoothing_preserves_convexity_check(
            Quadratic(2, k=0.5), SmoothingProbe(sigma=0.3, n=64), ball2, 1.0, n=60
        )
        assert not report.passed


class TestFiniteDifferences:
    def test_gradient(self, rng):
        f = QuarticSum(3)
        x = rng.uniform(-1, 1, 3)
        np.testing.assert_allclose(finite_diff(f, x, order=1, h=1e-5), f.subgradient(x), rtol=1e-6, atol=1e-8)

    def test_hessian(self, rng):
        f = QuarticSum(2)
        x = rng.uniform(-1, 1, 2)
        np.testing.assert_allclose(finite_diff(f, x, order=2, h=1e-3), f.hessian(x), atol=1e-4)

    def test_halving_step_quarters_error(self):
        f = QuarticSum(1)
        x = np.array([0.7])
        errors = [abs(finite_diff(f, x, order=2, h=h)[0, 0] - f.hessian(x)[0, 0]) for h in (1e-2, 5e-3)]
        assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.01)

    def test_rejects_bad_arguments(self, half_norm_squared):
        with pytest.raises(InputError):
            finite_diff(half_norm_squared, np.zeros(2), h=0.0)
        with pytest.raises(InputError):
            finite_diff(half_norm_squared, np.zeros(2), order=3)


class TestDerivativeAudit:
    def test_quartic_within_bounds(self):
        report = derivative_bound_audit(
            QuarticSum(2), box([1, 1]), DerivativeBounds(gradient=8.0, hessian=24.0, third=24.0), n=100
        )
        assert report.passed
        assert report.max_hessian <= 12.0 + 1e-4
        assert report.max_hessian_lipschitz <= 24.0

    def test_tight_bound_flagged(self):
        report = derivative_bound_audit(
            QuarticSum(2), box([1, 1]), DerivativeBounds(gradient=8.0, hessian=1.0, third=24.0), n=100
        )
        assert not report.passed
        assert report.within == {"gradient": True, "hessian": False, "third": True}

    def test_without_bounds(self, half_norm_squared, ball2):
        report = derivative_bound_audit(half_norm_squared, ball2, n=20)
        assert report.within == {}
        assert report.max_hessian == pytest.approx(1.0, abs=1e-5)
