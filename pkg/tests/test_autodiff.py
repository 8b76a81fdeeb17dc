import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarpoly import autodiff as ad
from polarpoly.codec import DecoderConfig, GridCell, decode
from polarpoly.geometry import Point
from polarpoly.gradients import (
    Target,
    branch_signature,
    evaluate_with_grad,
    grad_regression_loss,
    gradcheck,
    random_gradcheck_case,
    regression_loss_value,
)
from polarpoly.losses import LossWeights, regression_loss
from polarpoly.resample import DenseRadialProfile, triangle_radii


def check_grad(fn, x, tol=1e-7):
    g = ad.DualGraph()
    v = g.variable(x)
    out = fn(v)
    analytic = g.grad(out, v)
    numeric = ad.finite_difference(lambda z: float(fn(z)), x)
    np.testing.assert_allclose(analytic, numeric, rtol=tol, atol=tol)
    # the recorded value is the plain value
    assert float(ad.value(out)) == float(fn(np.asarray(x, float)))


class TestFiniteDifference:
    def test_quadratic(self):
        g = ad.finite_difference(lambda x: float(np.sum(x**2)), np.array([1.0, 2.0]))
        np.testing.assert_allclose(g, [2, 4], atol=1e-8)

    def test_exp(self):
        g = ad.finite_difference(lambda x: float(np.exp(x[0])), np.array([0.0]), eps=1e-5)
        assert g[0] == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_nonfinite(self):
        with pytest.raises(FloatingPointError):
            ad.finite_difference(lambda x: float(np.log(x[0])), np.array([0.0]))

    def test_bad_eps(self):
        with pytest.raises(ValueError):
            ad.finite_difference(lambda x: 0.0, np.zeros(2), eps=0.0)


X = np.array([0.3, -1.2, 2.5, 0.7])


class TestOps:
    @pytest.mark.parametrize(
        "fn",
        [
            lambda v: ad.sum(v * v * v),
            lambda v: ad.sum(ad.exp(v) / (1.0 + v * v)),
            lambda v: ad.sum(ad.sin(v) * ad.cos(2.0 * v)),
            lambda v: ad.sum(ad.log(v * v + 1.0)),
            lambda v: ad.sum(ad.sqrt(v * v + 0.5)),
            lambda v: ad.sum(ad.absolute(v)),
            lambda v: ad.mean(ad.square(v - 1.0)),
            lambda v: ad.sum(ad.sigmoid(v)),
            lambda v: ad.sum(ad.cumsum(v) * np.arange(1.0, 5.0)),
            lambda v: ad.sum(ad.take(v, [0, 0, 3, 1]) * np.array([1.0, 2.0, 3.0, 4.0])),
            lambda v: ad.sum(v[1:] - v[:-1] * 3.0),
            lambda v: ad.sum(ad.concatenate([v, v * 2.0, np.ones(2)]) * np.arange(10.0)),
            lambda v: ad.sum(ad.maximum(v, 0.5) + ad.minimum(v, 0.5)),
            lambda v: ad.sum(ad.where(np.array([True, False, True, False]), v * v, -v)),
            lambda v: ad.sum(ad.clip(v, -1.0, 1.0)),
            lambda v: ad.log(ad.sum(ad.exp(v))) - v[2],
            lambda v: 1.0 / (2.0 - v[0]) - (3.0 - v[1]) + (-v[3]),
        ],
    )
    def test_against_differences(self, fn):
        check_grad(fn, X)

    def test_tie_goes_to_first(self):
        g = ad.DualGraph()
        a, b = g.variable(1.0), g.variable(1.0)
        np.testing.assert_array_equal(g.grad(ad.maximum(a, b), a), 1.0)
        np.testing.assert_array_equal(g.grad(ad.maximum(a, b), b), 0.0)
        np.testing.assert_array_equal(g.grad(ad.minimum(a, b), a), 1.0)

    def test_broadcast_scalar(self):
        g = ad.DualGraph()
        s = g.variable(2.0)
        out = ad.sum(s * np.arange(4.0))
        assert g.grad(out, s) == 6.0

    def test_unused_input(self):
        g = ad.DualGraph()
        a, b = g.variable(np.ones(3)), g.variable(np.ones(2))
        np.testing.assert_array_equal(g.grad(ad.sum(a), b), 0.0)

    def test_plain_arrays_pass_through(self):
        assert isinstance(ad.exp(np.zeros(3)), np.ndarray)
        assert ad.value(3.0) == 3.0

    def test_parents_precede_children(self):
        g = ad.DualGraph()
        v = g.variable(X)
        ad.sum(ad.exp(v) * v)
        for i, ps in enumerate(g.parents):
            assert all(p < i for p in ps)

    def test_foreign_graph(self):
        g1, g2 = ad.DualGraph(), ad.DualGraph()
        out = ad.sum(g1.variable(X))
        with pytest.raises(ValueError):
            g2.backward(out)

    @settings(max_examples=50)
    @given(st.lists(st.floats(-3, 3), min_size=3, max_size=12))
    def test_softmax_cumsum(self, xs):
        x = np.array(xs)

        def fn(v):
            e = ad.exp(v)
            c = ad.cumsum(e)
            return ad.sum(ad.sin(c / c[-1]))

        check_grad(fn, x, tol=1e-6)


def exact_fit_case(k=16, f0=0.0):
    """A regression vector whose decoded shape equals the target profile exactly."""
    cell = GridCell(0, 0, 1, 1)
    cfg = DecoderConfig(k, mu=1.0)
    f = np.zeros(cfg.size)
    f[0] = f0
    p = decode(f, cell, cfg)
    phase = math.pi / k  # rays halfway between vertices
    radii = triangle_radii(p.angles, p.radii, k, phase)
    target = Target(Point(0.5, 0.5), DenseRadialProfile(Point(0.5, 0.5), radii, phase), 1.0, 1.0)
    return f, cell, cfg, target


class TestPipelineGradient:
    def test_stationary_at_optimum(self):
        f, cell, cfg, target = exact_fit_case()
        value, grad = grad_regression_loss(f, cell, cfg, target, LossWeights(1, 1, 0))
        assert value == 0.0
        np.testing.assert_allclose(grad, 0.0, atol=1e-10)

    def test_origin_only_pathway(self):
        f, cell, cfg, target = exact_fit_case(f0=0.4)
        r = evaluate_with_grad(f, cell, cfg, target, LossWeights(1, 1, 0))
        assert r.breakdown.polar_iou == 0.0
        assert r.breakdown.origin > 0
        assert r.grad[0] > 0 and r.grad[1] == 0
        np.testing.assert_allclose(r.grad[2:], 0.0, atol=1e-10)

    def test_value_bit_identical(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            _, cell, cfg, target, f = random_gradcheck_case(rng, 12, 90)
            w = LossWeights(0.9, 1.1, 0.3)
            r = evaluate_with_grad(f, cell, cfg, target, w)
            assert r.value == regression_loss_value(f, cell, cfg, target, w)
            b = regression_loss(decode(f, cell, cfg), target.origin, target.profile, target.width, target.height, w)
            assert r.breakdown == b

    def test_matches_differences_k12_m90(self):
        rep = gradcheck(12, 90, trials=100)
        assert rep.trials == 100
        assert rep.passed, rep.as_dict()
        assert rep.max_rel_error < 1e-4

    def test_bin_offset_mode(self):
        rep = gradcheck(8, 64, trials=20, angle_mode="bin_offset")
        assert rep.passed, rep.as_dict()

    def test_circular_smoothness(self):
        rng = np.random.default_rng(2)
        _, cell, cfg, target, f = random_gradcheck_case(rng, 10, 60)
        _, grad = grad_regression_loss(f, cell, cfg, target, circular=True)
        fd = ad.finite_difference(lambda x: regression_loss_value(x, cell, cfg, target, circular=True), f)
        np.testing.assert_allclose(grad, fd, rtol=1e-5, atol=1e-7)

    def test_flags_vertex_coincidence(self):
        f, cell, cfg, target = exact_fit_case()
        hit = Target(target.origin, DenseRadialProfile(target.origin, np.ones(16)), 1.0, 1.0)
        assert evaluate_with_grad(f, cell, cfg, hit).flagged
        assert not evaluate_with_grad(f, cell, cfg, target).flagged

    def test_branch_signature_stable(self):
        rng = np.random.default_rng(4)
        _, cell, cfg, target, f = random_gradcheck_case(rng, 12, 90)
        assert branch_signature(f, cell, cfg, target) == branch_signature(f.copy(), cell, cfg, target)

    def test_nonfinite_rejected(self):
        f, cell, cfg, target = exact_fit_case()
        f[3] = np.nan
        with pytest.raises(FloatingPointError):
            grad_regression_loss(f, cell, cfg, target)
