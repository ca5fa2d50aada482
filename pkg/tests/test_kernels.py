import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bifrac.kernels import (
    KernelParams,
    PVConfig,
    distance_product_bound,
    frac_laplacian_pv,
    gamma_fn,
    green_ball,
    green_const,
    green_interval,
    inner_integral,
    norm_const,
    poisson_ball,
    poisson_const,
    poisson_total_mass,
    w_factor,
)
from bifrac.greenop import GridFunction, apply_green, make_grid

from conftest import torsion_exact


class TestGamma:
    def test_reference_values(self):
        assert gamma_fn(0.5) == pytest.approx(1.772453850905516, rel=1e-12)
        assert gamma_fn(1.0) == pytest.approx(1.0, rel=1e-12)
        assert gamma_fn(2.5) == pytest.approx(1.329340388179137, rel=1e-12)
        assert gamma_fn(10.2) == pytest.approx(570499.02784103598, rel=1e-12)

    def test_reflection_negative_arguments(self):
        assert gamma_fn(-0.75) == pytest.approx(-4.8341465442958777, rel=1e-12)
        assert gamma_fn(-1.3) == pytest.approx(3.3283470067886097, rel=1e-12)

    def test_agrees_with_math_gamma(self):
        for x in (0.1, 0.9, 1.7, 3.3, 7.5, 12.0):
            assert gamma_fn(x) == pytest.approx(math.gamma(x), rel=1e-12)

    def test_poles_raise(self):
        for x in (0.0, -1.0, -5.0):
            with pytest.raises(ValueError):
                gamma_fn(x)


class TestConstants:
    def test_operator_constant_table(self):
        # c_{1,-alpha} drives the principal value evaluator
        table = {
            1.05: 0.32436682695905622,
            1.2: 0.33354942991224811,
            1.5: 0.29920671030107451,
            1.8: 0.16490493881830272,
            1.95: 0.047720086172791604,
        }
        for alpha, want in table.items():
            assert norm_const(1, -alpha) == pytest.approx(want, rel=1e-13)

    def test_norm_const_positive_gamma(self):
        assert norm_const(2, 0.5) == pytest.approx(0.076074279862467708, rel=1e-13)

    def test_green_const_table(self):
        table = {
            0.5: 0.053792639164634132,
            1.05: 0.169084180968799,
            1.5: 0.23544388511093724,
            1.95: 0.25119177039750788,
        }
        for alpha, want in table.items():
            assert green_const(KernelParams(alpha=alpha)) == pytest.approx(want, rel=1e-13)

    def test_kernel_params_validation(self):
        with pytest.raises(ValueError):
            KernelParams(alpha=2.0)
        with pytest.raises(ValueError):
            KernelParams(alpha=0.0)
        with pytest.raises(ValueError):
            KernelParams(alpha=1.5, d=0)
        KernelParams(alpha=1.99)  # fine for kernel evaluation
        with pytest.raises(ValueError):
            KernelParams(alpha=1.99).require_solver_window()


class TestWFactor:
    def test_known_value(self):
        # (1-0)(1-0.25)/0.25 = 3
        assert w_factor(0.0, 0.5) == pytest.approx(3.0, rel=1e-15)

    def test_diagonal_is_infinite(self):
        assert w_factor(0.3, 0.3) == np.inf

    def test_boundary_is_zero(self):
        assert w_factor(1.0, 0.2) == 0.0


class TestInnerIntegral:
    def test_reference_values(self):
        cases = [
            (3.0, 1.5, 2.1411482689141798),
            (0.5, 1.05, 1.2298312829025848),
            (1e8, 1.95, 13281.274912893189),
            (1e-6, 1.2, 0.00041864766008851526),
        ]
        for w, alpha, want in cases:
            got = inner_integral(np.array([w]), KernelParams(alpha=alpha))[0]
            assert got == pytest.approx(want, rel=1e-13)

    def test_self_consistency_under_refinement(self):
        # doubling the head panel depth must not move the answer
        kp = KernelParams(alpha=1.3)
        w = np.geomspace(1e-10, 1e10, 41)
        base = inner_integral(w, kp)
        fine = inner_integral(w, kp, head_levels=20)
        assert np.max(np.abs(base - fine) / np.abs(fine)) < 1e-12

    @settings(max_examples=60, deadline=None)
    @given(
        logw=st.floats(min_value=-10, max_value=10),
        alpha=st.floats(min_value=0.5, max_value=1.95),
    )
    def test_monotone_in_w(self, logw, alpha):
        kp = KernelParams(alpha=alpha)
        w = 10.0**logw
        lo, hi = inner_integral(np.array([w, w * 1.01]), kp)
        assert hi > lo > 0


class TestGreenBall:
    def test_golden_values(self):
        cases = [
            (0.0, 0.5, 1.5, 0.3564668593516969),
            (0.3, 0.3, 1.5, 0.89839660696492227),
            (0.2, 0.2 + 1e-9, 1.5, 0.92272257910707909),
            (0.0, 0.5, 0.5, 0.33977935243559008),
            (-0.9, 0.85, 1.05, 0.039145817897857522),
            (0.7, 0.7, 1.95, 0.27893529078425038),
            (0.5, 0.6, 1.2, 0.71403640294723494),
        ]
        for x, y, alpha, want in cases:
            got = float(green_ball(x, y, KernelParams(alpha=alpha)))
            assert got == pytest.approx(want, rel=5e-13), (x, y, alpha)

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        x = rng.uniform(-0.999, 0.999, 400)
        y = rng.uniform(-0.999, 0.999, 400)
        for alpha in (1.2, 1.5, 1.8):
            kp = KernelParams(alpha=alpha)
            a = green_ball(x, y, kp)
            b = green_ball(y, x, kp)
            assert np.abs(a - b).max() <= 1e-10

    def test_zero_outside_exactly(self):
        kp = KernelParams(alpha=1.5)
        assert float(green_ball(1.2, 0.0, kp)) == 0.0
        assert float(green_ball(0.0, -1.0, kp)) == 0.0
        assert float(green_ball(-3.0, 5.0, kp)) == 0.0

    def test_diagonal_matches_limit(self):
        # sliding y toward x must approach the closed-form diagonal value
        kp = KernelParams(alpha=1.5)
        d = float(green_ball(0.2, 0.2, kp))
        near = float(green_ball(0.2, 0.2 + 1e-12, kp))
        assert near == pytest.approx(d, rel=1e-5)

    def test_diagonal_divergence_at_low_alpha(self):
        # for alpha <= 1 the kernel blows up on the diagonal
        kp = KernelParams(alpha=0.8)
        assert float(green_ball(0.1, 0.1, kp)) == np.inf

    def test_interval_scaling(self):
        kp = KernelParams(alpha=1.4)
        # W = (-1,1) with center 0 radius 1 is the ball itself
        assert float(green_interval(0.3, -0.2, 0.0, 1.0, kp)) == pytest.approx(
            float(green_ball(0.3, -0.2, kp)), rel=1e-15
        )
        # scaling: G_W for W = (0,1) at midpoints
        got = float(green_interval(0.5, 0.7, 0.5, 0.5, kp))
        want = 0.5 ** (kp.alpha - 1) * float(green_ball(0.0, 0.4, kp))
        assert got == pytest.approx(want, rel=1e-14)

    def test_two_sided_distance_bound(self):
        # ratio G / comparator bounded away from 0 and infinity
        t = np.linspace(-0.995, 0.995, 100)
        X, Y = np.meshgrid(t, t, indexing="ij")
        for alpha in (1.2, 1.5, 1.8):
            kp = KernelParams(alpha=alpha)
            G = green_ball(X, Y, kp)
            H = distance_product_bound(X, Y, kp)
            ratio = G / H
            assert np.isfinite(ratio).all()
            assert ratio.min() > 0
            assert ratio.max() / ratio.min() < 1e3


class TestPoisson:
    def test_golden_values(self):
        cases = [
            (0.0, 1.5, 1.0, 1.5, 0.12692914676149248),
            (0.3, 2.0, 1.0, 1.2, 0.087048163704070031),
            (-0.5, -1.25, 1.0, 1.8, 0.16990888540661295),
        ]
        for x, y, r, alpha, want in cases:
            got = float(poisson_ball(x, y, r, KernelParams(alpha=alpha)))
            assert got == pytest.approx(want, rel=1e-13)

    def test_domain_validation(self):
        kp = KernelParams(alpha=1.5)
        with pytest.raises(ValueError):
            poisson_ball(1.5, 2.0, 1.0, kp)  # x outside the ball
        with pytest.raises(ValueError):
            poisson_ball(0.0, 0.5, 1.0, kp)  # y inside the ball
        with pytest.raises(ValueError):
            poisson_ball(0.0, 2.0, -1.0, kp)

    def test_total_mass_is_one(self):
        for alpha in (1.2, 1.5, 1.8):
            kp = KernelParams(alpha=alpha)
            for x in (0.0, 0.35, -0.6):
                assert poisson_total_mass(x, 1.0, kp) == pytest.approx(1.0, abs=1e-6)

    def test_total_mass_other_radius(self):
        kp = KernelParams(alpha=1.5)
        assert poisson_total_mass(0.2, 0.7, kp) == pytest.approx(1.0, abs=1e-6)

    def test_decay_in_y(self):
        kp = KernelParams(alpha=1.5)
        ys = np.array([1.5, 2.0, 3.0, 5.0, 10.0])
        vals = poisson_ball(np.zeros_like(ys), ys, 1.0, kp)
        assert (np.diff(vals) < 0).all()


class TestPrincipalValue:
    def test_zero_function(self, grid65, kp):
        u = GridFunction(grid65, np.zeros(65))
        assert frac_laplacian_pv(u, 0.3, kp) == 0.0

    def test_linearity(self, grid65, kp):
        rng = np.random.default_rng(11)
        f = GridFunction(grid65, rng.standard_normal(65))
        g = GridFunction(grid65, rng.standard_normal(65))
        comb = GridFunction(grid65, 2.0 * f.values - 0.5 * g.values)
        for x in (0.0, 0.4, -0.55):
            lhs = frac_laplacian_pv(comb, x, kp)
            rhs = 2.0 * frac_laplacian_pv(f, x, kp) - 0.5 * frac_laplacian_pv(g, x, kp)
            assert lhs == pytest.approx(rhs, abs=1e-10 * max(1.0, abs(rhs)))

    def test_recovers_one_from_green_image(self, grid65, kp):
        ones = GridFunction(grid65, np.ones(65))
        u = apply_green(ones, kp)
        for x in (0.0, 0.3, -0.3, 0.6, -0.6):
            assert frac_laplacian_pv(u, x, kp) == pytest.approx(1.0, abs=5e-3)

    def test_improves_under_refinement(self, grid65, kp):
        errs = []
        for grid in (grid65, grid65.refine()):
            ones = GridFunction(grid, np.ones(grid.n))
            u = apply_green(ones, kp)
            errs.append(
                max(abs(frac_laplacian_pv(u, x, kp) - 1.0) for x in (0.0, 0.3, -0.3, 0.6, -0.6))
            )
        assert errs[1] < errs[0] / 3.0

    def test_torsion_profile_constant(self, grid65):
        # the closed-form torsion function maps to the constant 1
        for alpha in (1.2, 1.8):
            kp_a = KernelParams(alpha=alpha)
            u = GridFunction(grid65, torsion_exact(grid65.nodes, alpha))
            for x in (0.0, 0.45, -0.45):
                assert frac_laplacian_pv(u, x, kp_a) == pytest.approx(1.0, abs=1e-2)

    def test_boundary_rejection(self, grid65, kp):
        u = GridFunction(grid65, np.ones(65))
        with pytest.raises(ValueError):
            frac_laplacian_pv(u, 0.9999, kp)
        with pytest.raises(ValueError):
            frac_laplacian_pv(u, -1.0, kp)

    def test_epsilon_validation(self, grid65, kp):
        u = GridFunction(grid65, np.ones(65))
        too_big = PVConfig(epsilon=grid65.min_spacing)
        with pytest.raises(ValueError):
            frac_laplacian_pv(u, 0.0, kp, too_big)
        explicit = PVConfig(epsilon=0.2 * grid65.min_spacing)
        assert np.isfinite(frac_laplacian_pv(u, 0.0, kp, explicit))
