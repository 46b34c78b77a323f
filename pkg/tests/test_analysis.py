import math

import numpy as np
import pytest

import laxlab as lx
from laxlab.analysis import (
    consistency_check,
    convergence_experiment,
    operator_norm,
    scheme_builder,
    stability_check,
    von_neumann_check,
    von_neumann_symbol,
)
from laxlab.errors import InvalidGridError
from laxlab.grid import RefinementPath
from laxlab.schemes import StencilScheme, backward_euler_heat, ftcs_heat, power
from laxlab.semigroup import HeatSemigroup

TWO_PI = 2 * math.pi


class TestOperatorNorm:
    def test_ftcs_quarter(self):
        assert operator_norm(ftcs_heat(0.25, 1.0)) == 1.0

    def test_ftcs_unstable(self):
        assert operator_norm(ftcs_heat(0.75, 1.0)) == pytest.approx(2.0, abs=1e-15)

    def test_identity_stencil(self):
        s = StencilScheme(np.array([0]), np.array([1.0]), 0.1, 0.1, "id")
        assert operator_norm(s) == 1.0

    def test_witness_vector_attains_norm(self):
        # independent oracle: the sign-pattern probe attains sum |c| at a node
        from laxlab.schemes import apply_values

        s = ftcs_heat(0.75, 1.0)
        n = 8
        witness = np.ones(n)
        witness[np.mod(s.offsets, n)] = np.sign(s.coefficients)
        attained = np.max(np.abs(apply_values(s, witness)))
        assert attained == pytest.approx(operator_norm(s), rel=1e-12)


class TestStability:
    def test_cfl_boundary_all_norms_one(self):
        n = 128
        dx = TWO_PI / n
        s = ftcs_heat(0.5 * dx**2, dx)
        report = stability_check(s, 1.0)
        assert report.stable
        for _, norm in report.norms:
            assert norm == pytest.approx(1.0, abs=1e-12)

    def test_just_past_threshold_unstable(self):
        n = 128
        dx = TWO_PI / n
        s = ftcs_heat(0.55 * dx**2, dx)
        report = stability_check(s, 1.0)
        assert not report.stable
        assert report.bound_l > report.threshold

    @pytest.mark.parametrize("r", [0.1, 1.0, 10.0])
    def test_backward_euler_unconditionally_stable(self, r):
        n = 32
        dx = TWO_PI / n
        s = backward_euler_heat(r * dx**2, dx, n)
        report = stability_check(s, 20 * s.dt)
        assert report.stable
        assert report.bound_l <= 1.0 + 1e-10

    def test_geometric_growth_visible_in_norms(self):
        # n-fold convolution oracle: norms grow like (4r-1)^n for r > 1/2
        s = ftcs_heat(0.75, 1.0)
        report = stability_check(s, 20.0 * 1.0 * 0.75 / 0.75)  # n_max about 20
        norms = dict(report.norms)
        assert norms[10] == pytest.approx((4 * 0.75 - 1) ** 10, rel=1e-8)

    def test_submultiplicativity_and_nonnegative_equality(self):
        s_pos = ftcs_heat(0.3, 1.0)
        s_neg = ftcs_heat(0.75, 1.0)
        for s in (s_pos, s_neg):
            base = operator_norm(s)
            for n in (2, 3, 5, 8):
                assert operator_norm(power(s, n)) <= base**n * (1 + 1e-12)
        for n in (2, 3, 5, 8):
            assert operator_norm(power(s_pos, n)) == pytest.approx(1.0, rel=1e-12)

    def test_dt_larger_than_horizon_rejected(self):
        with pytest.raises(ValueError):
            stability_check(ftcs_heat(0.5, 1.0), 0.1)


class TestVonNeumann:
    def test_symbol_at_pi(self):
        n = 16
        dx = TWO_PI / n
        s = ftcs_heat(0.5 * dx**2, dx)
        g = von_neumann_symbol(s, n // 2, n)
        assert g.real == pytest.approx(-1.0, abs=1e-12)
        assert abs(g.imag) < 1e-12

    def test_zero_wavenumber_is_row_sum(self):
        s = ftcs_heat(0.4, 1.0)
        g = von_neumann_symbol(s, 0, 16)
        assert g.real == pytest.approx(math.fsum(s.coefficients), abs=1e-15)

    def test_unstable_symbol_at_pi(self):
        n = 16
        dx = TWO_PI / n
        s = ftcs_heat(0.75 * dx**2, dx)
        g = von_neumann_symbol(s, n // 2, n)
        assert g.real == pytest.approx(-2.0, abs=1e-12)

    @pytest.mark.parametrize("r,expected_pass", [(0.1, True), (0.5, True), (0.75, False)])
    def test_check_matches_calculus_oracle(self, r, expected_pass):
        # max of |1 - 4 r sin^2| over representable modes; max |1-4r| at sin^2=1
        n = 64
        dx = TWO_PI / n
        s = ftcs_heat(r * dx**2, dx)
        report = von_neumann_check(s, n)
        assert report.passed is expected_pass
        assert report.max_abs_g == pytest.approx(max(1.0, 4 * r - 1), rel=1e-12)

    def test_identity_scheme_passes(self):
        s = StencilScheme(np.array([0]), np.array([1.0]), 0.1, 0.1, "id")
        report = von_neumann_check(s, 32)
        assert report.passed and report.max_abs_g == pytest.approx(1.0, abs=1e-15)

    def test_symbol_bounded_by_operator_norm(self):
        for r in (0.1, 0.3, 0.5, 0.55, 0.75, 1.0):
            n = 64
            dx = TWO_PI / n
            s = ftcs_heat(r * dx**2, dx)
            assert von_neumann_check(s, n).max_abs_g <= operator_norm(s) + 1e-12


class TestConsistency:
    def test_small_dt_residual(self):
        dt = 1e-4
        path = RefinementPath.cfl_boundary()
        n, dx = path.grid_for(dt)
        s = ftcs_heat(dt, dx)
        sg = HeatSemigroup(horizon_t=1.0, grid_n=n)
        u = lx.sample(lx.Sine(1), n)
        residuals = consistency_check(s, sg, u, [0.0])
        # closed-form oracle: |g(1) - e^{-dt}| times the grid sup of sin
        g1 = 1 - 4 * s.courant_ratio * math.sin(dx / 2) ** 2
        oracle = abs(g1 - math.exp(-dt)) * lx.sup_norm(u)
        assert residuals[0][1] <= 1e-7
        assert residuals[0][1] == pytest.approx(oracle, rel=1e-6)

    def test_constant_residual_zero(self):
        n = 32
        dx = TWO_PI / n
        s = ftcs_heat(0.4 * dx**2, dx)
        sg = HeatSemigroup(horizon_t=1.0, grid_n=n)
        u = lx.sample(lx.Constant(1.0), n)
        residuals = consistency_check(s, sg, u, [0.0, 0.3, 0.7])
        assert max(res for _, res in residuals) < 1e-14

    def test_second_order_one_step_ratio(self):
        path = RefinementPath.fixed_ratio(0.5)
        res = []
        for dt in (1e-3, 5e-4):
            n, dx = path.grid_for(dt)
            s = ftcs_heat(dt, dx)
            sg = HeatSemigroup(horizon_t=1.0, grid_n=n)
            u = lx.sample(lx.Sine(1), n)
            res.append(consistency_check(s, sg, u, [0.0])[0][1])
        assert 3.5 <= res[0] / res[1] <= 4.5

    def test_grid_mismatch_rejected(self):
        s = ftcs_heat(0.01, TWO_PI / 32)
        sg = HeatSemigroup(horizon_t=1.0, grid_n=64)
        with pytest.raises(InvalidGridError):
            consistency_check(s, sg, lx.sample(lx.Sine(1), 32), [0.0])


class TestConvergence:
    def test_ftcs_along_cfl_boundary_converges(self):
        report = convergence_experiment(
            scheme_builder("ftcs"),
            RefinementPath.cfl_boundary(),
            lx.Sine(1),
            1.0,
            [1e-2, 2.5e-3, 6.25e-4],
        )
        assert report.converged
        errors = [e for _, e in report.errors]
        assert all(errors[i + 1] < errors[i] for i in range(len(errors) - 1))

    def test_unstable_ratio_diverges_on_broadband_probe(self):
        # growth-factor oracle: |g| > 1 at the top modes for r = 0.55
        report = convergence_experiment(
            scheme_builder("ftcs"),
            RefinementPath.fixed_ratio(0.55),
            lx.RandomUniform(3),
            1.0,
            [4e-3, 2e-3, 1e-3],
        )
        assert not report.converged
        assert any(c.diverged or c.error > 1e3 for c in report.cells)

    def test_backward_euler_along_dt_equals_dx(self):
        report = convergence_experiment(
            scheme_builder("backward_euler"),
            RefinementPath.from_power(1.0, 1.0),
            lx.Sine(1),
            1.0,
            [1e-2, 5e-3, 2.5e-3],
        )
        assert report.converged

    def test_stable_and_consistent_implies_convergent(self):
        # the forward implication of the equivalence theorem, observed
        cases = [
            ("ftcs", RefinementPath.fixed_ratio(0.3), 0.3),
            ("ftcs", RefinementPath.fixed_ratio(0.5), 0.5),
            ("backward_euler", RefinementPath.from_power(1.0, 1.0), None),
        ]
        for name, path, _ in cases:
            dts = [5e-3, 2.5e-3, 1.25e-3]
            builder = scheme_builder(name)
            for dt in dts:
                n, dx = path.grid_for(dt)
                s = builder(dt, dx, n)
                assert stability_check(s, 1.0).stable
                sg = HeatSemigroup(horizon_t=1.0, grid_n=n)
                res = consistency_check(s, sg, lx.sample(lx.Sine(1), n), [0.0, 0.5])
                assert max(r for _, r in res) < 1e-3
            report = convergence_experiment(builder, path, lx.Sine(1), 1.0, dts)
            assert report.converged

    def test_compactness_diameter_shrinks_under_refinement(self):
        coarse = convergence_experiment(
            scheme_builder("ftcs"),
            RefinementPath.cfl_boundary(),
            lx.Sine(1),
            1.0,
            [2e-2, 1e-2, 5e-3],
        )
        fine = convergence_experiment(
            scheme_builder("ftcs"),
            RefinementPath.cfl_boundary(),
            lx.Sine(1),
            1.0,
            [2.5e-3, 1.25e-3, 6.25e-4],
        )
        assert math.isfinite(coarse.compactness_diameter)
        assert fine.compactness_diameter < coarse.compactness_diameter

    def test_diverged_cell_reports_infinite_error(self):
        report = convergence_experiment(
            scheme_builder("ftcs"),
            RefinementPath.fixed_ratio(1.0),
            lx.RandomUniform(1),
            1.0,
            [1e-3],
        )
        assert not report.converged
        assert report.cells[0].error == math.inf
        assert report.compactness_diameter == math.inf
