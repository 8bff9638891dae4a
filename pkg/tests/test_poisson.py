"""Tests for the spectral solver on the periodic proxy torus."""

import math
from fractions import Fraction

import numpy as np
import pytest

from hstorus.poisson import (
    Grid,
    GridField,
    GridTooCoarse,
    NonPositive,
    NonSolvable,
    SourceSpec,
    assemble_source,
    duality_transport,
    laplacian,
    manufactured_case,
    residual_of,
    solvability_check,
    solve,
    synthesize_and_assemble,
    synthesize_sources,
)

GRID2 = Grid((32, 32), (1.0, 1.0))
GRID4 = Grid((16, 16, 16, 16), (1.0, 1.0, 1.0, 1.0))

# c2W = 24 + (t/alpha)(-2k1 - 2k2): t=1, alpha=2, k1=k2=1 gives 22.
SPEC = SourceSpec(k1=1, k2=1, c2W=22, alpha=Fraction(2), t=Fraction(1))


class TestGrid:
    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            Grid((8, 8, 8), (1.0, 1.0, 1.0))

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            Grid((8, 12), (1.0, 1.0))

    def test_rejects_nonpositive_length(self):
        with pytest.raises(ValueError):
            Grid((8, 8), (1.0, 0.0))

    def test_volume_and_cells(self):
        g = Grid((4, 8), (2.0, 1.0))
        assert g.volume == pytest.approx(2.0)
        assert g.cell_volume == pytest.approx(2.0 / 32)
        assert g.npoints == 32

    def test_json_roundtrip(self):
        g = Grid.from_json(GRID4.to_json())
        assert g == GRID4


class TestGridField:
    def test_rejects_nonfinite(self):
        vals = np.zeros(GRID2.dims)
        vals[0, 0] = np.nan
        with pytest.raises(ValueError):
            GridField(vals, GRID2)

    def test_integral_of_constant(self):
        f = GridField.constant(GRID2, 3.0)
        assert f.integral() == pytest.approx(3.0 * GRID2.volume)
        assert f.mean() == pytest.approx(3.0)

    def test_save_load_roundtrip(self, tmp_path):
        rng = np.random.default_rng(5)
        f = GridField(rng.normal(size=GRID2.dims), GRID2)
        path = tmp_path / "field.f64"
        f.save(path, field_name="u")
        g = GridField.load(path)
        assert g.grid == GRID2
        assert np.array_equal(g.values, f.values)


class TestSourceSpec:
    def test_rejects_inconsistent(self):
        with pytest.raises(ValueError):
            SourceSpec(k1=1, k2=1, c2W=23, alpha=Fraction(2), t=Fraction(1))

    def test_rejects_consistent_marked_violating(self):
        with pytest.raises(ValueError):
            SourceSpec(k1=1, k2=1, c2W=22, alpha=Fraction(2), t=Fraction(1), violating=True)

    def test_dual_is_involutive(self):
        spec = SourceSpec(k1=1, k2=1, c2W=22, alpha=Fraction(4), t=Fraction(2))
        dual = spec.dual()
        assert dual.t == Fraction(1, 2)
        assert (dual.k1, dual.k2) == (4, 4)
        assert dual.c2W == spec.c2W
        assert dual.dual() == spec

    def test_dual_rejects_nonintegral(self):
        spec = SourceSpec(k1=1, k2=0, c2W=20, alpha=Fraction(1, 4), t=Fraction(1, 2))
        with pytest.raises(ValueError):
            spec.dual()

    def test_json_roundtrip(self):
        assert SourceSpec.from_json(SPEC.to_json()) == SPEC


class TestSources:
    def test_pinned_integrals(self):
        rho1, rho2, d_r, d_f = synthesize_sources(SPEC, GRID4)
        assert rho1.integral() == pytest.approx(16 * math.pi**2 * 1, rel=1e-12)
        assert rho2.integral() == pytest.approx(16 * math.pi**2 * 1, rel=1e-12)
        assert d_r.integral() == pytest.approx(8 * math.pi**2 * 24, rel=1e-12)
        assert d_f.integral() == pytest.approx(8 * math.pi**2 * 22, rel=1e-12)

    def test_densities_nonnegative(self):
        for field in synthesize_sources(SPEC, GRID4):
            assert field.values.min() >= 0.0

    def test_deterministic_in_seed(self):
        a = synthesize_and_assemble(SPEC, GRID4)
        b = synthesize_and_assemble(SPEC, GRID4)
        assert np.array_equal(a.values, b.values)

    def test_grid_too_coarse(self):
        with pytest.raises(GridTooCoarse):
            synthesize_sources(SPEC, Grid((8, 8, 8, 8), (1.0,) * 4))


class TestSolvability:
    def test_compliant_source_is_mean_zero(self):
        f = synthesize_and_assemble(SPEC, GRID4)
        assert solvability_check(f, tol=1e-12)

    def test_violating_source_fails_with_exact_defect(self):
        # c2W bumped to 23: defect integral is 8 pi^2 |alpha| per unit c2W.
        spec = SourceSpec(
            k1=1, k2=1, c2W=23, alpha=Fraction(2), t=Fraction(1), violating=True
        )
        f = synthesize_and_assemble(spec, GRID4)
        assert not solvability_check(f, tol=1e-12)
        defect = abs(f.mean()) * f.grid.volume
        assert defect == pytest.approx(8 * math.pi**2 * 2, rel=1e-10)

    def test_solve_raises_nonsolvable(self):
        spec = SourceSpec(
            k1=1, k2=1, c2W=23, alpha=Fraction(2), t=Fraction(1), violating=True
        )
        f = synthesize_and_assemble(spec, GRID4)
        with pytest.raises(NonSolvable):
            solve(f, gauge_mean=400.0)


class TestSolve:
    def test_zero_source_gives_constant_log(self):
        f = GridField.constant(GRID2, 0.0)
        u, report = solve(f, gauge_mean=3.0)
        assert np.allclose(u.values, math.log(3.0), atol=1e-14)
        assert report.residual_sup <= 1e-12

    def test_laplacian_of_cosine(self):
        x = GRID2.meshgrid()[0]
        length = GRID2.lengths[0]
        f = GridField(np.cos(2 * np.pi * x / length), GRID2)
        lap = laplacian(f)
        expected = -((2 * np.pi / length) ** 2) * f.values
        assert np.allclose(lap.values, expected, atol=1e-10)

    def test_manufactured_oracle(self):
        u_star, f, gauge = manufactured_case(Grid((16,) * 4, (1.0,) * 4))
        u, report = solve(f, gauge_mean=gauge, tol=1e-9)
        assert np.abs(u.values - u_star.values).max() <= 1e-8
        assert report.min_v > 0

    def test_manufactured_spectral_convergence(self):
        errors = []
        for n in (8, 16):
            u_star, f, gauge = manufactured_case(Grid((n,) * 4, (1.0,) * 4))
            u, _ = solve(f, gauge_mean=gauge, tol=1e-9)
            errors.append(np.abs(u.values - u_star.values).max())
        assert errors[1] <= 1e-8
        assert errors[0] / errors[1] >= 1e3

    def test_linearity_of_core_inversion(self):
        # v - mean(v) is linear in f: solve(2f) has doubled oscillation.
        f = synthesize_and_assemble(SPEC, GRID4)
        u1, _ = solve(f, gauge_mean=400.0)
        f2 = GridField(2.0 * f.values, GRID4)
        u2, _ = solve(f2, gauge_mean=800.0)
        v1 = np.exp(u1.values) - 400.0
        v2 = np.exp(u2.values) - 800.0
        assert np.abs(v2 - 2.0 * v1).max() <= 1e-12 * np.abs(v2).max() + 1e-12

    def test_gauge_covariance(self):
        f = synthesize_and_assemble(SPEC, GRID4)
        u1, _ = solve(f, gauge_mean=400.0)
        u2, _ = solve(f, gauge_mean=500.0)
        diff = np.exp(u2.values) - np.exp(u1.values)
        assert np.allclose(diff, 100.0, atol=1e-9)

    def test_solution_mean_matches_gauge(self):
        f = synthesize_and_assemble(SPEC, GRID4)
        u, report = solve(f, gauge_mean=400.0)
        assert np.exp(u.values).mean() == pytest.approx(400.0, rel=1e-12)
        assert report.gauge_mean == pytest.approx(400.0, rel=1e-12)

    def test_nonpositive_carries_usable_hint(self):
        f = synthesize_and_assemble(SPEC, GRID4)
        with pytest.raises(NonPositive) as exc:
            solve(f, gauge_mean=1e-6)
        hint = exc.value.required_gauge
        u, report = solve(f, gauge_mean=hint * 1.01)
        assert report.min_v > 0

    def test_rejects_nonpositive_gauge(self):
        f = GridField.constant(GRID2, 0.0)
        with pytest.raises(ValueError):
            solve(f, gauge_mean=0.0)

    def test_residual_report_consistent(self):
        f = synthesize_and_assemble(SPEC, GRID4)
        u, report = solve(f, gauge_mean=400.0)
        again = residual_of(u, f)
        assert again.residual_sup == pytest.approx(report.residual_sup, rel=1e-6, abs=1e-12)
        assert report.relative_residual <= 1e-10
        assert report.geometry == "proxy"


class TestTransport:
    def test_sources_bitwise_identical(self):
        spec = SourceSpec(k1=1, k2=1, c2W=22, alpha=Fraction(4), t=Fraction(2))
        f = synthesize_and_assemble(spec, GRID4)
        u, _ = solve(f, gauge_mean=800.0)
        report = duality_transport(u, spec)
        assert report.source_max_diff == 0.0
        assert report.sources_identical
        assert report.dual_residual.relative_residual <= 1e-10

    def test_mutated_scale_breaks_transport(self):
        # Dropping the t^2 density rescaling must produce a different source.
        spec = SourceSpec(k1=1, k2=1, c2W=22, alpha=Fraction(4), t=Fraction(2))
        rho1, rho2, d_r, d_f = synthesize_sources(spec, GRID4)
        f = assemble_source(spec, rho1, rho2, d_r, d_f)
        f_bad = assemble_source(spec.dual(), rho1, rho2, d_r, d_f)
        assert np.abs(f_bad.values - f.values).max() > 1.0
