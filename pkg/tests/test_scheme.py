"""Tests for the explicit marching schemes."""

import warnings

import numpy as np
import pytest

from fractransport.core import (
    GridSpec,
    SolutionHistory,
    SolverParams,
    gamma_fn,
    make_coefficients,
)
from fractransport.scheme import (
    NumericalBlowupError,
    SchemeVariant,
    SolveConfig,
    mass_series,
    solve,
    solve_reference,
    step,
    write_solution_csv,
)
from fractransport.sources import DeltaSpec, SourceKind, SourceTerm, discretize_delta


def _monomial_config(alpha=0.5, p=0.5, mu=1.0, h=0.125, T=0.5, variant=SchemeVariant.STANDARD):
    params = SolverParams(alpha=alpha, p=p)
    grid = GridSpec(h=h, T=T, x_min=-2.0, x_max=2.0)
    term = SourceTerm(SourceKind.MONOMIAL, params, mu=mu)
    return SolveConfig(params, grid, term, np.zeros(grid.n_space), variant=variant)


class TestFirstStepByHand:
    """u_i^1 has no history term, only the source stencil."""

    def test_standard_variant(self):
        cfg = _monomial_config(mu=1.0, variant=SchemeVariant.STANDARD)
        hist = solve(cfg)
        h, a = cfg.grid.h, cfg.params.alpha
        # f^1 = t_1 = h everywhere, so u_i^1 = h^a Gamma(2-a) * h at interior cells
        expected = h**a * gamma_fn(2.0 - a) * h
        i = cfg.grid.index_of(0.0)
        assert hist.row(1)[i] == pytest.approx(expected, rel=1e-14)

    def test_advanced_variant_reads_ahead(self):
        cfg = _monomial_config(mu=1.0, variant=SchemeVariant.ADVANCED_SOURCE)
        hist = solve(cfg)
        h, a = cfg.grid.h, cfg.params.alpha
        # the advanced variant samples the source at t_2 = 2h
        expected = h**a * gamma_fn(2.0 - a) * 2.0 * h
        i = cfg.grid.index_of(0.0)
        assert hist.row(1)[i] == pytest.approx(expected, rel=1e-14)

    def test_boundary_cells_see_clipped_stencil(self):
        cfg = _monomial_config(mu=0.0)
        hist = solve(cfg)
        h, a, p = cfg.grid.h, cfg.params.alpha, cfg.params.p
        c = h**a * gamma_fn(2.0 - a)
        # left edge: the f_{i-1} read falls outside and contributes zero
        assert hist.row(1)[0] == pytest.approx(c * (1.0 - p), rel=1e-14)
        assert hist.row(1)[-1] == pytest.approx(c * p, rel=1e-14)


class TestReferenceEquivalence:
    """The slice-based march and the naive triple loop agree bitwise."""

    def test_random_configs(self):
        rng = np.random.default_rng(42)
        for trial in range(10):
            alpha = rng.uniform(0.15, 0.85)
            p = rng.uniform(0.0, 1.0)
            h = 2.0 ** -rng.integers(2, 5)
            n_time = int(rng.integers(2, 9))
            T = n_time * h
            half_width = (rng.integers(0, 5) + 1) * h + T
            kind = rng.choice(
                [
                    SourceKind.WAIT_FIRST,
                    SourceKind.JUMP_FIRST,
                    SourceKind.STANDARD_WALK,
                    SourceKind.MONOMIAL,
                ]
            )
            variant = rng.choice(list(SchemeVariant))
            params = SolverParams(alpha=alpha, p=p)
            grid = GridSpec(h=h, T=T, x_min=-half_width, x_max=half_width)
            term = SourceTerm(kind, params, mu=float(rng.uniform(0.0, 2.0)))
            initial = discretize_delta(0.0, DeltaSpec(), grid)
            cfg = SolveConfig(params, grid, term, initial, variant=variant)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                fast = solve(cfg)
                slow = solve_reference(cfg)
            assert np.array_equal(fast.rows, slow.rows), (
                f"trial {trial}: {kind} alpha={alpha} p={p} h={h}"
            )


class TestStepProtocol:
    def test_rows_must_fill_in_order(self):
        cfg = _monomial_config()
        coeffs = make_coefficients(cfg.params, cfg.grid.n_time)
        hist = SolutionHistory(cfg.grid, cfg.initial)
        with pytest.raises(IndexError):
            step(hist, 2, cfg, coeffs)

    def test_blowup_detection(self):
        params = SolverParams(alpha=0.5, p=0.5)
        grid = GridSpec(h=0.125, T=0.5, x_min=-2.0, x_max=2.0)
        samples = np.zeros((grid.n_time + 2, grid.n_space))
        samples[2, grid.index_of(0.0)] = np.inf
        term = SourceTerm(SourceKind.SAMPLED, params, samples=samples)
        cfg = SolveConfig(params, grid, term, np.zeros(grid.n_space))
        with pytest.raises(NumericalBlowupError) as exc:
            solve(cfg)
        assert exc.value.n == 2

    def test_stability_warning(self):
        # alpha = 0.75: bound (1/4)^(2/3) ~ 0.397 < 0.5
        cfg = _monomial_config(alpha=0.75, h=0.5, T=1.0)
        with pytest.warns(UserWarning, match="stability bound"):
            solve(cfg)

    def test_no_warning_below_bound(self):
        cfg = _monomial_config(alpha=0.5, h=0.25, T=0.5)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            solve(cfg)


class TestPhysicalBehavior:
    def test_delta_run_nonnegative_and_bounded(self):
        params = SolverParams(alpha=0.5, p=0.5)
        grid = GridSpec(h=2.0**-5, T=0.5, x_min=-1.5, x_max=1.5)
        term = SourceTerm(SourceKind.WAIT_FIRST, params)
        cfg = SolveConfig(
            params,
            grid,
            term,
            discretize_delta(0.0, DeltaSpec(), grid),
            variant=SchemeVariant.ADVANCED_SOURCE,
        )
        hist = solve(cfg)
        assert np.all(hist.rows >= 0.0)
        m = mass_series(hist, grid)
        assert np.all(m <= 1.0 + 1e-12)
        assert m[0] == pytest.approx(1.0, abs=1e-13)

    def test_p_zero_transports_right(self):
        # p = 0 weighs only the rightward characteristic: the density must
        # end up centered near x = T
        params = SolverParams(alpha=0.5, p=0.0)
        grid = GridSpec(h=2.0**-5, T=0.5, x_min=-1.5, x_max=1.5)
        term = SourceTerm(SourceKind.WAIT_FIRST, params)
        cfg = SolveConfig(
            params,
            grid,
            term,
            discretize_delta(0.0, DeltaSpec(), grid),
            variant=SchemeVariant.ADVANCED_SOURCE,
        )
        hist = solve(cfg)
        final = hist.row(grid.n_time)
        # nothing may leak left of the origin, and the initial delta's own
        # mass (1/Gamma(1+alpha) of the total as t -> 0+) rides at x = T
        left = final[grid.x < -2 * grid.h].sum()
        assert left == pytest.approx(0.0, abs=1e-12)
        assert final[grid.index_of(0.5)] > final[grid.index_of(0.25)]

    def test_mirror_duality_of_runs(self):
        # swapping p <-> 1-p mirrors the full solution matrix in x
        grid = GridSpec(h=2.0**-4, T=0.25, x_min=-1.0, x_max=1.0)
        for variant in SchemeVariant:
            hists = []
            for p in (0.3, 0.7):
                params = SolverParams(alpha=0.6, p=p)
                term = SourceTerm(SourceKind.STANDARD_WALK, params)
                cfg = SolveConfig(
                    params, grid, term, discretize_delta(0.0, DeltaSpec(), grid),
                    variant=variant,
                )
                hists.append(solve(cfg))
            # not bitwise: the p and q multiplications swap order under the
            # reflection, so roundoff differs at the last couple of ulps
            np.testing.assert_allclose(
                hists[0].rows, hists[1].rows[:, ::-1], rtol=1e-13, atol=1e-15
            )


class TestSolutionCsv:
    def test_round_trip_and_metadata(self, tmp_path):
        cfg = _monomial_config(h=0.25, T=0.5)
        hist = solve(cfg)
        path = tmp_path / "run.csv"
        write_solution_csv(path, cfg, hist, times=[0.0, 0.25, 0.5])
        lines = path.read_text().splitlines()
        meta = {}
        for ln in lines:
            if ln.startswith("#"):
                key, val = ln[1:].split("=", 1)
                meta[key] = val
        assert float(meta["alpha"]) == cfg.params.alpha
        assert float(meta["h"]) == cfg.grid.h
        assert meta["variant"] == "standard"
        header = next(ln for ln in lines if ln.startswith("x,"))
        assert header.split(",")[1:] == ["t=0", "t=0.25", "t=0.5"]
        data = np.array(
            [[float(v) for v in ln.split(",")] for ln in lines if not ln.startswith(("#", "x"))]
        )
        assert data.shape == (cfg.grid.n_space, 4)
        np.testing.assert_array_equal(data[:, 0], cfg.grid.x)
        # 17 significant digits round-trip doubles exactly
        np.testing.assert_array_equal(data[:, 3], hist.row(cfg.grid.n_time))

    def test_default_levels_include_horizon(self, tmp_path):
        cfg = _monomial_config(h=0.25, T=0.75)
        cfg.store_every = 2
        hist = solve(cfg)
        path = tmp_path / "thin.csv"
        write_solution_csv(path, cfg, hist)
        header = next(
            ln for ln in path.read_text().splitlines() if ln.startswith("x,")
        )
        assert header.split(",")[-1] == "t=0.75"


class TestConfigValidation:
    def test_initial_length_checked(self):
        params = SolverParams(alpha=0.5, p=0.5)
        grid = GridSpec(h=0.25, T=0.5, x_min=-1.0, x_max=1.0)
        term = SourceTerm(SourceKind.MONOMIAL, params, mu=1.0)
        with pytest.raises(ValueError):
            SolveConfig(params, grid, term, np.zeros(grid.n_space + 1))

    def test_unit_mass_check(self):
        params = SolverParams(alpha=0.5, p=0.5)
        grid = GridSpec(h=0.25, T=0.5, x_min=-1.0, x_max=1.0)
        term = SourceTerm(SourceKind.WAIT_FIRST, params)
        cfg = SolveConfig(params, grid, term, np.zeros(grid.n_space))
        with pytest.raises(ValueError, match="unit initial mass"):
            cfg.check_unit_initial_mass()
        cfg2 = SolveConfig(
            params, grid, term, discretize_delta(0.0, DeltaSpec(), grid)
        )
        cfg2.check_unit_initial_mass()
