import math

import numpy as np
import pytest

from opahbt import (
    DegenerateFitError,
    DomainError,
    FringeCoverageError,
    OpaParams,
    RatioTable,
    Spacing,
    SweepSpec,
    UnreachableTargetError,
    estimate_phi,
    fit_inverse_law,
    monte_carlo_semiclassical,
    signal_ratio,
    snr_ratio,
    sweep_ratios,
    target_ratio_operating_point,
)

K_BLUE = 1.42e7  # rad/m, a 443 nm wavenumber


def test_sweep_spec_validation():
    with pytest.raises(DomainError):
        SweepSpec(g=2.0, n_min=0.0, n_max=1.0)
    with pytest.raises(DomainError):
        SweepSpec(g=2.0, n_min=2.0, n_max=1.0)
    with pytest.raises(DomainError):
        SweepSpec(g=2.0, points=0)
    with pytest.raises(DomainError):
        SweepSpec(g=2.0, n_min=1.0, n_max=2.0, points=1)
    with pytest.raises(DomainError):
        SweepSpec(g=2.0, equal_sources=False)  # needs m_bar
    single = SweepSpec(g=2.0, n_min=1.0, n_max=1.0, points=1)
    assert single.grid().tolist() == [1.0]


def test_sweep_single_point_worked_values():
    table = sweep_ratios(SweepSpec(g=2.0, n_min=1.0, n_max=1.0, points=1))
    assert table.snr_ratio[0] == pytest.approx(1.660, abs=5e-3)
    table10 = sweep_ratios(SweepSpec(g=2.0, n_min=10.0, n_max=10.0, points=1))
    assert table10.signal_ratio[0] == pytest.approx(239.3, abs=0.1)


def test_zero_gain_sweep_is_flat_at_one():
    table = sweep_ratios(SweepSpec(g=0.0, n_min=0.5, n_max=5.0, points=11))
    np.testing.assert_allclose(table.signal_ratio, 1.0, rtol=1e-12)


def test_sweep_is_deterministic_and_ordered():
    spec = SweepSpec(g=2.0, n_min=0.2, n_max=8.0, points=37)
    first = sweep_ratios(spec)
    second = sweep_ratios(spec)
    assert first.n_bar.tobytes() == second.n_bar.tobytes()
    assert first.snr_ratio.tobytes() == second.snr_ratio.tobytes()
    assert np.all(np.diff(first.n_bar) > 0)


def test_unequal_sources_sweep_uses_fixed_companion():
    spec = SweepSpec(g=1.0, n_min=0.5, n_max=2.0, points=3, equal_sources=False, m_bar=4.0)
    table = sweep_ratios(spec)
    params = OpaParams(1.0)
    assert table.signal_ratio[0] == pytest.approx(signal_ratio(0.5, 4.0, params))
    assert table.snr_ratio[-1] == pytest.approx(snr_ratio(2.0, 4.0, params))


def test_snr_ratio_decreases_along_positive_gain_sweep():
    table = sweep_ratios(SweepSpec(g=2.0, n_min=0.15, n_max=100.0, points=120))
    assert np.all(np.diff(table.snr_ratio) < 0)


def test_fit_recovers_its_own_model_exactly():
    spec = SweepSpec(g=1.0, n_min=0.2, n_max=30.0, points=50)
    grid = spec.grid()
    table = RatioTable(spec, grid, np.ones_like(grid), 1.082 + 0.584 / grid)
    fit = fit_inverse_law(table)
    assert fit.A == pytest.approx(1.082, abs=1e-9)
    assert fit.B == pytest.approx(0.584, abs=1e-9)
    assert fit.rss <= 1e-18
    assert fit.grid_used == spec


def test_fit_on_default_sweep_matches_published_constants():
    fit = fit_inverse_law(sweep_ratios(SweepSpec(g=2.0)))
    assert fit.A == pytest.approx(1.082, abs=0.02)
    assert fit.B == pytest.approx(0.584, abs=0.06)
    assert fit.A == pytest.approx(math.sqrt(190.0 / 162.0), abs=0.01)


def test_fit_requires_three_points_and_distinct_abscissae():
    spec = SweepSpec(g=2.0, n_min=1.0, n_max=1.0, points=1)
    with pytest.raises(DomainError):
        fit_inverse_law(sweep_ratios(spec))
    degenerate = RatioTable(
        SweepSpec(g=2.0, n_min=1.0, n_max=1.0, points=4, spacing=Spacing.LINEAR),
        np.ones(4),
        np.ones(4),
        np.ones(4),
    )
    with pytest.raises(DegenerateFitError):
        fit_inverse_law(degenerate)


def test_operating_point_inversion():
    spec = SweepSpec(g=2.0, n_min=0.2, n_max=30.0, points=50)
    grid = spec.grid()
    table = RatioTable(spec, grid, np.ones_like(grid), 1.082 + 0.584 / grid)
    fit = fit_inverse_law(table)
    assert target_ratio_operating_point(fit, 5.0) == pytest.approx(
        0.584 / (5.0 - 1.082), rel=1e-9
    )
    assert target_ratio_operating_point(fit, 1.082 + 0.584) == pytest.approx(1.0, rel=1e-9)
    with pytest.raises(UnreachableTargetError):
        target_ratio_operating_point(fit, 1.0)


def _scan(phi, points=64, r_max=40.0, amplitude=0.9):
    r = np.linspace(0.0, r_max, points)
    return r, amplitude * np.cos(K_BLUE * phi * r)


def test_phi_recovery_noiseless():
    phi_true = 1e-8
    r, y = _scan(phi_true)
    estimate = estimate_phi(r, y, K_BLUE)
    assert estimate.converged
    assert estimate.phi == pytest.approx(phi_true, rel=1e-3)
    assert estimate.amplitude == pytest.approx(0.9, rel=1e-6)


def test_phi_recovery_with_noise_is_calibrated():
    phi_true = 1e-8
    r, clean = _scan(phi_true)
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        noisy = clean + 0.05 * 0.9 * rng.standard_normal(clean.size)
        estimate = estimate_phi(r, noisy, K_BLUE)
        if estimate.converged and abs(estimate.phi - phi_true) <= 3.0 * estimate.stderr:
            hits += 1
    assert hits >= 99


def test_phi_recovery_with_known_amplitude():
    phi_true = 2e-8
    r, y = _scan(phi_true)
    estimate = estimate_phi(r, y, K_BLUE, amplitude_known=0.9)
    assert estimate.converged
    assert estimate.phi == pytest.approx(phi_true, rel=1e-3)


def test_phi_estimation_rejects_short_scans():
    r, y = _scan(1e-8, points=3)
    with pytest.raises(DomainError):
        estimate_phi(r, y, K_BLUE)


def test_phi_estimation_rejects_sub_quarter_fringe():
    r, y = _scan(1e-10)  # far below a quarter fringe over 40 m
    with pytest.raises(FringeCoverageError):
        estimate_phi(r, y, K_BLUE)


def test_monte_carlo_matches_classical_closed_form():
    estimate = monte_carlo_semiclassical(1.0, 1.0, 0.0, 200_000, seed=3)
    assert estimate.classical_mean == 8.0
    assert abs(estimate.mean - 8.0) <= 5.0 * estimate.mean_stderr
    assert estimate.quantum_correlation == 10.0
    assert estimate.diagonal_moment_gap == 2.0


def test_monte_carlo_vacuum_is_exactly_zero():
    estimate = monte_carlo_semiclassical(0.0, 0.0, 0.0, 1000, seed=0)
    assert estimate.mean == 0.0
    assert estimate.variance == 0.0


def test_monte_carlo_phase_dependence():
    peak = monte_carlo_semiclassical(1.0, 1.0, 0.0, 400_000, seed=11)
    quarter = monte_carlo_semiclassical(1.0, 1.0, math.pi / 2, 400_000, seed=12)
    gap = peak.mean - quarter.mean
    tolerance = 5.0 * math.hypot(peak.mean_stderr, quarter.mean_stderr)
    assert abs(gap - 2.0) <= tolerance  # 2 n m cos(0) - 2 n m cos(pi/2)


def test_monte_carlo_is_reproducible_and_blocking_invariant():
    a = monte_carlo_semiclassical(1.0, 0.5, 0.3, 50_000, seed=9)
    b = monte_carlo_semiclassical(1.0, 0.5, 0.3, 50_000, seed=9)
    assert a.mean == b.mean and a.variance == b.variance


def test_monte_carlo_error_scales_as_inverse_root_samples():
    small = monte_carlo_semiclassical(1.0, 1.0, 0.0, 100_000, seed=21)
    large = monte_carlo_semiclassical(1.0, 1.0, 0.0, 400_000, seed=21)
    assert large.mean_stderr == pytest.approx(small.mean_stderr / 2.0, rel=0.15)
