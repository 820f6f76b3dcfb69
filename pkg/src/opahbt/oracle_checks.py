"""Cross-verification suites behind the ``oracle-check`` command.

Each check compares two independent routes to the same quantity and
records the worst relative deviation over its grid.  Checks are tagged
with the outcome they are expected to have: the known defects of the
published algebra (the thermal third moment misprint, the amplified noise
law's failure to reduce to the plain law at zero gain, its mismatch with
the substitution route, and its source-swap asymmetry) are expected to
fail and never affect the overall verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fock import (
    FockSpace,
    OrderingConvention,
    choose_dim,
    hbt_two_mode_correlation,
    product_state,
    reduced_moments,
    space_for_squeezed_thermal,
    thermal_state,
    two_mode_squeeze,
    vacuum_state,
)
from .hbt import (
    Geometry,
    consistency_report,
    correlation_full,
    opa_noise_avg_printed,
    relative_deviation,
)
from .opa import OpaParams, coeffs, equivalent_thermal_mean, propagate_moments
from .photon_stats import (
    MomentConvention,
    geometric_summation_moments,
    thermal_moments,
)
from .wick import GaussianSecondMoments, number_moments

DEFAULT_N_GRID = (0.0, 0.5, 1.0)
DEFAULT_G_GRID = (0.0, 0.25, 0.5, 1.0)
DEFAULT_DELTA_GRID = (0.0, math.pi / 4, math.pi / 2, math.pi)


@dataclass(frozen=True)
class CheckResult:
    name: str
    description: str
    expected: str  # "pass" or "fail"
    tolerance: float
    max_rel_deviation: float
    passed: bool
    note: str = ""

    @property
    def as_expected(self) -> bool:
        return self.passed == (self.expected == "pass")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "max_rel_deviation": self.max_rel_deviation,
            "passed": self.passed,
            "as_expected": self.as_expected,
            "note": self.note,
        }


def _make(name, description, expected, tol, deviation, note=""):
    return CheckResult(
        name=name,
        description=description,
        expected=expected,
        tolerance=tol,
        max_rel_deviation=float(deviation),
        passed=float(deviation) <= tol,
        note=note,
    )


def _vector_deviation(got, want) -> float:
    got = np.asarray(got, dtype=float)
    want = np.asarray(want, dtype=float)
    scale = np.maximum(np.maximum(np.abs(got), np.abs(want)), 1e-300)
    dev = np.abs(got - want) / scale
    dev[(got == 0.0) & (want == 0.0)] = 0.0
    return float(dev.max())


def check_thermal_closed_forms(n_grid, tol=1e-9) -> CheckResult:
    """Corrected closed-form moments against the direct-summation oracle."""
    worst = 0.0
    for n in n_grid:
        oracle = geometric_summation_moments(n, tail_bound=1e-13)
        closed = thermal_moments(n, MomentConvention.CORRECTED)
        worst = max(worst, _vector_deviation(closed.as_array(), oracle.as_array()))
    return _make(
        "thermal-moment-closed-forms",
        "corrected thermal moment polynomials vs direct summation of the "
        "geometric distribution",
        "pass",
        tol,
        worst,
    )


def check_published_third_moment(n_grid, tol=1e-9) -> CheckResult:
    """The as-published third moment against the summation oracle."""
    worst = 0.0
    cubic_confirmed = True
    for n in n_grid:
        if n == 0.0:
            continue
        oracle = geometric_summation_moments(n, tail_bound=1e-13)
        printed = thermal_moments(n, MomentConvention.PAPER_PRINTED)
        worst = max(worst, relative_deviation(printed.m3, oracle.m3))
        gap = oracle.m3 - printed.m3
        if relative_deviation(gap, 5.0 * n**3) > 1e-6:
            cubic_confirmed = False
    note = (
        "known misprint: the published third moment is low by exactly 5*N^3 "
        "(cubic coefficient 1 instead of 6)"
        + ("; deviation matches 5*N^3 on the grid" if cubic_confirmed else "")
    )
    return _make(
        "published-third-moment",
        "as-published thermal third moment vs direct summation",
        "fail",
        tol,
        worst,
        note,
    )


def check_thermal_closure(n_grid, g_grid, tol=1e-9) -> CheckResult:
    """Moment propagation against the equivalent-thermal identity."""
    worst = 0.0
    for n in n_grid:
        for g in g_grid:
            params = OpaParams(g)
            out = propagate_moments(thermal_moments(n), params)
            want = thermal_moments(equivalent_thermal_mean(n, params))
            worst = max(worst, _vector_deviation(out.as_array(), want.as_array()))
    return _make(
        "thermal-closure",
        "propagated thermal moments vs thermal moments at the amplified mean",
        "pass",
        tol,
        worst,
    )


def check_squeeze_propagation(n_grid, g_grid, tail, tol=1e-6) -> CheckResult:
    """Truncated-Fock reduced moments against the propagation polynomials."""
    worst = 0.0
    for n in n_grid:
        for g in g_grid:
            space = space_for_squeezed_thermal(n, g, tail)
            joint = product_state(thermal_state(n, space), vacuum_state(space))
            squeezed = two_mode_squeeze(joint, g)
            got = reduced_moments(squeezed, mode=0)
            want = propagate_moments(thermal_moments(n), OpaParams(g))
            scale = squeezed.trace  # oracle states are subnormalized
            worst = max(
                worst,
                _vector_deviation(got.as_array(), want.as_array() * scale),
            )
    return _make(
        "squeeze-moment-propagation",
        "reduced moments of the squeezed thermal (x) vacuum state vs the "
        "closed-form propagation polynomials",
        "pass",
        tol,
        worst,
    )


def check_wick_vs_fock(n_grid, g_grid, tail, tol=1e-6) -> CheckResult:
    """Pairing-sum Gaussian moments against the truncated-Fock moments."""
    worst = 0.0
    for n in n_grid:
        for g in g_grid:
            params = OpaParams(g)
            table = GaussianSecondMoments.amplified_thermal(n, params)
            wick = number_moments(table, mode=0)
            space = space_for_squeezed_thermal(n, g, tail)
            joint = product_state(thermal_state(n, space), vacuum_state(space))
            squeezed = two_mode_squeeze(joint, g)
            got = reduced_moments(squeezed, mode=0)
            worst = max(
                worst,
                _vector_deviation(got.as_array(), wick.as_array() * squeezed.trace),
            )
    return _make(
        "wick-vs-fock-moments",
        "Gaussian pairing-sum moments vs truncated-Fock reduced moments of "
        "the amplifier output",
        "pass",
        tol,
        worst,
    )


def check_normal_ordered_correlator(n_grid, delta_grid, tol=1e-6) -> CheckResult:
    """The matrix correlator against the analytic correlation law."""
    worst = 0.0
    for n in n_grid:
        for m in n_grid:
            space = FockSpace(choose_dim(max(n, m)))
            for delta in delta_grid:
                c0, _ = hbt_two_mode_correlation(
                    n, m, delta, space, OrderingConvention.NORMAL_ORDERED
                )
                want = correlation_full(
                    thermal_moments(n), thermal_moments(m), Geometry.from_phase(delta)
                )
                trace = (1.0 - (n / (1.0 + n)) ** space.dim if n > 0 else 1.0) * (
                    1.0 - (m / (1.0 + m)) ** space.dim if m > 0 else 1.0
                )
                worst = max(worst, relative_deviation(c0, want * trace))
    return _make(
        "normal-ordered-correlator",
        "two-mode matrix correlator under the normal-ordered convention vs "
        "the analytic correlation law",
        "pass",
        tol,
        worst,
    )


def check_ordering_gap(n_grid, delta_grid, tol=1e-9) -> CheckResult:
    """Literal versus normal-ordered correlator (documented commutator gap)."""
    worst = 0.0
    gap_confirmed = True
    for n in n_grid:
        for m in n_grid:
            if n == 0.0 and m == 0.0:
                continue
            space = FockSpace(choose_dim(max(n, m)))
            for delta in delta_grid:
                literal, _ = hbt_two_mode_correlation(
                    n, m, delta, space, OrderingConvention.AS_WRITTEN
                )
                ordered, _ = hbt_two_mode_correlation(
                    n, m, delta, space, OrderingConvention.NORMAL_ORDERED
                )
                worst = max(worst, relative_deviation(literal, ordered))
                predicted = (n + m) * math.cos(delta)
                if abs((literal - ordered) - predicted) > 1e-6 * max(
                    1.0, abs(predicted)
                ):
                    gap_confirmed = False
    note = (
        "the literal product keeps commutator terms; the gap equals "
        "(n_bar + m_bar) cos(delta)"
        + (", confirmed on the grid" if gap_confirmed else "")
    )
    return _make(
        "ordering-gap",
        "literal operator-product correlator vs normal-ordered convention",
        "fail",
        tol,
        worst,
        note,
    )


def check_noise_consistency(params: OpaParams, pair_grid) -> list[CheckResult]:
    """The three substitution checks of the published noise laws."""
    report = consistency_report(params, pair_grid)
    plain = _make(
        "plain-noise-reconstruction",
        "published plain quartic noise law vs the generic phase-averaged "
        "noise with thermal moments",
        "pass",
        1e-9,
        report.max_plain_vs_substitution,
    )
    amplified = _make(
        "amplified-noise-substitution",
        "published amplified noise law vs the substitution route through "
        "the propagated moments",
        "fail",
        1e-9,
        report.max_amplified_vs_substitution,
        note="documented: the published amplified law is not reproduced by "
        "substituting the propagated moments into the generic noise",
    )
    zero_gain = _make(
        "amplified-noise-zero-gain-reduction",
        "published amplified noise law at zero gain vs the plain law",
        "fail",
        1e-9,
        report.max_zero_gain_reduction,
        note="documented: at zero gain the published amplified law gives 418 "
        "instead of 466 at unit means (about 10.3 percent low)",
    )
    return [plain, amplified, zero_gain]


def check_amplified_noise_swap(params: OpaParams, pair_grid, tol=1e-9) -> CheckResult:
    """Source-swap symmetry of the published amplified noise law."""
    worst = 0.0
    asym_confirmed = True
    c = coeffs(params)
    for n, m in pair_grid:
        direct = opa_noise_avg_printed(n, m, params)
        swapped = opa_noise_avg_printed(m, n, params)
        worst = max(worst, relative_deviation(direct, swapped))
        predicted = 4.0 * (n - m) * c.mu2 * c.nu2**2
        if abs((direct - swapped) - predicted) > 1e-6 * max(1.0, abs(predicted)):
            asym_confirmed = False
    note = (
        "documented: the published amplified law is asymmetric by "
        "4 (n_bar - m_bar) mu^2 nu^4"
        + (", confirmed on the grid" if asym_confirmed else "")
    )
    return _make(
        "amplified-noise-swap-symmetry",
        "published amplified noise law under swapping the two source means",
        "fail" if params.gain > 0 else "pass",
        tol,
        worst,
        note,
    )


def run_oracle_checks(
    n_grid: Sequence[float] = DEFAULT_N_GRID,
    g_grid: Sequence[float] = DEFAULT_G_GRID,
    delta_grid: Sequence[float] = DEFAULT_DELTA_GRID,
    tail: float = 1e-12,
    gain_for_noise: float = 2.0,
) -> dict:
    """Run every verification suite and assemble the JSON-ready report.

    The overall verdict ``all_expected_pass_ok`` covers only the checks
    expected to pass; the documented defects of the published algebra are
    reported but never change the verdict.
    """
    n_grid = tuple(float(x) for x in n_grid)
    g_grid = tuple(float(x) for x in g_grid)
    delta_grid = tuple(float(x) for x in delta_grid)
    params = OpaParams(float(gain_for_noise))

    pair_values = np.geomspace(0.05, 20.0, 20)
    pair_grid = [(float(n), float(m)) for n in pair_values for m in pair_values]
    small_pairs = [(1.0, 1.0), (0.5, 1.0), (2.0, 0.25), (5.0, 5.0), (0.1, 3.0)]

    checks = [
        check_thermal_closed_forms(tuple(x for x in n_grid) + (2.0, 10.0)),
        check_published_third_moment(tuple(x for x in n_grid) + (2.0, 10.0)),
        check_thermal_closure(n_grid + (5.0, 50.0), g_grid + (2.0, 3.0)),
        check_squeeze_propagation(n_grid, g_grid, tail),
        check_wick_vs_fock(n_grid, g_grid, tail),
        check_normal_ordered_correlator(n_grid, delta_grid),
        check_ordering_gap(n_grid, delta_grid),
        *check_noise_consistency(params, pair_grid),
        check_amplified_noise_swap(params, small_pairs),
    ]
    verdict = all(c.passed for c in checks if c.expected == "pass")
    return {
        "n_grid": list(n_grid),
        "g_grid": list(g_grid),
        "delta_grid": list(delta_grid),
        "tail": tail,
        "gain_for_noise": params.gain,
        "checks": [c.to_dict() for c in checks],
        "all_expected_pass_ok": verdict,
    }
