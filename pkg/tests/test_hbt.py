import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opahbt import (
    DomainError,
    Geometry,
    OpaParams,
    SourcePair,
    UndefinedSnrWarning,
    consistency_report,
    correlation_ac,
    correlation_full,
    correlation_reading,
    equivalent_thermal_mean,
    noise_avg_printed,
    noise_avg_substitution,
    noise_full,
    opa_correlation_ac,
    opa_noise_avg_printed,
    propagate_moments,
    signal_ratio,
    snr,
    snr_ratio,
    thermal_moments,
)

G2 = OpaParams(2.0)

# Frozen from direct evaluation of the published amplified-noise polynomial
# at unit means, gain 2 (its square root is about 9694.6).
AMPLIFIED_NOISE_1_1_G2 = 93985337.33036274
# Frozen constant group of the same polynomial at vacuum inputs, gain 2.
AMPLIFIED_NOISE_0_0_G2 = 5084398.5177281955


def _zero_phase():
    return Geometry.from_phase(0.0)


def test_geometry_phase_product():
    geom = Geometry(wavenumber=1.42e7, baseline=20.0, angular_size=1e-8)
    assert geom.phase == pytest.approx(1.42e7 * 20.0 * 1e-8)
    with pytest.raises(DomainError):
        Geometry(-1.0, 1.0, 1.0)


def test_source_pair_validation():
    SourcePair(0.0, 2.5)
    with pytest.raises(DomainError):
        SourcePair(-1.0, 1.0)


def test_correlation_full_worked_values():
    one = thermal_moments(1.0)
    assert correlation_full(one, one, _zero_phase()) == pytest.approx(10.0)
    assert correlation_full(one, one, Geometry.from_phase(math.pi)) == pytest.approx(6.0)
    zero = thermal_moments(0.0)
    assert correlation_full(zero, zero, _zero_phase()) == 0.0


def test_correlation_ac_values():
    assert correlation_ac(1.0, 1.0, _zero_phase()) == pytest.approx(2.0)
    assert correlation_ac(3.0, 7.0, Geometry.from_phase(math.pi / 2)) == pytest.approx(
        0.0, abs=1e-12
    )
    assert correlation_ac(2.0, 3.0, Geometry.from_phase(math.pi)) == pytest.approx(-12.0)


@given(
    st.floats(min_value=0.0, max_value=10.0),
    st.floats(min_value=0.0, max_value=10.0),
    st.floats(min_value=0.0, max_value=7.0),
)
@settings(max_examples=60, deadline=None)
def test_dc_split_identity(n, m, delta):
    # Subtracting the quarter-phase value isolates the cosine part.
    nm, mm = thermal_moments(n), thermal_moments(m)
    full = correlation_full(nm, mm, Geometry.from_phase(delta))
    quarter = correlation_full(nm, mm, Geometry.from_phase(math.pi / 2))
    assert full - quarter == pytest.approx(
        2 * n * m * math.cos(delta), abs=1e-9 * max(1.0, n * m)
    )


def test_noise_full_single_arm():
    one = thermal_moments(1.0)
    zero = thermal_moments(0.0)
    for delta in (0.0, 1.0, math.pi):
        assert noise_full(one, zero, Geometry.from_phase(delta)) == pytest.approx(66.0)


def test_noise_full_phase_average_matches_substitution():
    one = thermal_moments(1.0)
    # cos and cos(2x) both average out over {pi/4, 3pi/4}.
    average = 0.5 * (
        noise_full(one, one, Geometry.from_phase(math.pi / 4))
        + noise_full(one, one, Geometry.from_phase(3 * math.pi / 4))
    )
    assert average == pytest.approx(466.0, rel=1e-12)
    assert noise_avg_substitution(one, one) == pytest.approx(466.0)


def test_printed_plain_noise_values():
    assert noise_avg_printed(0.0, 0.0) == 0.0
    assert noise_avg_printed(1.0, 1.0) == pytest.approx(466.0)
    assert noise_avg_printed(1.0, 0.0) == pytest.approx(66.0)


def test_substitution_reconstructs_printed_plain_noise():
    values = np.geomspace(0.01, 100.0, 20)
    for n in values:
        for m in values:
            printed = noise_avg_printed(n, m)
            recomputed = noise_avg_substitution(thermal_moments(n), thermal_moments(m))
            assert recomputed == pytest.approx(printed, rel=1e-9)


def test_substitution_with_amplified_vacuum_moments():
    # Propagated vacuum is thermal at sinh(g)^2 in both arms, so the
    # substitution route lands on the plain law at those means, not on the
    # published amplified law.
    vac = thermal_moments(0.0)
    propagated = propagate_moments(vac, G2)
    nu2 = math.sinh(2.0) ** 2
    value = noise_avg_substitution(propagated, propagated)
    assert value == pytest.approx(noise_avg_printed(nu2, nu2), rel=1e-12)
    assert value == pytest.approx(6190226.141266234, rel=1e-9)  # frozen
    assert value != pytest.approx(opa_noise_avg_printed(0.0, 0.0, G2), rel=1e-3)


def test_amplified_correlation_values():
    geom = _zero_phase()
    assert opa_correlation_ac(1.0, 1.0, OpaParams(0.0), geom) == pytest.approx(
        correlation_ac(1.0, 1.0, geom)
    )
    assert opa_correlation_ac(1.0, 1.0, G2, geom) == pytest.approx(1491.479, abs=5e-3)
    assert opa_correlation_ac(10.0, 10.0, G2, geom) == pytest.approx(47861.26, abs=0.5)


def test_amplified_noise_frozen_values():
    assert opa_noise_avg_printed(1.0, 1.0, OpaParams(0.0)) == pytest.approx(418.0)
    assert opa_noise_avg_printed(1.0, 1.0, G2) == pytest.approx(
        AMPLIFIED_NOISE_1_1_G2, rel=1e-12
    )
    assert math.sqrt(opa_noise_avg_printed(1.0, 1.0, G2)) == pytest.approx(
        9694.6, abs=0.1
    )
    assert opa_noise_avg_printed(0.0, 0.0, G2) == pytest.approx(
        AMPLIFIED_NOISE_0_0_G2, rel=1e-12
    )


def test_snr_values_and_edge_cases():
    assert snr(2.0, math.sqrt(466.0)) == pytest.approx(0.092648, abs=1e-6)
    assert snr(1491.479, 9694.6) == pytest.approx(0.153846, abs=1e-6)
    with pytest.warns(UndefinedSnrWarning):
        assert snr(0.0, 0.0) == 0.0
    with pytest.raises(ZeroDivisionError):
        snr(1.0, 0.0)
    with pytest.raises(DomainError):
        snr(1.0, -1.0)


def test_ratio_worked_values():
    assert signal_ratio(10.0, 10.0, G2) == pytest.approx(239.306, abs=1e-3)
    assert signal_ratio(1.0, 1.0, OpaParams(0.0)) == 1.0
    assert snr_ratio(1.0, 1.0, G2) == pytest.approx(1.660, abs=5e-3)
    with pytest.raises(DomainError):
        signal_ratio(0.0, 1.0, G2)
    with pytest.raises(DomainError):
        snr_ratio(1.0, 0.0, G2)


def test_large_mean_signal_ratio_approaches_fourth_power_of_cosh():
    asymptote = math.cosh(2.0) ** 4
    assert signal_ratio(1e6, 1e6, G2) == pytest.approx(asymptote, rel=1e-4)


@given(
    st.floats(min_value=1e-3, max_value=50.0),
    st.floats(min_value=1e-3, max_value=50.0),
)
@settings(max_examples=60, deadline=None)
def test_plain_operations_swap_symmetry(n, m):
    nm, mm = thermal_moments(n), thermal_moments(m)
    geom = Geometry.from_phase(0.7)
    assert correlation_full(nm, mm, geom) == pytest.approx(
        correlation_full(mm, nm, geom), rel=1e-12
    )
    assert noise_full(nm, mm, geom) == pytest.approx(noise_full(mm, nm, geom), rel=1e-12)
    assert noise_avg_printed(n, m) == pytest.approx(noise_avg_printed(m, n), rel=1e-12)


def test_amplified_noise_swap_asymmetry_is_the_documented_one():
    # The published amplified law is asymmetric by 4 (n - m) mu^2 nu^4.
    c_mu2 = math.cosh(2.0) ** 2
    c_nu2 = math.sinh(2.0) ** 2
    for n, m in ((1.0, 0.0), (2.0, 0.5), (0.1, 3.0)):
        gap = opa_noise_avg_printed(n, m, G2) - opa_noise_avg_printed(m, n, G2)
        assert gap == pytest.approx(4.0 * (n - m) * c_mu2 * c_nu2**2, rel=1e-9)


@given(
    st.floats(min_value=0.0, max_value=20.0),
    st.floats(min_value=0.0, max_value=20.0),
    st.floats(min_value=0.0, max_value=3.0),
    st.floats(min_value=0.0, max_value=7.0),
)
@settings(max_examples=60, deadline=None)
def test_amplified_correlation_consistency(n, m, g, delta):
    # The amplified AC signal is the plain one at the amplified means.
    params = OpaParams(g)
    geom = Geometry.from_phase(delta)
    direct = opa_correlation_ac(n, m, params, geom)
    via_means = correlation_ac(
        equivalent_thermal_mean(n, params), equivalent_thermal_mean(m, params), geom
    )
    assert direct == pytest.approx(via_means, rel=1e-12, abs=1e-12)


def test_correlation_reading_assembly():
    reading = correlation_reading(1.0, 1.0, _zero_phase())
    assert reading.ac_signal == pytest.approx(2.0)
    assert reading.dc_offset == pytest.approx(8.0)
    assert reading.noise == pytest.approx(math.sqrt(466.0))
    assert reading.snr == pytest.approx(reading.ac_signal / reading.noise)
    amplified = correlation_reading(1.0, 1.0, _zero_phase(), params=G2)
    assert amplified.ac_signal == pytest.approx(1491.479, abs=5e-3)
    assert amplified.snr == pytest.approx(0.153846, abs=1e-6)


def test_consistency_report_values():
    report = consistency_report(G2, [(1.0, 1.0), (0.5, 2.0)])
    first = report.rows[0]
    assert first.plain_vs_substitution == pytest.approx(0.0, abs=1e-12)
    assert first.zero_gain_reduction == pytest.approx((466.0 - 418.0) / 466.0, rel=1e-9)
    assert first.amplified_vs_substitution > 0.01
    assert report.max_plain_vs_substitution <= 1e-12
    assert report.to_dict()["max_zero_gain_reduction"] >= first.zero_gain_reduction


def test_consistency_report_rejects_empty_grid():
    with pytest.raises(DomainError):
        consistency_report(G2, [])
