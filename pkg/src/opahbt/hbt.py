"""Correlation, noise and SNR algebra of the intensity interferometer.

Two routes coexist deliberately.  The "printed" operations evaluate the
published closed-form polynomials verbatim (plain interferometer and its
amplified version).  The "substitution" operations evaluate the generic
noise polynomial in arbitrary moment vectors, so the printed forms can be
recomputed independently.  Where the published algebra is internally
inconsistent, the discrepancy is quantified by :func:`consistency_report`
rather than papered over.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError
from .opa import OpaParams, coeffs, propagate_moments
from .photon_stats import MomentConvention, MomentVector, thermal_moments


@dataclass(frozen=True)
class Geometry:
    """Detector geometry: wavenumber k, baseline r0 and source angular size phi.

    The interference phase is k * r0 * phi.
    """

    wavenumber: float
    baseline: float
    angular_size: float

    def __post_init__(self):
        for name in ("wavenumber", "baseline", "angular_size"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)) or value < 0:
                raise DomainError(f"{name} must be finite and >= 0, got {value!r}")

    @property
    def phase(self) -> float:
        return self.wavenumber * self.baseline * self.angular_size

    @classmethod
    def from_phase(cls, phase: float) -> "Geometry":
        """Geometry with unit wavenumber and baseline realising a given phase."""
        return cls(1.0, 1.0, float(phase))


@dataclass(frozen=True)
class SourcePair:
    """Mean photon numbers of the two source modes."""

    n_bar: float
    m_bar: float

    def __post_init__(self):
        for name in ("n_bar", "m_bar"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)) or value < 0:
                raise DomainError(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class CorrelationReading:
    """One correlator configuration: AC signal, DC offset, averaged noise, SNR."""

    ac_signal: float
    dc_offset: float
    noise: float
    snr: float


class UndefinedSnrWarning(RuntimeWarning):
    """Raised as a warning when a 0/0 SNR is reported as zero."""


def _check_nonnegative(**values: float) -> None:
    for name, value in values.items():
        if not (isinstance(value, (int, float)) and math.isfinite(value)) or value < 0:
            raise DomainError(f"{name} must be finite and >= 0, got {value!r}")


def correlation_full(nm: MomentVector, mm: MomentVector, geom: Geometry) -> float:
    """Full correlator output <n^2> + <m^2> + 2<n><m>(1 + cos(phase))."""
    delta = geom.phase
    return nm.m2 + mm.m2 + 2.0 * nm.m1 * mm.m1 * (1.0 + math.cos(delta))


def correlation_dc(nm: MomentVector, mm: MomentVector) -> float:
    """Phase-independent part of the correlator output, <n^2> + <m^2> + 2<n><m>."""
    return nm.m2 + mm.m2 + 2.0 * nm.m1 * mm.m1


def correlation_ac(n_bar: float, m_bar: float, geom: Geometry) -> float:
    """Phase-dependent signal 2 * n_bar * m_bar * cos(phase) after DC subtraction."""
    _check_nonnegative(n_bar=n_bar, m_bar=m_bar)
    return 2.0 * n_bar * m_bar * math.cos(geom.phase)


def _phase_free_noise(nm: MomentVector, mm: MomentVector) -> float:
    # Generic phase-averaged squared noise in the eight moment components.
    # The +6 cross coefficient makes the thermal reduction identical to
    # noise_avg_printed; the published general form carries -6 there, which
    # is inconsistent with its own quartic law (see consistency_report).
    n1, n2, n3, n4 = nm.m1, nm.m2, nm.m3, nm.m4
    m1, m2, m3, m4 = mm.m1, mm.m2, mm.m3, mm.m4
    return (
        n4
        - n2**2
        + m4
        - m2**2
        + 8.0 * n3 * m1
        + 8.0 * n1 * m3
        - 4.0 * n2 * n1 * m1
        - 4.0 * n1 * m1 * m2
        + 16.0 * n2 * m2
        + 6.0 * (n1 * m1) ** 2
    )


def noise_full(nm: MomentVector, mm: MomentVector, geom: Geometry) -> float:
    """Squared correlator noise including the cos(phase) and cos(2*phase) terms."""
    n1, n2, n3 = nm.m1, nm.m2, nm.m3
    m1, m2, m3 = mm.m1, mm.m2, mm.m3
    delta = geom.phase
    cos_group = 4.0 * (
        2.0 * (n3 * m1 + 2.0 * n2 * m2 + n1 * m3)
        - n2 * n1 * m1
        - 2.0 * (n1 * m1) ** 2
        - n1 * m1 * m2
    )
    cos2_group = 2.0 * (n2 * m2 - 2.0 * (n1 * m1) ** 2)
    return (
        _phase_free_noise(nm, mm)
        + cos_group * math.cos(delta)
        + cos2_group * math.cos(2.0 * delta)
    )


def noise_avg_substitution(nm: MomentVector, mm: MomentVector) -> float:
    """Phase-averaged squared noise, generic in the moments.

    This is the recomputation route: feeding it thermal moments reproduces
    :func:`noise_avg_printed`, and feeding it amplifier-propagated moments
    gives the value the published amplified noise law should have had.
    """
    return _phase_free_noise(nm, mm)


def noise_avg_printed(n_bar: float, m_bar: float) -> float:
    """Published phase-averaged squared noise of the plain interferometer.

    Quartic polynomial in the two mean photon numbers, evaluated with the
    coefficients exactly as published.
    """
    _check_nonnegative(n_bar=n_bar, m_bar=m_bar)
    n, m = n_bar, m_bar
    return (
        n
        + 13.0 * n**2
        + 32.0 * n**3
        + 20.0 * n**4
        + m
        + 13.0 * m**2
        + 32.0 * m**3
        + 20.0 * m**4
        + 32.0 * n * m
        + 76.0 * n**2 * m
        + 76.0 * n * m**2
        + 40.0 * n**3 * m
        + 40.0 * n * m**3
        + 70.0 * n**2 * m**2
    )


def opa_correlation_ac(n_bar: float, m_bar: float, params: OpaParams, geom: Geometry) -> float:
    """Amplified AC signal 2(mu^2 n + nu^2)(mu^2 m + nu^2) cos(phase)."""
    _check_nonnegative(n_bar=n_bar, m_bar=m_bar)
    c = coeffs(params)
    return (
        2.0
        * (c.mu2 * n_bar + c.nu2)
        * (c.mu2 * m_bar + c.nu2)
        * math.cos(geom.phase)
    )


def opa_noise_avg_printed(n_bar: float, m_bar: float, params: OpaParams) -> float:
    """Published phase-averaged squared noise of the amplified interferometer.

    Evaluated verbatim, grouped by powers mu^8, mu^6 nu^2, mu^4 nu^4,
    mu^2 nu^6 and nu^8 with exactly the published coefficients.  Note that
    the published polynomial is not symmetric under swapping the two source
    means and does not reduce to :func:`noise_avg_printed` at zero gain;
    both deviations are quantified by the consistency checks.
    """
    _check_nonnegative(n_bar=n_bar, m_bar=m_bar)
    c = coeffs(params)
    n, m = n_bar, m_bar
    u, v = c.mu2, c.nu2  # mu^2 and nu^2
    group_u4 = (
        n
        + 13.0 * n**2
        + 32.0 * n**3
        + 20.0 * n**4
        + m
        + 13.0 * m**2
        + 32.0 * m**3
        + 20.0 * m**4
        + 28.0 * n * m
        + 68.0 * n**2 * m
        + 68.0 * n * m**2
        + 42.0 * n**2 * m**2
        + 40.0 * n * m**3
        + 40.0 * n**3 * m
    )
    group_u3v = (
        2.0
        + 51.0 * n
        + 138.0 * n**2
        + 88.0 * n**3
        + 51.0 * m
        + 138.0 * m**2
        + 88.0 * m**3
        + 216.0 * n * m
        + 136.0 * n**2 * m
        + 136.0 * n * m**2
    )
    group_u2v2 = 46.0 + 199.0 * n + 131.0 * n**2 + 195.0 * m + 164.0 * n * m + 131.0 * m**2
    group_uv3 = 93.0 + 73.0 * n + 77.0 * m
    return (
        u**4 * group_u4
        + u**3 * v * group_u3v
        + u**2 * v**2 * group_u2v2
        + u * v**3 * group_uv3
        + 14.0 * v**4
    )


def snr(ac_signal: float, noise: float) -> float:
    """Signal-to-noise ratio ac_signal / noise.

    A zero noise with nonzero signal raises ZeroDivisionError; the 0/0 case
    is defined as 0 and flagged with :class:`UndefinedSnrWarning` so sweeps
    touching vacuum endpoints do not abort.
    """
    if not math.isfinite(noise) or noise < 0:
        raise DomainError(f"noise must be finite and >= 0, got {noise!r}")
    if noise == 0.0:
        if ac_signal == 0.0:
            warnings.warn("0/0 SNR reported as 0", UndefinedSnrWarning, stacklevel=2)
            return 0.0
        raise ZeroDivisionError(f"zero noise with nonzero signal {ac_signal}")
    return ac_signal / noise


def signal_ratio(n_bar: float, m_bar: float, params: OpaParams) -> float:
    """Amplified over plain signal amplitude, (mu^2 n + nu^2)(mu^2 m + nu^2)/(n m)."""
    _check_nonnegative(n_bar=n_bar, m_bar=m_bar)
    if n_bar == 0.0 or m_bar == 0.0:
        raise DomainError("signal ratio undefined for a zero mean photon number")
    c = coeffs(params)
    return (c.mu2 * n_bar + c.nu2) * (c.mu2 * m_bar + c.nu2) / (n_bar * m_bar)


def snr_ratio(n_bar: float, m_bar: float, params: OpaParams) -> float:
    """Amplified over plain SNR at peak signal (cos of the phase set to 1).

    Both SNRs use the published phase-averaged noise laws.
    """
    _check_nonnegative(n_bar=n_bar, m_bar=m_bar)
    if n_bar == 0.0 or m_bar == 0.0:
        raise DomainError("SNR ratio undefined for a zero mean photon number")
    c = coeffs(params)
    amplified = (
        2.0
        * (c.mu2 * n_bar + c.nu2)
        * (c.mu2 * m_bar + c.nu2)
        / math.sqrt(opa_noise_avg_printed(n_bar, m_bar, params))
    )
    plain = 2.0 * n_bar * m_bar / math.sqrt(noise_avg_printed(n_bar, m_bar))
    return amplified / plain


def correlation_reading(
    n_bar: float,
    m_bar: float,
    geom: Geometry,
    params: OpaParams | None = None,
    convention: MomentConvention = MomentConvention.CORRECTED,
) -> CorrelationReading:
    """Assemble the AC signal, DC offset, averaged noise and SNR for one setup.

    With ``params`` given, the amplified laws are used (signal and published
    noise); otherwise the plain ones.
    """
    nm = thermal_moments(n_bar, convention)
    mm = thermal_moments(m_bar, convention)
    if params is None:
        ac = correlation_ac(n_bar, m_bar, geom)
        dc = correlation_dc(nm, mm)
        noise_sq = noise_avg_printed(n_bar, m_bar)
    else:
        ac = opa_correlation_ac(n_bar, m_bar, params, geom)
        nm_out = propagate_moments(nm, params)
        mm_out = propagate_moments(mm, params)
        dc = correlation_dc(nm_out, mm_out)
        noise_sq = opa_noise_avg_printed(n_bar, m_bar, params)
    noise = math.sqrt(noise_sq)
    return CorrelationReading(ac, dc, noise, snr(ac, noise))


def relative_deviation(x: float, y: float) -> float:
    """|x - y| / max(|x|, |y|), with 0 when both vanish."""
    scale = max(abs(x), abs(y))
    if scale == 0.0:
        return 0.0
    return abs(x - y) / scale


@dataclass(frozen=True)
class ConsistencyRow:
    """Relative deviations of the published noise laws at one grid point."""

    n_bar: float
    m_bar: float
    plain_vs_substitution: float
    amplified_vs_substitution: float
    zero_gain_reduction: float


@dataclass(frozen=True)
class ConsistencyReport:
    """Grid of published-versus-recomputed noise deviations with summaries.

    ``plain_vs_substitution`` should vanish: the generic phase-averaged
    noise with thermal moments reproduces the plain quartic law exactly.
    ``amplified_vs_substitution`` and ``zero_gain_reduction`` are expected
    to be nonzero; they quantify how far the published amplified noise law
    sits from its own substitution route and from the plain law at zero
    gain (about 10.3 percent at unit means).
    """

    params: OpaParams
    rows: tuple[ConsistencyRow, ...]
    max_plain_vs_substitution: float
    mean_plain_vs_substitution: float
    max_amplified_vs_substitution: float
    mean_amplified_vs_substitution: float
    max_zero_gain_reduction: float
    mean_zero_gain_reduction: float

    def to_dict(self) -> dict:
        return {
            "gain": self.params.gain,
            "pump_phase": self.params.pump_phase,
            "rows": [
                {
                    "n_bar": r.n_bar,
                    "m_bar": r.m_bar,
                    "plain_vs_substitution": r.plain_vs_substitution,
                    "amplified_vs_substitution": r.amplified_vs_substitution,
                    "zero_gain_reduction": r.zero_gain_reduction,
                }
                for r in self.rows
            ],
            "max_plain_vs_substitution": self.max_plain_vs_substitution,
            "mean_plain_vs_substitution": self.mean_plain_vs_substitution,
            "max_amplified_vs_substitution": self.max_amplified_vs_substitution,
            "mean_amplified_vs_substitution": self.mean_amplified_vs_substitution,
            "max_zero_gain_reduction": self.max_zero_gain_reduction,
            "mean_zero_gain_reduction": self.mean_zero_gain_reduction,
        }


def consistency_report(
    params: OpaParams, grid: Sequence[tuple[float, float]]
) -> ConsistencyReport:
    """Quantify the internal consistency of the published noise laws on a grid.

    Raises:
        DomainError: if the grid is empty.
    """
    if len(grid) == 0:
        raise DomainError("consistency report requires a nonempty grid")
    zero_gain = OpaParams(0.0)
    rows = []
    for n_bar, m_bar in grid:
        nm = thermal_moments(n_bar)
        mm = thermal_moments(m_bar)
        plain_dev = relative_deviation(
            noise_avg_printed(n_bar, m_bar), noise_avg_substitution(nm, mm)
        )
        amp_dev = relative_deviation(
            opa_noise_avg_printed(n_bar, m_bar, params),
            noise_avg_substitution(
                propagate_moments(nm, params), propagate_moments(mm, params)
            ),
        )
        g0_dev = relative_deviation(
            opa_noise_avg_printed(n_bar, m_bar, zero_gain),
            noise_avg_printed(n_bar, m_bar),
        )
        rows.append(ConsistencyRow(n_bar, m_bar, plain_dev, amp_dev, g0_dev))

    def _summary(values):
        return max(values), sum(values) / len(values)

    max_plain, mean_plain = _summary([r.plain_vs_substitution for r in rows])
    max_amp, mean_amp = _summary([r.amplified_vs_substitution for r in rows])
    max_g0, mean_g0 = _summary([r.zero_gain_reduction for r in rows])
    return ConsistencyReport(
        params=params,
        rows=tuple(rows),
        max_plain_vs_substitution=max_plain,
        mean_plain_vs_substitution=mean_plain,
        max_amplified_vs_substitution=max_amp,
        mean_amplified_vs_substitution=mean_amp,
        max_zero_gain_reduction=max_g0,
        mean_zero_gain_reduction=mean_g0,
    )
