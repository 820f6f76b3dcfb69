"""Photon-number statistics of thermal (Bose-Einstein) light.

Provides the closed-form first four moments of the thermal distribution in
two conventions (the corrected algebra and the form as published, whose
third moment is a known misprint), together with a direct-summation oracle
that computes the same moments from the geometric distribution itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, SummationLimitError

SUMMATION_TERM_CAP = 10_000_000
_CHUNK = 4096


class MomentConvention(Enum):
    """Which closed form to use for the thermal third moment."""

    CORRECTED = "corrected"
    PAPER_PRINTED = "paper-printed"


@dataclass(frozen=True)
class MomentVector:
    """First four raw moments <n^j>, j = 1..4, of a photon-number distribution."""

    m1: float
    m2: float
    m3: float
    m4: float

    def as_array(self) -> np.ndarray:
        return np.array([self.m1, self.m2, self.m3, self.m4], dtype=float)

    def validate(self) -> None:
        """Check the inequalities every non-negative integer-valued variable obeys.

        Raises:
            DomainError: if a moment is non-finite or an inequality is violated
                beyond floating-point slack.
        """
        m = self.as_array()
        if not np.all(np.isfinite(m)):
            raise DomainError(f"non-finite moment vector {m}")
        slack = 1e-9 * max(1.0, float(np.max(np.abs(m))))
        if self.m1 < -slack:
            raise DomainError(f"negative mean {self.m1}")
        # n^(j+1) >= n^j pointwise on {0, 1, 2, ...}
        if self.m2 < self.m1 - slack or self.m3 < self.m2 - slack or self.m4 < self.m3 - slack:
            raise DomainError(f"moments not monotone for an integer variable: {m}")
        if self.m2 < self.m1**2 - slack:
            raise DomainError(f"negative variance implied by {m}")
        if self.m4 < self.m2**2 - slack:
            raise DomainError(f"fourth moment below squared second moment in {m}")


@dataclass(frozen=True)
class ThermalSource:
    """A single-mode thermal source described by its mean photon number."""

    mean_photon_number: float

    def __post_init__(self):
        n = self.mean_photon_number
        if not (isinstance(n, (int, float)) and math.isfinite(n)) or n < 0:
            raise DomainError(f"mean photon number must be finite and >= 0, got {n!r}")


def _mean_of(source: ThermalSource | float) -> float:
    if isinstance(source, ThermalSource):
        return source.mean_photon_number
    return ThermalSource(float(source)).mean_photon_number


def thermal_moments(
    source: ThermalSource | float,
    convention: MomentConvention = MomentConvention.CORRECTED,
) -> MomentVector:
    """Closed-form moments <n^j>, j = 1..4, of a thermal state.

    Parameters
    ----------
    source : ThermalSource or float
        The source, or directly its mean photon number N.
    convention : MomentConvention
        CORRECTED uses the Bose-Einstein value 6N^3 + 6N^2 + N for the third
        moment.  PAPER_PRINTED reproduces the published closed form
        N^3 + 6N^2 + N, which the direct-summation oracle shows to be a
        misprint (it is low by exactly 5N^3).
    """
    n = _mean_of(source)
    m1 = n
    m2 = 2 * n**2 + n
    if convention is MomentConvention.CORRECTED:
        m3 = 6 * n**3 + 6 * n**2 + n
    elif convention is MomentConvention.PAPER_PRINTED:
        m3 = n**3 + 6 * n**2 + n
    else:
        raise DomainError(f"unknown moment convention {convention!r}")
    m4 = 24 * n**4 + 36 * n**3 + 14 * n**2 + n
    return MomentVector(m1, m2, m3, m4)


def geometric_summation_moments(
    source: ThermalSource | float,
    tail_bound: float = 1e-12,
    max_terms: int = SUMMATION_TERM_CAP,
) -> MomentVector:
    """Moments of the thermal distribution by direct summation.

    Sums p_n * n^j over the geometric distribution p_n = N^n / (1+N)^(n+1)
    until the remaining weighted tail, bounded analytically through the
    geometric series, drops below ``tail_bound`` times each accumulated
    moment.  This is the independent oracle for the closed forms in
    :func:`thermal_moments` and stays deliberately free of them.

    Raises:
        DomainError: if ``tail_bound`` is not in (0, 1).
        SummationLimitError: if ``max_terms`` terms do not reach the bound;
            the error reports the relative bound actually achieved.
    """
    if not (0.0 < tail_bound < 1.0):
        raise DomainError(f"tail_bound must be in (0, 1), got {tail_bound!r}")
    n_mean = _mean_of(source)
    if n_mean == 0.0:
        return MomentVector(0.0, 0.0, 0.0, 0.0)

    q = n_mean / (1.0 + n_mean)
    log_q = math.log(q)
    sums = np.zeros(4)
    achieved = math.inf
    start = 0
    while start < max_terms:
        stop = min(start + _CHUNK, max_terms)
        n = np.arange(start, stop, dtype=float)
        p = (1.0 - q) * np.exp(n * log_q)
        powers = np.vstack([n, n * n, n**3, n**4])
        sums += powers @ p
        start = stop

        # Tail bound: for n > M the term ratio is below q * (1 + 1/(M+1))^4,
        # so each weighted tail is under p_{M+1} * (M+1)^j / (1 - ratio).
        m_last = stop - 1
        ratio = q * (1.0 + 1.0 / (m_last + 1)) ** 4
        if ratio < 1.0 and np.all(sums > 0):
            p_next = (1.0 - q) * math.exp((m_last + 1) * log_q)
            tails = p_next * (m_last + 1.0) ** np.arange(1, 5) / (1.0 - ratio)
            achieved = float(np.max(tails / sums))
            if achieved <= tail_bound:
                return MomentVector(*sums)

    raise SummationLimitError(
        f"summation cap of {max_terms} terms reached at mean {n_mean}; "
        f"achieved relative tail bound {achieved:.3e} > requested {tail_bound:.3e}",
        achieved_bound=achieved,
    )
