"""Optical parametric amplifier model.

An ideal OPA acts on its two input modes as a two-mode squeezer with
hyperbolic coefficients mu = cosh(g), nu = sinh(g) (zero pump phase).  With
vacuum on the idler port, the photon-number moments of the amplified signal
mode follow closed-form propagation rules that are polynomial in mu, nu and
the input moments; those rules are implemented here verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, UnsupportedConfigurationError
from .photon_stats import MomentVector

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class OpaParams:
    """Amplifier settings: parametric gain g >= 0 and pump phase in [0, 2*pi).

    The pump phase is part of the data model but every moment-propagation
    path in this package requires zero phase and rejects anything else.
    """

    gain: float
    pump_phase: float = 0.0

    def __post_init__(self):
        if not (isinstance(self.gain, (int, float)) and math.isfinite(self.gain)):
            raise DomainError(f"gain must be finite, got {self.gain!r}")
        if self.gain < 0:
            raise DomainError(f"gain must be >= 0, got {self.gain}")
        if not math.isfinite(self.pump_phase):
            raise DomainError(f"pump phase must be finite, got {self.pump_phase!r}")
        phase = math.fmod(self.pump_phase, _TWO_PI)
        if phase < 0.0:
            phase += _TWO_PI
        object.__setattr__(self, "pump_phase", phase)


@dataclass(frozen=True)
class BogoliubovCoeffs:
    """Hyperbolic transformation coefficients, satisfying mu^2 - nu^2 = 1."""

    mu: float
    nu: float

    @property
    def mu2(self) -> float:
        return self.mu * self.mu

    @property
    def nu2(self) -> float:
        return self.nu * self.nu


def coeffs(params: OpaParams) -> BogoliubovCoeffs:
    """Bogoliubov coefficients (cosh g, sinh g) for a zero-phase amplifier.

    Raises:
        UnsupportedConfigurationError: if the pump phase is nonzero; the
            phase is carried in :class:`OpaParams` but has no computable
            path here.
    """
    if params.pump_phase != 0.0:
        raise UnsupportedConfigurationError(
            f"pump phase {params.pump_phase} is not supported; only the "
            "zero-phase transformation is computable"
        )
    return BogoliubovCoeffs(math.cosh(params.gain), math.sinh(params.gain))


def equivalent_thermal_mean(n_bar: float, params: OpaParams) -> float:
    """Mean photon number of the amplified signal mode, mu^2 * n_bar + nu^2.

    A thermal input with vacuum on the idler leaves the amplifier exactly
    thermal at this mean, so the value doubles as the equivalent-thermal
    parameter of the output mode.
    """
    if not (isinstance(n_bar, (int, float)) and math.isfinite(n_bar)) or n_bar < 0:
        raise DomainError(f"mean photon number must be finite and >= 0, got {n_bar!r}")
    c = coeffs(params)
    return c.mu2 * n_bar + c.nu2


def propagate_moments(moments: MomentVector, params: OpaParams) -> MomentVector:
    """Propagate the first four photon-number moments through the amplifier.

    Evaluates the published propagation polynomials in mu, nu and the input
    moments exactly as printed.  For thermal input moments in the corrected
    convention the output equals the thermal moment vector at mean
    mu^2 * m1 + nu^2 (the thermal-closure identity, enforced by tests and
    by the Fock-space oracle).
    """
    c = coeffs(params)
    u, v = c.mu2, c.nu2  # mu^2 and nu^2
    m1, m2, m3, m4 = moments.m1, moments.m2, moments.m3, moments.m4
    out1 = u * m1 + v
    out2 = u**2 * m2 + 3 * u * v * m1 + u * v + v**2
    out3 = (
        u**3 * m3
        + 6 * u**2 * v * m2
        + (4 * u**2 * v + 7 * u * v**2) * m1
        + u**2 * v
        + 4 * u * v**2
        + v**3
    )
    out4 = (
        u**4 * m4
        + 10 * u**3 * v * m3
        + (10 * u**3 * v + 25 * u**2 * v**2) * m2
        + (30 * u**2 * v**2 + 5 * u**3 * v + 15 * u * v**3) * m1
        + 11 * u**2 * v**2
        + u**3 * v
        + 11 * u * v**3
        + v**4
    )
    return MomentVector(out1, out2, out3, out4)
