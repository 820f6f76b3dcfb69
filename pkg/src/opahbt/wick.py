"""Moments of zero-mean Gaussian states through Wick's theorem.

Thermal light and the amplifier output are zero-mean Gaussian, so every
ladder-operator moment factorises into a sum over perfect pairings of
second-order contractions.  Pairings are enumerated directly (at most 105
for an eight-operator monomial), which keeps the engine trivially
verifiable and independent of the truncated-Fock route.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .opa import OpaParams, coeffs
from .photon_stats import MomentVector

#: One ladder operator: (mode index, True for a creation operator).
LadderOp = tuple[int, bool]


@dataclass(frozen=True)
class GaussianSecondMoments:
    """Second-moment tables of a zero-mean Gaussian state.

    ``normal[i, j]`` holds <adag_i a_j> and must be Hermitian;
    ``anomalous[i, j]`` holds <a_i a_j> and must be symmetric.
    """

    normal: np.ndarray
    anomalous: np.ndarray

    def __post_init__(self):
        normal = np.asarray(self.normal, dtype=complex)
        anomalous = np.asarray(self.anomalous, dtype=complex)
        if normal.ndim != 2 or normal.shape[0] != normal.shape[1]:
            raise DomainError(f"normal table must be square, got shape {normal.shape}")
        if anomalous.shape != normal.shape:
            raise DomainError("normal and anomalous tables must have matching shapes")
        if not np.allclose(normal, normal.conj().T, atol=1e-12):
            raise DomainError("normal table <adag_i a_j> must be Hermitian")
        if not np.allclose(anomalous, anomalous.T, atol=1e-12):
            raise DomainError("anomalous table <a_i a_j> must be symmetric")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "anomalous", anomalous)

    @property
    def modes(self) -> int:
        return self.normal.shape[0]

    @classmethod
    def thermal(cls, means: Sequence[float]) -> "GaussianSecondMoments":
        """Independent thermal modes with the given mean photon numbers."""
        n = len(means)
        return cls(np.diag(np.asarray(means, dtype=complex)), np.zeros((n, n), complex))

    @classmethod
    def amplified_thermal(cls, n_bar: float, params: OpaParams) -> "GaussianSecondMoments":
        """Two-mode output of a zero-phase amplifier fed thermal light and vacuum.

        Mode 0 is the amplified signal, mode 1 the idler output.
        """
        c = coeffs(params)
        normal = np.array(
            [
                [c.mu2 * n_bar + c.nu2, 0.0],
                [0.0, c.nu2 * (n_bar + 1.0)],
            ],
            dtype=complex,
        )
        cross = c.mu * c.nu * (n_bar + 1.0)
        anomalous = np.array([[0.0, cross], [cross, 0.0]], dtype=complex)
        return cls(normal, anomalous)


def _contraction(table: GaussianSecondMoments, left: LadderOp, right: LadderOp) -> complex:
    (i, dag_i), (j, dag_j) = left, right
    if dag_i and not dag_j:  # <adag_i a_j>
        return table.normal[i, j]
    if not dag_i and dag_j:  # <a_i adag_j> = <adag_j a_i> + delta_ij
        return table.normal[j, i] + (1.0 if i == j else 0.0)
    if not dag_i and not dag_j:  # <a_i a_j>
        return table.anomalous[i, j]
    # <adag_i adag_j> = conj(<a_j a_i>)
    return np.conj(table.anomalous[j, i])


def gaussian_wick_moment(
    table: GaussianSecondMoments, monomial: Sequence[LadderOp]
) -> complex:
    """Expectation of an ordered ladder-operator monomial on a Gaussian state.

    Sums over all perfect pairings the product of pairwise contractions,
    each contraction taken with the operators in their original left-right
    order so canonical commutators are kept.  Odd-length monomials have
    zero expectation on a zero-mean state and return 0 rather than raising.
    """
    ops = list(monomial)
    for op in ops:
        mode, dag = op
        if not (0 <= int(mode) < table.modes) or not isinstance(dag, (bool, np.bool_)):
            raise DomainError(f"bad ladder-operator label {op!r}")
    if len(ops) % 2 == 1:
        return 0.0 + 0.0j
    if not ops:
        return 1.0 + 0.0j

    def pairings(indices: tuple[int, ...]) -> complex:
        if not indices:
            return 1.0 + 0.0j
        first, rest = indices[0], indices[1:]
        total = 0.0 + 0.0j
        for pos, partner in enumerate(rest):
            value = _contraction(table, ops[first], ops[partner])
            if value != 0.0:
                remaining = rest[:pos] + rest[pos + 1 :]
                total += value * pairings(remaining)
        return total

    return pairings(tuple(range(len(ops))))


def number_moments(table: GaussianSecondMoments, mode: int) -> MomentVector:
    """Moments <(adag a)^j>, j = 1..4, of one mode via the pairing sum."""
    pair: list[LadderOp] = [(mode, True), (mode, False)]
    values = []
    for j in range(1, 5):
        value = gaussian_wick_moment(table, pair * j)
        if abs(value.imag) > 1e-9 * max(1.0, abs(value.real)):
            raise DomainError(f"number moment came out non-real: {value!r}")
        values.append(value.real)
    return MomentVector(*values)
