"""Parameter sweeps, SNR-law fitting, fringe inversion and a classical sampler.

Everything here is deterministic given its inputs; the Monte Carlo sampler
derives one substream per fixed-size block from the seed, so results do not
depend on how the blocks are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DegenerateFitError,
    DomainError,
    FringeCoverageError,
    UnreachableTargetError,
)
from .hbt import signal_ratio, snr_ratio
from .opa import OpaParams

MC_BLOCK_SIZE = 262_144


class Spacing(Enum):
    LINEAR = "linear"
    LOG = "log"


@dataclass(frozen=True)
class SweepSpec:
    """Grid settings for a ratio sweep at a fixed gain.

    With ``equal_sources`` both source means track the grid; otherwise the
    companion mean is held at ``m_bar`` while the grid sweeps the other.
    ``points == 1`` is allowed for single-point evaluations and then
    requires ``n_min == n_max``.
    """

    g: float
    n_min: float = 0.15
    n_max: float = 20.0
    points: int = 200
    spacing: Spacing = Spacing.LOG
    equal_sources: bool = True
    m_bar: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.n_min) and math.isfinite(self.n_max)):
            raise DomainError("sweep bounds must be finite")
        if not (0.0 < self.n_min <= self.n_max):
            raise DomainError(
                f"need 0 < n_min <= n_max, got [{self.n_min}, {self.n_max}]"
            )
        if not isinstance(self.points, int) or self.points < 1:
            raise DomainError(f"points must be a positive integer, got {self.points!r}")
        if self.points == 1 and self.n_min != self.n_max:
            raise DomainError("a single-point sweep requires n_min == n_max")
        if not self.equal_sources:
            if self.m_bar is None or not math.isfinite(self.m_bar) or self.m_bar <= 0:
                raise DomainError(
                    "an unequal-sources sweep needs a positive fixed m_bar"
                )

    def grid(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.n_min])
        if self.spacing is Spacing.LOG:
            return np.geomspace(self.n_min, self.n_max, self.points)
        return np.linspace(self.n_min, self.n_max, self.points)


@dataclass(frozen=True)
class RatioTable:
    """Sweep output: one row per mean photon number."""

    spec: SweepSpec
    n_bar: np.ndarray
    signal_ratio: np.ndarray
    snr_ratio: np.ndarray


def sweep_ratios(spec: SweepSpec) -> RatioTable:
    """Evaluate the signal and SNR ratios over the sweep grid.

    With ``equal_sources`` both source means track the grid value; rows are
    emitted in grid order and the computation is bit-reproducible.
    """
    params = OpaParams(spec.g)
    grid = spec.grid()
    signal = np.empty_like(grid)
    ratio = np.empty_like(grid)
    for i, n in enumerate(grid):
        m = n if spec.equal_sources else spec.m_bar
        signal[i] = signal_ratio(n, m, params)
        ratio[i] = snr_ratio(n, m, params)
    return RatioTable(spec, grid, signal, ratio)


@dataclass(frozen=True)
class FitResult:
    """Two-parameter law A + B / n_bar fitted to an SNR-ratio sweep."""

    A: float
    B: float
    rss: float
    grid_used: SweepSpec


def fit_inverse_law(table: RatioTable) -> FitResult:
    """Fit ratio = A + B / n_bar by exact linear least squares.

    The normal equations are solved in the cleared-denominator form
    n_bar * ratio = A * n_bar + B, which weights residuals by n_bar and
    keeps the diverging 1/n_bar regressor from letting the lowest grid
    points dominate the fit.  ``rss`` reports the plain (unweighted)
    residual sum of squares of the fitted law.

    Raises:
        DomainError: for fewer than 3 points.
        DegenerateFitError: when all abscissae coincide.
    """
    n = np.asarray(table.n_bar, dtype=float)
    y = np.asarray(table.snr_ratio, dtype=float)
    if n.size < 3:
        raise DomainError(f"fit needs at least 3 points, got {n.size}")
    s_nn = float(np.sum(n * n))
    s_n = float(np.sum(n))
    count = float(n.size)
    det = s_nn * count - s_n * s_n
    if abs(det) <= 1e-12 * max(s_nn * count, s_n * s_n):
        raise DegenerateFitError("all grid points coincide; the fit is degenerate")
    target = n * y
    rhs_a = float(np.sum(n * target))
    rhs_b = float(np.sum(target))
    a = (rhs_a * count - rhs_b * s_n) / det
    b = (s_nn * rhs_b - s_n * rhs_a) / det
    rss = float(np.sum((y - a - b / n) ** 2))
    return FitResult(a, b, rss, table.spec)


def target_ratio_operating_point(fit: FitResult, target: float) -> float:
    """Mean photon number at which the fitted law reaches a given ratio.

    Inverts target = A + B / n_bar.

    Raises:
        UnreachableTargetError: if the target does not exceed the fitted
            asymptote A, or the fitted B is not positive.
    """
    if not math.isfinite(target):
        raise DomainError(f"target must be finite, got {target!r}")
    if target <= fit.A:
        raise UnreachableTargetError(
            f"target {target} is at or below the fitted asymptote {fit.A:.6g}"
        )
    if fit.B <= 0:
        raise UnreachableTargetError(
            f"fitted law has no decreasing branch (B = {fit.B:.6g})"
        )
    return fit.B / (target - fit.A)


@dataclass(frozen=True)
class PhiEstimate:
    """Angular size recovered from a baseline scan."""

    phi: float
    stderr: float
    iterations: int
    converged: bool
    amplitude: float


def _periodogram_peak(r: np.ndarray, y: np.ndarray, n_freq: int) -> float:
    span = float(r.max() - r.min())
    gaps = np.diff(np.sort(r))
    min_gap = float(gaps[gaps > 0].min()) if np.any(gaps > 0) else span
    omega_max = math.pi / min_gap
    omega_min = 0.25 * math.pi / span
    omegas = np.linspace(omega_min, omega_max, n_freq)
    power = np.abs(np.exp(-1j * np.outer(omegas, r)) @ y)
    return float(omegas[int(np.argmax(power))])


def estimate_phi(
    r0: np.ndarray,
    c_values: np.ndarray,
    k: float,
    amplitude_known: float | None = None,
    max_iterations: int = 200,
    seed: int = 0,
) -> PhiEstimate:
    """Recover the angular size from a scan of the AC correlation vs baseline.

    Fits C(r0) = S * cos(k * r0 * phi) by damped Gauss-Newton, with the
    spatial frequency initialised from the dominant peak of the scan's
    discrete spectrum.  The linearised standard error of phi comes from the
    residual variance and the Jacobian at the solution.  If the damped
    iteration stalls, a few seeded perturbations of the initial frequency
    are tried before reporting a non-converged estimate.

    Raises:
        DomainError: for fewer than 4 points or non-finite input.
        FringeCoverageError: when the scan covers less than half a fringe
            at the detected frequency.
    """
    r = np.asarray(r0, dtype=float).ravel()
    y = np.asarray(c_values, dtype=float).ravel()
    if r.size != y.size:
        raise DomainError(f"scan columns differ in length: {r.size} vs {y.size}")
    if r.size < 4:
        raise DomainError(f"need at least 4 scan points, got {r.size}")
    if not (np.all(np.isfinite(r)) and np.all(np.isfinite(y))):
        raise DomainError("scan contains non-finite values")
    if not (math.isfinite(k) and k > 0):
        raise DomainError(f"wavenumber must be finite and > 0, got {k!r}")
    span = float(r.max() - r.min())
    if span <= 0:
        raise DomainError("scan baselines are all identical")

    omega0 = _periodogram_peak(r, y, n_freq=max(512, 16 * r.size))
    if omega0 * span < math.pi:
        raise FringeCoverageError(
            f"scan spans {omega0 * span / (2 * math.pi):.3f} fringes at the "
            "detected frequency; at least half a fringe is required"
        )

    fixed_amplitude = amplitude_known is not None

    def residual(s, w):
        return y - s * np.cos(w * r)

    def solve_from(omega_init):
        if fixed_amplitude:
            s = float(amplitude_known)
        else:
            basis = np.cos(omega_init * r)
            denom = float(basis @ basis)
            s = float(basis @ y) / denom if denom > 0 else float(np.max(np.abs(y)))
        w = omega_init
        res = residual(s, w)
        cost = float(res @ res)
        iterations = 0
        converged = False
        for iterations in range(1, max_iterations + 1):
            cos_wr = np.cos(w * r)
            sin_wr = np.sin(w * r)
            if fixed_amplitude:
                jac = (-s * r * sin_wr)[:, None]
            else:
                jac = np.column_stack([cos_wr, -s * r * sin_wr])
            gram = jac.T @ jac
            grad = jac.T @ res
            try:
                step = np.linalg.solve(gram, grad)
            except np.linalg.LinAlgError:
                break
            scale = 1.0
            improved = False
            for _ in range(40):
                if fixed_amplitude:
                    s_new, w_new = s, w + scale * float(step[0])
                else:
                    s_new, w_new = s + scale * float(step[0]), w + scale * float(step[1])
                res_new = residual(s_new, w_new)
                cost_new = float(res_new @ res_new)
                if cost_new < cost:
                    improved = True
                    break
                scale *= 0.5
            if not improved:
                converged = cost <= 1e-24 * max(1.0, float(y @ y))
                break
            step_size = scale * float(np.max(np.abs(step)))
            s, w, res, prev_cost, cost = s_new, w_new, res_new, cost, cost_new
            if step_size <= 1e-12 * max(abs(w), 1e-30) or (
                prev_cost - cost <= 1e-14 * max(prev_cost, 1e-300)
            ):
                converged = True
                break
        return s, w, res, cost, iterations, converged

    s, w, res, cost, iterations, converged = solve_from(omega0)
    if not converged:
        rng = np.random.default_rng(seed)
        for _ in range(5):
            retry = solve_from(omega0 * float(rng.uniform(0.8, 1.25)))
            if retry[5] and retry[3] <= cost:
                s, w, res, cost, iterations, converged = retry
                break

    # Linearised covariance at the solution.
    cos_wr = np.cos(w * r)
    sin_wr = np.sin(w * r)
    jac = (
        (-s * r * sin_wr)[:, None]
        if fixed_amplitude
        else np.column_stack([cos_wr, -s * r * sin_wr])
    )
    dof = max(1, r.size - jac.shape[1])
    sigma_sq = cost / dof
    try:
        cov = sigma_sq * np.linalg.inv(jac.T @ jac)
        omega_stderr = math.sqrt(max(float(cov[-1, -1]), 0.0))
    except np.linalg.LinAlgError:
        omega_stderr = math.inf
    return PhiEstimate(
        phi=abs(w) / k,
        stderr=omega_stderr / k,
        iterations=iterations,
        converged=converged,
        amplitude=s,
    )


@dataclass(frozen=True)
class McEstimate:
    """Sampler output with the closed-form references it is checked against.

    ``classical_mean`` is the exact mean of the sampled classical model;
    ``quantum_correlation`` is the photon-number prediction at the same
    settings, whose excess over the classical mean is the diagonal-moment
    gap n_bar + m_bar (the classical field lacks the +n shot terms).
    """

    mean: float
    variance: float
    mean_stderr: float
    variance_stderr: float
    samples: int
    seed: int
    classical_mean: float
    quantum_correlation: float
    diagonal_moment_gap: float


def monte_carlo_semiclassical(
    n_bar: float,
    m_bar: float,
    delta: float,
    samples: int,
    seed: int,
    block_size: int = MC_BLOCK_SIZE,
) -> McEstimate:
    """Sample the intensity product of the classical-field interferometer.

    The two source fields are independent circular complex Gaussians with
    mean square moduli n_bar and m_bar; detector intensities are formed
    with relative interference phase ``delta`` and multiplied.  This is the
    classical model by construction: its exact mean is
    2 n^2 + 2 m^2 + 2 n m (1 + cos delta), below the photon-number value by
    the diagonal-moment gap n + m.

    Each block of ``block_size`` samples draws from a substream derived
    deterministically from (seed, block index).
    """
    for name, value in (("n_bar", n_bar), ("m_bar", m_bar)):
        if not (isinstance(value, (int, float)) and math.isfinite(value)) or value < 0:
            raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
    if not isinstance(samples, int) or samples < 1:
        raise DomainError(f"samples must be a positive integer, got {samples!r}")
    if not isinstance(block_size, int) or block_size < 1:
        raise DomainError(f"block_size must be a positive integer, got {block_size!r}")

    n_blocks = (samples + block_size - 1) // block_size
    streams = np.random.SeedSequence(seed).spawn(n_blocks)
    phase = complex(math.cos(delta), math.sin(delta))
    sums = np.zeros(4)
    remaining = samples
    for children in streams:
        count = min(block_size, remaining)
        remaining -= count
        rng = np.random.default_rng(children)
        e_n = math.sqrt(n_bar / 2.0) * (
            rng.standard_normal(count) + 1j * rng.standard_normal(count)
        )
        e_m = math.sqrt(m_bar / 2.0) * (
            rng.standard_normal(count) + 1j * rng.standard_normal(count)
        )
        intensity1 = np.abs(e_n * phase + e_m) ** 2
        intensity2 = np.abs(e_n + e_m) ** 2
        w = intensity1 * intensity2
        sums += [w.sum(), (w**2).sum(), (w**3).sum(), (w**4).sum()]

    mean = sums[0] / samples
    raw2, raw3, raw4 = sums[1] / samples, sums[2] / samples, sums[3] / samples
    variance = raw2 - mean**2
    if samples > 1:
        variance *= samples / (samples - 1.0)
    central4 = raw4 - 4 * mean * raw3 + 6 * mean**2 * raw2 - 3 * mean**4
    mean_stderr = math.sqrt(max(variance, 0.0) / samples)
    variance_stderr = math.sqrt(max(central4 - variance**2, 0.0) / samples)

    classical_mean = (
        2 * n_bar**2 + 2 * m_bar**2 + 2 * n_bar * m_bar * (1.0 + math.cos(delta))
    )
    quantum = (
        (2 * n_bar**2 + n_bar)
        + (2 * m_bar**2 + m_bar)
        + 2 * n_bar * m_bar * (1.0 + math.cos(delta))
    )
    return McEstimate(
        mean=float(mean),
        variance=float(variance),
        mean_stderr=float(mean_stderr),
        variance_stderr=float(variance_stderr),
        samples=samples,
        seed=seed,
        classical_mean=classical_mean,
        quantum_correlation=quantum,
        diagonal_moment_gap=n_bar + m_bar,
    )
