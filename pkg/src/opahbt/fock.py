"""Truncated Fock-space numerics: the first-principles verification route.

States are density matrices over one or two bosonic modes, stored sparse
and subnormalized: the probability mass lost to truncation is carried
explicitly in ``trace_deficit`` so trace + deficit = 1 holds exactly.

The two-mode squeezer is the matrix exponential of the anti-Hermitian
generator g(adag bdag - a b) in the truncated space.  That generator
preserves the photon-number difference between the modes, so the
exponential is computed ladder by ladder (one small dense block per
difference) and assembled into a sparse orthogonal propagator; this is
exactly the exponential of the truncated generator, at a fraction of the
dense cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, TruncationError
from .photon_stats import MomentVector

DEFAULT_TAIL = 1e-12
DIM_CAP = 256


class OrderingConvention(Enum):
    """Operator ordering used when evaluating the two-detector correlator.

    NORMAL_ORDERED keeps the photon-number (mode-diagonal) part of the
    intensity product as written and puts every mode-mixing interference
    monomial into normal order, which is the quantum evaluation matching
    the classical-field correlation formula.  AS_WRITTEN evaluates the
    literal operator product, commutators and all.
    """

    NORMAL_ORDERED = "normal-ordered"
    AS_WRITTEN = "as-written"


@dataclass(frozen=True)
class FockSpace:
    """Truncation setup: ``dim`` Fock levels per mode.

    ``max_operator_bytes`` caps the estimated footprint of two-mode
    operators before they are built.
    """

    dim: int
    max_operator_bytes: int = 1 << 31

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 2:
            raise DomainError(f"dim must be an integer >= 2, got {self.dim!r}")

    def check_two_mode_footprint(self, nnz_estimate: int, itemsize: int = 16) -> None:
        required = int(nnz_estimate) * (itemsize + 8)  # data plus index overhead
        if required > self.max_operator_bytes:
            raise TruncationError(
                f"two-mode operators at dim={self.dim} need about {required} bytes, "
                f"over the configured cap of {self.max_operator_bytes}; reduce dim "
                "or raise max_operator_bytes",
                achieved=required,
            )


class FockState:
    """Subnormalized density operator over one or two modes.

    Attributes:
        rho: CSR matrix of the retained-block density operator.
        dims: Fock dimension of each mode.
        trace_deficit: probability mass lying outside the retained block.
    """

    def __init__(self, rho, dims: tuple[int, ...], trace_deficit: float = 0.0):
        rho = sp.csr_matrix(rho)
        side = int(np.prod(dims))
        if rho.shape != (side, side):
            raise DomainError(f"density matrix shape {rho.shape} does not match dims {dims}")
        if len(dims) not in (1, 2):
            raise DomainError(f"only one- and two-mode states are supported, got dims {dims}")
        if len(dims) == 2 and dims[0] != dims[1]:
            raise DomainError(f"two-mode states need equal per-mode dims, got {dims}")
        if not (0.0 <= trace_deficit <= 1.0):
            raise DomainError(f"trace deficit must be in [0, 1], got {trace_deficit}")
        self.rho = rho
        self.dims = tuple(int(d) for d in dims)
        self.trace_deficit = float(trace_deficit)

    @property
    def n_modes(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.dims[0]

    @property
    def trace(self) -> float:
        return float(self.rho.diagonal().sum().real)

    def to_dense(self) -> np.ndarray:
        return self.rho.toarray()

    def boundary_mass(self) -> float:
        """Population of the top retained Fock level of any mode.

        A small value certifies that truncation barely perturbed the state:
        whatever flux the ideal dynamics would push past the cutoff first
        has to populate this shell.
        """
        diag = self.rho.diagonal().real
        if self.n_modes == 1:
            return float(diag[-1])
        dim = self.dim
        idx = np.arange(dim * dim)
        shell = (idx // dim == dim - 1) | (idx % dim == dim - 1)
        return float(diag[shell].sum())

    def validate(self, eig_side_limit: int = 2048) -> None:
        """Check hermiticity, positivity and trace bookkeeping.

        The eigenvalue floor is only checked when the matrix side is at
        most ``eig_side_limit`` (dense diagonalisation).
        """
        herm_gap = abs(self.rho - self.rho.getH()).max()
        if herm_gap > 1e-12:
            raise DomainError(f"density matrix not Hermitian: max deviation {herm_gap:.3e}")
        if abs(self.trace + self.trace_deficit - 1.0) > 1e-10:
            raise DomainError(
                f"trace {self.trace} plus deficit {self.trace_deficit} is not 1"
            )
        if self.rho.shape[0] <= eig_side_limit:
            floor = float(np.linalg.eigvalsh(self.to_dense()).min())
            if floor < -1e-10:
                raise DomainError(f"density matrix has eigenvalue {floor:.3e} below floor")


def choose_dim(mean: float, tail: float = DEFAULT_TAIL, cap: int = DIM_CAP) -> int:
    """Smallest per-mode dimension whose thermal tail at ``mean`` is below ``tail``.

    Uses the geometric tail (mean/(1+mean))^dim of a thermal distribution.

    Raises:
        TruncationError: if the required dimension exceeds ``cap``.
    """
    if not math.isfinite(mean) or mean < 0:
        raise DomainError(f"mean must be finite and >= 0, got {mean!r}")
    if not (0.0 < tail < 1.0):
        raise DomainError(f"tail must be in (0, 1), got {tail!r}")
    if mean == 0.0:
        return 8
    q = mean / (1.0 + mean)
    needed = max(8, int(math.ceil(math.log(tail) / math.log(q))))
    if needed > cap:
        raise TruncationError(
            f"a thermal tail below {tail:g} at mean {mean:g} needs dim {needed}, "
            f"over the cap of {cap}; lower the gain or mean, or raise the cap",
            achieved=q**cap,
            suggested_dim=needed,
        )
    return needed


def space_for_squeezed_thermal(
    n_bar: float, g: float, tail: float = DEFAULT_TAIL, cap: int = DIM_CAP
) -> FockSpace:
    """Truncation sized a priori for squeezing thermal light against vacuum.

    The output marginal is thermal at cosh(g)^2 n + sinh(g)^2, so the
    geometric tail rule applies to that mean.  The sizing is a-priori only;
    :func:`two_mode_squeeze` re-checks the realized boundary mass.
    """
    mean_out = math.cosh(g) ** 2 * n_bar + math.sinh(g) ** 2
    return FockSpace(choose_dim(mean_out, tail, cap))


def thermal_state(n_bar: float, space: FockSpace) -> FockState:
    """Single-mode thermal state, diagonal p_n = N^n / (1+N)^(n+1), n < dim.

    The retained block keeps the exact geometric weights; the tail mass
    (N/(1+N))^dim is reported as the trace deficit.
    """
    if not math.isfinite(n_bar) or n_bar < 0:
        raise DomainError(f"mean photon number must be finite and >= 0, got {n_bar!r}")
    dim = space.dim
    if n_bar == 0.0:
        probs = np.zeros(dim)
        probs[0] = 1.0
        deficit = 0.0
    else:
        q = n_bar / (1.0 + n_bar)
        probs = (1.0 - q) * q ** np.arange(dim)
        deficit = q**dim
    rho = sp.diags(probs, format="csr")
    return FockState(rho, (dim,), deficit)


def vacuum_state(space: FockSpace) -> FockState:
    return thermal_state(0.0, space)


def product_state(a: FockState, b: FockState) -> FockState:
    """Tensor product of two single-mode states (mode order preserved)."""
    if a.n_modes != 1 or b.n_modes != 1:
        raise DomainError("product_state expects two single-mode states")
    if a.dim != b.dim:
        raise DomainError(f"per-mode dims must match, got {a.dim} and {b.dim}")
    rho = sp.kron(a.rho, b.rho, format="csr")
    deficit = 1.0 - (1.0 - a.trace_deficit) * (1.0 - b.trace_deficit)
    return FockState(rho, (a.dim, b.dim), deficit)


def destroy(dim: int) -> sp.csr_matrix:
    """Single-mode annihilation operator on ``dim`` Fock levels."""
    return sp.diags(np.sqrt(np.arange(1.0, dim)), offsets=1, format="csr")


def number_operator(dim: int) -> sp.csr_matrix:
    return sp.diags(np.arange(float(dim)), format="csr")


def expm_taylor(matrix: np.ndarray, series_tol: float = 1e-16) -> np.ndarray:
    """Dense matrix exponential by scaling and squaring with a Taylor series.

    The matrix is scaled by powers of two until its 1-norm is below 0.5,
    the series is summed until terms fall under ``series_tol`` relative to
    the accumulated result, and the result is squared back up.
    """
    a = np.asarray(matrix, dtype=float if np.isrealobj(matrix) else complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"matrix must be square, got shape {a.shape}")
    norm = np.linalg.norm(a, 1)
    squarings = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    scaled = a / (2.0**squarings)
    result = np.eye(a.shape[0], dtype=scaled.dtype)
    term = np.eye(a.shape[0], dtype=scaled.dtype)
    for k in range(1, 64):
        term = term @ scaled / k
        result = result + term
        if np.linalg.norm(term, 1) <= series_tol * np.linalg.norm(result, 1):
            break
    for _ in range(squarings):
        result = result @ result
    return result


@lru_cache(maxsize=16)
def _squeeze_propagator(dim: int, g: float) -> sp.csr_matrix:
    """exp(g (adag bdag - a b)) on the truncated two-mode space.

    The generator only couples states of fixed photon-number difference, so
    it is block diagonal over difference ladders; each ladder gives a small
    real antisymmetric tridiagonal block whose exponential is orthogonal.
    The blocks for difference +d and -d coincide up to the mode swap and
    are computed once.
    """
    rows, cols, vals = [], [], []
    for d in range(dim):
        length = dim - d
        n_upper = np.arange(d, dim)  # signal-mode occupation along the ladder
        n_lower = n_upper - d
        couplings = g * np.sqrt((n_upper[:-1] + 1.0) * (n_lower[:-1] + 1.0))
        block = np.zeros((length, length))
        block[np.arange(1, length), np.arange(length - 1)] = couplings
        block[np.arange(length - 1), np.arange(1, length)] = -couplings
        exp_block = expm_taylor(block)
        for flip in (False, True):
            if flip and d == 0:
                continue
            idx = (n_lower * dim + n_upper) if flip else (n_upper * dim + n_lower)
            r, c = np.meshgrid(idx, idx, indexing="ij")
            rows.append(r.ravel())
            cols.append(c.ravel())
            vals.append(exp_block.ravel())
    side = dim * dim
    propagator = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(side, side),
    )
    return propagator


def two_mode_squeeze(
    state: FockState,
    g: float,
    space: FockSpace | None = None,
    max_tail: float = 1e-9,
) -> FockState:
    """Apply the two-mode squeezer with gain ``g`` to a two-mode state.

    The propagator is orthogonal on the retained block, so the trace and
    therefore the stored deficit are preserved exactly.  Truncation quality
    is verified a posteriori: the input deficit plus the realized boundary
    shell mass must stay below ``max_tail``.  ``space``, when given, must
    match the state and supplies the operator footprint cap.

    Raises:
        TruncationError: when the combined tail estimate exceeds
            ``max_tail``; the error suggests a larger dimension.
    """
    if state.n_modes != 2:
        raise DomainError("two_mode_squeeze expects a two-mode state")
    if not math.isfinite(g) or g < 0:
        raise DomainError(f"gain must be finite and >= 0, got {g!r}")
    dim = state.dim
    if space is None:
        space = FockSpace(dim)
    elif space.dim != dim:
        raise DomainError(f"space dim {space.dim} does not match state dim {dim}")
    space.check_two_mode_footprint(2 * dim**3 // 3 + dim**2)
    propagator = _squeeze_propagator(dim, float(g))
    rho_out = (propagator @ state.rho @ propagator.T).tocsr()
    out = FockState(rho_out, state.dims, state.trace_deficit)

    tail_estimate = state.trace_deficit + out.boundary_mass()
    if tail_estimate > max_tail:
        mean_out = float(
            (out.rho.diagonal().real * (np.arange(dim * dim) // dim)).sum()
        )
        suggestion = None
        if 0.0 < mean_out:
            q = mean_out / (1.0 + mean_out)
            suggestion = int(math.ceil(math.log(max_tail / 100.0) / math.log(q)))
        raise TruncationError(
            f"truncation tail estimate {tail_estimate:.3e} exceeds bound "
            f"{max_tail:.3e} after squeezing at g={g}"
            + (f"; retry with dim >= {suggestion}" if suggestion else ""),
            achieved=tail_estimate,
            suggested_dim=suggestion,
        )
    return out


def partial_trace(state: FockState, mode: int) -> FockState:
    """Reduce a two-mode state to the given mode (0 or 1)."""
    if state.n_modes != 2:
        raise DomainError("partial_trace expects a two-mode state")
    if mode not in (0, 1):
        raise DomainError(f"mode must be 0 or 1, got {mode!r}")
    dim = state.dim
    coo = state.rho.tocoo()
    row_kept, row_other = divmod(coo.row, dim)
    col_kept, col_other = divmod(coo.col, dim)
    if mode == 1:
        row_kept, row_other = row_other, row_kept
        col_kept, col_other = col_other, col_kept
    keep = row_other == col_other
    reduced = np.zeros((dim, dim), dtype=coo.data.dtype)
    np.add.at(reduced, (row_kept[keep], col_kept[keep]), coo.data[keep])
    return FockState(sp.csr_matrix(reduced), (dim,), state.trace_deficit)


def reduced_moments(state: FockState, mode: int = 0) -> MomentVector:
    """Photon-number moments <n^j>, j = 1..4, of one mode of a state.

    Only the joint diagonal enters, so no explicit partial trace is needed.
    The truncation error of the result is bounded by
    :func:`moment_truncation_bound`.
    """
    diag = state.rho.diagonal().real
    if state.n_modes == 1:
        if mode != 0:
            raise DomainError(f"single-mode state has only mode 0, got {mode!r}")
        occupation = np.arange(state.dim, dtype=float)
    else:
        if mode not in (0, 1):
            raise DomainError(f"mode must be 0 or 1, got {mode!r}")
        idx = np.arange(state.dim * state.dim)
        occupation = (idx // state.dim if mode == 0 else idx % state.dim).astype(float)
    return MomentVector(*(float((diag * occupation**j).sum()) for j in (1, 2, 3, 4)))


def moment_truncation_bound(state: FockState, order: int = 4) -> float:
    """Crude bound on the truncation error of a reduced moment of given order.

    The mass unaccounted for (deficit plus boundary shell) is weighted by
    the largest retained occupation to the moment's power.
    """
    missing = state.trace_deficit + state.boundary_mass()
    return missing * float(state.dim - 1) ** order


def _mode_op(op_a, op_b, dim: int) -> sp.csr_matrix:
    eye = sp.identity(dim, format="csr")
    left = op_a if op_a is not None else eye
    right = op_b if op_b is not None else eye
    return sp.kron(left, right, format="csr")


def _diag_expectation(prob_diag: np.ndarray, operator: sp.spmatrix) -> complex:
    # Tr(rho O) for diagonal rho.
    return complex((prob_diag * operator.diagonal()).sum())


def _product_diagonal(x: sp.spmatrix, y: sp.spmatrix) -> np.ndarray:
    # diag(X @ Y) without forming the product.
    return np.asarray(x.multiply(y.T).sum(axis=1)).ravel()


def hbt_two_mode_correlation(
    n_bar: float,
    m_bar: float,
    delta: float,
    space: FockSpace | None = None,
    ordering: OrderingConvention = OrderingConvention.NORMAL_ORDERED,
) -> tuple[float, float]:
    """Two-detector intensity correlator on thermal light, from the matrices.

    Each detector sees the superposition field A_j = a e^(i delta_j) + b
    with delta_1 - delta_2 = ``delta`` and measures I_j = Adag_j A_j.  The
    function returns (<I1 I2>, Var(I1 I2)) on thermal(n_bar) x
    thermal(m_bar) under the requested ordering convention:

    * NORMAL_ORDERED evaluates (n_a + n_b)^2 as written and normal-orders
      the mode-mixing interference monomials, reproducing the analytic
      correlation law in the corrected moment convention.
    * AS_WRITTEN evaluates the literal product I1 I2.  Its expectation
      exceeds the normal-ordered one by commutator terms proportional to
      (n_bar + m_bar) cos(delta); the antisymmetric imaginary part of the
      literal product is dropped from the returned reading.
    """
    for name, value in (("n_bar", n_bar), ("m_bar", m_bar)):
        if not math.isfinite(value) or value < 0:
            raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
    if space is None:
        space = FockSpace(choose_dim(max(n_bar, m_bar)))
    dim = space.dim
    space.check_two_mode_footprint(40 * dim * dim)

    rho = product_state(thermal_state(n_bar, space), thermal_state(m_bar, space))
    prob = rho.rho.diagonal().real

    a = destroy(dim)
    ad = a.T.tocsr()
    n_op = number_operator(dim)
    phase1 = np.exp(1j * float(delta))

    if ordering is OrderingConvention.AS_WRITTEN:
        field1 = _mode_op(a, None, dim) * phase1 + _mode_op(None, a, dim)
        field2 = _mode_op(a, None, dim) + _mode_op(None, a, dim)
        i1 = (field1.getH() @ field1).tocsr()
        i2 = (field2.getH() @ field2).tocsr()
        product = (i1 @ i2).tocsr()
        c0 = _diag_expectation(prob, product).real
        second = float((prob * _product_diagonal(product, product)).sum().real)
        return c0, second - c0**2

    if ordering is not OrderingConvention.NORMAL_ORDERED:
        raise DomainError(f"unknown ordering convention {ordering!r}")

    total_number = _mode_op(n_op, None, dim) + _mode_op(None, n_op, dim)
    direct = (total_number @ total_number).tocsr()

    # Normal-ordered interference monomials.  Phases: detector j contributes
    # adag b e^(-i delta_j) + bdag a e^(+i delta_j), with delta_2 = 0.
    ad2a = (ad @ ad @ a).tocsr()
    ada2 = (ad @ a @ a).tocsr()
    ad2 = (ad @ ad).tocsr()
    a2 = (a @ a).tocsr()
    adaa_b = _mode_op(ad2a, a, dim)  # adag adag a (x) b
    ad_bd_b2 = _mode_op(ad, (ad @ a @ a).tocsr(), dim)  # adag (x) bdag b b
    ada2_bd = _mode_op(ada2, ad, dim)  # adag a a (x) bdag
    a_bd2b = _mode_op(a, (ad @ ad @ a).tocsr(), dim)  # a (x) bdag bdag b
    mixing_lower = adaa_b + ad_bd_b2  # lowers the mode-a excess by one
    mixing_raise = ada2_bd + a_bd2b

    interference = (
        _mode_op(ad2, a2, dim) * np.conj(phase1)  # double transfer b -> a
        + _mode_op(n_op, n_op, dim) * (phase1 + np.conj(phase1))
        + _mode_op(a2, ad2, dim) * phase1  # double transfer a -> b
        + mixing_lower * (np.conj(phase1) + 1.0)  # single transfers, X1 and X2
        + mixing_raise * (phase1 + 1.0)
    )
    correlator = (direct + interference).tocsr()
    c0 = _diag_expectation(prob, correlator).real
    second = float((prob * _product_diagonal(correlator, correlator)).sum().real)
    return c0, second - c0**2
