"""
Truncated-Fock-space numerics: states, elementary operators, tensor
embedding, expectations, spectra and quadrature probability densities.

Conventions, fixed project-wide:

- hbar = 1, x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(sqrt(2) i)
- x_theta = cos(theta) x + sin(theta) p = exp(i theta n) x exp(-i theta n)
- S(r) = exp((r^* a^2 - r a^dag^2)/2), so S(r)|0> is x-squeezed for r > 0:
  <x^2> = exp(-2r)/2
- D(alpha) = exp(alpha a^dag - alpha^* a) shifts x by sqrt(2) Re(alpha)
- multimode bases are flattened in C order: mode 0 is the slowest index

>>> a = build_elementary_operator('annihilation', 3).matrix
>>> a.real.round(4).tolist()
[[0.0, 1.0, 0.0], [0.0, 0.0, 1.4142], [0.0, 0.0, 0.0]]
>>> vacuum = FockVector.basis(0, cutoff=10)
>>> round(expectation(vacuum, build_elementary_operator('quadrature', 10, 0.0)).real, 12)
0.0
>>> round(expectation(vacuum, build_elementary_operator('number', 10)).real, 12)
0.0
"""
from __future__ import annotations

import dataclasses
import enum
import functools
import math
from typing import Any, Optional, Sequence, Union

import np_logging
import numpy as np
import scipy.integrate
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from bosonic_cert.exceptions import (
    InvalidCompositionError,
    InvalidDimensionError,
    InvalidParameterError,
    NormalizationError,
    NumericsError,
    ResourceLimitError,
    TruncationError,
)
from bosonic_cert.types import ComplexArray, RealArray
from bosonic_cert.utils import CONFIG

logger = np_logging.getLogger(__name__)


class OperatorKind(str, enum.Enum):
    ANNIHILATION = 'annihilation'
    CREATION = 'creation'
    QUADRATURE = 'quadrature'
    NUMBER = 'number'
    PARITY = 'parity'
    DISPLACEMENT = 'displacement'
    SQUEEZE = 'squeeze'
    IDENTITY = 'identity'


HERMITIAN_KINDS = frozenset(
    {OperatorKind.QUADRATURE, OperatorKind.NUMBER, OperatorKind.PARITY, OperatorKind.IDENTITY}
)

IDENTITY = None
"""Marker for an identity factor in `tensor_embed`."""


def validate_dimensions(cutoff: int, n_modes: int = 1) -> None:
    if int(cutoff) != cutoff or cutoff < 2:
        raise InvalidDimensionError('cutoff', f'cutoff must be an integer >= 2: {cutoff=}')
    if int(n_modes) != n_modes or n_modes < 1:
        raise InvalidDimensionError('n_modes', f'n_modes must be a positive integer: {n_modes=}')


def tail_level(cutoff: int) -> int:
    """First number level counted as truncation tail.

    >>> tail_level(40)
    30
    """
    return int(math.floor(CONFIG['tail_level_fraction'] * cutoff))


def _tail_weight(components: np.ndarray, cutoff: int, n_modes: int) -> float:
    probabilities = (np.abs(components) ** 2).sum(axis=0).reshape((cutoff,) * n_modes)
    level = tail_level(cutoff)
    inner = probabilities[(slice(0, level),) * n_modes].sum()
    return max(0.0, float(probabilities.sum() - inner))


# states -------------------------------------------------------------------- #

@dataclasses.dataclass(frozen=True, eq=False)
class FockVector:
    """Pure state in the truncated number basis. Renormalized on construction.

    >>> psi = FockVector([3, 4j], cutoff=2)
    >>> psi.amplitudes.round(3).tolist()
    [(0.6+0j), 0.8j]
    """

    amplitudes: ComplexArray
    cutoff: int
    n_modes: int = 1

    def __post_init__(self) -> None:
        validate_dimensions(self.cutoff, self.n_modes)
        amplitudes = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amplitudes.size != self.cutoff**self.n_modes:
            raise InvalidDimensionError(
                'amplitudes',
                f'expected {self.cutoff ** self.n_modes} amplitudes, got {amplitudes.size}',
            )
        norm = float(np.linalg.norm(amplitudes))
        if not np.isfinite(norm) or norm == 0:
            raise NormalizationError('amplitudes', f'cannot normalize state with norm {norm}')
        if abs(norm - 1) > 4 * np.finfo(float).eps:
            amplitudes /= norm
        amplitudes.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amplitudes)

    @classmethod
    def basis(cls, n: int | Sequence[int], cutoff: int) -> FockVector:
        """Number state |n> (or |n_0, n_1, ...> for a sequence).

        >>> FockVector.basis((1, 2), cutoff=3).amplitudes.real.tolist()
        [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]
        """
        levels = (n,) if np.isscalar(n) else tuple(n)
        if any(not 0 <= level < cutoff for level in levels):
            raise InvalidDimensionError('n', f'level outside truncation: {levels=} {cutoff=}')
        tensor = np.zeros((cutoff,) * len(levels), dtype=np.complex128)
        tensor[tuple(levels)] = 1
        return cls(tensor.reshape(-1), cutoff, len(levels))

    @classmethod
    def product(cls, states: Sequence[FockVector]) -> FockVector:
        """Tensor product in mode order."""
        if not states:
            raise InvalidCompositionError('states', 'empty product')
        cutoff = states[0].cutoff
        if any(s.cutoff != cutoff for s in states):
            raise InvalidCompositionError('states', 'all factors must share one cutoff')
        amplitudes = functools.reduce(np.kron, (s.amplitudes for s in states))
        return cls(amplitudes, cutoff, sum(s.n_modes for s in states))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def tensor(self) -> ComplexArray:
        """Amplitudes with one axis per mode."""
        return self.amplitudes.reshape((self.cutoff,) * self.n_modes)

    @property
    def components(self) -> ComplexArray:
        return self.amplitudes[None, :]

    @functools.cached_property
    def tail_weight(self) -> float:
        return _tail_weight(self.components, self.cutoff, self.n_modes)

    def overlap(self, other: FockVector) -> complex:
        """<self|other>."""
        if other.dim != self.dim:
            raise InvalidDimensionError('other', 'dimension mismatch')
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclasses.dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Mixed state stored as unnormalized pure components,
    rho = sum_k |v_k><v_k|. The dense matrix is built on demand.

    >>> rho = DensityMatrix.from_matrix(np.diag([0.25, 0.75]), cutoff=2)
    >>> bool(np.allclose(rho.matrix, np.diag([0.25, 0.75])))
    True
    """

    components: ComplexArray
    cutoff: int
    n_modes: int = 1

    def __post_init__(self) -> None:
        validate_dimensions(self.cutoff, self.n_modes)
        components = np.array(self.components, dtype=np.complex128)
        components = components.reshape(-1, self.cutoff**self.n_modes)
        trace = float((np.abs(components) ** 2).sum())
        if not np.isfinite(trace) or trace <= 0:
            raise NormalizationError('components', f'trace must be positive, got {trace}')
        if abs(trace - 1) > 4 * np.finfo(float).eps:
            components /= math.sqrt(trace)
        components.setflags(write=False)
        object.__setattr__(self, 'components', components)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, cutoff: int, n_modes: int = 1) -> DensityMatrix:
        matrix = np.asarray(matrix, dtype=np.complex128)
        scale = max(1.0, float(np.linalg.norm(matrix)))
        if np.linalg.norm(matrix - matrix.conj().T) > 1e-12 * scale:
            raise NumericsError('matrix', 'density matrix is not Hermitian')
        values, vectors = scipy.linalg.eigh(matrix)
        if values.min() < -1e-10:
            raise NumericsError('matrix', f'negative eigenvalue {values.min():.3e}')
        keep = values > 1e-15
        components = np.sqrt(values[keep])[:, None] * vectors[:, keep].T
        return cls(components, cutoff, n_modes)

    @classmethod
    def from_state(cls, state: FockVector | DensityMatrix) -> DensityMatrix:
        if isinstance(state, DensityMatrix):
            return state
        return cls(state.components, state.cutoff, state.n_modes)

    @property
    def dim(self) -> int:
        return self.components.shape[1]

    @property
    def rank(self) -> int:
        return self.components.shape[0]

    @functools.cached_property
    def matrix(self) -> ComplexArray:
        if self.dim > CONFIG['dense_dimension_limit']:
            raise ResourceLimitError(
                'dim', f'refusing to materialize a {self.dim}x{self.dim} density matrix'
            )
        matrix = self.components.T @ self.components.conj()
        matrix.setflags(write=False)
        return matrix

    @functools.cached_property
    def tail_weight(self) -> float:
        return _tail_weight(self.components, self.cutoff, self.n_modes)

    @property
    def purity(self) -> float:
        gram = self.components.conj() @ self.components.T
        return float(np.real(np.sum(np.abs(gram) ** 2)))


State = Union[FockVector, DensityMatrix]


def check_truncation(state: State, override: bool = False) -> float:
    """Refuse states with tail weight above `CONFIG['tail_threshold']`.
    Returns the tail weight."""
    tail = state.tail_weight
    if tail > CONFIG['tail_threshold']:
        if not override:
            raise TruncationError(
                'cutoff',
                f'tail weight {tail:.3e} above threshold {CONFIG["tail_threshold"]:.1e}; '
                'increase cutoff or set override',
                tail_weight=tail,
                cutoff=state.cutoff,
            )
        logger.warning('Truncation guard overridden: tail weight %.3e', tail)
    return tail


# elementary operators ------------------------------------------------------ #

@functools.lru_cache(maxsize=1024)
def single_mode_matrix(symbol: str, cutoff: int, parameter: float = 0.0) -> ComplexArray:
    """Read-only truncated matrix of a ladder-algebra symbol.

    Symbols: 'a', 'ad', 'x' (rotated quadrature at angle `parameter`), 'n',
    'parity', 'id'.
    """
    validate_dimensions(cutoff)
    levels = np.arange(cutoff)
    if symbol == 'a':
        matrix = np.diag(np.sqrt(levels[1:]).astype(np.complex128), 1)
    elif symbol == 'ad':
        matrix = np.diag(np.sqrt(levels[1:]).astype(np.complex128), -1)
    elif symbol == 'x':
        a = single_mode_matrix('a', cutoff)
        phase = np.exp(-1j * parameter)
        matrix = (a * phase + a.T * phase.conjugate()) / math.sqrt(2)
    elif symbol == 'n':
        matrix = np.diag(levels.astype(np.complex128))
    elif symbol == 'parity':
        matrix = np.diag((-1.0) ** levels).astype(np.complex128)
    elif symbol == 'id':
        matrix = np.eye(cutoff, dtype=np.complex128)
    else:
        raise InvalidParameterError('symbol', f'unknown symbol {symbol!r}')
    matrix.setflags(write=False)
    return matrix


def displacement_matrix(alpha: complex, cutoff: int) -> ComplexArray:
    """exp(alpha a^dag - alpha^* a) by exact exponentiation of the truncated
    generator."""
    validate_dimensions(cutoff)
    alpha = complex(alpha)
    if abs(alpha) > cutoff / 4:
        raise TruncationError('alpha', f'|alpha| = {abs(alpha):.3f} exceeds cutoff/4 = {cutoff / 4}')
    a = single_mode_matrix('a', cutoff)
    return scipy.linalg.expm(alpha * a.T - alpha.conjugate() * a)


def squeeze_matrix(r: complex, cutoff: int) -> ComplexArray:
    """exp((r^* a^2 - r a^dag^2)/2) by exact exponentiation of the truncated
    generator."""
    validate_dimensions(cutoff)
    r = complex(r)
    if math.sinh(abs(r)) ** 2 > cutoff / 4:
        raise TruncationError('r', f'squeezing |r| = {abs(r):.3f} too large for {cutoff=}')
    a = single_mode_matrix('a', cutoff)
    a2 = a @ a
    return scipy.linalg.expm(0.5 * (r.conjugate() * a2 - r * a2.T))


@dataclasses.dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Operator on the truncated space; dense ndarray or scipy sparse matrix."""

    matrix: Any
    cutoff: int
    n_modes: int = 1
    hermitian_flag: bool = False

    def __post_init__(self) -> None:
        validate_dimensions(self.cutoff, self.n_modes)
        dim = self.cutoff**self.n_modes
        if self.matrix.shape != (dim, dim):
            raise InvalidDimensionError(
                'matrix', f'expected shape {(dim, dim)}, got {self.matrix.shape}'
            )
        if self.hermitian_flag:
            norm = _frobenius(self.matrix)
            if _frobenius(self.matrix - self.matrix.conj().T) > CONFIG['hermitian_tolerance'] * max(norm, 1e-300):
                raise NumericsError('matrix', 'operator flagged Hermitian is not Hermitian')

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_sparse(self) -> bool:
        return scipy.sparse.issparse(self.matrix)

    def dense(self) -> ComplexArray:
        if not self.is_sparse:
            return np.asarray(self.matrix)
        if self.dim > CONFIG['dense_dimension_limit']:
            raise ResourceLimitError('dim', f'refusing to densify a {self.dim}-dimensional operator')
        return self.matrix.toarray()


def _frobenius(matrix: Any) -> float:
    if scipy.sparse.issparse(matrix):
        return float(scipy.sparse.linalg.norm(matrix))
    return float(np.linalg.norm(matrix))


def build_elementary_operator(
    kind: OperatorKind | str,
    cutoff: int,
    parameter: complex = 0.0,
) -> OperatorMatrix:
    """Standard truncated matrix of `kind`.

    `parameter` is the angle for quadratures, alpha for displacements and r for
    squeezing.

    >>> d = build_elementary_operator('displacement', 40, 1.0).matrix
    >>> round(abs(d[1, 0]) ** 2, 4)
    0.3679
    """
    kind = OperatorKind(kind)
    if kind is OperatorKind.DISPLACEMENT:
        matrix = displacement_matrix(parameter, cutoff)
    elif kind is OperatorKind.SQUEEZE:
        matrix = squeeze_matrix(parameter, cutoff)
    else:
        symbol = {
            OperatorKind.ANNIHILATION: 'a',
            OperatorKind.CREATION: 'ad',
            OperatorKind.QUADRATURE: 'x',
            OperatorKind.NUMBER: 'n',
            OperatorKind.PARITY: 'parity',
            OperatorKind.IDENTITY: 'id',
        }[kind]
        angle = float(np.real(parameter)) if kind is OperatorKind.QUADRATURE else 0.0
        matrix = np.array(single_mode_matrix(symbol, cutoff, angle))
    return OperatorMatrix(matrix, cutoff, 1, kind in HERMITIAN_KINDS)


def tensor_embed(
    per_mode_ops: Sequence[Optional[OperatorMatrix]],
    cutoff: Optional[int] = None,
) -> OperatorMatrix:
    """Kronecker product in mode order (mode 0 = slowest index). `None`
    (`IDENTITY`) entries are identities.

    Above `dense_dimension_limit` the result is a CSR sparse matrix.

    >>> n = build_elementary_operator('number', 3)
    >>> nn = tensor_embed([n, n])
    >>> state = FockVector.basis((1, 2), cutoff=3)
    >>> round(expectation(state, nn).real, 12)
    2.0
    """
    cutoffs = {op.cutoff for op in per_mode_ops if op is not None}
    if cutoff is not None:
        cutoffs.add(cutoff)
    if len(cutoffs) != 1:
        raise InvalidCompositionError('per_mode_ops', f'need exactly one shared cutoff, got {cutoffs}')
    (cutoff,) = cutoffs
    if any(op is not None and op.n_modes != 1 for op in per_mode_ops):
        raise InvalidCompositionError('per_mode_ops', 'factors must be single-mode operators')
    n_modes = len(per_mode_ops)
    sparse = cutoff**n_modes > CONFIG['dense_dimension_limit']
    factors = []
    for op in per_mode_ops:
        if op is None:
            factors.append(scipy.sparse.identity(cutoff, dtype=np.complex128, format='csr') if sparse else np.eye(cutoff))
        else:
            factors.append(scipy.sparse.csr_matrix(op.dense()) if sparse else op.dense())
    if sparse:
        matrix = functools.reduce(lambda x, y: scipy.sparse.kron(x, y, format='csr'), factors)
    else:
        matrix = functools.reduce(np.kron, factors)
    hermitian = all(op is None or op.hermitian_flag for op in per_mode_ops)
    return OperatorMatrix(matrix, cutoff, n_modes, hermitian)


def expectation(state: State, op: OperatorMatrix) -> complex:
    """tr(rho Op). Raises `NumericsError` if a Hermitian operator yields a
    non-real value.

    >>> round(expectation(FockVector.basis(3, 6), build_elementary_operator('number', 6)).real, 12)
    3.0
    """
    if state.cutoff != op.cutoff or state.n_modes != op.n_modes:
        raise InvalidDimensionError(
            'op', f'state ({state.cutoff}, {state.n_modes}) vs op ({op.cutoff}, {op.n_modes})'
        )
    components = state.components
    applied = op.matrix @ components.T
    value = complex(np.sum(components.conj().T * applied))
    if op.hermitian_flag:
        tolerance = CONFIG['expectation_imag_tolerance'] * max(1.0, abs(value.real))
        if abs(value.imag) > tolerance:
            raise NumericsError('op', f'non-real expectation {value} of a Hermitian operator')
    return value


def eigendecompose(op: OperatorMatrix) -> tuple[RealArray, ComplexArray]:
    """Ascending eigenvalues and eigenvectors (columns) of a Hermitian
    operator.

    >>> values, _ = eigendecompose(build_elementary_operator('number', 4))
    >>> bool(np.allclose(values, [0, 1, 2, 3]))
    True
    """
    if not op.hermitian_flag:
        raise InvalidParameterError('op', 'eigendecompose requires a Hermitian operator')
    matrix = op.dense()
    values, vectors = scipy.linalg.eigh(matrix)
    scale = max(float(np.abs(values).max()), 1e-300)
    residuals = np.linalg.norm(matrix @ vectors - vectors * values, axis=0)
    if residuals.max() > 1e-8 * scale:
        raise NumericsError('op', f'eigen-residual {residuals.max():.3e} too large')
    return values, vectors


def projector_distance(basis_a: np.ndarray, basis_b: np.ndarray) -> float:
    """Trace distance between projectors onto the column spans of two bases.
    Degenerate subspaces are compared this way rather than vector by vector.

    >>> e = np.eye(3)
    >>> projector_distance(e[:, :2], e[:, [1, 0]])
    0.0
    """
    qa = scipy.linalg.orth(np.asarray(basis_a))
    qb = scipy.linalg.orth(np.asarray(basis_b))
    difference = qa @ qa.conj().T - qb @ qb.conj().T
    return round(0.5 * float(np.abs(scipy.linalg.eigvalsh(difference)).sum()), 15)


# mode-local application ---------------------------------------------------- #

def apply_on_mode(matrix: np.ndarray, tensor: np.ndarray, mode: int) -> np.ndarray:
    """Apply a (possibly rectangular) single-mode matrix to axis `mode` of a
    state tensor, never forming the multimode operator."""
    out = np.tensordot(matrix, tensor, axes=([1], [mode]))
    return np.moveaxis(out, 0, mode)


def resize_tensor(tensor: np.ndarray, cutoff: int) -> np.ndarray:
    """Zero-pad or crop every axis of a state tensor to `cutoff`."""
    out = np.zeros((cutoff,) * tensor.ndim, dtype=np.complex128)
    keep = tuple(slice(0, min(cutoff, size)) for size in tensor.shape)
    out[keep] = tensor[keep]
    return out


def coherent_amplitudes(alpha: complex, cutoff: int) -> ComplexArray:
    """Number-basis amplitudes of |alpha>, not renormalized after truncation.

    >>> coherent_amplitudes(0, 3).real.tolist()
    [1.0, 0.0, 0.0]
    """
    alpha = complex(alpha)
    amplitudes = np.empty(cutoff, dtype=np.complex128)
    amplitudes[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, cutoff):
        amplitudes[n] = amplitudes[n - 1] * alpha / math.sqrt(n)
    return amplitudes


# quadrature densities ------------------------------------------------------ #

@dataclasses.dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Probability density of one rotated quadrature on a uniform grid."""

    points: RealArray
    density: RealArray
    angle: float

    def __post_init__(self) -> None:
        if np.any(self.density < -1e-12):
            raise NumericsError('density', 'negative density')
        total = float(scipy.integrate.trapezoid(self.density, self.points))
        if abs(total - 1) > 1e-6:
            raise NormalizationError(
                'grid', f'density integrates to {total:.9f}; grid too coarse or too narrow'
            )

    @property
    def spacing(self) -> float:
        return float(self.points[1] - self.points[0])

    def moment(self, k: int) -> float:
        return float(scipy.integrate.trapezoid(self.density * self.points**k, self.points))

    def peaks(self, min_height: float = 0.05) -> RealArray:
        """Positions of local maxima above `min_height * max(density)`."""
        d = self.density
        interior = (d[1:-1] > d[:-2]) & (d[1:-1] >= d[2:]) & (d[1:-1] > min_height * d.max())
        return self.points[1:-1][interior]


def quadrature_grid(
    cutoff: int,
    spacing: Optional[float] = None,
    margin: Optional[float] = None,
) -> RealArray:
    """Uniform grid covering +-(sqrt(2 cutoff) + margin) with at most
    `spacing` between points."""
    spacing = float(spacing or CONFIG['pdf_grid_spacing'])
    margin = CONFIG['pdf_grid_margin'] if margin is None else float(margin)
    half_width = math.sqrt(2 * cutoff) + margin
    n_points = int(math.ceil(2 * half_width / spacing)) + 1
    return np.linspace(-half_width, half_width, n_points)


def hermite_functions(n_max: int, x: np.ndarray) -> RealArray:
    """Oscillator eigenfunctions phi_0..phi_{n_max-1} evaluated at `x`, by the
    stable three-term recurrence. Shape (n_max, len(x)).

    >>> x = np.linspace(-8, 8, 4001)
    >>> phi = hermite_functions(3, x)
    >>> [round(float(scipy.integrate.trapezoid(p * p, x)), 8) for p in phi]
    [1.0, 1.0, 1.0]
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.empty((n_max, x.size))
    out[0] = np.pi**-0.25 * np.exp(-(x**2) / 2)
    if n_max > 1:
        out[1] = math.sqrt(2) * x * out[0]
    for n in range(1, n_max - 1):
        out[n + 1] = math.sqrt(2 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


@functools.lru_cache(maxsize=32)
def grid_basis(cutoff: int, spacing: float, margin: float) -> tuple[RealArray, RealArray]:
    points = quadrature_grid(cutoff, spacing, margin)
    phi = hermite_functions(cutoff, points)
    points.setflags(write=False)
    phi.setflags(write=False)
    return points, phi


@functools.lru_cache(maxsize=16)
def position_eigenbasis(cutoff: int) -> tuple[RealArray, ComplexArray]:
    """Nodes and eigenvectors (columns) of the truncated position operator.

    Functions of x act diagonally in this basis; for states supported well
    below `cutoff` the result agrees with the untruncated operator.

    >>> nodes, _ = position_eigenbasis(3)
    >>> bool(np.allclose(nodes, [-np.sqrt(1.5), 0, np.sqrt(1.5)]))
    True
    """
    nodes, vectors = scipy.linalg.eigh(single_mode_matrix('x', cutoff))
    nodes.setflags(write=False)
    vectors.setflags(write=False)
    return nodes, vectors


def rotation_phases(angle: float, cutoff: int) -> ComplexArray:
    """exp(-i angle n): amplitudes of x_angle in the x representation."""
    return np.exp(-1j * angle * np.arange(cutoff))


def quadrature_pdf(
    state: State,
    angle: float,
    mode: int = 0,
    spacing: Optional[float] = None,
    margin: Optional[float] = None,
) -> QuadratureGrid:
    """Single-mode marginal density of x_angle on `mode`:
    |sum_n c_n exp(-i angle n) phi_n(x)|^2, summed over the other modes and
    over mixture components. Joint multimode densities are not formed; use
    `quadrature_pdfs` for one marginal per mode.

    >>> grid = quadrature_pdf(FockVector.basis(0, 10), 0.0)
    >>> round(grid.moment(2), 6)
    0.5
    """
    cutoff, n_modes = state.cutoff, state.n_modes
    if not 0 <= mode < n_modes:
        raise InvalidDimensionError('mode', f'{mode=} outside {n_modes=}')
    spacing = float(spacing or CONFIG['pdf_grid_spacing'])
    margin = float(CONFIG['pdf_grid_margin'] if margin is None else margin)
    points, phi = grid_basis(cutoff, spacing, margin)
    phases = rotation_phases(angle, cutoff)
    density = np.zeros(points.size)
    for component in state.components:
        tensor = np.moveaxis(component.reshape((cutoff,) * n_modes), mode, 0).reshape(cutoff, -1)
        psi = phi.T @ (tensor * phases[:, None])
        density += (np.abs(psi) ** 2).sum(axis=1)
    return QuadratureGrid(np.array(points), density, float(angle))


def quadrature_pdfs(state: State, angles: Sequence[float], **grid: Any) -> list[QuadratureGrid]:
    """Per-mode marginal densities, one angle per mode."""
    if len(angles) != state.n_modes:
        raise InvalidDimensionError('angles', f'need {state.n_modes} angles, got {len(angles)}')
    return [quadrature_pdf(state, angle, mode, **grid) for mode, angle in enumerate(angles)]


if __name__ == '__main__':
    import doctest

    doctest.testmod()
