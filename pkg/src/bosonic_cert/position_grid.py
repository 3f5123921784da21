"""
Position-grid numerics for states whose features outrun a Fock cutoff.

A state is stored as psi(x) = exp(i Phi(x)) chi(x): the envelope `chi` is
sampled on a uniform grid per mode and `Phi` is a real polynomial. Gates
diagonal in position (CZ, Z, T) only add to `Phi`, so the envelope keeps the
bandwidth of the inputs.

Operators act on the envelope in the gauge of `Phi`, with spectral
derivatives:

    a psi     = exp(i Phi) (x chi + d chi + i dPhi chi) / sqrt(2)
    a^dag psi = exp(i Phi) (x chi - d chi - i dPhi chi) / sqrt(2)
    P_i psi   = exp(i Phi) exp(i (Phi(R_i x) - Phi(x))) chi(R_i x)

where R_i flips the sign of x_i. Products of many nullifier factors are then
applied one factor at a time with no truncation.

>>> grid = PositionGrid.covering(extent=10.0, bandwidth=10.0)
>>> vacuum = GridState.gaussian([grid], [1.0])
>>> abs(normal_form_expectation(vacuum, {((1, 1, 0),): 1.0})) < 1e-10
True
>>> abs(normal_form_expectation(vacuum, {((0, 0, 1),): 1.0}) - 1) < 1e-10
True
"""
from __future__ import annotations

import dataclasses
import functools
import math
from typing import Iterable, Mapping, Optional, Sequence

import np_logging
import numpy as np

from bosonic_cert.exceptions import (
    InvalidDimensionError,
    InvalidParameterError,
    NormalizationError,
    ResourceLimitError,
)
from bosonic_cert.fock_algebra import FockVector, apply_on_mode, hermite_functions
from bosonic_cert.types import ComplexArray, RealArray
from bosonic_cert.utils import CONFIG

logger = np_logging.getLogger(__name__)

SQRT2 = math.sqrt(2)

Exponents = tuple[int, ...]


@dataclasses.dataclass(frozen=True)
class PositionGrid:
    """`points` nodes, symmetric about zero, `spacing` apart.

    >>> PositionGrid(0.5, 5).nodes.tolist()
    [-1.0, -0.5, 0.0, 0.5, 1.0]
    """

    spacing: float
    points: int

    def __post_init__(self) -> None:
        if not self.spacing > 0:
            raise InvalidParameterError('spacing', f'grid spacing must be positive: {self.spacing}')
        if self.points < 3:
            raise InvalidDimensionError('points', f'grid needs at least 3 points: {self.points}')

    @classmethod
    def covering(cls, extent: float, bandwidth: float) -> PositionGrid:
        """Smallest odd grid reaching |x| <= extent and resolving
        wavenumbers up to `bandwidth`."""
        spacing = math.pi / bandwidth
        return cls(spacing, 2 * int(math.ceil(extent / spacing)) + 1)

    @classmethod
    def for_profile(cls, reach: float, x_width: float, p_width: float) -> PositionGrid:
        """Grid for features within |x| <= reach whose Gaussian tails have
        widths `x_width` in position and `p_width` in momentum, each resolved to
        `CONFIG['grid_decay']` widths."""
        decay = CONFIG['grid_decay']
        return cls.covering(reach + decay * x_width, decay * p_width)

    @classmethod
    def for_cutoff(cls, cutoff: int) -> PositionGrid:
        """Grid holding every oscillator eigenfunction below `cutoff`."""
        reach = math.sqrt(2 * cutoff + 1)
        return cls.for_profile(reach, 1.0, 1.0 + reach / CONFIG['grid_decay'])

    @functools.cached_property
    def nodes(self) -> RealArray:
        nodes = self.spacing * (np.arange(self.points) - (self.points - 1) / 2)
        nodes.setflags(write=False)
        return nodes

    @functools.cached_property
    def wavenumbers(self) -> RealArray:
        k = 2 * np.pi * np.fft.fftfreq(self.points, self.spacing)
        k.setflags(write=False)
        return k


def _axis_shape(axis: int, ndim: int) -> list[int]:
    return [-1 if i == axis else 1 for i in range(ndim)]


@dataclasses.dataclass(frozen=True, eq=False)
class PositionPhase:
    """Real polynomial sum_e c_e prod_i x_i^e_i.

    >>> phi = PositionPhase.monomial(2.0, (1, 1))
    >>> (phi + PositionPhase.monomial(1.0, (3, 0))).derivative(0).terms
    {(0, 1): 2.0, (2, 0): 3.0}
    """

    terms: Mapping[Exponents, float]
    n_modes: int

    @classmethod
    def zero(cls, n_modes: int) -> PositionPhase:
        return cls({}, n_modes)

    @classmethod
    def monomial(cls, coeff: float, exponents: Sequence[int]) -> PositionPhase:
        return cls({tuple(int(e) for e in exponents): float(coeff)}, len(exponents))

    @classmethod
    def univariate(cls, coefficients: Sequence[float], mode: int, n_modes: int) -> PositionPhase:
        """sum_k coefficients[k] x_mode^k."""
        terms = {}
        for power, coeff in enumerate(coefficients):
            if coeff:
                exponents = [0] * n_modes
                exponents[mode] = power
                terms[tuple(exponents)] = float(coeff)
        return cls(terms, n_modes)

    def __add__(self, other: PositionPhase) -> PositionPhase:
        if other.n_modes != self.n_modes:
            raise InvalidDimensionError('phase', f'cannot add phases on {self.n_modes} and {other.n_modes} modes')
        terms = dict(self.terms)
        for exponents, coeff in other.terms.items():
            terms[exponents] = terms.get(exponents, 0.0) + coeff
        return PositionPhase({e: c for e, c in terms.items() if c}, self.n_modes)

    def __mul__(self, scale: float) -> PositionPhase:
        return PositionPhase({e: c * scale for e, c in self.terms.items() if c * scale}, self.n_modes)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def embed(self, offset: int, n_modes: int) -> PositionPhase:
        """Same polynomial with mode i moved to mode offset + i."""
        terms = {}
        for exponents, coeff in self.terms.items():
            padded = [0] * n_modes
            padded[offset:offset + self.n_modes] = exponents
            terms[tuple(padded)] = coeff
        return PositionPhase(terms, n_modes)

    def derivative(self, mode: int) -> PositionPhase:
        terms: dict[Exponents, float] = {}
        for exponents, coeff in self.terms.items():
            power = exponents[mode]
            if power:
                lowered = exponents[:mode] + (power - 1,) + exponents[mode + 1:]
                terms[lowered] = terms.get(lowered, 0.0) + power * coeff
        return PositionPhase(terms, self.n_modes)

    def odd_part(self, mode: int) -> PositionPhase:
        """Terms odd in x_mode: Phi(R_mode x) - Phi(x) = -2 odd_part."""
        return PositionPhase({e: c for e, c in self.terms.items() if e[mode] % 2}, self.n_modes)

    def evaluate(self, grids: Sequence[PositionGrid]) -> RealArray:
        shape = tuple(g.points for g in grids)
        total = np.zeros(shape)
        for exponents, coeff in self.terms.items():
            term = np.full((1,) * len(grids), coeff)
            for axis, (grid, power) in enumerate(zip(grids, exponents)):
                if power:
                    term = term * (grid.nodes**power).reshape(_axis_shape(axis, len(grids)))
            total = total + term
        return total


def check_grid_size(grids: Sequence[PositionGrid]) -> None:
    total = math.prod(g.points for g in grids)
    if total > CONFIG['max_grid_points']:
        raise ResourceLimitError('grid', f'{total} grid points exceeds limit {CONFIG["max_grid_points"]}')


@dataclasses.dataclass(frozen=True, eq=False)
class GridState:
    """Pure multimode state exp(i phase) envelope on per-mode position grids.

    Operator images are bare envelopes in the gauge of the state they came
    from; `inner` pairs them.
    """

    grids: tuple[PositionGrid, ...]
    envelope: ComplexArray
    phase: PositionPhase

    def __post_init__(self) -> None:
        object.__setattr__(self, 'grids', tuple(self.grids))
        shape = tuple(g.points for g in self.grids)
        if self.envelope.shape != shape:
            raise InvalidDimensionError('envelope', f'envelope shape {self.envelope.shape} != grid shape {shape}')
        if self.phase.n_modes != len(self.grids):
            raise InvalidDimensionError('phase', f'phase on {self.phase.n_modes} modes, state on {len(self.grids)}')
        check_grid_size(self.grids)

    @classmethod
    def from_envelope(
        cls, grids: Sequence[PositionGrid], envelope: np.ndarray, phase: Optional[PositionPhase] = None
    ) -> GridState:
        """Normalized state with the given envelope."""
        state = cls(tuple(grids), np.asarray(envelope, dtype=np.complex128), phase or PositionPhase.zero(len(grids)))
        return state.normalized()

    @classmethod
    def gaussian(cls, grids: Sequence[PositionGrid], widths: Sequence[float]) -> GridState:
        """prod_i exp(-x_i^2 / (2 s_i^2)): the vacuum for s_i = 1, a
        momentum-squeezed vacuum for s_i > 1."""
        envelope = np.ones((1,) * len(grids))
        for axis, (grid, width) in enumerate(zip(grids, widths)):
            profile = np.exp(-(grid.nodes**2) / (2 * width**2))
            envelope = envelope * profile.reshape(_axis_shape(axis, len(grids)))
        return cls.from_envelope(grids, envelope)

    @classmethod
    def product(cls, states: Sequence[GridState]) -> GridState:
        """Tensor product; mode order follows `states`."""
        n_modes = sum(s.n_modes for s in states)
        check_grid_size([g for s in states for g in s.grids])
        grids: list[PositionGrid] = []
        phase = PositionPhase.zero(n_modes)
        envelope = np.ones(())
        for state in states:
            phase = phase + state.phase.embed(len(grids), n_modes)
            grids.extend(state.grids)
            envelope = np.multiply.outer(envelope, state.envelope)
        return cls(tuple(grids), envelope.astype(np.complex128), phase)

    @classmethod
    def from_fock(cls, state: FockVector, grids: Sequence[PositionGrid]) -> GridState:
        """psi(x) = sum_n c_n prod_i phi_{n_i}(x_i) sampled on `grids`."""
        if len(grids) != state.n_modes:
            raise InvalidDimensionError('grids', f'need {state.n_modes} grids, got {len(grids)}')
        tensor = state.tensor
        for mode, grid in enumerate(grids):
            tensor = apply_on_mode(hermite_functions(state.cutoff, grid.nodes).T, tensor, mode)
        sampled = cls(tuple(grids), tensor.astype(np.complex128), PositionPhase.zero(len(grids)))
        logger.debug('Fock state sampled on grid: norm %.8f', sampled.norm())
        return sampled.normalized()

    @property
    def n_modes(self) -> int:
        return len(self.grids)

    @property
    def cell(self) -> float:
        return math.prod(g.spacing for g in self.grids)

    def inner(self, left: ComplexArray, right: ComplexArray) -> complex:
        """<left|right> for two envelopes in the gauge of this state."""
        return complex(np.vdot(left, right) * self.cell)

    def norm(self) -> float:
        return math.sqrt(self.inner(self.envelope, self.envelope).real)

    def normalized(self) -> GridState:
        norm = self.norm()
        if not norm > 0 or not math.isfinite(norm):
            raise NormalizationError('envelope', f'cannot normalize a grid state of norm {norm}')
        return dataclasses.replace(self, envelope=self.envelope / norm)

    def with_phase(self, extra: PositionPhase) -> GridState:
        """The state multiplied by exp(i extra(x))."""
        return dataclasses.replace(self, phase=self.phase + extra)

    def wavefunction(self) -> ComplexArray:
        return np.exp(1j * self.phase.evaluate(self.grids)) * self.envelope

    def boundary_weight(self) -> float:
        """Largest probability held by the outermost node pair of any axis."""
        density = np.abs(self.envelope) ** 2 * self.cell
        weights = []
        for axis in range(self.n_modes):
            edges = np.take(density, [0, -1], axis=axis)
            weights.append(float(edges.sum()))
        return max(weights)

    def to_fock(self, cutoff: int) -> FockVector:
        """Projection onto the first `cutoff` levels per mode (not
        renormalized)."""
        tensor = self.wavefunction()
        for mode, grid in enumerate(self.grids):
            phi = hermite_functions(cutoff, grid.nodes) * grid.spacing
            tensor = apply_on_mode(phi, tensor, mode)
        return FockVector(tensor.reshape(-1).astype(np.complex128), cutoff, self.n_modes)

    @functools.cached_property
    def phase_gradients(self) -> tuple[Optional[RealArray], ...]:
        """d Phi / d x_i on the grid, None where Phi does not depend on x_i."""
        out = []
        for mode in range(self.n_modes):
            derivative = self.phase.derivative(mode)
            out.append(derivative.evaluate(self.grids) if derivative else None)
        return tuple(out)

    @functools.cached_property
    def parity_phases(self) -> tuple[Optional[ComplexArray], ...]:
        """exp(i (Phi(R_i x) - Phi(x))) per mode, None where Phi is even in x_i."""
        out = []
        for mode in range(self.n_modes):
            odd = self.phase.odd_part(mode)
            out.append(np.exp(-2j * odd.evaluate(self.grids)) if odd else None)
        return tuple(out)


# operator application ------------------------------------------------------ #

def spectral_derivative(envelope: ComplexArray, grid: PositionGrid, axis: int) -> ComplexArray:
    k = grid.wavenumbers.reshape(_axis_shape(axis, envelope.ndim))
    return np.fft.ifft(1j * k * np.fft.fft(envelope, axis=axis), axis=axis)


def apply_ladder(state: GridState, envelope: ComplexArray, mode: int, symbol: str) -> ComplexArray:
    """`symbol` ('a' or 'ad') on mode `mode` of an envelope in the gauge of
    `state`."""
    grid = state.grids[mode]
    x = grid.nodes.reshape(_axis_shape(mode, envelope.ndim))
    shift = spectral_derivative(envelope, grid, mode)
    gradient = state.phase_gradients[mode]
    if gradient is not None:
        shift = shift + 1j * gradient * envelope
    if symbol == 'a':
        return (x * envelope + shift) / SQRT2
    if symbol == 'ad':
        return (x * envelope - shift) / SQRT2
    raise InvalidParameterError('symbol', f'unknown ladder symbol {symbol!r}')


def apply_parity(state: GridState, envelope: ComplexArray, mode: int) -> ComplexArray:
    reflected = np.flip(envelope, axis=mode)
    phases = state.parity_phases[mode]
    return reflected if phases is None else phases * reflected


def apply_monomial(state: GridState, envelope: ComplexArray, key: Iterable[tuple[int, int, int]]) -> ComplexArray:
    """prod_i a_i^dag^j a_i^k P_i^b, applied right to left."""
    for mode, (j, k, b) in enumerate(key):
        if b:
            envelope = apply_parity(state, envelope, mode)
        for _ in range(k):
            envelope = apply_ladder(state, envelope, mode, 'a')
        for _ in range(j):
            envelope = apply_ladder(state, envelope, mode, 'ad')
    return envelope


def apply_normal_form(
    state: GridState, form: Mapping[tuple, complex], envelope: Optional[ComplexArray] = None
) -> ComplexArray:
    """Image of `envelope` (default: the state's own) under a normal-ordered
    operator."""
    envelope = state.envelope if envelope is None else envelope
    image = np.zeros_like(envelope, dtype=np.complex128)
    for key, coeff in form.items():
        if coeff:
            image += coeff * apply_monomial(state, envelope, key)
    return image


def normal_form_expectation(state: GridState, form: Mapping[tuple, complex]) -> complex:
    """sum_key coeff <a^j psi | a^k P^b psi>."""
    total = 0j
    left_cache: dict[tuple, ComplexArray] = {}
    right_cache: dict[tuple, ComplexArray] = {}
    for key, coeff in form.items():
        left_side = tuple((0, j, 0) for j, _, _ in key)
        right_side = tuple((0, k, b) for _, k, b in key)
        if left_side not in left_cache:
            left_cache[left_side] = apply_monomial(state, state.envelope, left_side)
        if right_side not in right_cache:
            right_cache[right_side] = apply_monomial(state, state.envelope, right_side)
        total += coeff * state.inner(left_cache[left_side], right_cache[right_side])
    return complex(total)


def factor_product_norm(state: GridState, factors: Sequence[Mapping[tuple, complex]]) -> float:
    """|F_1 F_2 ... F_K psi|^2, applying F_K first."""
    envelope = state.envelope
    for form in reversed(factors):
        envelope = apply_normal_form(state, form, envelope)
    return state.inner(envelope, envelope).real


if __name__ == '__main__':
    import doctest

    doctest.testmod()
