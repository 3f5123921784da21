"""Parameter records for the target-state families, and state JSON export."""
from __future__ import annotations

import cmath
import dataclasses
import enum
import math
import pathlib
from typing import Any, Iterable, Optional

import np_logging
import numpy as np

from bosonic_cert.exceptions import (
    InvalidCompositionError,
    InvalidDimensionError,
    InvalidParameterError,
    PhaseLockError,
)
from bosonic_cert.fock_algebra import DensityMatrix, FockVector, State
from bosonic_cert.utils import complex_to_pair, dump_json, load_json, pair_to_complex

logger = np_logging.getLogger(__name__)

PHASE_LOCK_TOLERANCE = 1e-12

SQRT_PI = math.sqrt(math.pi)


class CatFamily(str, enum.Enum):
    TWO_COMPONENT = 'two_component'
    FOUR_COMPONENT = 'four_component'
    SQUEEZED_TWO_COMPONENT = 'squeezed_two_component'


class GkpLogical(str, enum.Enum):
    ZERO = 'zero'
    ONE = 'one'
    PLUS = 'plus'


class ModeKind(str, enum.Enum):
    SQUEEZED_VACUUM = 'squeezed_vacuum'
    GKP_PLUS = 'gkp_plus'


def _wrap_angle(angle: float) -> float:
    return (angle + math.pi) % (2 * math.pi) - math.pi


@dataclasses.dataclass(frozen=True)
class CatParams:
    """Amplitude, squeezing and family of a cat code.

    >>> CatParams(2).family.value
    'two_component'
    >>> CatParams(2j, r=0.1, family='squeezed_two_component')
    Traceback (most recent call last):
    ...
    bosonic_cert.exceptions.PhaseLockError: arg(r) must equal arg(alpha)/2
    """

    alpha: complex
    r: complex = 0j
    family: CatFamily = CatFamily.TWO_COMPONENT

    def __post_init__(self) -> None:
        object.__setattr__(self, 'alpha', complex(self.alpha))
        object.__setattr__(self, 'r', complex(self.r))
        object.__setattr__(self, 'family', CatFamily(self.family))
        if self.family is not CatFamily.SQUEEZED_TWO_COMPONENT:
            if self.r != 0:
                raise InvalidParameterError('r', f'{self.family.value} cats take no squeezing')
            return
        if self.alpha == 0:
            raise InvalidParameterError('alpha', 'squeezed cats need a nonzero amplitude')
        if self.r != 0:
            mismatch = _wrap_angle(cmath.phase(self.r) - cmath.phase(self.alpha) / 2)
            if abs(mismatch) > PHASE_LOCK_TOLERANCE:
                raise PhaseLockError(
                    'r', 'arg(r) must equal arg(alpha)/2', mismatch=mismatch
                )

    def to_dict(self) -> dict[str, Any]:
        return {
            'alpha': complex_to_pair(self.alpha),
            'r': complex_to_pair(self.r),
            'family': self.family.value,
        }


@dataclasses.dataclass(frozen=True)
class GkpParams:
    """Width, truncation index and logical label of a realistic GKP state.

    Peaks sit at x = j sqrt(pi) for integers |j| <= m: even j for `zero`, odd j
    for `one`, every j for `plus`.

    >>> GkpParams(0.3, 2, 'zero').peak_indices
    (-2, 0, 2)
    >>> round(GkpParams(0.3, 1, 'plus').squeezing, 6)
    1.203973
    """

    sigma: float
    m: int
    logical: GkpLogical = GkpLogical.ZERO

    def __post_init__(self) -> None:
        object.__setattr__(self, 'logical', GkpLogical(self.logical))
        if not 0 < self.sigma < 1:
            raise InvalidParameterError('sigma', f'sigma must lie in (0, 1): {self.sigma}')
        if int(self.m) != self.m or self.m < 0:
            raise InvalidParameterError('m', f'm must be a non-negative integer: {self.m}')
        object.__setattr__(self, 'm', int(self.m))
        if not self.peak_indices:
            raise InvalidParameterError('m', f'no {self.logical.value} peaks within m={self.m}')

    @property
    def peak_indices(self) -> tuple[int, ...]:
        indices = range(-self.m, self.m + 1)
        if self.logical is GkpLogical.ZERO:
            return tuple(j for j in indices if j % 2 == 0)
        if self.logical is GkpLogical.ONE:
            return tuple(j for j in indices if j % 2)
        return tuple(indices)

    @property
    def peak_positions(self) -> np.ndarray:
        return SQRT_PI * np.array(self.peak_indices, dtype=float)

    @property
    def peak_weights(self) -> np.ndarray:
        """Gaussian envelope exp(-sigma^2 x_k^2), unnormalized."""
        return np.exp(-(self.sigma**2) * self.peak_positions**2)

    @property
    def squeezing(self) -> float:
        """r with exp(-r) = sigma: each peak has <(x - x_k)^2> = sigma^2/2."""
        return -math.log(self.sigma)

    def to_dict(self) -> dict[str, Any]:
        return {'sigma': self.sigma, 'm': self.m, 'logical': self.logical.value}


@dataclasses.dataclass(frozen=True)
class GraphSpec:
    """Cluster graph: undirected edges plus the input kind of every mode.

    >>> g = GraphSpec(3, [(1, 0), (1, 2)], ['squeezed_vacuum', 'gkp_plus', 'squeezed_vacuum'])
    >>> g.edges
    ((0, 1), (1, 2))
    >>> g.neighbors(1), g.n_squeezed, g.n_gkp
    ((0, 2), 2, 1)
    """

    n_modes: int
    edges: Iterable[tuple[int, int]] = ()
    mode_kinds: Optional[Iterable[ModeKind | str]] = None

    def __post_init__(self) -> None:
        if int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise InvalidDimensionError('n_modes', f'n_modes must be positive: {self.n_modes}')
        kinds = (
            (ModeKind.SQUEEZED_VACUUM,) * self.n_modes
            if self.mode_kinds is None
            else tuple(ModeKind(k) for k in self.mode_kinds)
        )
        if len(kinds) != self.n_modes:
            raise InvalidCompositionError(
                'mode_kinds', f'{len(kinds)} mode kinds for {self.n_modes} modes'
            )
        edges = set()
        for edge in self.edges:
            i, j = sorted(int(v) for v in edge)
            if i == j:
                raise InvalidCompositionError('edges', f'self-loop on mode {i}')
            if i < 0 or j >= self.n_modes:
                raise InvalidCompositionError('edges', f'edge {(i, j)} outside {self.n_modes} modes')
            edges.add((i, j))
        object.__setattr__(self, 'edges', tuple(sorted(edges)))
        object.__setattr__(self, 'mode_kinds', kinds)

    def neighbors(self, mode: int) -> tuple[int, ...]:
        return tuple(sorted({j for i, j in self.edges if i == mode} | {i for i, j in self.edges if j == mode}))

    def degree(self, mode: int) -> int:
        return len(self.neighbors(mode))

    @property
    def n_squeezed(self) -> int:
        return sum(k is ModeKind.SQUEEZED_VACUUM for k in self.mode_kinds)

    @property
    def n_gkp(self) -> int:
        return sum(k is ModeKind.GKP_PLUS for k in self.mode_kinds)

    def to_dict(self) -> dict[str, Any]:
        return {
            'n_modes': self.n_modes,
            'edges': [list(e) for e in self.edges],
            'mode_kinds': [k.value for k in self.mode_kinds],
        }

    @classmethod
    def from_dict(cls, document: dict[str, Any]) -> GraphSpec:
        return cls(document['n_modes'], document.get('edges', ()), document.get('mode_kinds'))


@dataclasses.dataclass(frozen=True)
class IqpCircuitSpec:
    """CZ graph plus Z and T gate counts per mode. All gates are diagonal in x,
    so order does not matter.

    >>> spec = IqpCircuitSpec(GraphSpec(2, [(0, 1)]), n_z=[1, 0], n_t=[0, 2])
    >>> spec.n_cz(0), spec.n_t
    (1, (0, 2))
    """

    graph: GraphSpec
    n_z: Optional[Iterable[int]] = None
    n_t: Optional[Iterable[int]] = None

    def __post_init__(self) -> None:
        for name in ('n_z', 'n_t'):
            value = getattr(self, name)
            counts = (0,) * self.graph.n_modes if value is None else tuple(int(c) for c in value)
            if len(counts) != self.graph.n_modes:
                raise InvalidCompositionError(name, f'need one count per mode, got {len(counts)}')
            if any(c < 0 for c in counts):
                raise InvalidParameterError(name, f'gate counts must be non-negative: {counts}')
            object.__setattr__(self, name, counts)

    def n_cz(self, mode: int) -> int:
        return self.graph.degree(mode)

    @property
    def max_t(self) -> int:
        return max(self.n_t, default=0)

    @property
    def max_cz(self) -> int:
        return max((self.n_cz(i) for i in range(self.graph.n_modes)), default=0)

    def to_dict(self) -> dict[str, Any]:
        return {'graph': self.graph.to_dict(), 'n_z': list(self.n_z), 'n_t': list(self.n_t)}

    @classmethod
    def from_dict(cls, document: dict[str, Any]) -> IqpCircuitSpec:
        return cls(GraphSpec.from_dict(document['graph']), document.get('n_z'), document.get('n_t'))


# state export -------------------------------------------------------------- #

def state_to_dict(state: State) -> dict[str, Any]:
    """JSON document of a state; amplitudes as [re, im] pairs.

    >>> state_to_dict(FockVector([1, 0], cutoff=2))['amplitudes']
    [[1.0, 0.0], [0.0, 0.0]]
    """
    document: dict[str, Any] = {'n_modes': state.n_modes, 'cutoff': state.cutoff}
    if isinstance(state, FockVector):
        document['amplitudes'] = [complex_to_pair(c) for c in state.amplitudes]
    else:
        document['components'] = [[complex_to_pair(c) for c in row] for row in state.components]
    return document


def state_from_dict(document: dict[str, Any]) -> State:
    cutoff, n_modes = int(document['cutoff']), int(document['n_modes'])
    if 'amplitudes' in document:
        amplitudes = np.array([pair_to_complex(p) for p in document['amplitudes']])
        return FockVector(amplitudes, cutoff, n_modes)
    if 'components' in document:
        components = np.array([[pair_to_complex(p) for p in row] for row in document['components']])
        return DensityMatrix(components, cutoff, n_modes)
    raise InvalidParameterError('state', 'document has neither amplitudes nor components')


def export_state(state: State, path: Optional[str | pathlib.Path] = None) -> str:
    return dump_json(state_to_dict(state), path)


def import_state(path_or_text: str | pathlib.Path) -> State:
    return state_from_dict(load_json(path_or_text))


if __name__ == '__main__':
    import doctest

    doctest.testmod()
