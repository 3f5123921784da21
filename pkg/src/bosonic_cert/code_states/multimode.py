"""CV cluster states and IQP circuit outputs.

Every gate here (CZ = exp(i x_i x_j), Z = exp(i sqrt(pi) x), T = exp(i t(x)))
is diagonal in position. Gates are applied in the eigenbasis of the truncated
position operator on a padded cutoff, touching only the modes they act on.
"""
from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

import np_logging
import numpy as np

from bosonic_cert.code_states.base import (
    SQRT_PI,
    GkpLogical,
    GkpParams,
    GraphSpec,
    IqpCircuitSpec,
    ModeKind,
)
from bosonic_cert.code_states.gaussian import build_gaussian_input
from bosonic_cert.code_states.gkp import build_gkp_grid_state, build_gkp_state
from bosonic_cert.exceptions import ResourceLimitError, TruncationError
from bosonic_cert.fock_algebra import (
    FockVector,
    apply_on_mode,
    check_truncation,
    position_eigenbasis,
    validate_dimensions,
)
from bosonic_cert.position_grid import GridState, PositionGrid, PositionPhase
from bosonic_cert.utils import CONFIG, stage

logger = np_logging.getLogger(__name__)


def t_gate_phase(x: np.ndarray) -> np.ndarray:
    """t(x) = pi/4 (2 (x/sqrt(pi))^3 + (x/sqrt(pi))^2 - 2 x/sqrt(pi)).

    >>> float(t_gate_phase(np.array(0.0)))
    0.0
    """
    u = x / SQRT_PI
    return math.pi / 4 * (2 * u**3 + u**2 - 2 * u)


def t_gate_shift(x: np.ndarray) -> np.ndarray:
    """t'(x): T p T^dag = p - t'(x)."""
    return 3 * x**2 / (2 * SQRT_PI) + x / 2 - SQRT_PI / 2


def check_desk_scale(n_modes: int, cutoff: int) -> None:
    if n_modes > CONFIG['max_modes']:
        raise ResourceLimitError('n_modes', f'{n_modes} modes exceeds limit {CONFIG["max_modes"]}')
    limit = CONFIG['max_multimode_cutoff'] ** CONFIG['max_modes']
    if n_modes > 1 and cutoff**n_modes > limit:
        raise ResourceLimitError(
            'cutoff', f'dimension {cutoff}^{n_modes} exceeds desk-scale limit {limit}'
        )


def apply_position_phase(
    tensor: np.ndarray,
    modes: Sequence[int],
    phase: Callable[..., np.ndarray],
) -> tuple[np.ndarray, float]:
    """Multiply by exp(i phase(x_modes)) on the listed mode axes.

    `phase` receives one broadcastable node array per mode, in ascending mode
    order. Returns the new tensor and the norm lost to the cutoff.
    """
    modes = sorted(modes)
    cutoff = tensor.shape[0]
    padded = int(math.ceil(cutoff * CONFIG['gate_padding_factor']))
    nodes, vectors = position_eigenbasis(padded)
    work = tensor
    for mode in modes:
        widths = [(0, padded - cutoff) if axis == mode else (0, 0) for axis in range(tensor.ndim)]
        work = apply_on_mode(vectors.conj().T, np.pad(work, widths), mode)
    grids = np.meshgrid(*([nodes] * len(modes)), indexing='ij')
    shape = [1] * tensor.ndim
    for mode in modes:
        shape[mode] = padded
    work = work * np.exp(1j * phase(*grids)).reshape(shape)
    for mode in modes:
        work = apply_on_mode(vectors, work, mode)
        work = np.take(work, np.arange(cutoff), axis=mode)
    before = float(np.sum(np.abs(tensor) ** 2))
    lost = max(0.0, 1 - float(np.sum(np.abs(work) ** 2)) / before)
    return work, lost


def _input_state(
    kind: ModeKind, sigma: float, m: int, cutoff: int, override: bool, squeezed_sigma: float
) -> FockVector:
    if kind is ModeKind.SQUEEZED_VACUUM:
        return build_gaussian_input(
            'squeezed_vacuum', cutoff, r=-math.log(squeezed_sigma), axis='momentum', override=override
        )
    return build_gkp_state(GkpParams(sigma, m, GkpLogical.PLUS), cutoff, override)


def build_input_product(
    graph: GraphSpec,
    sigma: float,
    cutoff: int,
    m: int = 1,
    override: bool = False,
    squeezed_sigma: Optional[float] = None,
) -> FockVector:
    """Tensor product of the graph's inputs: momentum-squeezed vacua with
    <p^2> = squeezed_sigma^2/2 (default sigma), or GKP |+> states of width
    sigma."""
    validate_dimensions(cutoff, graph.n_modes)
    check_desk_scale(graph.n_modes, cutoff)
    squeezed_sigma = sigma if squeezed_sigma is None else squeezed_sigma
    inputs = [_input_state(kind, sigma, m, cutoff, override, squeezed_sigma) for kind in graph.mode_kinds]
    return FockVector.product(inputs)


def _finish(tensor: np.ndarray, lost: float, cutoff: int, n_modes: int, override: bool) -> FockVector:
    if lost > CONFIG['tail_threshold']:
        if not override:
            raise TruncationError(
                'cutoff', f'gates pushed {lost:.3e} of the norm past the cutoff', lost=lost
            )
        logger.warning('Truncation guard overridden: gates lost %.3e of the norm', lost)
    state = FockVector(tensor.reshape(-1), cutoff, n_modes)
    check_truncation(state, override)
    return state


def apply_cz_gates(state: FockVector, edges: Sequence[tuple[int, int]]) -> tuple[np.ndarray, float]:
    tensor, lost = state.tensor, 0.0
    for i, j in edges:
        tensor, step_lost = apply_position_phase(tensor, (i, j), lambda xi, xj: xi * xj)
        lost += step_lost
    return tensor, lost


def apply_local_gates(
    tensor: np.ndarray, n_z: Sequence[int], n_t: Sequence[int]
) -> tuple[np.ndarray, float]:
    lost = 0.0
    for mode, (z_count, t_count) in enumerate(zip(n_z, n_t)):
        if not (z_count or t_count):
            continue
        tensor, step_lost = apply_position_phase(
            tensor,
            (mode,),
            lambda x, z=z_count, t=t_count: z * SQRT_PI * x + t * t_gate_phase(x),
        )
        lost += step_lost
    return tensor, lost


def build_cluster_state(
    spec: GraphSpec,
    sigma: float,
    cutoff: int,
    m: int = 1,
    override: bool = False,
    squeezed_sigma: Optional[float] = None,
) -> FockVector:
    """CZ along every edge of `spec` applied to the input product.

    >>> state = build_cluster_state(GraphSpec(1), 0.8, cutoff=20)
    >>> state.n_modes
    1
    """
    with stage('build_cluster_state', n_modes=spec.n_modes, edges=len(spec.edges), cutoff=cutoff):
        product = build_input_product(spec, sigma, cutoff, m, override, squeezed_sigma)
        tensor, lost = apply_cz_gates(product, spec.edges)
        logger.debug('Cluster state: %d CZ gates, norm lost %.2e', len(spec.edges), lost)
        return _finish(tensor, lost, cutoff, spec.n_modes, override)


def build_iqp_output(
    spec: IqpCircuitSpec,
    sigma: float,
    cutoff: int,
    m: int = 1,
    override: bool = False,
    local_gates_first: bool = False,
    squeezed_sigma: Optional[float] = None,
) -> FockVector:
    """Z^n_Z T^n_T on every mode and CZ on every edge, applied to the input
    product. The gates commute, `local_gates_first` only changes the numerical
    path."""
    graph = spec.graph
    with stage('build_iqp_output', n_modes=graph.n_modes, cutoff=cutoff):
        product = build_input_product(graph, sigma, cutoff, m, override, squeezed_sigma)
        if local_gates_first:
            tensor, lost_local = apply_local_gates(product.tensor, spec.n_z, spec.n_t)
            tensor, lost_cz = apply_cz_gates(
                FockVector(tensor.reshape(-1), cutoff, graph.n_modes), graph.edges
            )
        else:
            tensor, lost_cz = apply_cz_gates(product, graph.edges)
            tensor, lost_local = apply_local_gates(tensor, spec.n_z, spec.n_t)
        lost = lost_cz + lost_local
        logger.debug('IQP output: norm lost %.2e', lost)
        return _finish(tensor, lost, cutoff, graph.n_modes, override)


# position-grid path -------------------------------------------------------- #

T_GATE_COEFFICIENTS = (0.0, -SQRT_PI / 2, 0.25, 1 / (2 * SQRT_PI))
"""t(x) in ascending powers of x.

>>> x = np.linspace(-3, 3, 7)
>>> bool(np.allclose(np.polynomial.polynomial.polyval(x, T_GATE_COEFFICIENTS), t_gate_phase(x)))
True
"""


def cz_phase(edges: Sequence[tuple[int, int]], n_modes: int) -> PositionPhase:
    """sum over edges of x_i x_j."""
    phase = PositionPhase.zero(n_modes)
    for i, j in edges:
        exponents = [0] * n_modes
        exponents[i] = exponents[j] = 1
        phase = phase + PositionPhase.monomial(1.0, exponents)
    return phase


def local_gate_phase(n_z: Sequence[int], n_t: Sequence[int]) -> PositionPhase:
    """sum over modes of n_Z sqrt(pi) x + n_T t(x)."""
    n_modes = len(n_z)
    phase = PositionPhase.zero(n_modes)
    for mode, (z_count, t_count) in enumerate(zip(n_z, n_t)):
        coefficients = [t_count * c for c in T_GATE_COEFFICIENTS]
        coefficients[1] += z_count * SQRT_PI
        phase = phase + PositionPhase.univariate(coefficients, mode, n_modes)
    return phase


def grid_input_state(kind: ModeKind, sigma: float, m: int, squeezed_sigma: float) -> GridState:
    if kind is ModeKind.SQUEEZED_VACUUM:
        width = 1 / squeezed_sigma
        return GridState.gaussian([PositionGrid.for_profile(0.0, width, squeezed_sigma)], [width])
    return build_gkp_grid_state(GkpParams(sigma, m, GkpLogical.PLUS))


def build_grid_input_product(
    graph: GraphSpec, sigma: float, m: int = 1, squeezed_sigma: Optional[float] = None
) -> GridState:
    """`build_input_product` on position grids."""
    if graph.n_modes > CONFIG['max_modes']:
        raise ResourceLimitError('n_modes', f'{graph.n_modes} modes exceeds limit {CONFIG["max_modes"]}')
    squeezed_sigma = sigma if squeezed_sigma is None else squeezed_sigma
    return GridState.product([grid_input_state(kind, sigma, m, squeezed_sigma) for kind in graph.mode_kinds])


def build_grid_cluster_state(
    spec: GraphSpec, sigma: float, m: int = 1, squeezed_sigma: Optional[float] = None
) -> GridState:
    """Cluster state with the CZ gates carried as a position phase.

    >>> state = build_grid_cluster_state(GraphSpec(2, [(0, 1)]), 0.5)
    >>> state.phase.terms
    {(1, 1): 1.0}
    """
    with stage('build_grid_cluster_state', n_modes=spec.n_modes, edges=len(spec.edges)):
        product = build_grid_input_product(spec, sigma, m, squeezed_sigma)
        return product.with_phase(cz_phase(spec.edges, spec.n_modes))


def build_grid_iqp_output(
    spec: IqpCircuitSpec, sigma: float, m: int = 1, squeezed_sigma: Optional[float] = None
) -> GridState:
    """IQP output with every gate carried as a position phase; exact for any
    gate order."""
    graph = spec.graph
    with stage('build_grid_iqp_output', n_modes=graph.n_modes):
        product = build_grid_input_product(graph, sigma, m, squeezed_sigma)
        phase = cz_phase(graph.edges, graph.n_modes) + local_gate_phase(spec.n_z, spec.n_t)
        logger.debug('IQP grid output: %d phase terms', len(phase.terms))
        return product.with_phase(phase)


if __name__ == '__main__':
    import doctest

    doctest.testmod()
