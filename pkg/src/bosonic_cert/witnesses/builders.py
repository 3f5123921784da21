"""
Witness constructors for every target family.

Each witness is constant - sum of weighted nullifier Gram products, so
<W> <= 1 on every state and <W> = 1 exactly when every nullifier annihilates
the state.

Peak nullifiers, for a position peak of width sigma centred at x0 and a
momentum peak of width tau centred at p0:

    (x/sigma + i sigma p)/sqrt(2) - x0/(sigma sqrt(2))
    (tau x + i (p - p0)/tau)/sqrt(2)

After a gate U diagonal in x, the nullifiers of U|in> are the input ones with
p replaced by U p U^dag.
"""
from __future__ import annotations

import cmath
import functools
import math
from typing import Optional, Sequence, Union

import np_logging
import scipy.optimize

from bosonic_cert.code_states.base import (
    SQRT_PI,
    CatFamily,
    CatParams,
    GkpLogical,
    GkpParams,
    GraphSpec,
    IqpCircuitSpec,
    ModeKind,
)
from bosonic_cert.code_states.gkp import build_gkp_grid_state
from bosonic_cert.code_states.multimode import grid_input_state
from bosonic_cert.exceptions import InvalidParameterError, NumericsError
from bosonic_cert.witnesses.base import Nullifier, OperatorPolynomial, Witness
from bosonic_cert.witnesses.lowering import nullifier_norms, polynomial_expectation

logger = np_logging.getLogger(__name__)

SQRT2 = math.sqrt(2)

SQUEEZED_OFFSET = 0.5
"""<(sigma^2 x^2 + p^2/sigma^2)/2> on a momentum-squeezed vacuum of width sigma."""

Poly = OperatorPolynomial


def _a(mode: int = 0, n_modes: int = 1) -> Poly:
    return Poly.symbol('a', mode, n_modes=n_modes)


def _ad(mode: int = 0, n_modes: int = 1) -> Poly:
    return Poly.symbol('ad', mode, n_modes=n_modes)


def _x(mode: int = 0, n_modes: int = 1) -> Poly:
    return Poly.quadrature(mode, 0.0, n_modes)


def _p(mode: int = 0, n_modes: int = 1) -> Poly:
    return Poly.momentum(mode, n_modes)


def position_peak_factor(
    sigma: float, center: float, mode: int = 0, n_modes: int = 1, momentum: Optional[Poly] = None
) -> Poly:
    """Annihilates a position peak of width sigma at `center`."""
    p = _p(mode, n_modes) if momentum is None else momentum
    return (_x(mode, n_modes) / sigma + p * (1j * sigma)) / SQRT2 - center / (sigma * SQRT2)


def momentum_peak_factor(
    tau: float, center: float, mode: int = 0, n_modes: int = 1, momentum: Optional[Poly] = None
) -> Poly:
    """Annihilates a momentum peak of width tau at `center`."""
    p = _p(mode, n_modes) if momentum is None else momentum
    return (_x(mode, n_modes) * tau + (p - center) * (1j / tau)) / SQRT2


def t_gate_shift_polynomial(mode: int = 0, n_modes: int = 1) -> Poly:
    """t'(x) = 3x^2/(2 sqrt(pi)) + x/2 - sqrt(pi)/2, so T p T^dag = p - t'(x)."""
    x = _x(mode, n_modes)
    return x * x * (3 / (2 * SQRT_PI)) + x * 0.5 - SQRT_PI / 2


# cats ---------------------------------------------------------------------- #

def _two_component(params: CatParams) -> Witness:
    nullifier = Nullifier(0.5, (_a() * _a() - params.alpha**2,), 'a^2 - alpha^2')
    return Witness.assemble('two_component_cat', 1, 1.0, [nullifier], params=params.to_dict())


def _four_component(params: CatParams) -> Witness:
    a = _a()
    nullifier = Nullifier(1 / 24, (a * a * a * a - params.alpha**4,), 'a^4 - alpha^4')
    parity = Poly.symbol('parity') * 0.5
    return Witness.assemble(
        'four_component_cat', 1, 0.5, [nullifier], remainder=parity, params=params.to_dict()
    )


def squeezed_mode_operator(r: complex) -> Poly:
    """S(r) a S(r)^dag = a cosh|r| + a^dag exp(i arg r) sinh|r|."""
    magnitude, phase = abs(r), cmath.phase(r)
    return _a() * math.cosh(magnitude) + _ad() * (cmath.exp(1j * phase) * math.sinh(magnitude))


def squeezed_eigenvalue(alpha: complex, r: complex) -> complex:
    """beta with S a S^dag D(alpha) S|0> = beta D(alpha) S|0>."""
    magnitude, phase = abs(r), cmath.phase(r)
    return alpha * math.cosh(magnitude) + alpha.conjugate() * cmath.exp(1j * phase) * math.sinh(magnitude)


def _squeezed_two_component(params: CatParams) -> Witness:
    b = squeezed_mode_operator(params.r)
    beta = squeezed_eigenvalue(params.alpha, params.r)
    nullifier = Nullifier(0.5, (b * b - beta**2,), 'b^2 - beta^2')
    return Witness.assemble('squeezed_two_component_cat', 1, 1.0, [nullifier], params=params.to_dict())


# GKP ----------------------------------------------------------------------- #

def gkp_position_nullifier(
    sigma: float, m: int, weight: float, mode: int = 0, n_modes: int = 1, momentum: Optional[Poly] = None
) -> Nullifier:
    """Product over peaks at j sqrt(pi), |j| <= m."""
    factors = tuple(
        position_peak_factor(sigma, j * SQRT_PI, mode, n_modes, momentum) for j in range(-m, m + 1)
    )
    return Nullifier(weight, factors, f'position grid m={m} (mode {mode})')


def gkp_momentum_nullifier(
    tau: float, half_width: int, spacing: float, weight: float,
    mode: int = 0, n_modes: int = 1, momentum: Optional[Poly] = None,
) -> Nullifier:
    """Product over momentum peaks of width tau at k * spacing, |k| <= half_width."""
    factors = tuple(
        momentum_peak_factor(tau, k * spacing, mode, n_modes, momentum)
        for k in range(-half_width, half_width + 1)
    )
    return Nullifier(weight, factors, f'momentum grid spacing={spacing:.6g} tau={tau:.6g} (mode {mode})')


@functools.lru_cache(maxsize=64)
def fit_momentum_width(sigma: float, m: int, logical: GkpLogical, half_width: int, spacing: float) -> float:
    """Momentum peak width tau of the realistic GKP state: the tau minimizing
    |prod_k (tau x + i (p - k spacing)/tau)/sqrt(2) psi|^2 on its position grid.

    A single peak (m = 0) has momentum width exactly 1/sigma:

    >>> round(fit_momentum_width(0.5, 0, GkpLogical.PLUS, 0, 2 * SQRT_PI), 4)
    2.0
    """
    state = build_gkp_grid_state(GkpParams(sigma, m, logical))

    def norm(log_tau: float) -> float:
        return nullifier_norms(state, gkp_momentum_nullifier(math.exp(log_tau), half_width, spacing, 1.0))

    bounds = (math.log(sigma / 4), math.log(4 / sigma))
    result = scipy.optimize.minimize_scalar(norm, bounds=bounds, method='bounded', options={'xatol': 1e-8})
    if not result.success:
        raise NumericsError('tau', f'momentum width fit failed: {result.message}', sigma=sigma, m=m)
    tau = math.exp(result.x)
    logger.debug('GKP %s sigma=%s m=%s: momentum width %.6g, residual %.3e', logical.value, sigma, m, tau, result.fun)
    return tau


def _gkp_code(params: GkpParams) -> Witness:
    weight = 1 / math.factorial(2 * params.m + 1)
    tau = fit_momentum_width(params.sigma, params.m, GkpLogical.ZERO, params.m, SQRT_PI)
    nullifiers = [
        gkp_position_nullifier(params.sigma, params.m, weight),
        gkp_momentum_nullifier(tau, params.m, SQRT_PI, weight),
    ]
    return Witness.assemble('gkp_code', 1, 1.0, nullifiers, params={**params.to_dict(), 'tau': tau})


def _gkp_plus_nullifiers(
    sigma: float, m: int, mode: int = 0, n_modes: int = 1, momentum: Optional[Poly] = None
) -> list[Nullifier]:
    tau = fit_momentum_width(sigma, m, GkpLogical.PLUS, m // 2, 2 * SQRT_PI)
    return [
        gkp_position_nullifier(sigma, m, 1 / math.factorial(2 * m + 1), mode, n_modes, momentum),
        gkp_momentum_nullifier(tau, m // 2, 2 * SQRT_PI, 1 / math.factorial(m + 1), mode, n_modes, momentum),
    ]


@functools.lru_cache(maxsize=64)
def build_code_witness(params: Union[CatParams, GkpParams]) -> Witness:
    """Code-space witness of a cat family or of the GKP code.

    >>> w = build_code_witness(CatParams(0))
    >>> w.constant, [n.weight for n in w.nullifiers]
    (1.0, [0.5])
    """
    if isinstance(params, CatParams):
        builder = {
            CatFamily.TWO_COMPONENT: _two_component,
            CatFamily.FOUR_COMPONENT: _four_component,
            CatFamily.SQUEEZED_TWO_COMPONENT: _squeezed_two_component,
        }[params.family]
        return builder(params)
    if isinstance(params, GkpParams):
        return _gkp_code(params)
    raise InvalidParameterError('params', f'no code witness for {type(params).__name__}')


@functools.lru_cache(maxsize=64)
def build_gkp_plus_witness(params: GkpParams) -> Witness:
    """Witness of the realistic GKP |+> state."""
    if params.logical is not GkpLogical.PLUS:
        raise InvalidParameterError('logical', f'plus witness needs logical=plus, got {params.logical.value}')
    return Witness.assemble(
        'gkp_plus', 1, 1.0, _gkp_plus_nullifiers(params.sigma, params.m), params=params.to_dict()
    )


# cluster and IQP ----------------------------------------------------------- #

def transformed_momentum(
    mode: int, graph: GraphSpec, n_z: int = 0, n_t: int = 0
) -> Poly:
    """p_i - n_T t'(x_i) - n_Z sqrt(pi) - sum_{j in N(i)} x_j."""
    n_modes = graph.n_modes
    p = _p(mode, n_modes)
    for neighbor in graph.neighbors(mode):
        p = p - _x(neighbor, n_modes)
    if n_t:
        p = p - t_gate_shift_polynomial(mode, n_modes) * n_t
    if n_z:
        p = p - n_z * SQRT_PI
    return p


def squeezed_mode_term(sigma: float, mode: int, n_modes: int, momentum: Poly) -> Poly:
    """(sigma^2 x^2 + p^2/sigma^2)/2 with p the (transformed) momentum."""
    x = _x(mode, n_modes)
    return (x * x * sigma**2 + momentum * momentum / sigma**2) * 0.5


@functools.lru_cache(maxsize=64)
def calibrate_squeezed_offset(sigma: float) -> float:
    """<(sigma^2 x^2 + p^2/sigma^2)/2> on the momentum-squeezed input of width
    sigma, evaluated on its position grid.

    >>> round(calibrate_squeezed_offset(0.55), 10)
    0.5
    """
    state = grid_input_state(ModeKind.SQUEEZED_VACUUM, sigma, 0, sigma)
    return float(polynomial_expectation(state, squeezed_mode_term(sigma, 0, 1, _p())).real)


def _check_squeezed_offset(sigma: float) -> None:
    offset = calibrate_squeezed_offset(sigma)
    if abs(offset - SQUEEZED_OFFSET) > 1e-8:
        raise NumericsError(
            'squeezed_sigma', f'squeezed-mode offset {offset:.12f} != {SQUEEZED_OFFSET}', sigma=sigma
        )


def _validate_widths(sigma: float, squeezed_sigma: float) -> None:
    for field, value in (('sigma', sigma), ('squeezed_sigma', squeezed_sigma)):
        if not 0 < value < 1:
            raise InvalidParameterError(field, f'{field} must lie in (0, 1): {value}')


def _cluster_witness(
    label: str,
    graph: GraphSpec,
    sigma: float,
    squeezed_sigma: float,
    m: int,
    n_z: Sequence[int],
    n_t: Sequence[int],
    params: dict,
) -> Witness:
    n_modes = graph.n_modes
    nullifiers: list[Nullifier] = []
    remainder = Poly.constant(0, n_modes)
    for mode, kind in enumerate(graph.mode_kinds):
        momentum = transformed_momentum(mode, graph, n_z[mode], n_t[mode])
        if kind is ModeKind.GKP_PLUS:
            nullifiers += _gkp_plus_nullifiers(sigma, m, mode, n_modes, momentum)
        else:
            remainder = remainder - squeezed_mode_term(squeezed_sigma, mode, n_modes, momentum)
    if graph.n_squeezed:
        _check_squeezed_offset(squeezed_sigma)
    constant = 1 + graph.n_squeezed * SQUEEZED_OFFSET
    return Witness.assemble(label, n_modes, constant, nullifiers, remainder=remainder, params=params)


@functools.lru_cache(maxsize=64)
def build_resource_witness(
    spec: GraphSpec, sigma: float, m: int = 1, squeezed_sigma: Optional[float] = None
) -> Witness:
    """Witness of the CV cluster state on `spec` with momentum-squeezed vacua
    of width `squeezed_sigma` (default sigma) and GKP |+> inputs of width sigma.

    >>> w = build_resource_witness(GraphSpec(1), 0.5)
    >>> w.constant
    1.5
    """
    squeezed_sigma = sigma if squeezed_sigma is None else squeezed_sigma
    _validate_widths(sigma, squeezed_sigma)
    zeros = (0,) * spec.n_modes
    params = {'graph': spec.to_dict(), 'sigma': sigma, 'squeezed_sigma': squeezed_sigma, 'm': m}
    return _cluster_witness('resource', spec, sigma, squeezed_sigma, m, zeros, zeros, params)


@functools.lru_cache(maxsize=64)
def build_iqp_witness(
    spec: IqpCircuitSpec, sigma: float, m: int = 1, squeezed_sigma: Optional[float] = None
) -> Witness:
    """Witness of the IQP output: cluster nullifiers conjugated through the
    Z and T gates."""
    squeezed_sigma = sigma if squeezed_sigma is None else squeezed_sigma
    _validate_widths(sigma, squeezed_sigma)
    params = {'circuit': spec.to_dict(), 'sigma': sigma, 'squeezed_sigma': squeezed_sigma, 'm': m}
    return _cluster_witness('iqp', spec.graph, sigma, squeezed_sigma, m, spec.n_z, spec.n_t, params)



if __name__ == '__main__':
    import doctest

    doctest.testmod()
