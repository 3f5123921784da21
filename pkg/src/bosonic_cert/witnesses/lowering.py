"""
Exact oracle: truncated matrices and state expectations of polynomials and
witnesses.

Lowering a normal-ordered monomial with truncated ladder matrices gives the
compression P_c a^dag^j a^k P_c exactly, because a^k never leaves the
truncated space and a^dag^j only ever leaves it upward. Nullifier Gram terms
are lowered on a padded space as (N P_c)^dag (N P_c), which keeps them
positive semidefinite.
"""
from __future__ import annotations

import functools
import math
from typing import Optional, Sequence, Union

import np_logging
import numpy as np
import scipy.sparse

from bosonic_cert.exceptions import NumericsError, ResourceLimitError
from bosonic_cert.fock_algebra import (
    OperatorMatrix,
    State,
    apply_on_mode,
    eigendecompose,
    resize_tensor,
    single_mode_matrix,
    validate_dimensions,
)
from bosonic_cert import position_grid
from bosonic_cert.position_grid import GridState
from bosonic_cert.types import ComplexArray, RealArray
from bosonic_cert.utils import CONFIG, stage
from bosonic_cert.witnesses import algebra
from bosonic_cert.witnesses.algebra import Monomial, NormalForm
from bosonic_cert.witnesses.base import Nullifier, OperatorPolynomial, Witness

logger = np_logging.getLogger(__name__)


@functools.lru_cache(maxsize=4096)
def monomial_matrix(monomial: Monomial, rows: int, columns: int) -> ComplexArray:
    """a^dag^j a^k P^b on a `rows`-level space, restricted to its first
    `columns` levels."""
    j, k, b = monomial
    a = single_mode_matrix('a', rows)
    matrix = np.linalg.matrix_power(a.T, j) @ np.linalg.matrix_power(a, k)
    if b:
        matrix = matrix * ((-1.0) ** np.arange(rows))[None, :]
    matrix = np.ascontiguousarray(matrix[:, :columns])
    matrix.setflags(write=False)
    return matrix


def _kron(blocks: Sequence[np.ndarray], sparse: bool):
    if sparse:
        return functools.reduce(
            lambda x, y: scipy.sparse.kron(x, y, format='csr'), (scipy.sparse.csr_matrix(b) for b in blocks)
        )
    return functools.reduce(np.kron, blocks)


def normal_form_matrix(
    form: NormalForm, n_modes: int, cutoff: int, rows: Optional[Sequence[int]] = None, sparse: bool = False
):
    """sum_key coeff * kron_i monomial_i on per-mode `rows` x `cutoff` blocks."""
    rows = list(rows or [cutoff] * n_modes)
    shape = (math.prod(rows), cutoff**n_modes)
    total = scipy.sparse.csr_matrix(shape, dtype=np.complex128) if sparse else np.zeros(shape, dtype=np.complex128)
    for key, coeff in form.items():
        blocks = [monomial_matrix(m, r, cutoff) for m, r in zip(key, rows)]
        total = total + coeff * _kron(blocks, sparse)
    return total


def _check_size(n_modes: int, cutoff: int) -> bool:
    validate_dimensions(cutoff, n_modes)
    if n_modes > CONFIG['max_modes']:
        raise ResourceLimitError('n_modes', f'{n_modes} modes exceeds limit {CONFIG["max_modes"]}')
    return cutoff**n_modes > CONFIG['dense_dimension_limit']


def nullifier_matrix(nullifier: Nullifier, n_modes: int, cutoff: int, sparse: bool = False):
    """N P_c on a space padded by the creation degree of N on each mode."""
    form = nullifier.normal_form(n_modes)
    rows = [cutoff + d for d in algebra.mode_degrees(form, n_modes)]
    return normal_form_matrix(form, n_modes, cutoff, rows, sparse)


def _naive_matrix(poly: OperatorPolynomial, cutoff: int) -> ComplexArray:
    """Factor-by-factor product of truncated matrices (not the compression)."""
    n_modes = poly.n_modes
    total = np.zeros((cutoff**n_modes,) * 2, dtype=np.complex128)
    identity = np.eye(cutoff)
    for factors, coeff in poly.terms.items():
        per_mode = [identity] * n_modes
        for factor in factors:
            local = single_mode_matrix(factor.symbol, cutoff, factor.param)
            per_mode[factor.mode] = per_mode[factor.mode] @ local
        total += coeff * functools.reduce(np.kron, per_mode)
    return total


def lower_to_matrix(poly: OperatorPolynomial, cutoff: int, exact: bool = True) -> OperatorMatrix:
    """Truncated matrix of `poly`.

    exact=True gives the compression P_c poly P_c; exact=False multiplies the
    truncated factor matrices, which differs near the cutoff.

    >>> from bosonic_cert.witnesses.builders import build_code_witness
    >>> from bosonic_cert.code_states import CatParams
    >>> matrix = lower_to_matrix(build_code_witness(CatParams(0)), 6).matrix
    >>> np.diag(matrix).real.round(12).tolist()
    [1.0, 1.0, 0.0, -2.0, -5.0, -9.0]
    """
    n_modes = poly.n_modes
    sparse = _check_size(n_modes, cutoff)
    hermitian = poly.is_hermitian()
    with stage('lower_to_matrix', terms=len(poly.terms), n_modes=n_modes, cutoff=cutoff):
        if not exact:
            if sparse:
                raise ResourceLimitError('cutoff', 'naive lowering is dense-only')
            return OperatorMatrix(_naive_matrix(poly, cutoff), cutoff, n_modes, hermitian)
        if isinstance(poly, Witness) and poly.nullifiers:
            dim = cutoff**n_modes
            identity = scipy.sparse.identity(dim, dtype=np.complex128, format='csr') if sparse else np.eye(dim)
            matrix = poly.constant * identity + normal_form_matrix(
                poly.remainder.embed(n_modes).normal_form, n_modes, cutoff, sparse=sparse
            )
            for nullifier in poly.nullifiers:
                block = nullifier_matrix(nullifier, n_modes, cutoff, sparse)
                matrix = matrix - nullifier.weight * (block.conj().T @ block)
        else:
            matrix = normal_form_matrix(poly.normal_form, n_modes, cutoff, sparse=sparse)
        if hermitian and not sparse:
            matrix = (matrix + matrix.conj().T) / 2
        return OperatorMatrix(matrix, cutoff, n_modes, hermitian)


# expectations -------------------------------------------------------------- #

@functools.lru_cache(maxsize=1024)
def _ladder_power(symbol: str, power: int, cutoff: int) -> ComplexArray:
    matrix = np.linalg.matrix_power(single_mode_matrix(symbol, cutoff), power)
    matrix.setflags(write=False)
    return matrix


def _apply_local(tensor: np.ndarray, mode: int, j: int, k: int, b: int) -> np.ndarray:
    """a^dag^j a^k P^b on one axis of a (possibly batched) tensor."""
    cutoff = tensor.shape[mode]
    if b:
        signs = ((-1.0) ** np.arange(cutoff)).reshape([-1 if ax == mode else 1 for ax in range(tensor.ndim)])
        tensor = tensor * signs
    if k:
        tensor = apply_on_mode(_ladder_power('a', k, cutoff), tensor, mode)
    if j:
        tensor = apply_on_mode(_ladder_power('ad', j, cutoff), tensor, mode)
    return tensor


def _apply_side(tensor: np.ndarray, side: tuple[tuple[int, int, int], ...]) -> np.ndarray:
    for mode, (j, k, b) in enumerate(side):
        if j or k or b:
            tensor = _apply_local(tensor, mode, j, k, b)
    return tensor


def normal_form_expectation(state: Union[State, GridState], form: NormalForm) -> complex:
    """sum_key coeff <a^j psi | a^k P^b psi>, exact on the truncated space."""
    if isinstance(state, GridState):
        return position_grid.normal_form_expectation(state, form)
    cutoff, n_modes = state.cutoff, state.n_modes
    tensors = state.components.reshape((-1,) + (cutoff,) * n_modes)
    batched = [(0, 0, 0)]
    total = 0j
    left_cache: dict[tuple, np.ndarray] = {}
    right_cache: dict[tuple, np.ndarray] = {}
    for key, coeff in form.items():
        left_side = tuple((0, j, 0) for j, _, _ in key)
        right_side = tuple((0, k, b) for _, k, b in key)
        if left_side not in left_cache:
            left_cache[left_side] = _apply_side(tensors, tuple(batched + list(left_side)))
        if right_side not in right_cache:
            right_cache[right_side] = _apply_side(tensors, tuple(batched + list(right_side)))
        total += coeff * np.vdot(left_cache[left_side], right_cache[right_side])
    return complex(total)


def polynomial_expectation(state: Union[State, GridState], poly: OperatorPolynomial) -> complex:
    """tr(rho poly) via the normal-ordered expansion.

    >>> from bosonic_cert.fock_algebra import FockVector
    >>> n = OperatorPolynomial.symbol('n')
    >>> round(polynomial_expectation(FockVector.basis(3, 6), n).real, 12)
    3.0
    """
    return normal_form_expectation(state, poly.embed(state.n_modes).normal_form)


def nullifier_norms(state: Union[State, GridState], nullifier: Nullifier) -> float:
    """<N^dag N> = sum over components of |N psi|^2, N applied on a padded
    space so the result is exact. On a position grid N is applied one factor
    at a time."""
    if isinstance(state, GridState):
        factors = [factor.embed(state.n_modes).normal_form for factor in nullifier.factors]
        return position_grid.factor_product_norm(state, factors)
    cutoff, n_modes = state.cutoff, state.n_modes
    form = nullifier.normal_form(n_modes)
    padded = cutoff + max(algebra.mode_degrees(form, n_modes) + [0])
    total = 0.0
    for component in state.components:
        tensor = resize_tensor(component.reshape((cutoff,) * n_modes), padded)
        image = np.zeros_like(tensor)
        for key, coeff in form.items():
            image += coeff * _apply_side(tensor, key)
        total += float(np.vdot(image, image).real)
    return total


def witness_expectation(
    state: Union[State, GridState], witness: OperatorPolynomial, transmissivity: Optional[float] = None
) -> float:
    """<W>; for structured witnesses, constant + <remainder> - sum w <N^dag N>.

    With `transmissivity`, the value on the state after pure loss on every
    mode, from the Heisenberg image of the full normal form.
    """
    if transmissivity is not None:
        form = algebra.loss_adjoint(witness.embed(state.n_modes).normal_form, transmissivity)
        value = normal_form_expectation(state, form)
    elif not isinstance(witness, Witness) or not witness.nullifiers:
        value = polynomial_expectation(state, witness)
    else:
        value = witness.constant + polynomial_expectation(state, witness.remainder)
        for nullifier in witness.nullifiers:
            value -= nullifier.weight * nullifier_norms(state, nullifier)
    value = complex(value)
    tolerance = CONFIG['expectation_imag_tolerance'] * max(1.0, abs(value.real))
    if abs(value.imag) > tolerance:
        raise NumericsError('witness', f'non-real witness expectation {value}')
    return float(value.real)


def unit_eigenspace(
    witness: OperatorPolynomial, cutoff: int, tolerance: float = 1e-6
) -> tuple[int, RealArray, ComplexArray]:
    """Dimension and basis of the eigenspace at eigenvalue >= 1 - tolerance,
    plus the full spectrum."""
    values, vectors = eigendecompose(lower_to_matrix(witness, cutoff))
    mask = values >= 1 - tolerance
    logger.debug('Unit eigenspace of %r at cutoff %d: dimension %d', witness, cutoff, int(mask.sum()))
    return int(mask.sum()), values, vectors[:, mask]


if __name__ == '__main__':
    import doctest

    doctest.testmod()
