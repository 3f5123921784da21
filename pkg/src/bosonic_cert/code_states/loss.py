"""Pure-loss channel, used to prepare negative controls."""
from __future__ import annotations

import math
from typing import Optional, Sequence

import np_logging
import numpy as np
import scipy.special

from bosonic_cert.exceptions import InvalidParameterError, ResourceLimitError
from bosonic_cert.fock_algebra import DensityMatrix, State, apply_on_mode
from bosonic_cert.types import ComplexArray
from bosonic_cert.utils import CONFIG, stage

logger = np_logging.getLogger(__name__)

COMPONENT_FLOOR = 1e-14
"""Mixture components with smaller weight are dropped."""


def loss_kraus_operators(eta: float, cutoff: int) -> list[ComplexArray]:
    """K_l = sum_n sqrt(C(n, l)) eta^((n - l)/2) (1 - eta)^(l/2) |n - l><n|.

    >>> ks = loss_kraus_operators(0.7, 5)
    >>> bool(np.allclose(sum(k.conj().T @ k for k in ks), np.eye(5)))
    True
    """
    operators = []
    for lost in range(cutoff):
        kraus = np.zeros((cutoff, cutoff), dtype=np.complex128)
        for n in range(lost, cutoff):
            kraus[n - lost, n] = math.sqrt(
                scipy.special.comb(n, lost, exact=True)
                * eta ** (n - lost)
                * (1 - eta) ** lost
            )
        operators.append(kraus)
    return operators


def _compress(components: np.ndarray, cutoff: int, n_modes: int) -> np.ndarray:
    weights = np.sum(np.abs(components) ** 2, axis=1)
    components = components[weights > COMPONENT_FLOOR * weights.sum()]
    dim = components.shape[1]
    if components.shape[0] > dim:
        if dim > CONFIG['dense_dimension_limit']:
            raise ResourceLimitError('rank', f'mixture of rank {components.shape[0]} in dimension {dim}')
        components = DensityMatrix.from_matrix(components.T @ components.conj(), cutoff, n_modes).components
    return components


def apply_loss(state: State, eta: float, modes: Optional[Sequence[int]] = None) -> DensityMatrix:
    """Send the listed modes (default all) through a pure-loss channel of
    transmissivity `eta`.

    >>> from bosonic_cert.fock_algebra import FockVector
    >>> rho = apply_loss(FockVector.basis(1, 4), 0.0)
    >>> round(float(abs(rho.matrix[0, 0])), 12)
    1.0
    """
    if not 0 <= eta <= 1:
        raise InvalidParameterError('eta', f'transmissivity must lie in [0, 1]: {eta}')
    cutoff, n_modes = state.cutoff, state.n_modes
    modes = range(n_modes) if modes is None else modes
    components = np.array(state.components)
    if eta == 1:
        return DensityMatrix(components, cutoff, n_modes)
    with stage('apply_loss', eta=eta, modes=list(modes)):
        kraus = loss_kraus_operators(eta, cutoff)
        for mode in modes:
            tensors = components.reshape((-1,) + (cutoff,) * n_modes)
            outputs = [apply_on_mode(k, tensors, mode + 1) for k in kraus]
            components = np.concatenate([o.reshape(o.shape[0], -1) for o in outputs])
            components = _compress(components, cutoff, n_modes)
        logger.debug('Loss eta=%s: mixture rank %d', eta, components.shape[0])
        return DensityMatrix(components, cutoff, n_modes)


if __name__ == '__main__':
    import doctest

    doctest.testmod()
