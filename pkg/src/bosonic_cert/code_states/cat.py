"""Cat code bases: two-component, four-component and squeezed two-component."""
from __future__ import annotations

import math
from typing import NamedTuple

import np_logging
import numpy as np
import scipy.linalg

from bosonic_cert.code_states.base import CatFamily, CatParams
from bosonic_cert.code_states.gaussian import displaced_squeezed_amplitudes
from bosonic_cert.fock_algebra import FockVector, check_truncation, validate_dimensions
from bosonic_cert.types import ComplexArray
from bosonic_cert.utils import stage

logger = np_logging.getLogger(__name__)


class CatBasis(NamedTuple):
    """Logical basis of a cat code.

    Four-component bases are not orthogonal; `overlap` is <zero|one>.
    """

    zero: FockVector
    one: FockVector
    overlap: complex

    def orthonormal_basis(self) -> ComplexArray:
        """Columns spanning the code space, orthonormalized."""
        return scipy.linalg.orth(np.stack([self.zero.amplitudes, self.one.amplitudes], axis=1))

    def logical_state(self, c0: complex, c1: complex) -> FockVector:
        """Normalized c0|zero> + c1|one>."""
        amplitudes = c0 * self.zero.amplitudes + c1 * self.one.amplitudes
        return FockVector(amplitudes, self.zero.cutoff)


def _scaled_powers(alpha: complex, cutoff: int) -> ComplexArray:
    # alpha^n / sqrt(n!), without the coherent prefactor
    powers = np.empty(cutoff, dtype=np.complex128)
    powers[0] = 1
    for n in range(1, cutoff):
        powers[n] = powers[n - 1] * alpha / math.sqrt(n)
    return powers


def _parity_split(alpha: complex, cutoff: int) -> tuple[ComplexArray, ComplexArray]:
    """Even and odd parts of |alpha>, the odd part divided by alpha so that the
    alpha -> 0 limit is |0>, |1>."""
    powers = _scaled_powers(alpha, cutoff)
    levels = np.arange(cutoff)
    even = np.where(levels % 2 == 0, powers, 0)
    odd = np.zeros(cutoff, dtype=np.complex128)
    # alpha^(n-1)/sqrt(n!) = powers[n-1]/sqrt(n)
    odd[1::2] = powers[0:-1:2][: odd[1::2].size] / np.sqrt(levels[1::2])
    return even, odd


def build_cat_basis(params: CatParams, cutoff: int, override: bool = False) -> CatBasis:
    """Logical basis of the cat code described by `params`.

    - two_component: |alpha> +- |-alpha>
    - four_component: |alpha> + |-alpha> and |i alpha> + |-i alpha>, both even
    - squeezed_two_component: D(+-alpha) S(r)|0>, even and odd combinations

    >>> basis = build_cat_basis(CatParams(0), cutoff=8)
    >>> np.abs(basis.zero.amplitudes[:3]).round(12).tolist(), np.abs(basis.one.amplitudes[:3]).round(12).tolist()
    ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    """
    validate_dimensions(cutoff)
    with stage('build_cat_basis', family=params.family.value, cutoff=cutoff):
        if params.family is CatFamily.TWO_COMPONENT:
            zero, one = _parity_split(params.alpha, cutoff)
        elif params.family is CatFamily.FOUR_COMPONENT:
            zero, _ = _parity_split(params.alpha, cutoff)
            one, _ = _parity_split(1j * params.alpha, cutoff)
        else:
            displaced = displaced_squeezed_amplitudes(params.alpha, params.r, cutoff)
            signs = (-1.0) ** np.arange(cutoff)
            # D(-alpha) S(r)|0> is the parity image of D(alpha) S(r)|0>
            zero, one = displaced + signs * displaced, displaced - signs * displaced
        basis_zero = FockVector(zero, cutoff)
        basis_one = FockVector(one, cutoff)
        for state in (basis_zero, basis_one):
            check_truncation(state, override)
        overlap = basis_zero.overlap(basis_one)
        logger.debug('Cat basis %s overlap %.3e', params.family.value, abs(overlap))
        return CatBasis(basis_zero, basis_one, overlap)


if __name__ == '__main__':
    import doctest

    doctest.testmod()
