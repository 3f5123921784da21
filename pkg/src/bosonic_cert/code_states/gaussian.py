"""Coherent, squeezed and displaced-squeezed inputs."""
from __future__ import annotations

import cmath
import enum
import math

import np_logging
import numpy as np

from bosonic_cert.exceptions import InvalidParameterError, TruncationError
from bosonic_cert.fock_algebra import (
    FockVector,
    check_truncation,
    coherent_amplitudes,
    displacement_matrix,
    validate_dimensions,
)
from bosonic_cert.types import ComplexArray

logger = np_logging.getLogger(__name__)


class GaussianKind(str, enum.Enum):
    COHERENT = 'coherent'
    SQUEEZED_VACUUM = 'squeezed_vacuum'


class SqueezeAxis(str, enum.Enum):
    POSITION = 'position'
    MOMENTUM = 'momentum'


def squeezed_vacuum_amplitudes(zeta: complex, cutoff: int) -> ComplexArray:
    """Number-basis amplitudes of S(zeta)|0>, not renormalized after truncation.

    c_2n = (-exp(i phi) tanh r)^n sqrt((2n)!) / (2^n n!) / sqrt(cosh r).

    >>> np.abs(squeezed_vacuum_amplitudes(0, 3)).tolist()
    [1.0, 0.0, 0.0]
    """
    validate_dimensions(cutoff)
    zeta = complex(zeta)
    r, phi = abs(zeta), cmath.phase(zeta)
    if math.sinh(r) ** 2 > cutoff / 4:
        raise TruncationError('r', f'squeezing |r| = {r:.3f} too large for {cutoff=}')
    ratio = -cmath.exp(1j * phi) * math.tanh(r)
    amplitudes = np.zeros(cutoff, dtype=np.complex128)
    amplitudes[0] = 1 / math.sqrt(math.cosh(r))
    for n in range(0, (cutoff - 1) // 2):
        amplitudes[2 * n + 2] = (
            amplitudes[2 * n] * ratio * math.sqrt((2 * n + 2) * (2 * n + 1)) / (2 * (n + 1))
        )
    return amplitudes


def displaced_squeezed_amplitudes(alpha: complex, zeta: complex, cutoff: int) -> ComplexArray:
    """Amplitudes of D(alpha) S(zeta)|0>, computed on a padded space and cropped,
    so entries below `cutoff` carry no truncation error from the displacement."""
    if complex(zeta) == 0:
        return coherent_amplitudes(alpha, cutoff)
    padded = 2 * cutoff + 20
    squeezed = squeezed_vacuum_amplitudes(zeta, padded)
    return (displacement_matrix(alpha, padded) @ squeezed)[:cutoff]


def squeezing_for_axis(r: float, axis: SqueezeAxis | str) -> complex:
    """Squeezing parameter that narrows the named quadrature to variance
    exp(-2r)/2.

    >>> squeezing_for_axis(0.5, 'momentum')
    (-0.5+0j)
    """
    if r < 0:
        raise InvalidParameterError('r', f'squeezing magnitude must be non-negative: {r}')
    return complex(r if SqueezeAxis(axis) is SqueezeAxis.POSITION else -r)


def build_gaussian_input(
    kind: GaussianKind | str,
    cutoff: int,
    *,
    alpha: complex = 0,
    r: float = 0.0,
    axis: SqueezeAxis | str = SqueezeAxis.MOMENTUM,
    override: bool = False,
) -> FockVector:
    """Coherent state |alpha> or a vacuum squeezed along `axis`.

    >>> vacuum = build_gaussian_input('coherent', 10)
    >>> round(abs(vacuum.amplitudes[0]), 12)
    1.0
    """
    kind = GaussianKind(kind)
    if kind is GaussianKind.COHERENT:
        if abs(complex(alpha)) > cutoff / 4:
            raise TruncationError('alpha', f'|alpha| = {abs(alpha):.3f} exceeds cutoff/4')
        amplitudes = coherent_amplitudes(alpha, cutoff)
    else:
        amplitudes = squeezed_vacuum_amplitudes(squeezing_for_axis(r, axis), cutoff)
    state = FockVector(amplitudes, cutoff)
    check_truncation(state, override)
    logger.debug('Built %s input (tail %.2e)', kind.value, state.tail_weight)
    return state


if __name__ == '__main__':
    import doctest

    doctest.testmod()
