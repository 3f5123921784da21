"""Ordering rewrites: normal order, anti-normal order and rotated-quadrature
powers.

>>> n = OperatorPolynomial.symbol('n')
>>> rewrite_antinormal(n).to_dict()['terms']
[{'coeff': [-1.0, 0.0], 'factors': []}, {'coeff': [1.0, 0.0], 'factors': [{'mode': 0, 'symbol': 'a', 'param': 0.0}, {'mode': 0, 'symbol': 'ad', 'param': 0.0}]}]
"""
from __future__ import annotations

from bosonic_cert.exceptions import InfeasibleDecompositionError
from bosonic_cert.witnesses import algebra
from bosonic_cert.witnesses.base import Factor, OperatorPolynomial


def normal_order(poly: OperatorPolynomial) -> OperatorPolynomial:
    return poly.normal_order()


def rewrite_antinormal(poly: OperatorPolynomial) -> OperatorPolynomial:
    """Every a left of every a^dag in each mode; parity factors stay rightmost."""
    return OperatorPolynomial.from_antinormal_form(algebra.antinormal_form(poly.normal_form), poly.n_modes)


def rewrite_quadrature_form(poly: OperatorPolynomial) -> OperatorPolynomial:
    """Sum of products of rotated-quadrature powers x_theta^d, one per mode.

    Angles come from 0, pi/2, pi/4, -pi/4, ... (first d + 1 for degree d), so a
    quartic single-mode polynomial needs at most five quadratures and the cat
    witnesses need four.
    """
    if poly.has_parity:
        raise InfeasibleDecompositionError('poly', 'parity terms have no quadrature-power form')
    terms = {}
    for settings, coeff in algebra.quadrature_expansion(poly.normal_form).items():
        factors = []
        for mode, (theta, power) in enumerate(settings):
            factors += [Factor(mode, 'x', theta)] * power
        terms[tuple(factors)] = coeff
    return OperatorPolynomial(terms, poly.n_modes)


if __name__ == '__main__':
    import doctest

    doctest.testmod()
