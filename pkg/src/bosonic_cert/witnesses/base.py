"""
Symbolic operator polynomials and the witness structure built from them.

>>> a, ad = OperatorPolynomial.symbol('a'), OperatorPolynomial.symbol('ad')
>>> commutator = a * ad - ad * a
>>> commutator.normal_order().to_dict()['terms']
[{'coeff': [1.0, 0.0], 'factors': []}]
"""
from __future__ import annotations

import dataclasses
import functools
import math
import numbers
from typing import Any, Iterable, Mapping, NamedTuple, Optional, Union

import np_logging

from bosonic_cert.exceptions import InvalidCompositionError, InvalidParameterError
from bosonic_cert.utils import complex_to_pair, pair_to_complex
from bosonic_cert.witnesses import algebra
from bosonic_cert.witnesses.algebra import NormalForm

logger = np_logging.getLogger(__name__)

ADJOINT_SYMBOL = {'a': 'ad', 'ad': 'a', 'x': 'x', 'n': 'n', 'parity': 'parity'}


class Factor(NamedTuple):
    """One per-mode symbol; `param` is the rotation angle of 'x'."""

    mode: int
    symbol: str
    param: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {'mode': self.mode, 'symbol': self.symbol, 'param': self.param}


Scalar = Union[complex, float, int]


@dataclasses.dataclass(frozen=True, eq=False)
class OperatorPolynomial:
    """Sum of scalar-weighted ordered products of per-mode symbols.

    Factors on different modes commute, so each product is stored with its
    factors stably sorted by mode; the order within a mode is kept.
    """

    terms: Mapping[tuple[Factor, ...], complex]
    n_modes: int = 1

    def __post_init__(self) -> None:
        if int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise InvalidCompositionError('n_modes', f'n_modes must be positive: {self.n_modes}')
        terms: dict[tuple[Factor, ...], complex] = {}
        for factors, coeff in dict(self.terms).items():
            canonical = []
            for factor in factors:
                factor = Factor(int(factor[0]), str(factor[1]), float(factor[2]) if len(factor) > 2 else 0.0)
                if factor.symbol not in algebra.SYMBOLS:
                    raise InvalidParameterError('symbol', f'unknown symbol {factor.symbol!r}')
                if not 0 <= factor.mode < self.n_modes:
                    raise InvalidCompositionError('mode', f'{factor.mode=} outside {self.n_modes} modes')
                if factor.symbol != 'x':
                    factor = factor._replace(param=0.0)
                canonical.append(factor)
            key = tuple(sorted(canonical, key=lambda f: f.mode))
            terms[key] = terms.get(key, 0j) + complex(coeff)
        object.__setattr__(self, 'terms', {k: c for k, c in terms.items() if c != 0})

    # constructors ---------------------------------------------------------- #

    @classmethod
    def constant(cls, value: Scalar, n_modes: int = 1) -> OperatorPolynomial:
        return cls({(): value}, n_modes)

    @classmethod
    def identity(cls, n_modes: int = 1) -> OperatorPolynomial:
        return cls.constant(1, n_modes)

    @classmethod
    def symbol(cls, symbol: str, mode: int = 0, param: float = 0.0, n_modes: Optional[int] = None) -> OperatorPolynomial:
        return cls({(Factor(mode, symbol, param),): 1}, n_modes or mode + 1)

    @classmethod
    def quadrature(cls, mode: int = 0, theta: float = 0.0, n_modes: Optional[int] = None) -> OperatorPolynomial:
        """x_theta = cos(theta) x + sin(theta) p."""
        return cls.symbol('x', mode, theta, n_modes)

    @classmethod
    def momentum(cls, mode: int = 0, n_modes: Optional[int] = None) -> OperatorPolynomial:
        return cls.symbol('x', mode, math.pi / 2, n_modes)

    @classmethod
    def from_normal_form(cls, form: NormalForm, n_modes: int) -> OperatorPolynomial:
        """Terms a^dag^j a^k P^b per mode, in mode order."""
        terms = {}
        for key, coeff in form.items():
            factors = []
            for mode, (j, k, b) in enumerate(key):
                factors += [Factor(mode, 'ad')] * j + [Factor(mode, 'a')] * k + [Factor(mode, 'parity')] * b
            terms[tuple(factors)] = coeff
        return cls(terms, n_modes)

    @classmethod
    def from_antinormal_form(cls, form: NormalForm, n_modes: int) -> OperatorPolynomial:
        """Terms a^k a^dag^j P^b per mode, keys as from `algebra.antinormal_form`."""
        terms = {}
        for key, coeff in form.items():
            factors = []
            for mode, (k, j, b) in enumerate(key):
                factors += [Factor(mode, 'a')] * k + [Factor(mode, 'ad')] * j + [Factor(mode, 'parity')] * b
            terms[tuple(factors)] = coeff
        return cls(terms, n_modes)

    # arithmetic ------------------------------------------------------------ #

    def _coerce(self, other: Any) -> OperatorPolynomial:
        if isinstance(other, OperatorPolynomial):
            return other
        if isinstance(other, numbers.Number):
            return OperatorPolynomial.constant(complex(other), self.n_modes)
        return NotImplemented

    def __add__(self, other: Any) -> OperatorPolynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self.terms)
        for factors, coeff in other.terms.items():
            terms[factors] = terms.get(factors, 0j) + coeff
        return OperatorPolynomial(terms, max(self.n_modes, other.n_modes))

    __radd__ = __add__

    def __neg__(self) -> OperatorPolynomial:
        return OperatorPolynomial({f: -c for f, c in self.terms.items()}, self.n_modes)

    def __sub__(self, other: Any) -> OperatorPolynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> OperatorPolynomial:
        return (-self) + other

    def __mul__(self, other: Any) -> OperatorPolynomial:
        if isinstance(other, numbers.Number):
            return OperatorPolynomial({f: c * other for f, c in self.terms.items()}, self.n_modes)
        if not isinstance(other, OperatorPolynomial):
            return NotImplemented
        terms: dict[tuple[Factor, ...], complex] = {}
        for left, c_left in self.terms.items():
            for right, c_right in other.terms.items():
                terms[left + right] = terms.get(left + right, 0j) + c_left * c_right
        return OperatorPolynomial(terms, max(self.n_modes, other.n_modes))

    def __rmul__(self, other: Any) -> OperatorPolynomial:
        if isinstance(other, numbers.Number):
            return self * other
        return NotImplemented

    def __truediv__(self, other: Scalar) -> OperatorPolynomial:
        return self * (1 / other)

    def __pow__(self, exponent: int) -> OperatorPolynomial:
        if int(exponent) != exponent or exponent < 0:
            raise InvalidParameterError('exponent', f'non-negative integer powers only: {exponent}')
        return functools.reduce(lambda x, y: x * y, [self] * int(exponent), OperatorPolynomial.identity(self.n_modes))

    def embed(self, n_modes: int) -> OperatorPolynomial:
        """Same polynomial on a larger mode register."""
        return OperatorPolynomial(self.terms, n_modes)

    def adjoint(self) -> OperatorPolynomial:
        terms = {
            tuple(f._replace(symbol=ADJOINT_SYMBOL[f.symbol]) for f in reversed(factors)): c.conjugate()
            for factors, c in self.terms.items()
        }
        return OperatorPolynomial(terms, self.n_modes)

    # orderings ------------------------------------------------------------- #

    @functools.cached_property
    def normal_form(self) -> NormalForm:
        form: NormalForm = {}
        for factors, coeff in self.terms.items():
            product = algebra.constant_form(coeff, self.n_modes)
            for factor in factors:
                product = algebra.multiply(
                    product, algebra.symbol_form(factor.symbol, factor.param, factor.mode, self.n_modes)
                )
            form = algebra.add(form, product)
        return algebra.prune(form)

    def normal_order(self) -> OperatorPolynomial:
        return OperatorPolynomial.from_normal_form(self.normal_form, self.n_modes)

    def is_hermitian(self, tolerance: float = 1e-10) -> bool:
        """Symbolic check: normal forms of the polynomial and its adjoint agree.

        >>> OperatorPolynomial.symbol('n').is_hermitian()
        True
        >>> OperatorPolynomial.symbol('a').is_hermitian()
        False
        """
        form = self.normal_form
        scale = max([1.0] + [abs(c) for c in form.values()])
        return algebra.distance(form, algebra.adjoint(form)) <= tolerance * scale

    @property
    def degree(self) -> int:
        """Largest ladder degree over terms (parity factors do not count)."""
        return max((sum(f.symbol in ('a', 'ad', 'x') for f in fs) + 2 * sum(f.symbol == 'n' for f in fs)
                    for fs in self.terms), default=0)

    @property
    def has_parity(self) -> bool:
        return any(f.symbol == 'parity' for fs in self.terms for f in fs)

    def constant_term(self) -> complex:
        return self.normal_form.get(algebra.identity_key(self.n_modes), 0j)

    # serialization --------------------------------------------------------- #

    def to_dict(self) -> dict[str, Any]:
        terms = [
            {'coeff': complex_to_pair(c), 'factors': [f.to_dict() for f in factors]}
            for factors, c in sorted(self.terms.items(), key=lambda item: (len(item[0]), item[0]))
        ]
        return {'n_modes': self.n_modes, 'terms': terms}

    @classmethod
    def from_dict(cls, document: Mapping[str, Any]) -> OperatorPolynomial:
        terms: dict[tuple[Factor, ...], complex] = {}
        for term in document['terms']:
            factors = tuple(Factor(f['mode'], f['symbol'], f.get('param', 0.0)) for f in term['factors'])
            terms[factors] = terms.get(factors, 0j) + pair_to_complex(term['coeff'])
        return cls(terms, int(document['n_modes']))

    def __repr__(self) -> str:
        return f'OperatorPolynomial({len(self.terms)} terms, n_modes={self.n_modes})'


def product_normal_form(factors: Iterable[OperatorPolynomial], n_modes: int) -> NormalForm:
    """Normal form of an ordered product, reducing after every factor."""
    form = algebra.constant_form(1, n_modes)
    for factor in factors:
        form = algebra.prune(algebra.multiply(form, factor.embed(n_modes).normal_form))
    return form


@dataclasses.dataclass(frozen=True, eq=False)
class Nullifier:
    """weight * N^dag N with N the ordered product of `factors`."""

    weight: float
    factors: tuple[OperatorPolynomial, ...]
    label: str = ''

    @property
    def degree(self) -> int:
        return sum(f.degree for f in self.factors)

    def normal_form(self, n_modes: int) -> NormalForm:
        """Normal form of N."""
        return product_normal_form(self.factors, n_modes)

    def gram_normal_form(self, n_modes: int) -> NormalForm:
        """Normal form of N^dag N."""
        form = self.normal_form(n_modes)
        return algebra.prune(algebra.multiply(algebra.adjoint(form), form))

    def to_dict(self) -> dict[str, Any]:
        return {'weight': self.weight, 'label': self.label, 'factors': [f.to_dict() for f in self.factors]}


@dataclasses.dataclass(frozen=True, eq=False)
class Witness(OperatorPolynomial):
    """W = constant + remainder - sum_i w_i N_i^dag N_i.

    The terms are the normal-ordered expansion; the structure is kept for
    exact, positive-semidefinite evaluation.
    """

    label: str = ''
    constant: float = 1.0
    remainder: Optional[OperatorPolynomial] = None
    nullifiers: tuple[Nullifier, ...] = ()
    params: Mapping[str, Any] = dataclasses.field(default_factory=dict)

    @classmethod
    def assemble(
        cls,
        label: str,
        n_modes: int,
        constant: float,
        nullifiers: Iterable[Nullifier],
        remainder: Optional[OperatorPolynomial] = None,
        params: Optional[Mapping[str, Any]] = None,
    ) -> Witness:
        nullifiers = tuple(nullifiers)
        remainder = (remainder or OperatorPolynomial.constant(0, n_modes)).embed(n_modes)
        form = algebra.add(algebra.constant_form(constant, n_modes), remainder.normal_form)
        for nullifier in nullifiers:
            form = algebra.add(form, nullifier.gram_normal_form(n_modes), weights=(1, -nullifier.weight))
        form = algebra.prune(form)
        polynomial = OperatorPolynomial.from_normal_form(form, n_modes)
        logger.debug('Witness %s: %d normal-ordered terms', label, len(polynomial.terms))
        return cls(
            polynomial.terms,
            n_modes,
            label=label,
            constant=float(constant),
            remainder=remainder,
            nullifiers=nullifiers,
            params=dict(params or {}),
        )

    def to_dict(self) -> dict[str, Any]:
        document = super().to_dict()
        document.update(
            label=self.label,
            constant=self.constant,
            params=dict(self.params),
            nullifiers=[n.to_dict() for n in self.nullifiers],
            remainder=self.remainder.to_dict() if self.remainder is not None else None,
        )
        return document

    def __repr__(self) -> str:
        return f'Witness({self.label!r}, {len(self.terms)} terms, n_modes={self.n_modes})'


if __name__ == '__main__':
    import doctest

    doctest.testmod()
