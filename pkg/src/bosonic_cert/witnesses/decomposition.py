"""
Map a Hermitian polynomial onto measurable monomials: W = sum_i lambda_i f_i.

- homodyne:   f = prod_i x_{theta_i}^{d_i}, estimated from one joint quadrature record
- heterodyne: f = Re(e^{i phi} prod_i alpha_i^{k_i} alpha_i^*^{j_i}), whose Q-function
              average is the anti-normal moment <prod_i a^{k_i} a^dag^{j_i}>
- parity:     f = prod_{i in mask} (-1)^{n_i}
- constant:   f = 1

>>> from bosonic_cert.witnesses.builders import build_code_witness
>>> from bosonic_cert.code_states import CatParams
>>> w = build_code_witness(CatParams(1.0))
>>> d = decompose_for_measurement(w, 'homodyne')
>>> len(d.settings(MeasurementKind.HOMODYNE))
4
"""
from __future__ import annotations

import cmath
import dataclasses
from typing import Any, ClassVar, Iterable, Mapping, NamedTuple, Optional, Sequence, Union

import np_logging
import numpy as np

from bosonic_cert.exceptions import (
    InfeasibleDecompositionError,
    InvalidParameterError,
    NumericsError,
)
from bosonic_cert.types import MeasurementKind, RealArray, Strategy
from bosonic_cert.utils import CONFIG, dump_json, load_json, pairwise_unique, stage
from bosonic_cert.witnesses import algebra
from bosonic_cert.witnesses.algebra import NormalForm
from bosonic_cert.witnesses.base import Factor, OperatorPolynomial

logger = np_logging.getLogger(__name__)

Setting = tuple[Any, ...]


def _anti_normal_polynomial(powers: Sequence[tuple[int, int]], n_modes: int) -> OperatorPolynomial:
    """prod_i a_i^k a_i^dag^j."""
    factors: list[Factor] = []
    for mode, (k, j) in enumerate(powers):
        factors += [Factor(mode, 'a')] * k + [Factor(mode, 'ad')] * j
    return OperatorPolynomial({tuple(factors): 1}, n_modes)


# monomials ----------------------------------------------------------------- #

@dataclasses.dataclass(frozen=True)
class HomodyneMonomial:
    """prod_i x_{theta_i}^{d_i}; modes with d_i = 0 are measured at theta = 0."""

    angles: tuple[float, ...]
    powers: tuple[int, ...]
    kind: ClassVar[MeasurementKind] = MeasurementKind.HOMODYNE

    @property
    def setting(self) -> Setting:
        return (self.kind, self.angles)

    def evaluate(self, outcomes: np.ndarray) -> RealArray:
        outcomes = np.asarray(outcomes, dtype=np.float64).reshape(-1, len(self.powers))
        return np.prod(outcomes ** np.asarray(self.powers), axis=1)

    def _polynomial(self, scale: int, n_modes: int) -> OperatorPolynomial:
        factors: list[Factor] = []
        for mode, (theta, power) in enumerate(zip(self.angles, self.powers)):
            factors += [Factor(mode, 'x', theta)] * (power * scale)
        return OperatorPolynomial({tuple(factors): 1}, n_modes)

    def to_polynomial(self, n_modes: Optional[int] = None) -> OperatorPolynomial:
        return self._polynomial(1, n_modes or len(self.powers))

    def square_polynomial(self, n_modes: Optional[int] = None) -> OperatorPolynomial:
        """Operator whose expectation is the outcome average of f^2."""
        return self._polynomial(2, n_modes or len(self.powers))

    def to_dict(self) -> dict[str, Any]:
        return {'kind': self.kind.value, 'angles': list(self.angles), 'powers': list(self.powers)}


@dataclasses.dataclass(frozen=True)
class HeterodyneMonomial:
    """Re(e^{i phase} prod_i alpha_i^k alpha_i^*^j) with (k, j) per mode."""

    powers: tuple[tuple[int, int], ...]
    phase: float = 0.0
    kind: ClassVar[MeasurementKind] = MeasurementKind.HETERODYNE

    @property
    def setting(self) -> Setting:
        return (self.kind,)

    @property
    def is_diagonal(self) -> bool:
        return all(k == j for k, j in self.powers)

    def evaluate(self, outcomes: np.ndarray) -> RealArray:
        outcomes = np.asarray(outcomes, dtype=np.complex128).reshape(-1, len(self.powers))
        k = np.asarray([p[0] for p in self.powers])
        j = np.asarray([p[1] for p in self.powers])
        values = np.prod(outcomes**k * np.conj(outcomes) ** j, axis=1)
        return (cmath.exp(1j * self.phase) * values).real

    def to_polynomial(self, n_modes: Optional[int] = None) -> OperatorPolynomial:
        n_modes = n_modes or len(self.powers)
        forward = _anti_normal_polynomial(self.powers, n_modes)
        if self.is_diagonal and self.phase == 0:
            return forward
        backward = _anti_normal_polynomial([(j, k) for k, j in self.powers], n_modes)
        return forward * (cmath.exp(1j * self.phase) / 2) + backward * (cmath.exp(-1j * self.phase) / 2)

    def square_polynomial(self, n_modes: Optional[int] = None) -> OperatorPolynomial:
        """Re(e^{i phi} M)^2 = |M|^2/2 + Re(e^{2 i phi} M^2)/2, both as
        anti-normal moments."""
        n_modes = n_modes or len(self.powers)
        modulus = _anti_normal_polynomial([(k + j, k + j) for k, j in self.powers], n_modes)
        doubled = _anti_normal_polynomial([(2 * k, 2 * j) for k, j in self.powers], n_modes)
        conjugate = _anti_normal_polynomial([(2 * j, 2 * k) for k, j in self.powers], n_modes)
        twice = cmath.exp(2j * self.phase) / 4
        return modulus * 0.5 + doubled * twice + conjugate * twice.conjugate()

    def to_dict(self) -> dict[str, Any]:
        return {'kind': self.kind.value, 'powers': [list(p) for p in self.powers], 'phase': self.phase}


@dataclasses.dataclass(frozen=True)
class ParityMonomial:
    """prod over masked modes of (-1)^n."""

    mask: tuple[bool, ...]
    kind: ClassVar[MeasurementKind] = MeasurementKind.PARITY

    @property
    def setting(self) -> Setting:
        return (self.kind,)

    def evaluate(self, outcomes: np.ndarray) -> RealArray:
        outcomes = np.asarray(outcomes).reshape(-1, len(self.mask))
        return np.prod(outcomes[:, np.asarray(self.mask)], axis=1).astype(np.float64)

    def to_polynomial(self, n_modes: Optional[int] = None) -> OperatorPolynomial:
        factors = tuple(Factor(mode, 'parity') for mode, on in enumerate(self.mask) if on)
        return OperatorPolynomial({factors: 1}, n_modes or len(self.mask))

    def square_polynomial(self, n_modes: Optional[int] = None) -> OperatorPolynomial:
        return OperatorPolynomial.identity(n_modes or len(self.mask))

    def to_dict(self) -> dict[str, Any]:
        return {'kind': self.kind.value, 'mask': list(self.mask)}


@dataclasses.dataclass(frozen=True)
class ConstantMonomial:
    kind: ClassVar[MeasurementKind] = MeasurementKind.CONSTANT

    @property
    def setting(self) -> Setting:
        return (self.kind,)

    def evaluate(self, outcomes: np.ndarray) -> RealArray:
        return np.ones(len(outcomes))

    def to_polynomial(self, n_modes: Optional[int] = None) -> OperatorPolynomial:
        return OperatorPolynomial.identity(n_modes or 1)

    square_polynomial = to_polynomial

    def to_dict(self) -> dict[str, Any]:
        return {'kind': self.kind.value}


MeasurableMonomial = Union[HomodyneMonomial, HeterodyneMonomial, ParityMonomial, ConstantMonomial]


def monomial_from_dict(document: Mapping[str, Any]) -> MeasurableMonomial:
    kind = MeasurementKind(document['kind'])
    if kind is MeasurementKind.HOMODYNE:
        return HomodyneMonomial(
            tuple(float(a) for a in document['angles']), tuple(int(p) for p in document['powers'])
        )
    if kind is MeasurementKind.HETERODYNE:
        return HeterodyneMonomial(
            tuple((int(k), int(j)) for k, j in document['powers']), float(document.get('phase', 0.0))
        )
    if kind is MeasurementKind.PARITY:
        return ParityMonomial(tuple(bool(b) for b in document['mask']))
    return ConstantMonomial()


# decomposition ------------------------------------------------------------- #

class DecompositionEntry(NamedTuple):
    coefficient: float
    monomial: MeasurableMonomial

    def to_dict(self) -> dict[str, Any]:
        return {'coefficient': self.coefficient, 'monomial': self.monomial.to_dict()}


@dataclasses.dataclass(frozen=True)
class WitnessDecomposition:
    """sum_i lambda_i f_i, the input of the importance-sampling estimator."""

    entries: tuple[DecompositionEntry, ...]
    n_modes: int
    strategy: Strategy = Strategy.HOMODYNE

    def __post_init__(self) -> None:
        object.__setattr__(self, 'entries', tuple(DecompositionEntry(*e) for e in self.entries))
        object.__setattr__(self, 'strategy', Strategy(self.strategy))

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def total_weight(self) -> float:
        """Lambda = sum_i |lambda_i|."""
        return float(sum(abs(e.coefficient) for e in self.entries))

    @property
    def coefficients(self) -> RealArray:
        return np.array([e.coefficient for e in self.entries], dtype=np.float64)

    @property
    def kinds(self) -> list[MeasurementKind]:
        return list(pairwise_unique(e.monomial.kind for e in self.entries))

    def settings(self, kind: Optional[MeasurementKind] = None) -> list[Setting]:
        """Distinct measurement settings in entry order."""
        return list(
            pairwise_unique(
                e.monomial.setting for e in self.entries if kind is None or e.monomial.kind is kind
            )
        )

    def to_polynomial(self) -> OperatorPolynomial:
        total = OperatorPolynomial.constant(0, self.n_modes)
        for coefficient, monomial in self.entries:
            total = total + monomial.to_polynomial(self.n_modes) * coefficient
        return total

    def to_dict(self) -> dict[str, Any]:
        return {
            'n_modes': self.n_modes,
            'strategy': self.strategy.value,
            'total_weight': self.total_weight,
            'entries': [e.to_dict() for e in self.entries],
        }

    @classmethod
    def from_dict(cls, document: Mapping[str, Any]) -> WitnessDecomposition:
        entries = tuple(
            DecompositionEntry(float(e['coefficient']), monomial_from_dict(e['monomial']))
            for e in document['entries']
        )
        return cls(entries, int(document['n_modes']), Strategy(document.get('strategy', 'homodyne')))

    def __repr__(self) -> str:
        return f'WitnessDecomposition({len(self.entries)} entries, {self.strategy.value}, Lambda={self.total_weight:.6g})'


def _real(value: complex, scale: float, what: str) -> float:
    if abs(value.imag) > CONFIG['expectation_imag_tolerance'] * max(1.0, scale):
        raise NumericsError('coefficient', f'non-real {what} coefficient {value}')
    return float(value.real)


def _split_parity(form: NormalForm, n_modes: int) -> tuple[NormalForm, list[DecompositionEntry]]:
    ladder: NormalForm = {}
    parity: list[DecompositionEntry] = []
    scale = max([1.0] + [abs(c) for c in form.values()])
    for key, coeff in sorted(form.items()):
        if not any(b for _, _, b in key):
            ladder[key] = coeff
        elif any(j or k for j, k, _ in key):
            raise InfeasibleDecompositionError(
                'poly', 'parity multiplied by ladder operators has no measurable monomial', key=key
            )
        else:
            mask = tuple(bool(b) for _, _, b in key)
            parity.append(DecompositionEntry(_real(coeff, scale, 'parity'), ParityMonomial(mask)))
    return ladder, parity


def _with_constant(entries: Iterable[DecompositionEntry], constant: float) -> tuple[DecompositionEntry, ...]:
    entries = tuple(entries)
    if constant:
        entries = (DecompositionEntry(constant, ConstantMonomial()),) + entries
    return entries


def _homodyne_entries(ladder: NormalForm, n_modes: int) -> tuple[float, list[DecompositionEntry]]:
    expansion = algebra.quadrature_expansion(ladder) if ladder else {}
    scale = max([1.0] + [abs(c) for c in expansion.values()])
    constant, entries = 0.0, []
    for settings, coeff in expansion.items():
        value = _real(coeff, scale, 'homodyne')
        if not any(power for _, power in settings):
            constant += value
            continue
        angles = tuple(theta for theta, _ in settings)
        powers = tuple(power for _, power in settings)
        entries.append(DecompositionEntry(value, HomodyneMonomial(angles, powers)))
    return constant, entries


def _heterodyne_entries(ladder: NormalForm, n_modes: int) -> tuple[float, list[DecompositionEntry]]:
    anti = algebra.antinormal_form(ladder) if ladder else {}
    scale = max([1.0] + [abs(c) for c in anti.values()])
    constant, entries = 0.0, []
    seen: set = set()
    for key, coeff in sorted(anti.items()):
        if key in seen:
            continue
        powers = tuple((k, j) for k, j, _ in key)
        mirror = tuple((j, k, b) for k, j, b in key)
        seen.update({key, mirror})
        if not any(k or j for k, j in powers):
            constant += _real(coeff, scale, 'heterodyne')
        elif mirror == key:
            entries.append(DecompositionEntry(_real(coeff, scale, 'heterodyne'), HeterodyneMonomial(powers)))
        else:
            # c A + conj(c) A^dag = 2|c| Re-part of e^{i arg c} A
            if abs(anti.get(mirror, 0) - complex(coeff).conjugate()) > 1e-9 * scale:
                raise NumericsError('poly', 'anti-normal terms are not pairwise conjugate', key=key)
            entries.append(
                DecompositionEntry(2 * abs(coeff), HeterodyneMonomial(powers, cmath.phase(coeff)))
            )
    return constant, entries


def decompose_for_measurement(
    poly: OperatorPolynomial, strategy: Union[Strategy, str] = Strategy.AUTO
) -> WitnessDecomposition:
    """Decompose a Hermitian polynomial into measurable monomials.

    `auto` builds both ladder decompositions and keeps the one with the smaller
    total weight Lambda (ties go to homodyne); if one is infeasible the other is
    used.

    >>> one = decompose_for_measurement(OperatorPolynomial.identity())
    >>> [(e.coefficient, e.monomial.kind.value) for e in one.entries]
    [(1.0, 'constant')]
    """
    strategy = Strategy(strategy)
    if not poly.is_hermitian(CONFIG['hermitian_tolerance']):
        raise InvalidParameterError('poly', 'only Hermitian polynomials can be estimated')
    n_modes = poly.n_modes
    with stage('decompose_for_measurement', strategy=strategy.value, terms=len(poly.terms)):
        ladder, parity = _split_parity(poly.normal_form, n_modes)
        builders = {Strategy.HOMODYNE: _homodyne_entries, Strategy.HETERODYNE: _heterodyne_entries}
        candidates = [strategy] if strategy is not Strategy.AUTO else [Strategy.HOMODYNE, Strategy.HETERODYNE]
        if strategy is Strategy.HOMODYNE:
            candidates.append(Strategy.HETERODYNE)
        built: list[WitnessDecomposition] = []
        for candidate in candidates:
            try:
                constant, entries = builders[candidate](ladder, n_modes)
            except InfeasibleDecompositionError as exc:
                logger.debug('%s decomposition infeasible: %s', candidate.value, exc.message)
                continue
            built.append(WitnessDecomposition(_with_constant(entries + parity, constant), n_modes, candidate))
            if strategy is not Strategy.AUTO:
                break
        if not built:
            raise InfeasibleDecompositionError('poly', f'no {strategy.value} decomposition exists')
        chosen = min(built, key=lambda d: round(d.total_weight, 12))
    logger.debug('Decomposed %r -> %r', poly, chosen)
    return chosen


def export_decomposition(decomposition: WitnessDecomposition, path: Optional[str] = None) -> str:
    return dump_json(decomposition.to_dict(), path)


def import_decomposition(path_or_text: str) -> WitnessDecomposition:
    return WitnessDecomposition.from_dict(load_json(path_or_text))


if __name__ == '__main__':
    import doctest

    doctest.testmod()
