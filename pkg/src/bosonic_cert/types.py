"""
Protocols (interfaces) shared between modules, and types for static analysis
(mypy).
"""
from __future__ import annotations

import abc
import enum
import typing
from typing import Any, Mapping, Protocol, TypeVar, Union

import numpy as np
import numpy.typing as npt
from typing_extensions import TypeAlias

ComplexArray: TypeAlias = npt.NDArray[np.complex128]
"""Amplitudes, operator matrices, heterodyne outcomes."""
RealArray: TypeAlias = npt.NDArray[np.float64]
"""Homodyne outcomes, densities, grids."""
Seed: TypeAlias = Union[int, np.integer]
"""Root seed of a sampling run: any non-negative 64-bit integer."""
JsonDict: TypeAlias = Mapping[str, Any]
"""Parsed JSON document."""
Complexish: TypeAlias = Union[complex, float, int]
"""Scalar accepted wherever a complex amplitude is expected."""

StateT = TypeVar('StateT', bound='QuantumState')
"""TypeVar with upper-bound `QuantumState`."""
MonomialT = TypeVar('MonomialT', bound='Monomial')
"""TypeVar with upper-bound `Monomial`."""


class MeasurementKind(str, enum.Enum):
    """The three measurement primitives, plus terms that need no measurement."""

    HOMODYNE = 'homodyne'
    HETERODYNE = 'heterodyne'
    PARITY = 'parity'
    CONSTANT = 'constant'


class Verdict(str, enum.Enum):
    ACCEPT = 'accept'
    REJECT = 'reject'
    INCONCLUSIVE = 'inconclusive'


class Strategy(str, enum.Enum):
    """How `decompose_for_measurement` maps a witness onto measurements."""

    HOMODYNE = 'homodyne'
    HETERODYNE = 'heterodyne'
    AUTO = 'auto'


@typing.runtime_checkable
class QuantumState(Protocol):
    """Anything with a truncated-Fock representation: pure or mixed, one or
    more modes."""

    @property
    @abc.abstractmethod
    def cutoff(self) -> int:
        """Per-mode dimension of the truncated number basis."""

    @property
    @abc.abstractmethod
    def n_modes(self) -> int:
        """Number of modes; the flattened basis has `cutoff ** n_modes` entries."""

    @property
    @abc.abstractmethod
    def components(self) -> ComplexArray:
        """Array (rank, cutoff ** n_modes) of unnormalized pure components with
        `rho = sum_k |v_k><v_k|`. A pure state has rank 1."""

    @property
    @abc.abstractmethod
    def tail_weight(self) -> float:
        """Probability that any mode sits at or above `tail_level_fraction * cutoff`."""


@typing.runtime_checkable
class Monomial(Protocol):
    """A measurable function f_i of one measurement record."""

    @property
    @abc.abstractmethod
    def kind(self) -> MeasurementKind:
        """Which primitive produces the outcomes f_i is evaluated on."""

    @property
    @abc.abstractmethod
    def setting(self) -> tuple[Any, ...]:
        """Hashable measurement setting; entries sharing a setting can share a
        record."""

    @abc.abstractmethod
    def evaluate(self, outcomes: np.ndarray) -> RealArray:
        """Per-shot values of f_i from an outcomes array (shots, n_modes)."""

    @abc.abstractmethod
    def to_dict(self) -> dict[str, Any]:
        """JSON-ready description."""
