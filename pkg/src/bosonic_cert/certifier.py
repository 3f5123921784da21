"""
Importance-sampling estimation of witness expectations, Hoeffding sizing and
verdicts.

With W = c + sum_i lambda_i f_i over measured entries and Lambda = sum |lambda_i|,
each shot picks entry i with probability |lambda_i|/Lambda and records
F = Lambda sign(lambda_i) f_i. Then <W> = c + E[F] and

    Pr(|mean(F) - E[F]| > eps) <= 8 exp(-N eps^2 / (33 <F^2>))

>>> hoeffding_requirements(1.0, 0.1, 0.05)
16749
>>> decide((0.95, 1.02), 0.1).value
'accept'
"""
from __future__ import annotations

import collections
import dataclasses
import enum
import math
from typing import Any, Iterable, Mapping, Optional, Sequence, Union

import np_logging
import numpy as np
import scipy.stats

from bosonic_cert.code_states import CatParams, GkpParams
from bosonic_cert.exceptions import (
    CoverageError,
    InvalidParameterError,
    NumericsError,
    ResourceLimitError,
)
from bosonic_cert.fock_algebra import State, check_truncation
from bosonic_cert.measurement_sim import MeasurementRecord, sample_setting
from bosonic_cert.types import MeasurementKind, Seed, Strategy, Verdict
from bosonic_cert.utils import CONFIG, chunk_generator, stage
from bosonic_cert.witnesses import (
    OperatorPolynomial,
    Witness,
    WitnessDecomposition,
    build_code_witness,
    decompose_for_measurement,
    polynomial_expectation,
    witness_expectation,
)

logger = np_logging.getLogger(__name__)

PLAN_STREAM = 2**32
"""Spawn key of the allotment stream; setting streams follow it."""

HOEFFDING_CONSTANT = 33
HOEFFDING_PREFACTOR = 8


class VarianceProxy(str, enum.Enum):
    """Bound used for <F^2> when sizing N.

    verbatim: m^2 max|lambda| max<f^2>
    squared:  m^2 max|lambda|^2 max<f^2>
    exact:    Lambda sum_i |lambda_i| <f_i^2>
    """

    VERBATIM = 'verbatim'
    SQUARED = 'squared'
    EXACT = 'exact'


class Interval(str, enum.Enum):
    HOEFFDING = 'hoeffding'
    EMPIRICAL = 'empirical'


class Estimator(str, enum.Enum):
    """How shots are split over decomposition entries.

    importance: multinomial allotment, each shot records F
    stratified: fixed allotment, each entry averaged on its own
    """

    IMPORTANCE = 'importance'
    STRATIFIED = 'stratified'


def _measured(decomposition: WitnessDecomposition) -> list[int]:
    return [i for i, e in enumerate(decomposition.entries) if e.monomial.kind is not MeasurementKind.CONSTANT]


def _constant(decomposition: WitnessDecomposition) -> float:
    return float(
        sum(e.coefficient for e in decomposition.entries if e.monomial.kind is MeasurementKind.CONSTANT)
    )


# plan ---------------------------------------------------------------------- #

@dataclasses.dataclass(frozen=True)
class SamplingPlan:
    """Shots per decomposition entry (constant entries get none)."""

    allotments: tuple[int, ...]
    probabilities: tuple[float, ...]
    seed: int
    stratified: bool = False

    @property
    def total(self) -> int:
        return int(sum(self.allotments))

    def shots_per_setting(self, decomposition: WitnessDecomposition) -> dict[tuple, int]:
        """Total shots each measurement setting must provide, in entry order."""
        shots: dict[tuple, int] = collections.OrderedDict()
        for entry, count in zip(decomposition.entries, self.allotments):
            if entry.monomial.kind is not MeasurementKind.CONSTANT:
                shots[entry.monomial.setting] = shots.get(entry.monomial.setting, 0) + count
        return dict(shots)

    def to_dict(self) -> dict[str, Any]:
        return {
            'allotments': list(self.allotments),
            'probabilities': list(self.probabilities),
            'seed': self.seed,
            'stratified': self.stratified,
        }


def plan_importance_sampling(decomposition: WitnessDecomposition, shots: int, seed: Seed) -> SamplingPlan:
    """Multinomial allotment of `shots` with p_i proportional to |lambda_i|.

    >>> from bosonic_cert.witnesses import OperatorPolynomial
    >>> n = OperatorPolynomial.symbol('n')
    >>> plan = plan_importance_sampling(decompose_for_measurement(n, 'heterodyne'), 10, seed=3)
    >>> plan.allotments
    (0, 10)
    """
    measured = _measured(decomposition)
    if int(shots) != shots or shots < len(measured):
        raise InvalidParameterError(
            'shots', f'need at least one shot per measured term: {shots=} < {len(measured)}'
        )
    probabilities = np.zeros(len(decomposition.entries))
    allotments = np.zeros(len(decomposition.entries), dtype=np.int64)
    if measured:
        weights = np.abs(decomposition.coefficients[measured])
        probabilities[measured] = weights / weights.sum()
        rng = chunk_generator(int(seed), PLAN_STREAM)
        allotments[measured] = rng.multinomial(int(shots), probabilities[measured])
    logger.debug('Plan for %r: %s', decomposition, allotments.tolist())
    return SamplingPlan(tuple(int(a) for a in allotments), tuple(float(p) for p in probabilities), int(seed))


def plan_stratified(
    decomposition: WitnessDecomposition,
    shots: int,
    seed: Seed,
    f2: Optional[Union[float, Sequence[float]]] = None,
) -> SamplingPlan:
    """Deterministic allotment with n_i proportional to |lambda_i| sqrt(<f_i^2>)
    (|lambda_i| alone without `f2`), rounded by largest remainder with at least
    one shot per measured entry.

    >>> from bosonic_cert.witnesses import OperatorPolynomial
    >>> d = decompose_for_measurement(OperatorPolynomial.symbol('n') * 2, 'heterodyne')
    >>> plan_stratified(d, 10, seed=0, f2=[1.0, 4.0]).allotments
    (0, 10)
    """
    measured = _measured(decomposition)
    if int(shots) != shots or shots < len(measured):
        raise InvalidParameterError(
            'shots', f'need at least one shot per measured term: {shots=} < {len(measured)}'
        )
    probabilities = np.zeros(len(decomposition.entries))
    allotments = np.zeros(len(decomposition.entries), dtype=np.int64)
    if measured:
        weights = np.abs(decomposition.coefficients[measured])
        if f2 is not None:
            moments = np.broadcast_to(np.asarray(f2, dtype=np.float64), decomposition.coefficients.shape)
            weights = weights * np.sqrt(np.maximum(moments[measured], 1e-12))
        probabilities[measured] = weights / weights.sum()
        spare = int(shots) - len(measured)
        ideal = spare * probabilities[measured]
        counts = np.floor(ideal).astype(np.int64)
        leftover = spare - int(counts.sum())
        counts[np.argsort(-(ideal - counts), kind='stable')[:leftover]] += 1
        allotments[measured] = counts + 1
    logger.debug('Stratified plan for %r: %s', decomposition, allotments.tolist())
    return SamplingPlan(
        tuple(int(a) for a in allotments), tuple(float(p) for p in probabilities), int(seed), stratified=True
    )


def setting_seed(seed: Seed, index: int) -> int:
    """Seed of the record for the `index`-th measurement setting of a run."""
    sequence = np.random.SeedSequence(int(seed), spawn_key=(PLAN_STREAM + 1 + int(index),))
    return int(sequence.generate_state(1, np.uint64)[0])


# estimation ---------------------------------------------------------------- #

def _index_records(records: Union[Mapping[Any, MeasurementRecord], Iterable[MeasurementRecord]]) -> dict:
    if isinstance(records, Mapping):
        records = records.values()
    return {record.setting: record for record in records}


def _entry_values(entry, record: Optional[MeasurementRecord], start: int, count: Optional[int]) -> np.ndarray:
    if record is None:
        raise CoverageError('records', f'no record for setting {entry.monomial.setting}')
    outcomes = record.outcomes[start:] if count is None else record.outcomes[start : start + count]
    needed = 1 if count is None else count
    if len(outcomes) < needed:
        raise CoverageError(
            'records', f'record for {entry.monomial.setting} holds {record.shots} shots, need {start + needed}'
        )
    values = entry.monomial.evaluate(outcomes)
    if not np.all(np.isfinite(values)):
        raise NumericsError('outcomes', f'non-finite monomial values for {entry.monomial.to_dict()}')
    return values


def estimate_witness(
    decomposition: WitnessDecomposition,
    records: Union[Mapping[Any, MeasurementRecord], Iterable[MeasurementRecord]],
    plan: Optional[SamplingPlan] = None,
) -> tuple[float, float]:
    """Estimate of <W> and the estimated variance of that estimate.

    Without a plan every entry averages the whole record of its setting and
    the estimate is sum_i lambda_i mean(f_i). With a plan, entry i consumes the
    next `plan.allotments[i]` shots of its setting's record and the estimate is
    the importance-sampling mean of F.

    >>> from bosonic_cert.witnesses import OperatorPolynomial
    >>> one = decompose_for_measurement(OperatorPolynomial.identity())
    >>> estimate_witness(one, [])
    (1.0, 0.0)
    """
    by_setting = _index_records(records)
    constant = _constant(decomposition)
    measured = _measured(decomposition)
    if plan is None:
        estimate, variance = constant, 0.0
        for i in measured:
            entry = decomposition.entries[i]
            values = _entry_values(entry, by_setting.get(entry.monomial.setting), 0, None)
            estimate += entry.coefficient * float(values.mean())
            if values.size > 1:
                variance += entry.coefficient**2 * float(values.var(ddof=1)) / values.size
        return float(estimate), float(variance)

    if len(plan.allotments) != len(decomposition.entries):
        raise InvalidParameterError('plan', 'plan and decomposition disagree on the number of entries')
    if plan.stratified:
        return _stratified_estimate(decomposition, by_setting, plan, constant, measured)
    total_weight = float(np.abs(decomposition.coefficients[measured]).sum()) if measured else 0.0
    offsets: dict[tuple, int] = collections.defaultdict(int)
    samples = []
    for i in measured:
        entry, count = decomposition.entries[i], plan.allotments[i]
        if not count:
            continue
        setting = entry.monomial.setting
        values = _entry_values(entry, by_setting.get(setting), offsets[setting], count)
        offsets[setting] += count
        samples.append(math.copysign(total_weight, entry.coefficient) * values)
    if not samples:
        return constant, 0.0
    values = np.concatenate(samples)
    variance = float(values.var(ddof=1)) / values.size if values.size > 1 else 0.0
    return float(constant + values.mean()), variance


def _stratified_estimate(
    decomposition: WitnessDecomposition, by_setting: dict, plan: SamplingPlan, constant: float, measured: list[int]
) -> tuple[float, float]:
    offsets: dict[tuple, int] = collections.defaultdict(int)
    estimate, variance = constant, 0.0
    for i in measured:
        entry, count = decomposition.entries[i], plan.allotments[i]
        if not count:
            raise CoverageError('plan', f'stratified plan gives no shots to entry {i}')
        setting = entry.monomial.setting
        values = _entry_values(entry, by_setting.get(setting), offsets[setting], count)
        offsets[setting] += count
        estimate += entry.coefficient * float(values.mean())
        if count > 1:
            variance += entry.coefficient**2 * float(values.var(ddof=1)) / count
    return float(estimate), float(variance)


# Hoeffding sizing ---------------------------------------------------------- #

def _ceil(value: float) -> int:
    nearest = round(value)
    if abs(value - nearest) <= 1e-12 * max(1.0, abs(value)):
        return int(nearest)
    return int(math.ceil(value))


def _log_term(delta: float) -> float:
    return math.log(HOEFFDING_PREFACTOR / delta)


def hoeffding_requirements(f2: float, epsilon: float, delta: float) -> int:
    """N = ceil(33 <F^2> ln(8/delta) / epsilon^2)."""
    for name, value in (('f2', f2), ('epsilon', epsilon), ('delta', delta)):
        if not value > 0:
            raise InvalidParameterError(name, f'{name} must be positive: {value}')
    return _ceil(HOEFFDING_CONSTANT * f2 * _log_term(delta) / epsilon**2)


def hoeffding_half_width(f2: float, shots: int, delta: float) -> float:
    """Precision reached with `shots` samples at failure probability delta."""
    if shots < 1:
        return math.inf
    return math.sqrt(HOEFFDING_CONSTANT * f2 * _log_term(delta) / shots)


def second_moments(
    decomposition: WitnessDecomposition, state: State, safety: Optional[float] = None
) -> np.ndarray:
    """<f_i^2> on `state` from the exact oracle, times `CONFIG['moment_safety']`."""
    safety = CONFIG['moment_safety'] if safety is None else safety
    values = []
    for entry in decomposition.entries:
        if entry.monomial.kind in (MeasurementKind.CONSTANT, MeasurementKind.PARITY):
            values.append(1.0)
            continue
        square = entry.monomial.square_polynomial(decomposition.n_modes)
        values.append(safety * max(polynomial_expectation(state, square).real, 0.0))
    return np.asarray(values)


def variance_proxy(
    decomposition: WitnessDecomposition,
    f2: Union[float, Sequence[float]],
    rule: Union[VarianceProxy, str] = VarianceProxy.VERBATIM,
) -> float:
    """Bound on <F^2> from per-entry (or uniform) bounds on <f_i^2>.

    >>> from bosonic_cert.witnesses import OperatorPolynomial
    >>> d = decompose_for_measurement(OperatorPolynomial.symbol('n') * 2, 'heterodyne')
    >>> [e.coefficient for e in d.entries]
    [-2.0, 2.0]
    >>> variance_proxy(d, 3.0), variance_proxy(d, 3.0, 'squared'), variance_proxy(d, [1.0, 3.0], 'exact')
    (24.0, 48.0, 32.0)
    """
    rule = VarianceProxy(rule)
    weights = np.abs(decomposition.coefficients)
    if not weights.size:
        return 0.0
    moments = np.broadcast_to(np.asarray(f2, dtype=np.float64), weights.shape)
    m = len(weights)
    if rule is VarianceProxy.VERBATIM:
        return float(m**2 * weights.max() * moments.max())
    if rule is VarianceProxy.SQUARED:
        return float(m**2 * weights.max() ** 2 * moments.max())
    return float(weights.sum() * (weights * moments).sum())


# sample complexity --------------------------------------------------------- #

@dataclasses.dataclass(frozen=True)
class ComplexityParams:
    """Inputs of the big-O sample-complexity bounds. `sigma_moments[k]` bounds
    the mean square of every product of k quadrature operators."""

    n_s: int
    n_gkp: int
    m: int
    r: float
    epsilon: float
    delta: float
    sigma_moments: Mapping[int, float] = dataclasses.field(default_factory=dict)
    n_t: int = 0
    n_z: int = 0
    n_cz: int = 0

    def __post_init__(self) -> None:
        for name in ('n_s', 'n_gkp', 'm', 'n_t', 'n_z', 'n_cz'):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise InvalidParameterError(name, f'{name} must be a non-negative integer: {value}')
        if self.r < 0:
            raise InvalidParameterError('r', f'r must be non-negative: {self.r}')
        for name in ('epsilon', 'delta'):
            if not 0 < getattr(self, name) < 1:
                raise InvalidParameterError(name, f'{name} must lie in (0, 1): {getattr(self, name)}')
        moments = {int(k): float(v) for k, v in dict(self.sigma_moments).items()}
        if any(v < 0 for v in moments.values()):
            raise InvalidParameterError('sigma_moments', 'moment bounds must be non-negative')
        object.__setattr__(self, 'sigma_moments', moments)

    def sigma(self, k: int) -> float:
        if k not in self.sigma_moments:
            raise InvalidParameterError('sigma_moments', f'missing moment bound sigma_{k}')
        return self.sigma_moments[k]

    def sigma_upto(self, k: int) -> float:
        return max(self.sigma(j) for j in range(1, k + 1))

    @property
    def prefactor(self) -> float:
        return HOEFFDING_CONSTANT * _log_term(self.delta) / self.epsilon**2

    def to_dict(self) -> dict[str, Any]:
        document = dataclasses.asdict(self)
        document['sigma_moments'] = {str(k): v for k, v in sorted(self.sigma_moments.items())}
        return document


def sample_complexity_resource(params: ComplexityParams) -> int:
    """33 ln(8/delta)/eps^2 (N_GKP^2 e^{r(4m+2)} sigma_{<=4m+2} + N_s^2 e^{2r} sigma_2).

    >>> p = ComplexityParams(n_s=1, n_gkp=0, m=1, r=0.0, epsilon=0.1, delta=0.05, sigma_moments={2: 1.0})
    >>> sample_complexity_resource(p) == hoeffding_requirements(1.0, 0.1, 0.05)
    True
    """
    order = 4 * params.m + 2
    gkp = params.n_gkp**2 * math.exp(params.r * order) * params.sigma_upto(order) if params.n_gkp else 0.0
    squeezed = params.n_s**2 * math.exp(2 * params.r) * params.sigma(2) if params.n_s else 0.0
    return _ceil(params.prefactor * (gkp + squeezed))


def sample_complexity_iqp(params: ComplexityParams) -> int:
    """33 ln(8/delta)/eps^2 (N_GKP^2 (n_T e^r)^{4m+2} (n_CZ+3)^{8m+4} sigma_{<=4m+2}
    + N_s^2 n_T^2 (n_CZ+3)^4 sigma_{<=4})."""
    order = 4 * params.m + 2
    gates = params.n_cz + 3
    # without T gates the bound falls back to the single-layer count
    n_t = max(params.n_t, 1)
    gkp = 0.0
    if params.n_gkp:
        gkp = (
            params.n_gkp**2
            * (n_t * math.exp(params.r)) ** order
            * gates ** (8 * params.m + 4)
            * params.sigma_upto(order)
        )
    squeezed = 0.0
    if params.n_s:
        squeezed = params.n_s**2 * n_t**2 * gates**4 * params.sigma_upto(4)
    return _ceil(params.prefactor * (gkp + squeezed))


def oracle_moment_bounds(
    state: State, max_order: int, angles: Sequence[float] = (0.0, math.pi / 2, math.pi / 4, -math.pi / 4),
    safety: Optional[float] = None,
) -> dict[int, float]:
    """sigma_k for k = 1..max_order as the largest <x_theta^(2k)> over modes and
    `angles`, times `CONFIG['moment_safety']`.

    >>> from bosonic_cert.fock_algebra import FockVector
    >>> bounds = oracle_moment_bounds(FockVector.basis(0, 12), 2, safety=1.0)
    >>> {k: round(v, 9) for k, v in bounds.items()}
    {1: 0.5, 2: 0.75}
    """
    safety = CONFIG['moment_safety'] if safety is None else safety
    bounds = {}
    for k in range(1, max_order + 1):
        values = [
            polynomial_expectation(state, OperatorPolynomial.quadrature(mode, theta, state.n_modes) ** (2 * k)).real
            for mode in range(state.n_modes)
            for theta in angles
        ]
        bounds[k] = safety * max(values)
    return bounds


# certification ------------------------------------------------------------- #

def decide(ci: Sequence[float], epsilon: float) -> Verdict:
    """accept if the lower bound clears 1 - epsilon, reject if the upper bound
    falls below it, otherwise inconclusive."""
    lower, upper = ci
    threshold = 1 - epsilon
    if lower >= threshold:
        return Verdict.ACCEPT
    if upper < threshold:
        return Verdict.REJECT
    return Verdict.INCONCLUSIVE


@dataclasses.dataclass(frozen=True)
class CertificationReport:
    estimate: float
    ci: tuple[float, float]
    epsilon: float
    delta: float
    n_used: int
    verdict: Verdict
    seed: int
    witness_params: Mapping[str, Any] = dataclasses.field(default_factory=dict)
    strategy: str = Strategy.AUTO.value
    proxy: str = VarianceProxy.VERBATIM.value
    f2_bound: float = 0.0
    interval: str = Interval.HOEFFDING.value
    standard_error: float = 0.0
    settings: int = 0
    oracle: Optional[float] = None
    estimator: str = Estimator.IMPORTANCE.value
    required_shots: Optional[int] = None

    @property
    def threshold(self) -> float:
        return 1 - self.epsilon

    def to_dict(self) -> dict[str, Any]:
        document = dataclasses.asdict(self)
        document.update(ci=list(self.ci), verdict=self.verdict.value, threshold=self.threshold)
        # no estimate when the run was not performed
        document['estimate'] = self.estimate if math.isfinite(self.estimate) else None
        document['ci'] = [c if math.isfinite(c) else None for c in self.ci]
        return document


def _over_budget_report(
    witness: OperatorPolynomial,
    epsilon: float,
    delta: float,
    seed: Seed,
    required: int,
    bound: float,
    decomposition: WitnessDecomposition,
    proxy: Union[VarianceProxy, str],
    interval: Interval,
    estimator: Estimator,
) -> CertificationReport:
    return CertificationReport(
        estimate=math.nan,
        ci=(-math.inf, math.inf),
        epsilon=float(epsilon),
        delta=float(delta),
        n_used=0,
        verdict=Verdict.INCONCLUSIVE,
        seed=int(seed),
        witness_params=dict(witness.params) if isinstance(witness, Witness) else {},
        strategy=decomposition.strategy.value,
        proxy=VarianceProxy(proxy).value,
        f2_bound=bound,
        interval=interval.value,
        estimator=estimator.value,
        required_shots=int(required),
    )


def certify(
    state: State,
    witness: Union[OperatorPolynomial, CatParams, GkpParams],
    epsilon: float,
    delta: float,
    seed: Seed,
    *,
    shots: Optional[int] = None,
    strategy: Union[Strategy, str] = Strategy.AUTO,
    proxy: Union[VarianceProxy, str] = VarianceProxy.VERBATIM,
    interval: Union[Interval, str] = Interval.HOEFFDING,
    f2_bound: Optional[Union[float, Sequence[float]]] = None,
    reference: Optional[State] = None,
    estimator: Union[Estimator, str] = Estimator.IMPORTANCE,
    override: bool = False,
) -> CertificationReport:
    """Decompose the witness, plan and simulate the measurements on `state`,
    estimate <W> and decide at (epsilon, delta).

    Without `shots`, N is sized by Hoeffding at precision epsilon/2 from the
    `proxy` bound; per-entry <f_i^2> come from `f2_bound` or from the oracle on
    `reference` (default: `state`). When that N exceeds
    `CONFIG['max_total_shots']` no shots are taken and the report is
    inconclusive, carrying the required N.

    `estimator` picks importance sampling or a stratified allotment; the
    Hoeffding interval assumes the former.
    """
    for name, value in (('epsilon', epsilon), ('delta', delta)):
        if not 0 < value < 1:
            raise InvalidParameterError(name, f'{name} must lie in (0, 1): {value}')
    interval = Interval(interval)
    estimator = Estimator(estimator)
    if not isinstance(witness, OperatorPolynomial):
        witness = build_code_witness(witness)
    check_truncation(state, override)
    with stage('certify', epsilon=epsilon, delta=delta, seed=seed):
        decomposition = decompose_for_measurement(witness, strategy)
        f2 = second_moments(decomposition, reference or state) if f2_bound is None else f2_bound
        bound = variance_proxy(decomposition, f2, proxy)
        measured = len(_measured(decomposition))
        if shots is None:
            shots = max(hoeffding_requirements(bound, epsilon / 2, delta), measured) if measured else 0
            if shots > CONFIG['max_total_shots']:
                logger.warning(
                    'Hoeffding budget of %d shots exceeds max_total_shots=%d; reporting inconclusive',
                    shots, CONFIG['max_total_shots'],
                )
                return _over_budget_report(
                    witness, epsilon, delta, seed, shots, bound, decomposition, proxy, interval, estimator
                )
        if estimator is Estimator.STRATIFIED:
            plan = plan_stratified(decomposition, shots, seed, None if np.isscalar(f2) else f2)
        else:
            plan = plan_importance_sampling(decomposition, shots, seed)
        records = [
            sample_setting(state, setting, count, setting_seed(seed, index), override=override)
            for index, (setting, count) in enumerate(plan.shots_per_setting(decomposition).items())
            if count
        ]
        estimate, variance = estimate_witness(decomposition, records, plan)
        if interval is Interval.HOEFFDING:
            half_width = hoeffding_half_width(bound, plan.total, delta) if measured else 0.0
        else:
            half_width = float(scipy.stats.norm.ppf(1 - delta / 2)) * math.sqrt(variance)
        ci = (estimate - half_width, estimate + half_width)
        verdict = decide(ci, epsilon)
    try:
        oracle: Optional[float] = witness_expectation(state, witness)
    except ResourceLimitError as exc:
        logger.warning('Oracle expectation skipped: %s', exc.message)
        oracle = None
    report = CertificationReport(
        estimate=estimate,
        ci=ci,
        epsilon=float(epsilon),
        delta=float(delta),
        n_used=plan.total,
        verdict=verdict,
        seed=int(seed),
        witness_params=dict(witness.params) if isinstance(witness, Witness) else {},
        strategy=decomposition.strategy.value,
        proxy=VarianceProxy(proxy).value,
        f2_bound=bound,
        interval=interval.value,
        standard_error=math.sqrt(variance),
        settings=len(records),
        oracle=oracle,
        estimator=estimator.value,
    )
    logger.info(
        'Certification %s: estimate %.6f, CI [%.6f, %.6f], threshold %.3f, %d shots',
        verdict.value, estimate, ci[0], ci[1], report.threshold, plan.total,
    )
    return report


if __name__ == '__main__':
    import doctest

    doctest.testmod()
