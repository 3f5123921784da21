"""
Batch front-end: one JSON experiment file per run.

    certify --config experiment.json --out results/ [--seed N] [--override-truncation-guard]

Exit codes: 0 completed (whatever the verdict), 2 invalid input, 3 resource
guard tripped, 1 anything else. Errors go to stderr as one JSON object.

>>> config = ExperimentConfig.from_dict({'task': 'complexity', 'complexity': {
...     'kind': 'resource', 'n_s': 1, 'n_gkp': 0, 'm': 1, 'r': 0.0, 'sigma_moments': {'2': 1.0}}})
>>> config.task.value, config.epsilon
('complexity', 0.1)
>>> ExperimentConfig.from_dict({'task': 'certify', 'epsilon': 0})
Traceback (most recent call last):
...
bosonic_cert.exceptions.ConfigValidationError: epsilon must lie in (0, 1): 0
"""
from __future__ import annotations

import argparse
import dataclasses
import datetime
import enum
import importlib.metadata
import json
import pathlib
import sys
from typing import Any, Mapping, Optional, Sequence

import np_logging

from bosonic_cert.certifier import (
    ComplexityParams,
    Estimator,
    Interval,
    VarianceProxy,
    certify,
    oracle_moment_bounds,
    sample_complexity_iqp,
    sample_complexity_resource,
)
from bosonic_cert.code_states import (
    CatParams,
    GkpParams,
    GraphSpec,
    IqpCircuitSpec,
    apply_loss,
    build_cat_basis,
    build_cluster_state,
    build_gaussian_input,
    build_gkp_grid_state,
    build_gkp_state,
    build_grid_cluster_state,
    build_grid_iqp_output,
    build_iqp_output,
)
from bosonic_cert.exceptions import (
    RESOURCE_ERRORS,
    VALIDATION_ERRORS,
    BosonicCertError,
    ConfigValidationError,
    ResourceLimitError,
)
from bosonic_cert.fock_algebra import FockVector, State
from bosonic_cert.measurement_sim import histogram_csv, sample_setting
from bosonic_cert.position_grid import GridState
from bosonic_cert.types import MeasurementKind, Strategy
from bosonic_cert.utils import dump_json, load_json, pair_to_complex, stage
from bosonic_cert.witnesses import (
    Witness,
    build_code_witness,
    build_gkp_plus_witness,
    build_iqp_witness,
    build_resource_witness,
    decompose_for_measurement,
    export_decomposition,
    unit_eigenspace,
    witness_expectation,
)

logger = np_logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_RESOURCE = 3


class Task(str, enum.Enum):
    CERTIFY = 'certify'
    WITNESS_REPORT = 'witness_report'
    COMPLEXITY = 'complexity'
    SAMPLE_DUMP = 'sample_dump'


# schema -------------------------------------------------------------------- #

TOP_LEVEL_KEYS = frozenset(
    {'task', 'cutoff', 'seed', 'epsilon', 'delta', 'state', 'witness', 'certification', 'complexity', 'sample', 'outputs'}
)

STATE_KEYS: dict[str, frozenset[str]] = {
    'cat': frozenset({'alpha', 'r', 'cat_family', 'logical'}),
    'gkp': frozenset({'sigma', 'm', 'logical'}),
    'coherent': frozenset({'alpha'}),
    'squeezed_vacuum': frozenset({'r', 'axis'}),
    'fock': frozenset({'n'}),
    'cluster': frozenset({'graph', 'sigma', 'squeezed_sigma', 'm'}),
    'iqp': frozenset({'circuit', 'sigma', 'squeezed_sigma', 'm', 'local_gates_first'}),
}
STATE_COMMON_KEYS = frozenset({'family', 'loss', 'loss_modes'})

WITNESS_KEYS: dict[str, frozenset[str]] = {
    'cat': frozenset({'alpha', 'r', 'cat_family'}),
    'gkp': frozenset({'sigma', 'm'}),
    'gkp_plus': frozenset({'sigma', 'm'}),
    'resource': frozenset({'graph', 'sigma', 'squeezed_sigma', 'm'}),
    'iqp': frozenset({'circuit', 'sigma', 'squeezed_sigma', 'm'}),
}

CERTIFICATION_KEYS = frozenset({'shots', 'strategy', 'proxy', 'interval', 'f2_bound', 'estimator'})
COMPLEXITY_KEYS = frozenset({'kind', 'n_s', 'n_gkp', 'm', 'r', 'sigma_moments', 'n_t', 'n_z', 'n_cz'})
SAMPLE_KEYS = frozenset({'setting', 'angles', 'shots', 'bins', 'mode'})

DEFAULT_OUTPUTS: dict[str, str] = {
    'report': 'report.json',
    'metadata': 'metadata.json',
    'witness': 'witness.json',
    'decomposition': 'decomposition.json',
    'witness_report': 'witness_report.json',
    'complexity': 'complexity.json',
    'samples_csv': 'samples.csv',
    'samples_json': 'samples.json',
    'histogram': 'histogram.csv',
}

CAT_LOGICAL = {'zero': (1, 0), 'one': (0, 1), 'plus': (1, 1), 'minus': (1, -1)}


def _check_keys(section: Mapping[str, Any], allowed: frozenset[str], where: str) -> None:
    if not isinstance(section, Mapping):
        raise ConfigValidationError(where, f'{where} must be an object')
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigValidationError(f'{where}.{unknown[0]}', f'unknown key(s) in {where}: {unknown}')


def _family(section: Mapping[str, Any], families: Mapping[str, frozenset[str]], where: str, extra: frozenset[str]) -> str:
    family = section.get('family')
    if family not in families:
        raise ConfigValidationError(f'{where}.family', f'{where}.family must be one of {sorted(families)}: {family!r}')
    _check_keys(section, families[family] | extra, where)
    return family


def _complex(value: Any, field: str) -> complex:
    """A number or a [re, im] pair."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigValidationError(field, f'{field} must be a number or a [re, im] pair')
        return pair_to_complex(value)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigValidationError(field, f'{field} must be a number or a [re, im] pair')
    return complex(value)


def _probability(value: Any, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not 0 < value < 1:
        raise ConfigValidationError(field, f'{field} must lie in (0, 1): {value}')
    return float(value)


def _integer(value: Any, field: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigValidationError(field, f'{field} must be an integer >= {minimum}: {value!r}')
    return value


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a task, its physical inputs and where its artifacts go.

    Sections are checked for unknown keys here; physical ranges are enforced
    by the constructors they feed.
    """

    task: Task
    cutoff: int = 40
    seed: int = 0
    epsilon: float = 0.1
    delta: float = 0.05
    state: Optional[Mapping[str, Any]] = None
    witness: Optional[Mapping[str, Any]] = None
    certification: Mapping[str, Any] = dataclasses.field(default_factory=dict)
    complexity: Optional[Mapping[str, Any]] = None
    sample: Optional[Mapping[str, Any]] = None
    outputs: Mapping[str, str] = dataclasses.field(default_factory=dict)

    @classmethod
    def from_dict(cls, document: Mapping[str, Any]) -> ExperimentConfig:
        _check_keys(document, TOP_LEVEL_KEYS, 'config')
        try:
            task = Task(document.get('task'))
        except ValueError:
            raise ConfigValidationError('task', f'task must be one of {[t.value for t in Task]}') from None
        fields: dict[str, Any] = {'task': task}
        if 'cutoff' in document:
            fields['cutoff'] = _integer(document['cutoff'], 'cutoff', minimum=2)
        if 'seed' in document:
            fields['seed'] = _integer(document['seed'], 'seed')
        for name in ('epsilon', 'delta'):
            if name in document:
                fields[name] = _probability(document[name], name)
        if document.get('state') is not None:
            _family(document['state'], STATE_KEYS, 'state', STATE_COMMON_KEYS)
            fields['state'] = dict(document['state'])
        if document.get('witness') is not None:
            _family(document['witness'], WITNESS_KEYS, 'witness', frozenset({'family'}))
            fields['witness'] = dict(document['witness'])
        if document.get('certification') is not None:
            _check_keys(document['certification'], CERTIFICATION_KEYS, 'certification')
            choice_fields = (
                ('strategy', Strategy), ('proxy', VarianceProxy), ('interval', Interval), ('estimator', Estimator)
            )
            for name, choices in choice_fields:
                value = document['certification'].get(name)
                if value is not None and value not in {c.value for c in choices}:
                    raise ConfigValidationError(
                        f'certification.{name}', f'{name} must be one of {[c.value for c in choices]}: {value!r}'
                    )
            if document['certification'].get('shots') is not None:
                _integer(document['certification']['shots'], 'certification.shots', minimum=1)
            fields['certification'] = dict(document['certification'])
        if document.get('complexity') is not None:
            _check_keys(document['complexity'], COMPLEXITY_KEYS, 'complexity')
            fields['complexity'] = dict(document['complexity'])
        if document.get('sample') is not None:
            _check_keys(document['sample'], SAMPLE_KEYS, 'sample')
            fields['sample'] = dict(document['sample'])
        if document.get('outputs') is not None:
            _check_keys(document['outputs'], frozenset(DEFAULT_OUTPUTS), 'outputs')
            fields['outputs'] = dict(document['outputs'])
        config = cls(**fields)
        config._check_task_inputs()
        return config

    @classmethod
    def load(cls, path: str | pathlib.Path) -> ExperimentConfig:
        try:
            document = load_json(path)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigValidationError('config', f'cannot read config {path}: {exc}') from exc
        return cls.from_dict(document)

    def _check_task_inputs(self) -> None:
        required = {
            Task.CERTIFY: ('state',),
            Task.WITNESS_REPORT: (),
            Task.COMPLEXITY: ('complexity',),
            Task.SAMPLE_DUMP: ('state', 'sample'),
        }[self.task]
        for name in required:
            if getattr(self, name) is None:
                raise ConfigValidationError(name, f'{self.task.value} needs a {name} section')
        if self.task is Task.WITNESS_REPORT and self.witness is None and self.state is None:
            raise ConfigValidationError('witness', 'witness_report needs a witness or a code state')

    def output(self, name: str) -> str:
        return self.outputs.get(name, DEFAULT_OUTPUTS[name])

    def with_seed(self, seed: Optional[int]) -> ExperimentConfig:
        if seed is None:
            return self
        return dataclasses.replace(self, seed=_integer(seed, 'seed'))

    def to_dict(self) -> dict[str, Any]:
        document = dataclasses.asdict(self)
        document['task'] = self.task.value
        return {k: v for k, v in document.items() if v is not None}


# builders ------------------------------------------------------------------ #

def _cat_params(section: Mapping[str, Any], where: str) -> CatParams:
    if 'alpha' not in section:
        raise ConfigValidationError(f'{where}.alpha', 'cat needs alpha')
    return CatParams(
        _complex(section['alpha'], f'{where}.alpha'),
        _complex(section.get('r', 0), f'{where}.r'),
        section.get('cat_family', 'two_component'),
    )


def _gkp_params(section: Mapping[str, Any], logical: str = 'zero') -> GkpParams:
    return GkpParams(section.get('sigma', 0.3), section.get('m', 1), logical)


def _graph(section: Mapping[str, Any], where: str) -> GraphSpec:
    if 'graph' not in section:
        raise ConfigValidationError(f'{where}.graph', f'{section["family"]} needs a graph')
    return GraphSpec.from_dict(section['graph'])


def _circuit(section: Mapping[str, Any], where: str) -> IqpCircuitSpec:
    if 'circuit' not in section:
        raise ConfigValidationError(f'{where}.circuit', 'iqp needs a circuit')
    return IqpCircuitSpec.from_dict(section['circuit'])


def build_state(section: Mapping[str, Any], cutoff: int, override: bool = False) -> State:
    """State named by a config `state` section, with optional pure loss."""
    family = section['family']
    if family == 'cat':
        logical = section.get('logical', 'zero')
        if logical not in CAT_LOGICAL:
            raise ConfigValidationError('state.logical', f'logical must be one of {sorted(CAT_LOGICAL)}')
        state: State = build_cat_basis(_cat_params(section, 'state'), cutoff, override).logical_state(
            *CAT_LOGICAL[logical]
        )
    elif family == 'gkp':
        state = build_gkp_state(_gkp_params(section, section.get('logical', 'zero')), cutoff, override)
    elif family == 'coherent':
        state = build_gaussian_input(
            'coherent', cutoff, alpha=_complex(section.get('alpha', 0), 'state.alpha'), override=override
        )
    elif family == 'squeezed_vacuum':
        state = build_gaussian_input(
            'squeezed_vacuum', cutoff, r=section.get('r', 0.0), axis=section.get('axis', 'momentum'),
            override=override,
        )
    elif family == 'fock':
        state = FockVector.basis(section.get('n', 0), cutoff)
    elif family == 'cluster':
        state = build_cluster_state(
            _graph(section, 'state'), section.get('sigma', 0.3), cutoff, section.get('m', 1), override,
            squeezed_sigma=section.get('squeezed_sigma'),
        )
    else:
        state = build_iqp_output(
            _circuit(section, 'state'), section.get('sigma', 0.3), cutoff, section.get('m', 1), override,
            bool(section.get('local_gates_first', False)), squeezed_sigma=section.get('squeezed_sigma'),
        )
    if section.get('loss') is not None:
        state = apply_loss(state, section['loss'], section.get('loss_modes'))
    return state


def _witness_section(config: ExperimentConfig) -> Mapping[str, Any]:
    section = config.witness
    if section is None:
        state = config.state or {}
        family = {'cat': 'cat', 'gkp': 'gkp', 'cluster': 'resource', 'iqp': 'iqp'}.get(state.get('family'))
        if family is None:
            raise ConfigValidationError('witness', f'no default witness for a {state.get("family")} state')
        keys = WITNESS_KEYS[family]
        section = {'family': family, **{k: v for k, v in state.items() if k in keys}}
    return section


def build_witness(config: ExperimentConfig) -> Witness:
    """Witness named by the config, or the code/resource witness matching the
    state when no `witness` section is given."""
    section = _witness_section(config)
    family = section['family']
    if family == 'cat':
        return build_code_witness(_cat_params(section, 'witness'))
    if family == 'gkp':
        return build_code_witness(_gkp_params(section))
    if family == 'gkp_plus':
        return build_gkp_plus_witness(_gkp_params(section, 'plus'))
    if family == 'resource':
        return build_resource_witness(
            _graph(section, 'witness'), section.get('sigma', 0.3), section.get('m', 1), section.get('squeezed_sigma')
        )
    return build_iqp_witness(
        _circuit(section, 'witness'), section.get('sigma', 0.3), section.get('m', 1), section.get('squeezed_sigma')
    )


def grid_target_state(config: ExperimentConfig) -> Optional[GridState]:
    """Ideal target of a GKP, cluster or IQP witness on position grids; None
    for cat witnesses, which the Fock oracle handles exactly."""
    section = _witness_section(config)
    family = section['family']
    sigma, m, squeezed_sigma = section.get('sigma', 0.3), section.get('m', 1), section.get('squeezed_sigma')
    if family == 'gkp':
        return build_gkp_grid_state(_gkp_params(section))
    if family == 'gkp_plus':
        return build_gkp_grid_state(_gkp_params(section, 'plus'))
    if family == 'resource':
        return build_grid_cluster_state(_graph(section, 'witness'), sigma, m, squeezed_sigma)
    if family == 'iqp':
        return build_grid_iqp_output(_circuit(section, 'witness'), sigma, m, squeezed_sigma)
    return None


# tasks --------------------------------------------------------------------- #

def run_certify(config: ExperimentConfig, out: pathlib.Path, override: bool = False) -> dict[str, Any]:
    options = config.certification
    state = build_state(config.state, config.cutoff, override)
    witness = build_witness(config)
    report = certify(
        state,
        witness,
        config.epsilon,
        config.delta,
        config.seed,
        shots=options.get('shots'),
        strategy=options.get('strategy', Strategy.AUTO),
        proxy=options.get('proxy', VarianceProxy.VERBATIM),
        interval=options.get('interval', Interval.HOEFFDING),
        f2_bound=options.get('f2_bound'),
        estimator=options.get('estimator', Estimator.IMPORTANCE),
        override=override,
    )
    document = {'config': config.to_dict(), 'report': report.to_dict()}
    dump_json(document, out / config.output('report'))
    return document


def witness_report(config: ExperimentConfig, out: Optional[pathlib.Path] = None) -> dict[str, Any]:
    """Term count, largest coefficient, measurement settings and, when the
    truncated space is small enough, the top of the oracle spectrum."""
    witness = build_witness(config)
    strategy = config.certification.get('strategy', Strategy.AUTO)
    decomposition = decompose_for_measurement(witness, strategy)
    coefficients = [abs(c) for c in witness.terms.values()]
    summary: dict[str, Any] = {
        'label': witness.label,
        'params': dict(witness.params),
        'n_modes': witness.n_modes,
        'term_count': len(witness.terms),
        'max_abs_coefficient': max(coefficients, default=0.0),
        'degree': witness.degree,
        'strategy': decomposition.strategy.value,
        'decomposition_entries': len(decomposition),
        'total_weight': decomposition.total_weight,
        'settings': [
            {'kind': MeasurementKind(s[0]).value, 'angles': list(s[1]) if len(s) > 1 else None}
            for s in decomposition.settings()
        ],
        'spectrum': None,
        'target_value': None,
    }
    try:
        target = grid_target_state(config)
    except ResourceLimitError as exc:
        logger.warning('Grid target value skipped: %s', exc.message)
    else:
        if target is not None:
            summary['target_value'] = witness_expectation(target, witness)
    try:
        dimension, values, _ = unit_eigenspace(witness, config.cutoff)
    except ResourceLimitError as exc:
        logger.warning('Oracle spectrum skipped: %s', exc.message)
    else:
        summary['spectrum'] = {
            'cutoff': config.cutoff,
            'max_eigenvalue': float(values.max()),
            'unit_eigenspace_dimension': dimension,
        }
    if out is not None:
        dump_json(witness.to_dict(), out / config.output('witness'))
        export_decomposition(decomposition, out / config.output('decomposition'))
        dump_json(summary, out / config.output('witness_report'))
    return summary


def complexity_report(config: ExperimentConfig, out: Optional[pathlib.Path] = None, override: bool = False) -> dict[str, Any]:
    """Both big-O shot bounds; sigma_k come from the config or, failing that,
    from the oracle on the configured state."""
    section = dict(config.complexity)
    kind = section.pop('kind', 'resource')
    if kind not in ('resource', 'iqp'):
        raise ConfigValidationError('complexity.kind', f'kind must be resource or iqp: {kind!r}')
    moments = section.pop('sigma_moments', None)
    order = 4 * section.get('m', 1) + 2
    if moments is None:
        if config.state is None:
            raise ConfigValidationError('complexity.sigma_moments', 'give sigma_moments or a state to bound them')
        moments = oracle_moment_bounds(build_state(config.state, config.cutoff, override), order)
    try:
        params = ComplexityParams(epsilon=config.epsilon, delta=config.delta, sigma_moments=moments, **section)
    except TypeError as exc:
        raise ConfigValidationError('complexity', str(exc)) from exc
    calculator = sample_complexity_resource if kind == 'resource' else sample_complexity_iqp
    document = {'kind': kind, 'params': params.to_dict(), 'bound': calculator(params)}
    if out is not None:
        dump_json(document, out / config.output('complexity'))
    return document


def sample_dump(config: ExperimentConfig, out: pathlib.Path, override: bool = False) -> dict[str, Any]:
    section = config.sample
    state = build_state(config.state, config.cutoff, override)
    try:
        kind = MeasurementKind(section.get('setting', 'homodyne'))
    except ValueError:
        raise ConfigValidationError('sample.setting', 'setting must be homodyne, heterodyne or parity') from None
    if kind is MeasurementKind.HOMODYNE:
        angles = tuple(float(a) for a in section.get('angles', [0.0] * state.n_modes))
        setting: tuple[Any, ...] = (kind, angles)
    else:
        setting = (kind,)
    shots = _integer(section.get('shots', 1000), 'sample.shots', minimum=1)
    record = sample_setting(state, setting, shots, config.seed, override=override)
    record.to_csv(out / config.output('samples_csv'))
    record.to_json(out / config.output('samples_json'))
    histogram_csv(record, section.get('mode', 0), section.get('bins', 100), out / config.output('histogram'))
    return {'kind': kind.value, 'shots': record.shots, 'n_modes': record.n_modes, 'seed': config.seed}


def _metadata(config: ExperimentConfig, argv: Sequence[str]) -> dict[str, Any]:
    try:
        version = importlib.metadata.version('bosonic_cert')
    except importlib.metadata.PackageNotFoundError:
        version = None
    return {
        'created': datetime.datetime.now(datetime.timezone.utc).isoformat(),
        'version': version,
        'argv': list(argv),
        'task': config.task.value,
        'seed': config.seed,
    }


def run(
    config_path: str | pathlib.Path,
    out: str | pathlib.Path,
    seed: Optional[int] = None,
    override: bool = False,
    argv: Sequence[str] = (),
) -> dict[str, Any]:
    """Validate the config, run its task and write the artifacts under `out`."""
    config = ExperimentConfig.load(config_path).with_seed(seed)
    out = pathlib.Path(out)
    out.mkdir(parents=True, exist_ok=True)
    logger.info('Running %s from %s (seed %d)', config.task.value, config_path, config.seed)
    with stage(config.task.value, seed=config.seed):
        if config.task is Task.CERTIFY:
            result = run_certify(config, out, override)
        elif config.task is Task.WITNESS_REPORT:
            result = witness_report(config, out)
        elif config.task is Task.COMPLEXITY:
            result = complexity_report(config, out, override)
        else:
            result = sample_dump(config, out, override)
    dump_json(_metadata(config, argv), out / config.output('metadata'))
    logger.info('Finished %s; artifacts in %s', config.task.value, out)
    return result


def exit_code(exc: BaseException) -> int:
    """
    >>> from bosonic_cert.exceptions import TruncationError
    >>> exit_code(TruncationError('alpha')), exit_code(ConfigValidationError('epsilon')), exit_code(KeyError())
    (3, 2, 1)
    """
    if isinstance(exc, RESOURCE_ERRORS):
        return EXIT_RESOURCE
    if isinstance(exc, VALIDATION_ERRORS):
        return EXIT_VALIDATION
    return EXIT_FAILURE


def _error_document(exc: BaseException) -> dict[str, Any]:
    if isinstance(exc, BosonicCertError):
        return exc.to_dict()
    return {'error': 'internal', 'field': None, 'message': f'{type(exc).__name__}: {exc}', 'context': {}}


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog='certify', description='Construct bosonic witnesses, simulate their measurements and certify states.'
    )
    parser.add_argument('--config', required=True, type=pathlib.Path, help='experiment config (JSON)')
    parser.add_argument('--out', required=True, type=pathlib.Path, help='directory for reports and dumps')
    parser.add_argument('--seed', type=int, default=None, help='overrides the seed in the config')
    parser.add_argument(
        '--override-truncation-guard', action='store_true',
        help='run even if the Fock tail weight exceeds the configured threshold',
    )
    return parser.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parse_args(argv)
    try:
        run(args.config, args.out, args.seed, args.override_truncation_guard, argv)
    except Exception as exc:
        code = exit_code(exc)
        if code == EXIT_FAILURE:
            logger.exception('certify failed')
        print(json.dumps(_error_document(exc), sort_keys=True), file=sys.stderr)
        return code
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
