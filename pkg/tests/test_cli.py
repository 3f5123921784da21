import json
import math

import pytest

from bosonic_cert.certifier import ComplexityParams, sample_complexity_resource
from bosonic_cert.cli import ExperimentConfig, build_witness, main


def write_config(tmp_path, document, name='experiment.json'):
    path = tmp_path / name
    path.write_text(json.dumps(document))
    return path


def run_cli(tmp_path, document, *extra):
    config = write_config(tmp_path, document)
    out = tmp_path / 'out'
    return main(['--config', str(config), '--out', str(out), *extra]), out


CAT_CERTIFY = {
    'task': 'certify',
    'cutoff': 40,
    'seed': 4,
    'epsilon': 0.1,
    'delta': 0.05,
    'state': {'family': 'cat', 'alpha': 1.0},
    'certification': {'shots': 4000, 'interval': 'empirical'},
}


def test_certify_task_writes_a_reproducible_report(tmp_path):
    code, out = run_cli(tmp_path, CAT_CERTIFY)
    assert code == 0
    first = (out / 'report.json').read_bytes()
    report = json.loads(first)['report']
    assert report['verdict'] in {'accept', 'reject', 'inconclusive'}
    assert report['n_used'] == 4000
    assert report['oracle'] == pytest.approx(1.0, abs=1e-9)
    assert json.loads((out / 'metadata.json').read_text())['task'] == 'certify'

    code, _ = run_cli(tmp_path, CAT_CERTIFY)
    assert code == 0
    assert (out / 'report.json').read_bytes() == first


def test_seed_flag_overrides_config(tmp_path):
    code, out = run_cli(tmp_path, CAT_CERTIFY, '--seed', '9')
    assert code == 0
    assert json.loads((out / 'report.json').read_text())['report']['seed'] == 9


def test_complexity_task_without_gkp_modes(tmp_path):
    complexity = {'kind': 'resource', 'n_s': 2, 'n_gkp': 0, 'm': 1, 'r': 0.3, 'sigma_moments': {'2': 1.2}}
    code, out = run_cli(tmp_path, {'task': 'complexity', 'complexity': complexity})
    assert code == 0
    document = json.loads((out / 'complexity.json').read_text())
    expected = ComplexityParams(
        n_s=2, n_gkp=0, m=1, r=0.3, epsilon=0.1, delta=0.05, sigma_moments={2: 1.2}
    )
    assert document['bound'] == sample_complexity_resource(expected)
    assert document['bound'] == pytest.approx(33 * math.log(8 / 0.05) / 0.01 * 4 * math.exp(0.6) * 1.2, abs=1)


def test_witness_report_for_two_component_cat(tmp_path):
    document = {
        'task': 'witness_report',
        'cutoff': 40,
        'witness': {'family': 'cat', 'alpha': 2.0},
        'certification': {'strategy': 'homodyne'},
    }
    code, out = run_cli(tmp_path, document)
    assert code == 0
    summary = json.loads((out / 'witness_report.json').read_text())
    angles = sorted(s['angles'][0] for s in summary['settings'])
    assert angles == pytest.approx(sorted([0.0, math.pi / 2, math.pi / 4, -math.pi / 4]))
    assert summary['spectrum']['max_eigenvalue'] <= 1 + 1e-6
    assert summary['spectrum']['unit_eigenspace_dimension'] == 2
    assert (out / 'witness.json').exists() and (out / 'decomposition.json').exists()


def test_witness_report_for_gkp(tmp_path):
    document = {'task': 'witness_report', 'cutoff': 30, 'witness': {'family': 'gkp', 'sigma': 0.3, 'm': 1}}
    code, out = run_cli(tmp_path, document)
    assert code == 0
    summary = json.loads((out / 'witness_report.json').read_text())
    assert summary['spectrum']['max_eigenvalue'] <= 1 + 1e-6
    assert summary['target_value'] <= 1 + 1e-9


def test_witness_report_target_value_for_a_squeezed_cluster(tmp_path):
    witness = {'family': 'resource', 'sigma': 0.5, 'graph': {'n_modes': 2, 'edges': [[0, 1]]}}
    code, out = run_cli(tmp_path, {'task': 'witness_report', 'cutoff': 10, 'witness': witness})
    assert code == 0
    summary = json.loads((out / 'witness_report.json').read_text())
    assert summary['target_value'] == pytest.approx(1.0, abs=1e-6)


def test_certify_task_with_stratified_estimator(tmp_path):
    document = {**CAT_CERTIFY, 'certification': {**CAT_CERTIFY['certification'], 'estimator': 'stratified'}}
    code, out = run_cli(tmp_path, document)
    assert code == 0
    report = json.loads((out / 'report.json').read_text())['report']
    assert report['estimator'] == 'stratified'
    assert report['n_used'] == 4000


def test_sample_dump(tmp_path):
    document = {
        'task': 'sample_dump',
        'cutoff': 30,
        'seed': 1,
        'state': {'family': 'coherent', 'alpha': [0.5, 0.5]},
        'sample': {'setting': 'homodyne', 'angles': [0.0], 'shots': 300, 'bins': 15},
    }
    code, out = run_cli(tmp_path, document)
    assert code == 0
    assert (out / 'samples.csv').read_text().startswith('# kind=homodyne')
    rows = (out / 'histogram.csv').read_text().strip().splitlines()[1:]
    assert len(rows) == 15
    assert sum(int(r.split(',')[1]) for r in rows) == 300


def test_invalid_epsilon_exits_with_validation_error(tmp_path, capsys):
    code, _ = run_cli(tmp_path, {**CAT_CERTIFY, 'epsilon': 0})
    assert code == 2
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error['error'] == 'validation'
    assert error['field'] == 'epsilon'


def test_unknown_keys_are_rejected(tmp_path, capsys):
    code, _ = run_cli(tmp_path, {**CAT_CERTIFY, 'state': {'family': 'cat', 'alpha': 1.0, 'colour': 'red'}})
    assert code == 2
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])['field'] == 'state.colour'


def test_physical_guard_maps_to_exit_code_2(tmp_path):
    code, _ = run_cli(tmp_path, {**CAT_CERTIFY, 'state': {'family': 'gkp', 'sigma': 1.5, 'm': 1}})
    assert code == 2


def test_truncation_guard_maps_to_exit_code_3(tmp_path, capsys):
    document = {**CAT_CERTIFY, 'cutoff': 20, 'state': {'family': 'coherent', 'alpha': 9.0}}
    document['witness'] = {'family': 'cat', 'alpha': 2.0}
    code, _ = run_cli(tmp_path, document)
    assert code == 3
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])['error'] == 'truncation-unsafe'


def test_default_witness_follows_the_state():
    config = ExperimentConfig.from_dict({'task': 'witness_report', 'state': {'family': 'gkp', 'sigma': 0.4, 'm': 1}})
    assert build_witness(config).label == 'gkp_code'
