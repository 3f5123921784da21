import math

import numpy as np
import pytest

from bosonic_cert.code_states import (
    CatParams,
    GkpLogical,
    GkpParams,
    GraphSpec,
    IqpCircuitSpec,
    build_gkp_grid_state,
    build_grid_cluster_state,
    build_grid_input_product,
    build_grid_iqp_output,
)
from bosonic_cert.exceptions import NumericsError, ResourceLimitError
from bosonic_cert.position_grid import GridState, PositionGrid, normal_form_expectation
from bosonic_cert.witnesses import (
    build_code_witness,
    build_gkp_plus_witness,
    build_iqp_witness,
    build_resource_witness,
    builders,
    calibrate_squeezed_offset,
    fit_momentum_width,
    gkp_position_nullifier,
    momentum_peak_factor,
    nullifier_norms,
    transformed_momentum,
    witness_expectation,
)
from bosonic_cert.witnesses.base import Nullifier

SIGMA = 0.3
SQUEEZED_SIGMA = math.exp(-0.6)
LINEAR_CLUSTER = GraphSpec(3, [(0, 1), (1, 2)], ['squeezed_vacuum', 'gkp_plus', 'squeezed_vacuum'])


@pytest.fixture(scope='module')
def gkp_plus() -> GridState:
    return build_gkp_grid_state(GkpParams(SIGMA, 1, 'plus'))


@pytest.fixture(scope='module')
def cluster() -> GridState:
    return build_grid_cluster_state(LINEAR_CLUSTER, SIGMA, 1, SQUEEZED_SIGMA)


def grid_vacuum() -> GridState:
    return GridState.gaussian([PositionGrid.for_profile(0.0, 1.0, 1.0)], [1.0])


def test_coherent_amplitude_survives_sampling(coherent_state, cutoff):
    state = GridState.from_fock(coherent_state(0.7 - 0.2j), [PositionGrid.for_cutoff(cutoff)])
    assert normal_form_expectation(state, {((0, 1, 0),): 1.0}) == pytest.approx(0.7 - 0.2j, abs=1e-8)
    assert normal_form_expectation(state, {((1, 1, 0),): 1.0}).real == pytest.approx(0.53, abs=1e-8)


def test_cat_witness_agrees_with_fock_value(cat_alpha_2, cutoff):
    witness = build_code_witness(CatParams(2.0))
    sampled = GridState.from_fock(cat_alpha_2, [PositionGrid.for_cutoff(cutoff)])
    assert witness_expectation(sampled, witness) == pytest.approx(
        witness_expectation(cat_alpha_2, witness), abs=1e-6
    )


def test_grid_size_limit():
    with pytest.raises(ResourceLimitError):
        build_grid_input_product(GraphSpec(4, mode_kinds=['gkp_plus'] * 4), 0.05, 3)


@pytest.mark.parametrize('m', [1, 2])
def test_gkp_position_nullifier_annihilates_grid_state(m):
    state = build_gkp_grid_state(GkpParams(SIGMA, m, 'plus'))
    nullifier = gkp_position_nullifier(SIGMA, m, 1.0)
    assert nullifier_norms(state, nullifier) < 1e-8


def test_single_peak_momentum_width_is_inverse_sigma():
    assert fit_momentum_width(SIGMA, 0, GkpLogical.PLUS, 0, 2 * math.sqrt(math.pi)) == pytest.approx(
        1 / SIGMA, rel=1e-5
    )


def test_single_peak_plus_witness_is_tight():
    params = GkpParams(SIGMA, 0, 'plus')
    assert witness_expectation(build_gkp_grid_state(params), build_gkp_plus_witness(params)) >= 1 - 1e-3


def test_single_peak_code_witness_is_tight():
    params = GkpParams(0.5, 0)
    assert witness_expectation(build_gkp_grid_state(params), build_code_witness(params)) >= 1 - 1e-3


def test_plus_witness_separates_target_from_vacuum(gkp_plus):
    witness = build_gkp_plus_witness(GkpParams(SIGMA, 1, 'plus'))
    target = witness_expectation(gkp_plus, witness)
    vacuum = witness_expectation(grid_vacuum(), witness)
    assert vacuum < 0.5
    assert target > vacuum
    assert target <= 1 + 1e-9


def test_plus_witness_weights():
    position, momentum = build_gkp_plus_witness(GkpParams(SIGMA, 2, 'plus')).nullifiers
    assert position.weight == pytest.approx(1 / math.factorial(5))
    assert momentum.weight == pytest.approx(1 / math.factorial(3))
    assert len(position.factors) == 5
    assert len(momentum.factors) == 3


def test_cluster_value_matches_single_mode_plus_value(cluster, gkp_plus):
    witness = build_resource_witness(LINEAR_CLUSTER, SIGMA, 1, SQUEEZED_SIGMA)
    single = witness_expectation(gkp_plus, build_gkp_plus_witness(GkpParams(SIGMA, 1, 'plus')))
    assert witness_expectation(cluster, witness) == pytest.approx(single, abs=1e-6)


def test_squeezed_cluster_is_tight():
    graph = GraphSpec(3, [(0, 1), (1, 2)])
    state = build_grid_cluster_state(graph, SIGMA, 1, SQUEEZED_SIGMA)
    witness = build_resource_witness(graph, SIGMA, 1, SQUEEZED_SIGMA)
    assert witness_expectation(state, witness) == pytest.approx(1.0, abs=1e-6)


def test_cluster_witness_rejects_product_and_lossy_states(cluster):
    witness = build_resource_witness(LINEAR_CLUSTER, SIGMA, 1, SQUEEZED_SIGMA)
    exact = witness_expectation(cluster, witness)
    product = build_grid_input_product(LINEAR_CLUSTER, SIGMA, 1, SQUEEZED_SIGMA)
    assert witness_expectation(product, witness) <= exact - 0.05
    assert witness_expectation(cluster, witness, transmissivity=0.9) < exact


def test_lossless_transmissivity_is_the_exact_value(cluster):
    witness = build_resource_witness(LINEAR_CLUSTER, SIGMA, 1, SQUEEZED_SIGMA)
    assert witness_expectation(cluster, witness, transmissivity=1.0) == pytest.approx(
        witness_expectation(cluster, witness), abs=1e-6
    )


def test_squeezed_width_is_independent_of_gkp_width():
    graph = GraphSpec(2, [(0, 1)])
    witness = build_resource_witness(graph, SIGMA, 1, 0.6)
    assert witness.params['squeezed_sigma'] == 0.6
    matched = build_grid_cluster_state(graph, SIGMA, 1, 0.6)
    mismatched = build_grid_cluster_state(graph, SIGMA, 1, SIGMA)
    assert witness_expectation(matched, witness) == pytest.approx(1.0, abs=1e-6)
    assert witness_expectation(mismatched, witness) < 1 - 1e-3


def test_squeezed_iqp_output_is_tight():
    spec = IqpCircuitSpec(GraphSpec(2, [(0, 1)]), n_z=[1, 0], n_t=[0, 1])
    state = build_grid_iqp_output(spec, 0.5)
    assert witness_expectation(state, build_iqp_witness(spec, 0.5)) >= 1 - 1e-3


def test_gate_transformed_nullifiers_annihilate_iqp_output():
    graph = GraphSpec(2, [(0, 1)], ['gkp_plus', 'squeezed_vacuum'])
    spec = IqpCircuitSpec(graph, n_z=[1, 0], n_t=[1, 1])
    state = build_grid_iqp_output(spec, SIGMA, 1, SQUEEZED_SIGMA)
    position = gkp_position_nullifier(SIGMA, 1, 1.0, 0, 2, transformed_momentum(0, graph, 1, 1))
    assert nullifier_norms(state, position) <= 1e-6
    squeezed = Nullifier(
        1.0, (momentum_peak_factor(SQUEEZED_SIGMA, 0.0, 1, 2, transformed_momentum(1, graph, 0, 1)),)
    )
    assert nullifier_norms(state, squeezed) <= 1e-6


def test_untransformed_nullifier_misses_iqp_output():
    graph = GraphSpec(2, [(0, 1)], ['gkp_plus', 'squeezed_vacuum'])
    spec = IqpCircuitSpec(graph, n_z=[1, 0], n_t=[1, 1])
    state = build_grid_iqp_output(spec, SIGMA, 1, SQUEEZED_SIGMA)
    squeezed = Nullifier(1.0, (momentum_peak_factor(SQUEEZED_SIGMA, 0.0, 1, 2),))
    assert nullifier_norms(state, squeezed) > 0.1


def test_squeezed_offset_calibration():
    assert calibrate_squeezed_offset(0.45) == pytest.approx(0.5, abs=1e-10)


def test_miscalibrated_squeezed_offset_is_refused(monkeypatch):
    monkeypatch.setattr(builders, 'calibrate_squeezed_offset', lambda sigma: 0.6)
    with pytest.raises(NumericsError):
        build_resource_witness(GraphSpec(1), 0.47)


def test_grid_state_to_fock_keeps_vacuum(cutoff):
    vacuum = grid_vacuum().to_fock(cutoff)
    assert abs(vacuum.amplitudes[0]) == pytest.approx(1.0, abs=1e-8)
    assert np.abs(vacuum.amplitudes[1:]).max() < 1e-8
