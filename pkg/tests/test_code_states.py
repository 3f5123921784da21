import math

import numpy as np
import pytest

from bosonic_cert.code_states import (
    CatParams,
    GkpParams,
    GraphSpec,
    IqpCircuitSpec,
    build_cat_basis,
    build_cluster_state,
    build_gaussian_input,
    build_gkp_state,
    build_iqp_output,
    export_state,
    import_state,
)
from bosonic_cert.exceptions import InvalidParameterError, PhaseLockError
from bosonic_cert.witnesses import OperatorPolynomial, polynomial_expectation


def test_two_component_basis_is_orthogonal_with_definite_parity(cutoff):
    basis = build_cat_basis(CatParams(2.0), cutoff)
    assert abs(basis.overlap) < 1e-12
    assert np.abs(basis.zero.amplitudes[1::2]).max() == 0
    assert np.abs(basis.one.amplitudes[0::2]).max() == 0


def test_four_component_basis_is_even(cutoff):
    basis = build_cat_basis(CatParams(1.5, family='four_component'), cutoff)
    for state in (basis.zero, basis.one):
        assert np.abs(state.amplitudes[1::2]).max() == 0
    assert abs(basis.overlap) < 1


def test_logical_plus_photon_number(cutoff):
    plus = build_cat_basis(CatParams(2.0), cutoff).logical_state(1, 1)
    n = OperatorPolynomial.symbol('n')
    # mean of |a|^2 tanh|a|^2 (even) and |a|^2 coth|a|^2 (odd)
    assert polynomial_expectation(plus, n).real == pytest.approx(4 / math.tanh(8), abs=1e-9)


def test_squeezed_cat_phase_lock():
    CatParams(2.0, r=0.2, family='squeezed_two_component')
    CatParams(2j, r=0.2 * np.exp(1j * math.pi / 4), family='squeezed_two_component')
    with pytest.raises(PhaseLockError):
        CatParams(2j, r=0.2, family='squeezed_two_component')
    with pytest.raises(InvalidParameterError):
        CatParams(2.0, r=0.2)


@pytest.mark.parametrize('sigma', [0.0, 1.0, -0.2])
def test_gkp_sigma_range(sigma):
    with pytest.raises(InvalidParameterError):
        GkpParams(sigma, 1)


def test_gkp_zero_has_even_parity_and_squeezed_width(cutoff):
    state = build_gkp_state(GkpParams(0.5, 1, 'zero'), cutoff)
    assert np.abs(state.amplitudes[1::2]).max() < 1e-12
    x = OperatorPolynomial.quadrature(0, 0.0)
    # a single peak at the origin: <x^2> = sigma^2 / 2
    assert polynomial_expectation(state, x * x).real == pytest.approx(0.125, abs=1e-6)


def test_squeezed_vacuum_variances(cutoff):
    state = build_gaussian_input('squeezed_vacuum', cutoff, r=0.5, axis='momentum')
    x = OperatorPolynomial.quadrature(0, 0.0)
    p = OperatorPolynomial.momentum(0)
    assert polynomial_expectation(state, x * x).real == pytest.approx(math.exp(1.0) / 2, abs=1e-6)
    assert polynomial_expectation(state, p * p).real == pytest.approx(math.exp(-1.0) / 2, abs=1e-6)


def test_graph_spec_round_trip():
    graph = GraphSpec(3, [(0, 1), (1, 2)], ['gkp_plus', 'squeezed_vacuum', 'squeezed_vacuum'])
    assert GraphSpec.from_dict(graph.to_dict()) == graph
    assert graph.neighbors(1) == (0, 2)
    assert (graph.n_squeezed, graph.n_gkp) == (2, 1)


def test_state_export_round_trip(cutoff):
    state = build_cat_basis(CatParams(1.0), cutoff).zero
    restored = import_state(export_state(state))
    assert np.allclose(restored.amplitudes, state.amplitudes, atol=1e-15, rtol=0)


def test_cluster_state_of_single_mode_is_squeezed_vacuum():
    state = build_cluster_state(GraphSpec(1), 0.8, cutoff=20)
    p = OperatorPolynomial.momentum(0)
    assert polynomial_expectation(state, p * p).real == pytest.approx(0.32, abs=1e-4)


def test_gate_order_does_not_change_the_iqp_output():
    spec = IqpCircuitSpec(GraphSpec(2, [(0, 1)]), n_z=[1, 0], n_t=[0, 0])
    cz_first = build_iqp_output(spec, 0.8, cutoff=24)
    local_first = build_iqp_output(spec, 0.8, cutoff=24, local_gates_first=True)
    assert abs(np.vdot(cz_first.amplitudes, local_first.amplitudes)) == pytest.approx(1.0, abs=1e-6)


def test_squeezed_width_is_separate_from_gkp_width():
    graph = GraphSpec(1)
    narrow = build_cluster_state(graph, 0.8, cutoff=20, squeezed_sigma=0.7)
    p = OperatorPolynomial.momentum(0)
    assert polynomial_expectation(narrow, p * p).real == pytest.approx(0.7**2 / 2, abs=1e-4)
