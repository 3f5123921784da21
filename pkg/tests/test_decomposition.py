import math

import pytest

from bosonic_cert.code_states import CatParams
from bosonic_cert.exceptions import InfeasibleDecompositionError, InvalidParameterError
from bosonic_cert.types import MeasurementKind, Strategy
from bosonic_cert.witnesses import (
    ConstantMonomial,
    HeterodyneMonomial,
    OperatorPolynomial,
    ParityMonomial,
    build_code_witness,
    decompose_for_measurement,
    export_decomposition,
    import_decomposition,
    polynomial_expectation,
    witness_expectation,
)

n = OperatorPolynomial.symbol('n')


@pytest.mark.parametrize('strategy', ['homodyne', 'heterodyne'])
def test_decomposition_reproduces_witness(strategy, coherent_state):
    witness = build_code_witness(CatParams(1.0))
    decomposition = decompose_for_measurement(witness, strategy)
    assert decomposition.strategy is Strategy(strategy)
    state = coherent_state(0.4 - 0.3j)
    assert polynomial_expectation(state, decomposition.to_polynomial()).real == pytest.approx(
        witness_expectation(state, witness), abs=1e-8
    )


def test_cat_homodyne_settings_are_four_quadratures():
    decomposition = decompose_for_measurement(build_code_witness(CatParams(2.0)), 'homodyne')
    angles = sorted(setting[1][0] for setting in decomposition.settings(MeasurementKind.HOMODYNE))
    assert angles == pytest.approx(sorted([0.0, math.pi / 2, math.pi / 4, -math.pi / 4]))


def test_auto_keeps_the_lighter_decomposition():
    witness = build_code_witness(CatParams(2.0))
    weights = [decompose_for_measurement(witness, s).total_weight for s in ('homodyne', 'heterodyne')]
    assert decompose_for_measurement(witness, 'auto').total_weight == pytest.approx(min(weights))


def test_number_operator_heterodyne_entries():
    decomposition = decompose_for_measurement(n, 'heterodyne')
    first, second = decomposition.entries
    assert (first.coefficient, first.monomial) == (-1.0, ConstantMonomial())
    assert (second.coefficient, second.monomial) == (1.0, HeterodyneMonomial(((1, 1),)))
    assert decomposition.total_weight == 2.0


def test_four_component_witness_measures_parity():
    decomposition = decompose_for_measurement(build_code_witness(CatParams(1.5, family='four_component')))
    parity = [e for e in decomposition.entries if e.monomial.kind is MeasurementKind.PARITY]
    assert [(e.coefficient, e.monomial) for e in parity] == [(0.5, ParityMonomial((True,)))]


def test_parity_times_ladder_is_infeasible():
    with pytest.raises(InfeasibleDecompositionError):
        decompose_for_measurement(OperatorPolynomial.symbol('parity') * n)


def test_non_hermitian_is_rejected():
    with pytest.raises(InvalidParameterError):
        decompose_for_measurement(OperatorPolynomial.symbol('a'))


def test_export_import(tmp_path):
    decomposition = decompose_for_measurement(build_code_witness(CatParams(1.0)), 'homodyne')
    path = tmp_path / 'decomposition.json'
    export_decomposition(decomposition, path)
    restored = import_decomposition(path)
    assert restored.entries == decomposition.entries
    assert restored.strategy is decomposition.strategy
