import math

import numpy as np
import pytest

from bosonic_cert.code_states import (
    CatParams,
    GkpParams,
    GraphSpec,
    apply_loss,
    build_cat_basis,
    build_gkp_state,
)
from bosonic_cert.exceptions import InfeasibleDecompositionError, InvalidParameterError
from bosonic_cert.fock_algebra import FockVector, eigendecompose, projector_distance
from bosonic_cert.witnesses import (
    OperatorPolynomial,
    algebra,
    build_code_witness,
    build_gkp_plus_witness,
    build_resource_witness,
    lower_to_matrix,
    normal_order,
    nullifier_norms,
    polynomial_expectation,
    rewrite_antinormal,
    rewrite_quadrature_form,
    unit_eigenspace,
    witness_expectation,
)

a = OperatorPolynomial.symbol('a')
ad = OperatorPolynomial.symbol('ad')


def test_normal_order_of_a_ad(vacuum):
    ordered = normal_order(a * ad)
    assert polynomial_expectation(vacuum, ordered).real == pytest.approx(1.0)
    assert ordered.constant_term() == pytest.approx(1.0)


def test_antinormal_rewrite_preserves_expectation(coherent_state):
    poly = ad * ad * a * a + ad * a
    state = coherent_state(0.7 + 0.3j)
    expected = polynomial_expectation(state, poly)
    assert polynomial_expectation(state, rewrite_antinormal(poly)) == pytest.approx(expected, abs=1e-9)


def test_quadrature_form_preserves_expectation(cat_alpha_1):
    witness = build_code_witness(CatParams(1.0))
    rewritten = rewrite_quadrature_form(witness)
    assert all(f.symbol == 'x' for factors in rewritten.terms for f in factors)
    assert polynomial_expectation(cat_alpha_1, rewritten).real == pytest.approx(
        witness_expectation(cat_alpha_1, witness), abs=1e-8
    )


def test_quadrature_form_rejects_parity():
    with pytest.raises(InfeasibleDecompositionError):
        rewrite_quadrature_form(OperatorPolynomial.symbol('parity'))


def test_two_component_witness_is_one_on_code_states(cat_alpha_2, coherent_state):
    witness = build_code_witness(CatParams(2.0))
    assert witness_expectation(cat_alpha_2, witness) == pytest.approx(1.0, abs=1e-9)
    assert witness_expectation(coherent_state(-2.0), witness) == pytest.approx(1.0, abs=1e-9)


def test_two_component_witness_on_vacuum(vacuum):
    # 1 - |alpha|^4 / 2
    witness = build_code_witness(CatParams(2.0))
    assert witness_expectation(vacuum, witness) == pytest.approx(-7.0, abs=1e-9)


def test_four_component_witness(cutoff):
    params = CatParams(1.5, family='four_component')
    basis = build_cat_basis(params, cutoff)
    witness = build_code_witness(params)
    for state in (basis.zero, basis.one):
        assert witness_expectation(state, witness) == pytest.approx(1.0, abs=1e-9)
    assert witness_expectation(FockVector.basis(1, cutoff), witness) <= 0


def test_squeezed_two_component_witness(cutoff):
    params = CatParams(2.0, r=0.2, family='squeezed_two_component')
    zero = build_cat_basis(params, cutoff).zero
    assert witness_expectation(zero, build_code_witness(params)) == pytest.approx(1.0, abs=1e-6)


def test_cat_code_space_is_the_unit_eigenspace():
    dimension, values, _ = unit_eigenspace(build_code_witness(CatParams(2.0)), 40)
    assert dimension == 2
    assert values.max() <= 1 + 1e-9


def test_gkp_witness_is_sound(cutoff):
    params = GkpParams(0.5, 1)
    witness = build_code_witness(params)
    states = [
        build_gkp_state(params, cutoff),
        build_gkp_state(GkpParams(0.5, 1, 'one'), cutoff),
        FockVector.basis(3, cutoff),
    ]
    for state in states:
        assert witness_expectation(state, witness) <= 1 + 1e-12
    values = np.linalg.eigvalsh(lower_to_matrix(witness, 30).dense())
    assert values.max() <= 1 + 1e-6


def test_gkp_position_nullifier_annihilates_single_peak(cutoff):
    params = GkpParams(0.5, 1)
    position, _ = build_code_witness(params).nullifiers
    assert nullifier_norms(build_gkp_state(params, cutoff), position) < 1e-3


def test_gkp_plus_witness_requires_plus():
    with pytest.raises(InvalidParameterError):
        build_gkp_plus_witness(GkpParams(0.3, 1, 'zero'))
    assert build_gkp_plus_witness(GkpParams(0.3, 1, 'plus')).label == 'gkp_plus'


def test_resource_witness_term_count_bound():
    graph = GraphSpec(2, [(0, 1)])
    witness = build_resource_witness(graph, 0.8)
    m = 1
    assert len(witness.terms) <= (graph.n_modes + 2) ** (4 * m + 2)
    assert witness.is_hermitian()


def test_witness_serialization_keeps_terms():
    witness = build_code_witness(CatParams(1.0))
    restored = OperatorPolynomial.from_dict(witness.to_dict())
    assert restored.terms.keys() == witness.terms.keys()
    for key, value in witness.terms.items():
        assert restored.terms[key] == pytest.approx(value, abs=1e-15)


x = OperatorPolynomial.quadrature(0, 0.0)
p = OperatorPolynomial.momentum()
parity = OperatorPolynomial.symbol('parity')


def two_component_quadrature_form(alpha: float) -> OperatorPolynomial:
    diagonal = OperatorPolynomial.quadrature(0, math.pi / 4)
    antidiagonal = OperatorPolynomial.quadrature(0, -math.pi / 4)
    fourth = (x**4 + p**4 + diagonal**4 + antidiagonal**4) / 12
    return (3 - 2 * alpha**4) / 4 - fourth + x * x * ((1 + alpha**2) / 2) + p * p * ((1 - alpha**2) / 2)


@pytest.mark.parametrize('alpha', [1.0, 2.0])
def test_two_component_witness_in_quadratures(alpha):
    witness = build_code_witness(CatParams(alpha))
    expected = two_component_quadrature_form(alpha)
    assert algebra.distance(expected.normal_form, witness.normal_form) < 1e-12
    block = slice(0, 30)
    assert np.allclose(
        lower_to_matrix(expected, 50).dense()[block, block],
        lower_to_matrix(witness, 50).dense()[block, block],
        atol=1e-9,
    )
    assert algebra.distance(rewrite_quadrature_form(witness).normal_form, witness.normal_form) < 1e-9

def test_two_component_antinormal_form():
    alpha = 1.5
    expected = (a * a * ad * ad) * -0.5 + (a * ad) * 2 + (a * a + ad * ad) * (alpha**2 / 2) - alpha**4 / 2
    witness = build_code_witness(CatParams(alpha))
    assert algebra.distance(expected.normal_form, witness.normal_form) < 1e-12
    assert algebra.distance(rewrite_antinormal(witness).normal_form, witness.normal_form) < 1e-12


@pytest.mark.parametrize('alpha', [1.0, 1.5])
def test_four_component_antinormal_form(alpha):
    hamiltonian = (
        a**4 * ad**4 / 24
        - a**3 * ad**3 * (2 / 3)
        + a**2 * ad**2 * 3
        - a * ad * 4
        - (ad**4 + a**4) * (alpha**4 / 24)
        + (alpha**8 / 24 + 1)
    )
    expected = parity * 0.5 + 0.5 - hamiltonian
    witness = build_code_witness(CatParams(alpha, family='four_component'))
    assert algebra.distance(expected.normal_form, witness.normal_form) < 1e-10


@pytest.mark.parametrize('alpha', [0.0, 1.0, 2.0])
def test_cat_hamiltonian_gap(alpha):
    hamiltonian = (ad * ad - alpha**2) * (a * a - alpha**2)
    values, _ = eigendecompose(lower_to_matrix(hamiltonian, 60))
    assert values[:2].max() < 1e-8
    assert values[2] >= 2 - 1e-9


@pytest.mark.parametrize('params', [
    CatParams(2.0),
    CatParams(1.5, family='four_component'),
    CatParams(2.0, r=0.4, family='squeezed_two_component'),
], ids=['two_component', 'four_component', 'squeezed'])
def test_unit_eigenspace_is_the_code_space(params):
    cutoff = 50
    dimension, values, vectors = unit_eigenspace(build_code_witness(params), cutoff)
    basis = build_cat_basis(params, cutoff)
    assert dimension == 2
    assert values.max() <= 1 + 1e-9
    code = np.column_stack([basis.zero.amplitudes, basis.one.amplitudes])
    assert projector_distance(vectors, code) <= 1e-5


@pytest.mark.parametrize('alpha', [1.0, math.sqrt(2), 2.0])
def test_cat_witnesses_on_vacuum(vacuum, alpha):
    two = build_code_witness(CatParams(alpha))
    four = build_code_witness(CatParams(alpha, family='four_component'))
    assert witness_expectation(vacuum, two) == pytest.approx(1 - alpha**4 / 2, abs=1e-9)
    assert witness_expectation(vacuum, four) == pytest.approx(1 - alpha**8 / 24, abs=1e-9)
    assert polynomial_expectation(vacuum, two_component_quadrature_form(alpha)).real == pytest.approx(
        1 - alpha**4 / 2, abs=1e-9
    )


def test_lossy_cat_witness_value(cat_alpha_2):
    witness = build_code_witness(CatParams(2.0))
    # 1 - |alpha|^4 (1 - eta)^2 / 2
    assert witness_expectation(apply_loss(cat_alpha_2, 0.9), witness) == pytest.approx(0.92, abs=1e-9)
    assert witness_expectation(cat_alpha_2, witness, transmissivity=0.9) == pytest.approx(0.92, abs=1e-9)


def test_loss_adjoint_rejects_parity():
    with pytest.raises(InvalidParameterError):
        algebra.loss_adjoint(parity.normal_form, 0.5)
