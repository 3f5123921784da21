import numpy as np
import pytest

from bosonic_cert.code_states import apply_loss, build_gaussian_input
from bosonic_cert.exceptions import InvalidDimensionError, TruncationError
from bosonic_cert.fock_algebra import (
    FockVector,
    build_elementary_operator,
    check_truncation,
    coherent_amplitudes,
    displacement_matrix,
    eigendecompose,
    expectation,
    quadrature_pdf,
    quadrature_pdfs,
    single_mode_matrix,
    squeeze_matrix,
)
from bosonic_cert.witnesses import OperatorPolynomial, polynomial_expectation


def test_coherent_amplitudes_are_normalized():
    amplitudes = coherent_amplitudes(1.0 + 0.5j, 40)
    assert np.linalg.norm(amplitudes) == pytest.approx(1.0, abs=1e-12)


def test_mean_photon_number_of_coherent_state(coherent_state, cutoff):
    state = coherent_state(1.5)
    number = build_elementary_operator('number', cutoff)
    assert expectation(state, number).real == pytest.approx(2.25, abs=1e-9)


def test_parity_spectrum():
    values, _ = eigendecompose(build_elementary_operator('parity', 6))
    assert sorted(values.round(12).tolist()) == [-1.0, -1.0, -1.0, 1.0, 1.0, 1.0]


def test_basis_outside_truncation_is_rejected():
    with pytest.raises(InvalidDimensionError):
        FockVector.basis(5, 5)


def test_tail_weight_guard():
    state = FockVector.basis(35, 40)
    with pytest.raises(TruncationError):
        check_truncation(state)
    assert check_truncation(state, override=True) == pytest.approx(1.0)


def test_coherent_input_beyond_cutoff_quarter_is_refused():
    with pytest.raises(TruncationError):
        build_gaussian_input('coherent', 12, alpha=4.0)


def test_loss_scales_photon_number(coherent_state):
    n = OperatorPolynomial.symbol('n')
    lossy = apply_loss(coherent_state(1.2), 0.6)
    assert polynomial_expectation(lossy, n).real == pytest.approx(0.6 * 1.44, abs=1e-9)
    single = apply_loss(FockVector.basis(1, 10), 0.3)
    assert polynomial_expectation(single, n).real == pytest.approx(0.3, abs=1e-12)


@pytest.mark.parametrize('cutoff', [10, 30])
def test_displacement_and_squeeze_are_unitary(cutoff):
    identity = np.eye(cutoff)
    d = displacement_matrix(1.0 - 0.5j, cutoff)
    s = squeeze_matrix(0.3 + 0.2j, cutoff)
    assert np.allclose(d.conj().T @ d, identity, atol=1e-10)
    assert np.allclose(s.conj().T @ s, identity, atol=1e-10)


def test_commutator_is_identity_below_the_cutoff(cutoff):
    a = single_mode_matrix('a', cutoff)
    commutator = a @ a.T - a.T @ a
    assert np.allclose(commutator[:-1, :-1], np.eye(cutoff - 1), atol=1e-12)
    assert commutator[-1, -1] == pytest.approx(1 - cutoff)


def test_quadrature_pdf_moments(coherent_state):
    alpha = 1.0 + 0.5j
    state = coherent_state(alpha)
    x = quadrature_pdf(state, 0.0)
    p = quadrature_pdf(state, np.pi / 2)
    assert x.moment(1) == pytest.approx(np.sqrt(2) * alpha.real, abs=1e-6)
    assert x.moment(2) == pytest.approx(2 * alpha.real**2 + 0.5, abs=1e-6)
    assert p.moment(1) == pytest.approx(np.sqrt(2) * alpha.imag, abs=1e-6)


def test_quadrature_pdfs_are_per_mode_marginals(coherent_state):
    state = FockVector.product([coherent_state(1.0), coherent_state(-0.5)])
    first, second = quadrature_pdfs(state, [0.0, 0.0])
    assert first.moment(1) == pytest.approx(np.sqrt(2), abs=1e-6)
    assert second.moment(1) == pytest.approx(-np.sqrt(2) / 2, abs=1e-6)
