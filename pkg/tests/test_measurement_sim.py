import math

import numpy as np
import pytest

from bosonic_cert.code_states import build_gaussian_input
from bosonic_cert.exceptions import InvalidParameterError, ProposalError, TruncationError
from bosonic_cert.fock_algebra import FockVector
from bosonic_cert.measurement_sim import (
    GaussianProposal,
    MeasurementRecord,
    heterodyne_sample,
    histogram_csv,
    homodyne_sample,
    husimi_q,
    parity_probabilities,
    parity_sample,
    sample_setting,
    rejection_sample,
    sample_with_envelope_retry,
)
from bosonic_cert.types import MeasurementKind
from bosonic_cert.witnesses import OperatorPolynomial, polynomial_expectation

SHOTS = 20000


def test_homodyne_moments_of_coherent_state(coherent_state):
    state = coherent_state(1.0)
    x = homodyne_sample(state, [0.0], SHOTS, seed=11).outcomes[:, 0]
    assert x.mean() == pytest.approx(math.sqrt(2), abs=0.03)
    assert x.var() == pytest.approx(0.5, abs=0.03)
    p = homodyne_sample(state, [math.pi / 2], SHOTS, seed=12).outcomes[:, 0]
    assert p.mean() == pytest.approx(0.0, abs=0.03)


def test_homodyne_squeezed_variances(cutoff):
    state = build_gaussian_input('squeezed_vacuum', cutoff, r=0.5, axis='momentum')
    x = homodyne_sample(state, [0.0], SHOTS, seed=5).outcomes[:, 0]
    p = homodyne_sample(state, [math.pi / 2], SHOTS, seed=6).outcomes[:, 0]
    assert x.var() == pytest.approx(math.exp(1.0) / 2, rel=0.05)
    assert p.var() == pytest.approx(math.exp(-1.0) / 2, rel=0.05)


def test_joint_homodyne_on_product_state(coherent_state):
    state = FockVector.product([coherent_state(1.0), coherent_state(-0.5)])
    outcomes = homodyne_sample(state, [0.0, 0.0], SHOTS, seed=2).outcomes
    assert outcomes.shape == (SHOTS, 2)
    assert outcomes.mean(axis=0) == pytest.approx([math.sqrt(2), -math.sqrt(2) / 2], abs=0.03)
    assert abs(np.corrcoef(outcomes.T)[0, 1]) < 0.05


def test_heterodyne_of_coherent_state(coherent_state):
    alpha = 1.0 + 0.5j
    outcomes = heterodyne_sample(coherent_state(alpha), SHOTS, seed=3).outcomes[:, 0]
    assert outcomes.mean().real == pytest.approx(alpha.real, abs=0.03)
    assert outcomes.mean().imag == pytest.approx(alpha.imag, abs=0.03)
    assert np.mean(np.abs(outcomes - alpha) ** 2) == pytest.approx(1.0, abs=0.05)


def test_husimi_q_of_coherent_state(coherent_state):
    rho = np.outer(coherent_state(0.5).amplitudes, coherent_state(0.5).amplitudes.conj())
    q = husimi_q(rho, np.array([0.5, 0.0]))
    assert q == pytest.approx([1 / math.pi, math.exp(-0.25) / math.pi], abs=1e-12)


def test_parity_of_coherent_state(coherent_state):
    state = coherent_state(1.0)
    probabilities = parity_probabilities(state)
    assert probabilities.sum() == pytest.approx(1.0)
    outcomes = parity_sample(state, SHOTS, seed=4).outcomes[:, 0]
    assert set(np.unique(outcomes)) <= {-1, 1}
    assert outcomes.mean() == pytest.approx(math.exp(-2.0), abs=0.04)


def test_records_depend_only_on_seed(coherent_state, monkeypatch):
    state = coherent_state(0.8)
    single = homodyne_sample(state, [0.3], 10000, seed=9)
    monkeypatch.setenv('BOSONIC_CERT_THREADS', '3')
    threaded = homodyne_sample(state, [0.3], 10000, seed=9)
    assert np.array_equal(single.outcomes, threaded.outcomes)
    other = homodyne_sample(state, [0.3], 10000, seed=10)
    assert not np.array_equal(single.outcomes, other.outcomes)


def test_truncation_guard_refuses_heavy_tails():
    state = FockVector.basis(35, 40)
    with pytest.raises(TruncationError):
        parity_sample(state, 10, seed=0)
    assert parity_sample(state, 10, seed=0, override=True).outcomes[:, 0].tolist() == [-1] * 10


@pytest.mark.parametrize('shots', [-1, 2.5])
def test_invalid_shot_counts(vacuum, shots):
    with pytest.raises(InvalidParameterError):
        parity_sample(vacuum, shots, seed=0)


def test_constant_setting_needs_no_measurement(vacuum):
    with pytest.raises(InvalidParameterError):
        sample_setting(vacuum, (MeasurementKind.CONSTANT,), 10, seed=0)


def test_csv_and_json_export(tmp_path, coherent_state):
    record = heterodyne_sample(coherent_state(0.5j), 50, seed=1)
    path = tmp_path / 'record.csv'
    record.to_csv(path)
    from_csv = MeasurementRecord.from_csv(path)
    assert from_csv.kind is MeasurementKind.HETERODYNE
    assert np.array_equal(from_csv.outcomes, record.outcomes)
    assert from_csv.seed == 1
    from_json = MeasurementRecord.from_json(record.to_json())
    assert np.array_equal(from_json.outcomes, record.outcomes)

    homodyne = homodyne_sample(coherent_state(0.5), [0.25], 50, seed=1)
    assert MeasurementRecord.from_csv(homodyne.to_csv()).angles == (0.25,)


def test_histogram_counts_every_shot(vacuum):
    record = homodyne_sample(vacuum, [0.0], 500, seed=8)
    text = histogram_csv(record, bins=20)
    lines = text.strip().splitlines()
    assert lines[0] == 'bin_left,count'
    assert sum(int(line.split(',')[1]) for line in lines[1:]) == 500


def test_too_small_envelope_is_refused():
    # for vacuum g == Q exactly, so an envelope of 0.5 gives Q/(M g) == 2
    rho = np.zeros((8, 8), dtype=complex)
    rho[0, 0] = 1.0
    proposal = GaussianProposal(0j, 0.5, 0.5)
    with pytest.raises(ProposalError) as info:
        rejection_sample(rho, proposal, np.random.default_rng(0), 1000)
    assert info.value.context['required_envelope'] == pytest.approx(1.0)


def test_envelope_is_enlarged_and_draw_restarted():
    rho = np.zeros((8, 8), dtype=complex)
    rho[0, 0] = 1.0
    proposal = GaussianProposal(0j, 0.5, 0.5)
    alphas = sample_with_envelope_retry(rho, proposal, np.random.default_rng(0), SHOTS)
    assert alphas.size == SHOTS
    assert np.mean(np.abs(alphas) ** 2) == pytest.approx(1.0, abs=0.05)


def test_heterodyne_moments_are_antinormal_expectations(cat_alpha_1):
    a = OperatorPolynomial.symbol('a')
    ad = OperatorPolynomial.symbol('ad')
    shots = 100_000
    outcomes = heterodyne_sample(cat_alpha_1, shots, seed=21).outcomes[:, 0]
    for j in range(3):
        for k in range(3):
            values = np.conj(outcomes) ** j * outcomes**k
            expected = polynomial_expectation(cat_alpha_1, a**k * ad**j)
            error = 5 * max(np.std(values) / math.sqrt(shots), 1e-12)
            assert abs(values.mean() - expected) <= error
