import math

import numpy as np
import pytest

from bosonic_cert.certifier import (
    ComplexityParams,
    certify,
    decide,
    estimate_witness,
    hoeffding_half_width,
    hoeffding_requirements,
    plan_importance_sampling,
    plan_stratified,
    sample_complexity_iqp,
    sample_complexity_resource,
    setting_seed,
    variance_proxy,
)
from bosonic_cert.code_states import CatParams, apply_loss
from bosonic_cert.exceptions import CoverageError, InvalidParameterError
from bosonic_cert.measurement_sim import heterodyne_sample
from bosonic_cert.types import Verdict
from bosonic_cert.utils import CONFIG
from bosonic_cert.witnesses import OperatorPolynomial, build_code_witness, decompose_for_measurement

n = OperatorPolynomial.symbol('n')


def test_hoeffding_requirements_matches_closed_form():
    rng = np.random.default_rng(20)
    for _ in range(20):
        f2 = float(rng.uniform(0.1, 50))
        epsilon = float(rng.uniform(0.01, 0.5))
        delta = float(rng.uniform(0.001, 0.5))
        exact = 33 * f2 * math.log(8 / delta) / epsilon**2
        required = hoeffding_requirements(f2, epsilon, delta)
        assert required in (math.ceil(exact), round(exact))
        assert exact <= required < exact + 1 + 1e-9


def test_halving_epsilon_quadruples_shots():
    coarse = hoeffding_requirements(2.0, 0.1, 0.05)
    fine = hoeffding_requirements(2.0, 0.05, 0.05)
    assert fine / coarse == pytest.approx(4, rel=1e-3)


def test_half_width_reaches_requested_precision():
    shots = hoeffding_requirements(3.0, 0.05, 0.01)
    assert hoeffding_half_width(3.0, shots, 0.01) <= 0.05
    assert hoeffding_half_width(3.0, 0, 0.01) == math.inf


@pytest.mark.parametrize('name, args', [('f2', (0, 0.1, 0.1)), ('epsilon', (1, 0, 0.1)), ('delta', (1, 0.1, 0))])
def test_hoeffding_rejects_non_positive_inputs(name, args):
    with pytest.raises(InvalidParameterError) as info:
        hoeffding_requirements(*args)
    assert info.value.field == name


def test_decide():
    assert decide((0.91, 1.05), 0.1) is Verdict.ACCEPT
    assert decide((0.5, 0.89), 0.1) is Verdict.REJECT
    assert decide((0.85, 0.95), 0.1) is Verdict.INCONCLUSIVE


def test_plan_is_seeded_and_skips_constants():
    decomposition = decompose_for_measurement(build_code_witness(CatParams(1.0)), 'homodyne')
    plan = plan_importance_sampling(decomposition, 1000, seed=5)
    assert plan.total == 1000
    assert plan == plan_importance_sampling(decomposition, 1000, seed=5)
    for entry, count, p in zip(decomposition.entries, plan.allotments, plan.probabilities):
        if entry.monomial.kind.value == 'constant':
            assert count == 0 and p == 0
    assert sum(plan.probabilities) == pytest.approx(1.0)
    assert sum(plan.shots_per_setting(decomposition).values()) == 1000


def test_plan_needs_a_shot_per_measured_term():
    decomposition = decompose_for_measurement(build_code_witness(CatParams(1.0)), 'homodyne')
    with pytest.raises(InvalidParameterError):
        plan_importance_sampling(decomposition, 1, seed=0)


def test_setting_seeds_differ():
    assert len({setting_seed(1, i) for i in range(10)}) == 10
    assert setting_seed(1, 0) == setting_seed(1, 0)


def test_estimate_photon_number_from_heterodyne(coherent_state):
    decomposition = decompose_for_measurement(n, 'heterodyne')
    record = heterodyne_sample(coherent_state(1.0), 20000, seed=7)
    estimate, variance = estimate_witness(decomposition, [record])
    assert estimate == pytest.approx(1.0, abs=5 * math.sqrt(variance) + 1e-3)
    plan = plan_importance_sampling(decomposition, 20000, seed=7)
    weighted, _ = estimate_witness(decomposition, [record], plan)
    assert weighted == pytest.approx(1.0, abs=0.1)


def test_missing_record_is_a_coverage_error():
    decomposition = decompose_for_measurement(n, 'heterodyne')
    with pytest.raises(CoverageError):
        estimate_witness(decomposition, [])


def test_variance_proxies_are_ordered():
    decomposition = decompose_for_measurement(n * 2, 'heterodyne')
    f2 = np.array([1.0, 3.0])
    verbatim = variance_proxy(decomposition, f2, 'verbatim')
    squared = variance_proxy(decomposition, f2, 'squared')
    exact = variance_proxy(decomposition, f2, 'exact')
    assert (verbatim, squared, exact) == pytest.approx((24.0, 48.0, 32.0))


def _params(**overrides):
    base = dict(n_s=2, n_gkp=1, m=1, r=0.5, epsilon=0.1, delta=0.05, n_t=1, n_z=0, n_cz=1,
                sigma_moments={k: 1.0 + k for k in range(1, 7)})
    base.update(overrides)
    return ComplexityParams(**base)


@pytest.mark.parametrize('calculator', [sample_complexity_resource, sample_complexity_iqp])
@pytest.mark.parametrize('name, larger', [
    ('n_s', 3), ('n_gkp', 2), ('r', 0.8), ('n_t', 2), ('n_cz', 2), ('m', 2),
    ('epsilon', 0.05), ('delta', 0.01),
])
def test_complexity_is_monotone(calculator, name, larger):
    moments = {k: 1.0 + k for k in range(1, 11)}
    assert calculator(_params(**{name: larger}, sigma_moments=moments)) >= calculator(_params(sigma_moments=moments))


def test_resource_complexity_without_gkp_modes():
    params = _params(n_gkp=0, n_s=3, r=0.0, sigma_moments={2: 1.5})
    assert sample_complexity_resource(params) == hoeffding_requirements(9 * 1.5, 0.1, 0.05)


def test_iqp_complexity_without_t_gates_keeps_the_resource_shape():
    clifford_only = sample_complexity_iqp(_params(n_t=0))
    assert clifford_only == sample_complexity_iqp(_params(n_t=1))
    assert clifford_only >= sample_complexity_resource(_params(n_t=0)) > 0


def test_certify_accepts_the_code_state(cat_alpha_1):
    report = certify(cat_alpha_1, CatParams(1.0), 0.1, 0.05, seed=1, shots=40000, interval='empirical')
    assert report.oracle == pytest.approx(1.0, abs=1e-9)
    assert report.n_used == 40000
    assert report.ci[0] <= report.estimate <= report.ci[1]
    assert report.estimate == pytest.approx(1.0, abs=5 * report.standard_error)


def test_certify_rejects_vacuum_for_a_large_cat(vacuum):
    report = certify(vacuum, CatParams(2.0), 0.1, 0.05, seed=2, shots=40000, interval='empirical')
    assert report.oracle == pytest.approx(-7.0, abs=1e-9)
    assert report.estimate == pytest.approx(-7.0, abs=5 * report.standard_error)
    assert report.verdict is Verdict.REJECT


def test_certify_is_reproducible(cat_alpha_1):
    first = certify(cat_alpha_1, CatParams(1.0), 0.1, 0.05, seed=3, shots=2000, interval='empirical')
    second = certify(cat_alpha_1, CatParams(1.0), 0.1, 0.05, seed=3, shots=2000, interval='empirical')
    assert first.to_dict() == second.to_dict()


def test_hoeffding_budget_overrun_is_inconclusive(cat_alpha_2):
    report = certify(cat_alpha_2, CatParams(2.0), 0.1, 0.05, seed=0)
    assert report.verdict is Verdict.INCONCLUSIVE
    assert report.n_used == 0
    assert report.required_shots > CONFIG['max_total_shots']
    document = report.to_dict()
    assert document['estimate'] is None
    assert document['ci'] == [None, None]


def test_stratified_plan_covers_every_measured_entry():
    decomposition = decompose_for_measurement(build_code_witness(CatParams(2.0)), 'homodyne')
    plan = plan_stratified(decomposition, 5000, seed=4)
    assert plan.total == 5000
    assert plan.stratified
    for entry, count in zip(decomposition.entries, plan.allotments):
        assert (count == 0) == (entry.monomial.kind.value == 'constant')


def test_certify_accepts_the_alpha_2_cat(cat_alpha_2):
    report = certify(
        cat_alpha_2, CatParams(2.0), 0.1, 0.05, seed=11, shots=6_000_000,
        interval='empirical', estimator='stratified',
    )
    assert report.estimator == 'stratified'
    assert report.n_used == 6_000_000
    assert report.estimate == pytest.approx(1.0, abs=5 * report.standard_error)
    assert report.verdict is Verdict.ACCEPT


def test_certify_rejects_vacuum_for_the_root_2_cat(vacuum):
    report = certify(vacuum, CatParams(math.sqrt(2)), 0.1, 0.05, seed=12, shots=40000, interval='empirical')
    assert report.oracle == pytest.approx(-1.0, abs=1e-9)
    assert report.verdict is Verdict.REJECT


def test_certify_rejects_a_lossy_cat(cat_alpha_2):
    lossy = apply_loss(cat_alpha_2, 0.9)
    report = certify(
        lossy, CatParams(2.0), 0.005, 0.05, seed=13, shots=6_000_000,
        interval='empirical', estimator='stratified',
    )
    # 1 - |alpha|^4 (1 - eta)^2 / 2
    assert report.oracle == pytest.approx(0.92, abs=1e-6)
    assert report.estimate == pytest.approx(0.92, abs=5 * report.standard_error)
    assert report.verdict is Verdict.REJECT


def test_certify_validates_precision(cat_alpha_1):
    with pytest.raises(InvalidParameterError):
        certify(cat_alpha_1, CatParams(1.0), 0.0, 0.05, seed=0)


def test_empirical_intervals_cover_the_oracle(cat_alpha_1):
    reports = [
        certify(cat_alpha_1, CatParams(1.0), 0.1, 0.05, seed=seed, shots=2000, interval='empirical')
        for seed in range(200)
    ]
    oracle = reports[0].oracle
    covered = sum(r.ci[0] <= oracle <= r.ci[1] for r in reports)
    assert covered >= 0.88 * len(reports)
    half_width = hoeffding_half_width(reports[0].f2_bound, 2000, 0.05)
    assert all(abs(r.estimate - oracle) <= half_width for r in reports)
    estimates = np.array([r.estimate for r in reports])
    assert estimates.mean() == pytest.approx(oracle, abs=5 * estimates.std(ddof=1) / math.sqrt(len(reports)))


def test_hoeffding_interval_is_wider_than_the_empirical_one(cat_alpha_1):
    hoeffding = certify(cat_alpha_1, CatParams(1.0), 0.1, 0.05, seed=8, shots=20000)
    empirical = certify(cat_alpha_1, CatParams(1.0), 0.1, 0.05, seed=8, shots=20000, interval='empirical')
    assert hoeffding.estimate == empirical.estimate
    assert hoeffding.ci[1] - hoeffding.ci[0] >= empirical.ci[1] - empirical.ci[0]
