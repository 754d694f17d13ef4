import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dptm.channels import (
    amplitude_damping,
    correlated_depolarizing,
    identity,
    kraus_apply,
    kraus_to_ptm,
    random_channel,
)
from dptm.pauli import pauli_matrix
from dptm.planning import Configuration, Prior
from dptm.states import dptm_beta_inverse, input_state, sqpt_beta_inverse, state_family
from dptm.tomography import (
    Estimate,
    MissingMeasurementError,
    ParameterRangeWarning,
    configuration_seed,
    exact_expectation,
    extract_corr_depol_params,
    reconstruct_dptm,
    reconstruct_generic,
    reconstruct_sqpt,
    run_protocol,
    sample_configuration,
    sample_expectation,
)


def dense_expectation(ch, i, j, protocol):
    rho = input_state(protocol, j, ch.n)
    return np.trace(pauli_matrix(i, ch.n) @ kraus_apply(ch, rho)).real


def exact_measurements(ch, protocol):
    d2 = 4**ch.n
    return {(i, j): Estimate(dense_expectation(ch, i, j, protocol)) for i in range(d2) for j in range(d2)}


# -- expectations ------------------------------------------------------------------------


def test_exact_expectation_examples():
    assert exact_expectation(identity(1), 2, 2, "dptm") == pytest.approx(1.0)
    assert exact_expectation(amplitude_damping(0.25), 3, 0, "dptm") == pytest.approx(0.25)
    ch = correlated_depolarizing(0.25, 0.75)
    assert exact_expectation(ch, 6, 6, "dptm", cross_check=True) == pytest.approx(0.703125)


def test_exact_expectation_two_routes_agree():
    for seed in range(6):
        ch = random_channel(1 + seed % 2, 2, seed)
        ptm = kraus_to_ptm(ch)
        for i, j in [(1, 0), (3, 2), (2, 3)]:
            for protocol in ("dptm", "sqpt"):
                a = exact_expectation(ch, i, j, protocol, cross_check=True)
                assert a == pytest.approx(exact_expectation(ptm, i, j, protocol), abs=1e-12)


def test_sample_deterministic_outcome():
    est = sample_expectation(1.0, 100, seed=3)
    assert est.value == 1.0 and est.std_error == 0.0
    est = sample_expectation(-1.0, 7, seed=3)
    assert est.value == -1.0 and est.std_error == 0.0


def test_sample_errors():
    with pytest.raises(ValueError):
        sample_expectation(1.1, 100, 0)
    with pytest.raises(ValueError):
        sample_expectation(0.5, 1, 0)
    ch = identity(1)
    with pytest.raises(ValueError):
        sample_configuration(ch, Configuration(0, 1, "dptm", 100), 0)
    with pytest.raises(ValueError):
        sample_configuration(ch, Configuration(1, 1, "dptm"), 0)


def test_sample_2048_shots_example():
    ch = correlated_depolarizing(0.25, 0.75)
    est = sample_configuration(ch, Configuration(4, 4, "dptm", 2048), 0)
    assert abs(est.value - 0.75) < 4 * 0.0146
    assert est.std_error == pytest.approx(math.sqrt((1 - est.value**2) / 2048))
    assert 0.013 < est.std_error < 0.0165
    assert math.sqrt((1 - 0.75**2) / 2048) == pytest.approx(0.0146, abs=5e-5)


def test_sample_reproducible():
    a = sample_expectation(0.3, 500, seed=12)
    b = sample_expectation(0.3, 500, seed=12)
    assert a == b


def test_sampling_calibration():
    n_shots = 100_000
    inside = sum(
        abs(sample_expectation(0.4, n_shots, seed).value - 0.4) < 5 / math.sqrt(n_shots)
        for seed in range(1000)
    )
    assert inside >= 990


def test_sampler_matches_bernoulli_oracle():
    # the binomial count is the sum of N independent +/-1 draws: compare moments
    values = np.array([sample_expectation(0.2, 64, s).value for s in range(4000)])
    rng = np.random.default_rng(99)
    bern = np.where(rng.random((4000, 64)) < 0.6, 1.0, -1.0).mean(axis=1)
    assert values.mean() == pytest.approx(bern.mean(), abs=0.01)
    assert values.std() == pytest.approx(bern.std(), rel=0.06)
    assert values.std() == pytest.approx(math.sqrt((1 - 0.04) / 64), rel=0.06)


def test_configuration_seeds_distinct():
    seeds = {
        tuple(configuration_seed(0, Configuration(i, j, p)).generate_state(2))
        for i in range(4)
        for j in range(4)
        for p in ("dptm", "sqpt")
    }
    assert len(seeds) == 32


# -- reconstruction ----------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("protocol", ["dptm", "sqpt"])
def test_exact_reconstruction_random_channels(n, protocol):
    for seed in range(5):
        ch = random_channel(n, 1 + seed % 4, seed)
        result = run_protocol(ch, "full", protocol, "cptp")
        assert np.allclose(result.as_matrix(), kraus_to_ptm(ch).gamma, atol=1e-10)


@pytest.mark.parametrize("protocol", ["dptm", "sqpt"])
def test_no_prior_measures_trace_row(protocol):
    ch = random_channel(1, 2, 4)
    result = run_protocol(ch, "full", protocol, "none")
    assert result.configuration_count == 16
    assert np.allclose(result.as_matrix(), kraus_to_ptm(ch).gamma, atol=1e-10)


@pytest.mark.parametrize("n", [1, 2])
def test_dptm_matches_generic_inversion(n):
    ch = random_channel(n, 3, 21)
    m = exact_measurements(ch, "dptm")
    d2 = 4**n
    m_matrix = np.array([[m[i, j].value for j in range(d2)] for i in range(d2)])
    generic = reconstruct_generic(m_matrix, dptm_beta_inverse(n))
    specific = reconstruct_dptm(m, "full", n, "none").as_matrix()
    assert np.allclose(generic, specific, atol=1e-12)
    assert np.allclose(generic, reconstruct_generic(m_matrix, state_family("dptm", n).beta_inv), atol=1e-12)


@pytest.mark.parametrize("n", [1, 2])
def test_sqpt_matches_generic_inversion(n):
    ch = random_channel(n, 2, 8)
    m = exact_measurements(ch, "sqpt")
    d2 = 4**n
    m_matrix = np.array([[m[i, j].value for j in range(d2)] for i in range(d2)])
    generic = reconstruct_generic(m_matrix, sqpt_beta_inverse(n), alpha_inv=np.eye(d2))
    assert np.allclose(reconstruct_sqpt(m, "full", n, "none").as_matrix(), generic, atol=1e-12)


def test_dptm_formula_with_errors():
    m = {(3, 0): Estimate(0.25, 0.03, 100), (3, 3): Estimate(1.0, 0.04, 100)}
    result = reconstruct_dptm(m, [(3, 0), (3, 3), (0, 3)], 1)
    assert result[3, 0] == Estimate(0.25, 0.03, 100)
    assert result.value(3, 3) == pytest.approx(0.75)
    assert result.std_error(3, 3) == pytest.approx(0.05)
    assert result[0, 3] == Estimate(0.0)


def test_dptm_unital_no_subtraction():
    m = {(5, 5): Estimate(0.6, 0.02, 100)}
    result = reconstruct_dptm(m, [(5, 5), (5, 0)], 2, "unital")
    assert result[5, 5] == m[5, 5]
    assert result[5, 0] == Estimate(0.0)


def test_sqpt_single_qubit_column_zero():
    m = {(1, 0): Estimate(0.2, 0.03, 10), (1, 3): Estimate(0.6, 0.04, 10)}
    est = reconstruct_sqpt(m, [(1, 0)], 1)[1, 0]
    assert est.value == pytest.approx(0.5 * (0.2 + 0.6))
    assert est.std_error == pytest.approx(0.5 * math.hypot(0.03, 0.04))


def test_sqpt_two_qubit_gamma44_terms():
    coeffs = {0: -0.25, 3: -0.25, 4: 0.5, 7: 0.5, 12: -0.25, 15: -0.25}
    m = {(4, k): Estimate(0.1 * (k + 1), 0.01, 50) for k in coeffs}
    est = reconstruct_sqpt(m, [(4, 4)], 2)[4, 4]
    assert est.value == pytest.approx(sum(c * 0.1 * (k + 1) for k, c in coeffs.items()))
    assert est.std_error == pytest.approx(0.01 * math.sqrt(sum(c * c for c in coeffs.values())))


def test_missing_measurement():
    with pytest.raises(MissingMeasurementError):
        reconstruct_dptm({(3, 3): Estimate(1.0)}, [(3, 3)], 1)
    with pytest.raises(MissingMeasurementError):
        reconstruct_sqpt({(1, 1): Estimate(1.0)}, [(1, 1)], 1)


# -- orchestration -----------------------------------------------------------------------


def test_amplitude_damping_plans():
    ch = amplitude_damping(0.25)
    entries = [(1, 1), (2, 2), (3, 0), (3, 3)]
    pinned = Prior("cptp", known={(1, 0): 0.0, (2, 0): 0.0})
    d = run_protocol(ch, entries, "dptm", pinned, 512, 0)
    q = run_protocol(ch, entries, "sqpt", "cptp", 512, 0)
    assert d.configuration_count == 4
    assert q.configuration_count == 8
    g = kraus_to_ptm(ch).gamma
    for result in (d, q):
        for i, j in entries:
            assert abs(result.value(i, j) - g[i, j]) <= 4 * result.std_error(i, j)


def test_determinism_and_workers():
    ch = correlated_depolarizing(0.25, 0.75)
    a = run_protocol(ch, "full", "dptm", "cptp", 256, 17)
    b = run_protocol(ch, "full", "dptm", "cptp", 256, 17, workers=4)
    assert a == b
    c = run_protocol(ch, "full", "dptm", "cptp", 256, 18)
    assert a != c


def test_per_configuration_streams_independent_of_plan():
    ch = correlated_depolarizing(0.25, 0.75)
    small = run_protocol(ch, [(4, 4)], "dptm", "unital", 512, 5)
    large = run_protocol(ch, [(4, 4), (6, 6), (9, 9)], "dptm", "unital", 512, 5)
    assert small[4, 4] == large[4, 4]


def test_row_zero_is_exact():
    ch = random_channel(2, 3, 1)
    result = run_protocol(ch, "full", "sqpt", "cptp", 64, 0)
    assert np.array_equal(result.as_matrix()[0], np.eye(16)[0])
    assert all(result.std_error(0, j) == 0 for j in range(16))


def test_result_invariants():
    ch = amplitude_damping(0.25)
    result = run_protocol(ch, [(3, 0), (3, 3), (1, 1)], "dptm", "cptp", 100, 0)
    assert result.configuration_count == len(set(c.key for c in result.configurations))
    assert set(result.entries) <= set(result.estimates)
    assert result.entry_costs() == {(3, 0): 1, (3, 3): 2, (1, 1): 2}


@pytest.mark.slow
def test_unbiased_and_se_scaling():
    ch = correlated_depolarizing(0.25, 0.75)
    exact = exact_expectation(ch, 6, 6, "dptm")

    def draws(shots):
        cfg = Configuration(6, 6, "dptm", shots)
        return np.array([sample_configuration(ch, cfg, s).value for s in range(1000)])

    v1024 = draws(1024)
    se = math.sqrt((1 - exact**2) / 1024)
    assert abs(v1024.mean() - exact) < 4 * se / math.sqrt(1000)
    ratio = v1024.std() / draws(4096).std()
    assert abs(ratio / 2 - 1) < 0.15


@pytest.mark.slow
def test_sqpt_gamma66_spread_at_2048_shots():
    # Empirical spread of the nine-term estimator: independent configurations
    # with coefficients summing in square to 2.25 give about 0.029, not 0.016.
    ch = correlated_depolarizing(0.25, 0.75)
    values = np.array(
        [run_protocol(ch, [(6, 6)], "sqpt", "cptp", 2048, s).value(6, 6) for s in range(400)]
    )
    reported = run_protocol(ch, [(6, 6)], "sqpt", "cptp", 2048, 0).std_error(6, 6)
    assert values.std() == pytest.approx(reported, rel=0.1)
    assert 0.026 < values.std() < 0.033


# -- parameter extraction ----------------------------------------------------------------


def test_extract_exact_values():
    est = extract_corr_depol_params(0.75, 0.703125)
    assert est.p == pytest.approx(0.25)
    assert est.mu == pytest.approx(0.75)
    assert est.p_err == 0 and est.mu_err == 0


def test_extract_identity_limit():
    with pytest.raises(ValueError):
        extract_corr_depol_params(1.0, 1.0)
    with pytest.raises(ValueError):
        extract_corr_depol_params(0.0, 0.5)


def test_extract_simulation_block():
    est = extract_corr_depol_params(Estimate(0.749, 0.015, 2048), Estimate(0.710, 0.016, 2048))
    assert est.p == pytest.approx(0.251)
    assert est.p_err == pytest.approx(0.015)
    assert abs(est.mu - 0.75) < est.mu_err


def test_extract_range_warning():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        est = extract_corr_depol_params(0.75, 0.8)
    assert est.mu > 1
    assert any(issubclass(w.category, ParameterRangeWarning) for w in caught)


@settings(max_examples=40, deadline=None)
@given(
    a=st.floats(0.3, 0.95),
    b=st.floats(0.2, 0.95),
    sa=st.floats(0.001, 0.05),
    sb=st.floats(0.001, 0.05),
)
def test_extract_error_matches_finite_differences(a, b, sa, sb):
    def mu(x, y):
        return (y / x - x) / (1 - x)

    h = 1e-6
    dmu_da = (mu(a + h, b) - mu(a - h, b)) / (2 * h)
    dmu_db = (mu(a, b + h) - mu(a, b - h)) / (2 * h)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ParameterRangeWarning)
        est = extract_corr_depol_params(Estimate(a, sa), Estimate(b, sb))
    assert est.mu == pytest.approx(mu(a, b))
    assert est.mu_err == pytest.approx(math.hypot(dmu_da * sa, dmu_db * sb), rel=1e-5)


@settings(max_examples=30, deadline=None)
@given(p=st.floats(0.05, 1.0), mu=st.floats(0.0, 1.0))
def test_extract_inverts_model(p, mu):
    g = kraus_to_ptm(correlated_depolarizing(p, mu)).gamma
    est = extract_corr_depol_params(g[4, 4], g[6, 6])
    assert est.p == pytest.approx(p, abs=1e-9)
    assert est.mu == pytest.approx(mu, abs=1e-8)
