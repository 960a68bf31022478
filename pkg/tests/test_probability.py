import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pdvar import datasets
from pdvar.jurimetrics import country_mean
from pdvar.probability import (
    BreachNetworkParams,
    FineGivenPrinciple,
    IncidentMix,
    NormalModel,
    PoissonModel,
    fit_normal,
    fit_poisson,
    poisson_pmf,
    solve_breach_network,
    total_probability_attribution,
)

PUBLISHED_NETWORK = BreachNetworkParams(
    p_dpia=0.70,
    p_ext_given_dpia=0.10,
    p_ext_given_not_dpia=0.90,
    p_db_given_ext=0.80,
    p_db_given_not_ext=0.20,
)


def joint_table_oracle(params):
    """Enumerate all 8 dpia/ext/db assignments and read the answers off sums."""
    joint = {}
    for dpia in (True, False):
        p_d = params.p_dpia if dpia else 1 - params.p_dpia
        p_e_cond = params.p_ext_given_dpia if dpia else params.p_ext_given_not_dpia
        for ext in (True, False):
            p_e = p_e_cond if ext else 1 - p_e_cond
            p_b_cond = params.p_db_given_ext if ext else params.p_db_given_not_ext
            for db in (True, False):
                p_b = p_b_cond if db else 1 - p_b_cond
                joint[(dpia, ext, db)] = p_d * p_e * p_b

    def marg(pred):
        return sum(p for key, p in joint.items() if pred(*key))

    p_ext = marg(lambda d, e, b: e)
    p_db = marg(lambda d, e, b: b)
    return {
        "p_ext": p_ext,
        "p_db": p_db,
        "p_ext_given_db": marg(lambda d, e, b: e and b) / p_db,
        "p_ext_given_not_db": marg(lambda d, e, b: e and not b) / (1 - p_db),
        "p_db_given_dpia": marg(lambda d, e, b: d and b) / marg(lambda d, e, b: d),
        "p_db_given_not_dpia": marg(lambda d, e, b: (not d) and b)
        / marg(lambda d, e, b: not d),
    }


# --- Poisson ---------------------------------------------------------------


def test_fit_poisson_constant_rate():
    assert fit_poisson([19] * 5).lam == 19


def test_fit_poisson_single_year():
    assert fit_poisson([19]).lam == 19


def test_fit_poisson_mean():
    assert fit_poisson([10, 20, 27]).lam == pytest.approx((10 + 20 + 27) / 3)


def test_fit_poisson_errors():
    with pytest.raises(ValueError):
        fit_poisson([])
    with pytest.raises(ValueError):
        fit_poisson([0, 0])
    with pytest.raises(ValueError):
        fit_poisson([3, -1])


def test_poisson_pmf_at_zero():
    assert poisson_pmf(PoissonModel(1.0), 0) == pytest.approx(math.exp(-1), abs=1e-6)


def test_poisson_pmf_normalizes():
    model = PoissonModel(19.0)
    assert sum(poisson_pmf(model, k) for k in range(201)) == pytest.approx(1.0, abs=1e-9)


def test_poisson_pmf_against_factorial_oracle():
    # exact big-integer factorial, no log-space tricks
    oracle = math.exp(-19) * 19**19 / math.factorial(19)
    assert poisson_pmf(PoissonModel(19.0), 19) == pytest.approx(oracle, abs=1e-12)


@given(st.floats(min_value=0.5, max_value=40))
def test_poisson_pmf_truncated_support_sums_to_one(lam):
    model = PoissonModel(lam)
    upper = int(lam + 20 * math.sqrt(lam)) + 1
    assert sum(poisson_pmf(model, k) for k in range(upper + 1)) == pytest.approx(
        1.0, abs=1e-9
    )


def test_poisson_pmf_rejects_negative_k():
    with pytest.raises(ValueError):
        poisson_pmf(PoissonModel(1.0), -1)


# --- Normal ----------------------------------------------------------------


def test_fit_normal_constant_sample():
    model = fit_normal([10, 10, 10])
    assert model.mu == 10
    assert model.sigma == 0


def test_fit_normal_closed_form():
    model = fit_normal([0, 2])
    assert model.mu == pytest.approx(1)
    assert model.sigma == pytest.approx(math.sqrt(2), abs=1e-6)


def test_fit_normal_france_fixture_two_pass_oracle(fixture_corpus):
    amounts = [float(r.fine) for r in fixture_corpus if r.country == "FR"]
    model = fit_normal(amounts)
    assert model.mu == pytest.approx(float(country_mean(fixture_corpus, "FR")), abs=0.01)
    mean = sum(amounts) / len(amounts)
    oracle_sigma = math.sqrt(sum((a - mean) ** 2 for a in amounts) / (len(amounts) - 1))
    assert model.sigma == pytest.approx(oracle_sigma, abs=0.01)


def test_fit_normal_needs_two():
    with pytest.raises(ValueError):
        fit_normal([5])


def test_normal_model_rejects_negative_sigma():
    with pytest.raises(ValueError):
        NormalModel(mu=0, sigma=-1)


# --- breach network ---------------------------------------------------------


def test_network_published_inputs():
    derived = solve_breach_network(PUBLISHED_NETWORK)
    assert derived.p_ext == pytest.approx(0.34, abs=1e-9)
    assert derived.p_db == pytest.approx(0.404, abs=1e-9)
    assert derived.p_ext_given_db == pytest.approx(0.673, abs=1e-3)
    assert derived.p_ext_given_not_db == pytest.approx(0.114, abs=1e-3)
    assert derived.p_db_given_dpia == pytest.approx(0.26, abs=1e-9)
    assert derived.p_db_given_not_dpia == pytest.approx(0.74, abs=1e-9)


def test_network_symmetric_inputs_are_uninformative():
    params = BreachNetworkParams(0.7, 0.5, 0.5, 0.5, 0.5)
    derived = solve_breach_network(params)
    for value in (
        derived.p_ext,
        derived.p_db,
        derived.p_ext_given_db,
        derived.p_ext_given_not_db,
        derived.p_db_given_dpia,
        derived.p_db_given_not_dpia,
    ):
        assert value == pytest.approx(0.5, abs=1e-12)


def test_network_against_joint_table_oracle():
    params = BreachNetworkParams(0.5, 0.2, 0.6, 0.9, 0.1)
    derived = solve_breach_network(params)
    expected = joint_table_oracle(params)
    for name, value in expected.items():
        assert getattr(derived, name) == pytest.approx(value, abs=1e-12), name


def test_network_oracle_over_random_draws():
    rng = np.random.default_rng(123)
    for _ in range(1000):
        params = BreachNetworkParams(*rng.uniform(0.05, 0.95, 5))
        derived = solve_breach_network(params)
        expected = joint_table_oracle(params)
        for name, value in expected.items():
            assert getattr(derived, name) == pytest.approx(value, abs=1e-12), name


def test_network_chain_rule_consistency():
    rng = np.random.default_rng(5)
    for _ in range(300):
        params = BreachNetworkParams(*rng.uniform(0.05, 0.95, 5))
        derived = solve_breach_network(params)
        recomposed = derived.p_db_given_dpia * params.p_dpia + derived.p_db_given_not_dpia * (
            1 - params.p_dpia
        )
        assert recomposed == pytest.approx(derived.p_db, abs=1e-12)


def test_network_degenerate_denominators():
    with pytest.raises(ValueError, match=r"P\(db\)"):
        solve_breach_network(BreachNetworkParams(0.5, 0.5, 0.5, 0.0, 0.0))
    with pytest.raises(ValueError, match=r"P\(~db\)"):
        solve_breach_network(BreachNetworkParams(0.5, 0.5, 0.5, 1.0, 1.0))


def test_network_rejects_out_of_range():
    with pytest.raises(ValueError):
        BreachNetworkParams(1.2, 0.5, 0.5, 0.5, 0.5)


# --- total probability -------------------------------------------------------


def test_attribution_published_scenario():
    result = total_probability_attribution(
        IncidentMix(0.76, 0.165, 0.075), FineGivenPrinciple(0.2, 0.08, 0.05)
    )
    assert result.p_d == pytest.approx(0.16895, abs=1e-9)
    assert result.posterior_c == pytest.approx(0.8997, abs=0.001)
    assert result.posterior_i == pytest.approx(0.0781, abs=0.0005)
    assert result.posterior_a == pytest.approx(0.0222, abs=0.0005)


def test_attribution_uniform_conditionals_return_mix():
    mix = IncidentMix(0.5, 0.3, 0.2)
    result = total_probability_attribution(mix, FineGivenPrinciple(0.4, 0.4, 0.4))
    assert result.p_d == pytest.approx(0.4, abs=1e-12)
    assert result.posterior_c == pytest.approx(mix.p_c, abs=1e-12)
    assert result.posterior_i == pytest.approx(mix.p_i, abs=1e-12)
    assert result.posterior_a == pytest.approx(mix.p_a, abs=1e-12)


def test_attribution_direct_substitution_oracle():
    # p_d = 0.5*0.1 + 0.3*0.2 + 0.2*0.4 = 0.05 + 0.06 + 0.08 = 0.19
    result = total_probability_attribution(
        IncidentMix(0.5, 0.3, 0.2), FineGivenPrinciple(0.1, 0.2, 0.4)
    )
    assert result.p_d == pytest.approx(0.19, abs=1e-12)
    assert result.posterior_c == pytest.approx(0.05 / 0.19, abs=1e-12)
    assert result.posterior_i == pytest.approx(0.06 / 0.19, abs=1e-12)
    assert result.posterior_a == pytest.approx(0.08 / 0.19, abs=1e-12)


def test_attribution_zero_denominator():
    with pytest.raises(ValueError, match=r"P\(D\)"):
        total_probability_attribution(
            IncidentMix(0.5, 0.3, 0.2), FineGivenPrinciple(0.0, 0.0, 0.0)
        )


def test_incident_mix_must_sum_to_one():
    with pytest.raises(ValueError):
        IncidentMix(0.5, 0.3, 0.1)


@given(
    st.floats(min_value=0.05, max_value=0.9),
    st.floats(min_value=0.05, max_value=0.9),
    st.floats(min_value=0.01, max_value=1.0),
    st.floats(min_value=0.01, max_value=1.0),
    st.floats(min_value=0.01, max_value=1.0),
)
def test_attribution_posteriors_sum_to_one(c, i, pc, pi, pa):
    if c + i >= 1.0:
        return
    mix = IncidentMix(c, i, 1.0 - c - i)
    result = total_probability_attribution(mix, FineGivenPrinciple(pc, pi, pa))
    assert result.posterior_c + result.posterior_i + result.posterior_a == pytest.approx(
        1.0, abs=1e-9
    )


def test_impact_weights_dataset_is_on_scale():
    weights = [e.weight for e in datasets.impact_factor_weights()]
    assert len(weights) == 10
    assert all(1 <= w <= 5 for w in weights)
