import math

import numpy as np
import pytest

from tornado_damage.errors import RankDeficient, RosterMismatch
from tornado_damage.nn import (
    NetworkParams,
    NetworkSpec,
    OutputActivation,
    init_params,
    sigmoid,
)
from tornado_damage.transforms import TransformKind, TransformSpec, invert_transform
from tornado_damage.zero_inflated import (
    DamagePrediction,
    SeparationWarning,
    ZeroInflatedModel,
    classify,
    fit_ziln,
    predict,
    predict_batch,
    predict_ziln,
)

OUTCOME = TransformSpec(TransformKind.LOG1P_STANDARDIZE, mean=3.0, sd=1.5)


def glm_model(logit_coef, logit_b, lin_coef, lin_b, outcome=OUTCOME) -> ZeroInflatedModel:
    """Zero-hidden-layer networks: exact GLM structure."""
    p = len(logit_coef)
    names = [f"x{i}" for i in range(p)]
    return ZeroInflatedModel(
        classifier_spec=NetworkSpec(
            n_inputs=p, hidden_widths=(), output_activation=OutputActivation.LOGISTIC
        ),
        classifier_params=NetworkParams(
            weights=[np.asarray([logit_coef], dtype=float)],
            biases=[np.asarray([logit_b], dtype=float)],
        ),
        conditional_spec=NetworkSpec(n_inputs=p, hidden_widths=()),
        conditional_params=NetworkParams(
            weights=[np.asarray([lin_coef], dtype=float)],
            biases=[np.asarray([lin_b], dtype=float)],
        ),
        outcome_transform=outcome,
        feature_names=names,
    )


def test_classify_threshold():
    assert classify(0.5) is True
    assert classify(0.4999) is False
    assert classify(0.69, threshold=0.7) is False
    with pytest.raises(ValueError):
        classify(1.5)


def test_forced_zero_probability_zeroes_expectation():
    model = glm_model([0.0, 0.0], -1000.0, [5.0, -2.0], 3.0)
    result = predict(model, np.array([1.0, 2.0]))
    assert result.p_damage == 0.0
    assert result.expected_usd == 0.0
    assert result.damage_flag is False
    assert result.conditional_usd > 0.0  # the regressor still reports


def test_conditional_at_transformed_zero_inverts_the_mean():
    model = glm_model([0.0], 1000.0, [0.0], 0.0)
    result = predict(model, np.array([0.7]))
    assert result.p_damage == 1.0
    assert result.conditional_transformed == 0.0
    assert result.conditional_usd == pytest.approx(math.exp(3.0) - 1.0)
    assert result.expected_usd == pytest.approx(result.conditional_usd)


def test_three_feature_hand_computation():
    logit_coef = [0.4, -0.3, 0.2]
    lin_coef = [0.5, 0.1, -0.2]
    model = glm_model(logit_coef, 0.1, lin_coef, 0.25)
    x = np.array([1.0, -2.0, 0.5])
    z_logit = 0.4 * 1.0 + (-0.3) * (-2.0) + 0.2 * 0.5 + 0.1
    p = 1.0 / (1.0 + math.exp(-z_logit))
    cond_z = 0.5 * 1.0 + 0.1 * (-2.0) + (-0.2) * 0.5 + 0.25
    cond_usd = math.exp(cond_z * 1.5 + 3.0) - 1.0
    result = predict(model, x)
    assert result.p_damage == pytest.approx(p, rel=1e-12)
    assert result.conditional_transformed == pytest.approx(cond_z, rel=1e-12)
    assert result.conditional_usd == pytest.approx(cond_usd, rel=1e-12)
    assert result.expected_usd == pytest.approx(p * cond_usd, rel=1e-12)
    assert result.damage_flag == (p >= 0.5)


def test_negative_dollar_inversion_floors_and_flags():
    model = glm_model([0.0], 0.0, [0.0], -10.0)  # deep below transform zero point
    result = predict(model, np.array([0.0]))
    assert result.conditional_usd == 0.0
    assert result.floored is True
    assert result.expected_usd == 0.0


def test_expected_usd_monotonicity():
    model = glm_model([1.0], 0.0, [1.0], 0.0)
    lows = predict(model, np.array([-1.0]))
    highs = predict(model, np.array([1.0]))
    assert highs.p_damage > lows.p_damage
    assert highs.expected_usd > lows.expected_usd


def test_predict_is_pure():
    model = glm_model([0.3, -0.7], 0.2, [0.1, 0.4], -0.1)
    x = np.array([0.5, 1.5])
    first = predict(model, x)
    second = predict(model, x)
    assert first == second


def test_roster_mismatch():
    model = glm_model([0.3, -0.7], 0.2, [0.1, 0.4], -0.1)
    with pytest.raises(RosterMismatch):
        predict(model, np.array([1.0, 2.0, 3.0]))
    with pytest.raises(RosterMismatch):
        predict_batch(model, np.ones((4, 3)))


def test_model_invariant_validation():
    with pytest.raises(Exception):
        glm_model([0.1], 0.0, [0.1], 0.0, outcome=TransformSpec(TransformKind.STANDARDIZE, 0.0, 1.0))


def make_ziln_data(seed=0, n=5000, noise_sd=0.3):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, 3))
    logit_true = np.array([0.8, -0.5, 0.3])
    lin_true = np.array([0.5, -0.4, 0.3])
    p = sigmoid(x @ logit_true + 0.2)
    damaged = rng.random(n) < p
    outcome_z = np.where(damaged, x @ lin_true + 1.0 + rng.normal(0, noise_sd, n), 0.0)
    return x, outcome_z, damaged, logit_true, lin_true


def test_ziln_recovers_generating_coefficients():
    x, outcome_z, damaged, logit_true, lin_true = make_ziln_data(seed=1)
    model = fit_ziln(x, outcome_z, damaged, OUTCOME)
    assert model.logistic_converged and not model.logistic_degenerate
    for got, truth, se in zip(model.logistic_coef, logit_true, model.logistic_se[1:]):
        assert abs(got - truth) <= 3.0 * se
    assert abs(model.logistic_intercept - 0.2) <= 3.0 * model.logistic_se[0]
    for got, truth, se in zip(model.linear_coef, lin_true, model.linear_se[1:]):
        assert abs(got - truth) <= 3.0 * se
    assert abs(model.linear_intercept - 1.0) <= 3.0 * model.linear_se[0]
    assert model.residual_sd == pytest.approx(0.3, rel=0.1)


def test_ziln_all_positive_is_degenerate_but_fits_linear():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(200, 2))
    y = x @ np.array([1.0, -1.0]) + 0.5
    model = fit_ziln(x, y, np.ones(200, dtype=bool), OUTCOME)
    assert model.logistic_degenerate
    result = predict_ziln(model, np.array([0.3, 0.4]))
    assert result.p_damage == 1.0
    assert model.linear_coef == pytest.approx([1.0, -1.0], abs=1e-9)
    # conditional predictions unchanged relative to a plain regression fit
    assert result.conditional_transformed == pytest.approx(0.3 - 0.4 + 0.5, abs=1e-9)


def test_ziln_orthonormal_design_identity():
    # columns orthonormal and orthogonal to the intercept: coefficients = X^T y
    n = 64
    t = np.arange(n)
    c1 = np.cos(2 * np.pi * t / n) * math.sqrt(2.0 / n)
    c2 = np.sin(2 * np.pi * t / n) * math.sqrt(2.0 / n)
    x = np.column_stack([c1, c2])
    y = 3.0 * c1 - 2.0 * c2
    rng = np.random.default_rng(3)
    damaged = np.ones(n, dtype=bool)
    damaged[rng.integers(0, n, 4)] = True
    model = fit_ziln(x, y, damaged, OUTCOME)
    assert model.linear_coef == pytest.approx(x.T @ y, abs=1e-9)


def test_ziln_rank_deficient():
    rng = np.random.default_rng(4)
    a = rng.normal(size=100)
    x = np.column_stack([a, 2.0 * a])  # collinear
    y = a + 0.1
    with pytest.raises(RankDeficient):
        fit_ziln(x, y, np.ones(100, dtype=bool), OUTCOME)


def test_ziln_separation_warning():
    x = np.linspace(-1, 1, 50)[:, None]
    damaged = (x[:, 0] > 0.0)  # perfectly separable
    y = np.where(damaged, 1.0, 0.0)
    with pytest.warns(SeparationWarning):
        fit_ziln(x, y, damaged, OUTCOME)


def test_ziln_zero_model_predictions():
    model = fit_ziln(
        np.random.default_rng(5).normal(size=(100, 2)),
        np.zeros(100),
        np.random.default_rng(6).random(100) < 0.5,
        OUTCOME,
    )
    model.logistic_coef[:] = 0.0
    model.logistic_intercept = 0.0
    model.linear_coef[:] = 0.0
    model.linear_intercept = 0.0
    result = predict_ziln(model, np.array([4.0, -4.0]))
    assert result.p_damage == 0.5
    assert result.conditional_transformed == 0.0


def test_ziln_monotone_in_positive_coefficient():
    model = fit_ziln(*make_ziln_data(seed=7)[:3], OUTCOME)
    base = np.zeros(3)
    bumped = base.copy()
    bumped[0] = 1.0  # logistic_coef[0] recovered near +0.8
    assert model.logistic_coef[0] > 0
    assert predict_ziln(model, bumped).p_damage > predict_ziln(model, base).p_damage


def test_ziln_structurally_equals_glm_networks():
    x, outcome_z, damaged, _, _ = make_ziln_data(seed=8, n=2000)
    ziln = fit_ziln(x, outcome_z, damaged, OUTCOME)
    twin = glm_model(
        list(ziln.logistic_coef), ziln.logistic_intercept,
        list(ziln.linear_coef), ziln.linear_intercept,
    )
    for probe in np.random.default_rng(9).normal(size=(20, 3)):
        a = predict_ziln(ziln, probe)
        b = predict(twin, probe)
        assert a.p_damage == pytest.approx(b.p_damage, rel=1e-12)
        assert a.conditional_transformed == pytest.approx(b.conditional_transformed, rel=1e-12)
        assert a.expected_usd == pytest.approx(b.expected_usd, rel=1e-12)


def test_batch_matches_single():
    # batched matmul may round differently than row-at-a-time, so compare
    # to float tolerance rather than bitwise
    model = glm_model([0.3, -0.7], 0.2, [0.1, 0.4], -0.1)
    xs = np.random.default_rng(10).normal(size=(8, 2))
    batch = predict_batch(model, xs)
    for row, got in zip(xs, batch):
        single = predict(model, row)
        assert got.p_damage == pytest.approx(single.p_damage, rel=1e-12)
        assert got.conditional_usd == pytest.approx(single.conditional_usd, rel=1e-12)
        assert got.expected_usd == pytest.approx(single.expected_usd, rel=1e-12)
        assert got.damage_flag == single.damage_flag
