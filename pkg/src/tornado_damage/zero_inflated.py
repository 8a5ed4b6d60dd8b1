"""Two-part damage models: the paired-network predictor and the zero-inflated
log-normal (ZILN) baseline.

Both follow the same scheme: a logistic component for P(damage > 0) and a
conditional component for the transformed damage given damage. Dollar-scale
outputs invert the outcome transformation directly (exp then the affine
shift), with no log-normal mean correction; negative inversions are floored
at zero and flagged.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import RankDeficient, RosterMismatch, ShapeMismatch
from .nn import Mode, NetworkParams, NetworkSpec, OutputActivation, forward, sigmoid
from .transforms import TransformKind, TransformSpec, invert_transform

DAMAGE_THRESHOLD = 0.5
_SATURATED_LOGIT = 1000.0


class SeparationWarning(UserWarning):
    """Logistic fitting failed to converge (quasi-separation likely)."""


@dataclass(frozen=True)
class DamagePrediction:
    p_damage: float
    conditional_transformed: float
    conditional_usd: float
    expected_usd: float
    damage_flag: bool
    floored: bool = False  # inverse transform produced a negative dollar value


def classify(p: float, threshold: float = DAMAGE_THRESHOLD) -> bool:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    return p >= threshold


def _assemble_prediction(p: float, cond_z: float, outcome: TransformSpec) -> DamagePrediction:
    usd = invert_transform(outcome, cond_z)
    floored = usd < 0.0
    usd = max(usd, 0.0)
    return DamagePrediction(
        p_damage=p,
        conditional_transformed=cond_z,
        conditional_usd=usd,
        expected_usd=p * usd,
        damage_flag=classify(p),
        floored=floored,
    )


@dataclass
class ZeroInflatedModel:
    classifier_spec: NetworkSpec
    classifier_params: NetworkParams
    conditional_spec: NetworkSpec
    conditional_params: NetworkParams
    outcome_transform: TransformSpec
    feature_names: list[str]

    def __post_init__(self):
        if self.classifier_spec.output_activation is not OutputActivation.LOGISTIC:
            raise ShapeMismatch("classifier must have a logistic output")
        if self.conditional_spec.output_activation is not OutputActivation.IDENTITY:
            raise ShapeMismatch("conditional regressor must have an identity output")
        n = len(self.feature_names)
        if self.classifier_spec.n_inputs != n or self.conditional_spec.n_inputs != n:
            raise RosterMismatch(
                f"networks expect {self.classifier_spec.n_inputs}/"
                f"{self.conditional_spec.n_inputs} inputs but roster has {n}"
            )
        if self.outcome_transform.kind is not TransformKind.LOG1P_STANDARDIZE:
            raise ValueError("outcome transform must be the log1p standardization")


def predict(model: ZeroInflatedModel, features: np.ndarray) -> DamagePrediction:
    """Single-vector prediction; `features` already on the transformed scale."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 1 or features.size != len(model.feature_names):
        raise RosterMismatch(
            f"feature vector of length {features.size} does not match roster "
            f"({len(model.feature_names)} columns)"
        )
    p, _ = forward(model.classifier_params, model.classifier_spec, features[None, :], Mode.EVAL)
    z, _ = forward(model.conditional_params, model.conditional_spec, features[None, :], Mode.EVAL)
    return _assemble_prediction(float(p[0]), float(z[0]), model.outcome_transform)


def predict_batch(model: ZeroInflatedModel, features: np.ndarray) -> list[DamagePrediction]:
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[1] != len(model.feature_names):
        raise RosterMismatch(
            f"feature matrix {features.shape} does not match roster "
            f"({len(model.feature_names)} columns)"
        )
    p, _ = forward(model.classifier_params, model.classifier_spec, features, Mode.EVAL)
    z, _ = forward(model.conditional_params, model.conditional_spec, features, Mode.EVAL)
    return [
        _assemble_prediction(float(pi), float(zi), model.outcome_transform)
        for pi, zi in zip(p, z)
    ]


# ---------------------------------------------------------------------------
# Zero-inflated log-normal baseline.

@dataclass
class ZilnModel:
    logistic_coef: np.ndarray
    logistic_intercept: float
    linear_coef: np.ndarray
    linear_intercept: float
    residual_sd: float
    outcome_transform: TransformSpec
    feature_names: list[str]
    logistic_se: np.ndarray | None = None  # intercept first
    linear_se: np.ndarray | None = None
    logistic_converged: bool = True
    logistic_degenerate: bool = False


def _fit_logistic_newton(
    x: np.ndarray, y: np.ndarray, tol: float = 1e-8, max_iter: int = 100
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Damped Newton on the summed binary cross entropy. Returns
    (coefficients incl. intercept, standard errors, converged)."""
    design = np.column_stack([np.ones(x.shape[0]), x])
    beta = np.zeros(design.shape[1])

    def objective(b):
        z = design @ b
        # log(1 + exp(-yz)) in the +-1 label convention, stable form
        s = np.where(y > 0.5, -z, z)
        return float(np.sum(np.logaddexp(0.0, s)))

    current = objective(beta)
    converged = False
    for _ in range(max_iter):
        p = sigmoid(design @ beta)
        grad = design.T @ (p - y)
        if np.max(np.abs(grad)) < tol:
            converged = True
            break
        w = p * (1.0 - p)
        hessian = design.T @ (design * w[:, None])
        try:
            step = np.linalg.solve(hessian, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hessian, grad, rcond=None)[0]
        scale = 1.0
        for _ in range(30):
            candidate = beta - scale * step
            value = objective(candidate)
            if value <= current:
                beta, current = candidate, value
                break
            scale *= 0.5
        else:
            break  # no descent step found
    p = sigmoid(design @ beta)
    w = p * (1.0 - p)
    hessian = design.T @ (design * w[:, None])
    try:
        se = np.sqrt(np.diag(np.linalg.inv(hessian)))
    except np.linalg.LinAlgError:
        se = np.full(design.shape[1], np.nan)
    return beta, se, converged


def fit_ziln(
    x: np.ndarray,
    outcome_z: np.ndarray,
    damaged: np.ndarray,
    outcome_transform: TransformSpec,
    feature_names: list[str] | None = None,
) -> ZilnModel:
    """Fit the ZILN baseline.

    Logistic part: all rows against the damage indicator, by damped Newton.
    Linear part: damaged rows against the transformed outcome, by least
    squares through an orthogonal decomposition; residual sd uses the n-k
    denominator. Raises RankDeficient when the positive-row design matrix
    loses column rank.
    """
    x = np.asarray(x, dtype=np.float64)
    outcome_z = np.asarray(outcome_z, dtype=np.float64)
    damaged = np.asarray(damaged, dtype=bool)
    n, p = x.shape
    if feature_names is None:
        feature_names = [f"x{i}" for i in range(p)]

    degenerate = bool(damaged.all() or (~damaged).all())
    if degenerate:
        logit_beta = np.zeros(p + 1)
        logit_beta[0] = _SATURATED_LOGIT if damaged.all() else -_SATURATED_LOGIT
        logit_se = np.full(p + 1, np.nan)
        converged = True
    else:
        logit_beta, logit_se, converged = _fit_logistic_newton(x, damaged.astype(np.float64))
        # saturated fitted logits mean the gradient vanished numerically, not
        # statistically: quasi-separation
        design = np.column_stack([np.ones(n), x])
        if converged and np.max(np.abs(design @ logit_beta)) > 30.0:
            converged = False
        if not converged:
            warnings.warn(
                "logistic component did not converge; classes may be separable",
                SeparationWarning,
            )

    x_pos = x[damaged]
    y_pos = outcome_z[damaged]
    if x_pos.shape[0] == 0:
        raise ValueError("at least one positive-outcome row is required")
    design = np.column_stack([np.ones(x_pos.shape[0]), x_pos])
    coef, _, rank, _ = np.linalg.lstsq(design, y_pos, rcond=None)
    if rank < design.shape[1]:
        raise RankDeficient(
            f"linear design matrix has rank {rank} < {design.shape[1]} columns"
        )
    residuals = y_pos - design @ coef
    dof = x_pos.shape[0] - design.shape[1]
    if dof <= 0:
        raise RankDeficient("not enough positive rows for a residual variance")
    sigma2 = float(residuals @ residuals) / dof
    xtx_inv = np.linalg.inv(design.T @ design)
    linear_se = np.sqrt(np.diag(sigma2 * xtx_inv))

    return ZilnModel(
        logistic_coef=logit_beta[1:],
        logistic_intercept=float(logit_beta[0]),
        linear_coef=coef[1:],
        linear_intercept=float(coef[0]),
        residual_sd=float(np.sqrt(sigma2)),
        outcome_transform=outcome_transform,
        feature_names=list(feature_names),
        logistic_se=logit_se,
        linear_se=linear_se,
        logistic_converged=converged,
        logistic_degenerate=degenerate,
    )


def predict_ziln(model: ZilnModel, features: np.ndarray) -> DamagePrediction:
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 1 or features.size != len(model.feature_names):
        raise RosterMismatch(
            f"feature vector of length {features.size} does not match roster "
            f"({len(model.feature_names)} columns)"
        )
    z_logit = float(features @ model.logistic_coef + model.logistic_intercept)
    p = float(sigmoid(np.asarray([z_logit]))[0])
    cond_z = float(features @ model.linear_coef + model.linear_intercept)
    return _assemble_prediction(p, cond_z, model.outcome_transform)
