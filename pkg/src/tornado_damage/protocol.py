"""The model-selection protocol: train candidates on the training split,
select on cross-validation, retrain on train+CV for the test estimate, then
retrain on everything for deployment. Conditional candidates see only rows
with positive damage; classifiers see every row with the damage indicator as
target.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import FeatureTable, Scope, SplitAssignment, variable_sets
from .errors import OneClassOnly, TornadoDamageError
from .metrics import accuracy, auroc, mse, r2
from .nn import (
    HiddenActivation,
    LossKind,
    Mode,
    NetworkParams,
    NetworkSpec,
    OutputActivation,
    forward,
    init_params,
)
from .optim import OptimizerKind, TrainConfig, TrainHistory, train

DROPOUT_GRID = tuple(round(0.1 * i, 1) for i in range(1, 10))  # 0.1 .. 0.9
L2_GRID = (0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0)


class Task(str, enum.Enum):
    CONDITIONAL = "conditional"
    CLASSIFIER = "classifier"


@dataclass(frozen=True)
class Candidate:
    name: str
    task: Task
    variable_set: str
    hidden_widths: tuple[int, ...]
    hidden_activation: HiddenActivation = HiddenActivation.RELU
    dropout_p: float = 0.0
    l2: float = 0.0
    epochs: int = 200
    learning_rate: float = 0.01
    batch_size: int = 50
    optimizer: OptimizerKind = OptimizerKind.ADAGRAD

    def network_spec(self, n_inputs: int) -> NetworkSpec:
        output = (
            OutputActivation.LOGISTIC if self.task is Task.CLASSIFIER else OutputActivation.IDENTITY
        )
        return NetworkSpec(
            n_inputs=n_inputs,
            hidden_widths=self.hidden_widths,
            hidden_activation=self.hidden_activation,
            output_activation=output,
            dropout_p=self.dropout_p,
            l2=self.l2,
        )

    def train_config(self, seed: int) -> TrainConfig:
        loss = (
            LossKind.BINARY_CROSS_ENTROPY if self.task is Task.CLASSIFIER else LossKind.MSE_TRANSFORMED
        )
        return TrainConfig(
            batch_size=self.batch_size,
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            seed=seed,
            loss=loss,
            optimizer=self.optimizer,
        )


@dataclass
class MetricReport:
    scope: Scope
    n: int
    mse: float = math.nan
    r2: float = math.nan
    accuracy: float = math.nan
    auroc: float = math.nan


def report_to_dict(report: MetricReport) -> dict:
    """JSON-safe form: metrics undefined for the task become null, not NaN."""

    def value(v: float):
        return v if math.isfinite(v) else None

    return {
        "scope": report.scope.value,
        "n": report.n,
        "mse": value(report.mse),
        "r2": value(report.r2),
        "accuracy": value(report.accuracy),
        "auroc": value(report.auroc),
    }


def _task_rows(table: FeatureTable, task: Task, row_idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(row indices used, targets) for a task restricted to row_idx."""
    if task is Task.CONDITIONAL:
        keep = row_idx[table.outcome_raw[row_idx] > 0.0]
        return keep, table.outcome_z[keep]
    return row_idx, (table.outcome_raw[row_idx] > 0.0).astype(np.float64)


def score(
    table: FeatureTable,
    columns: list[int],
    task: Task,
    spec: NetworkSpec,
    params: NetworkParams,
    row_idx: np.ndarray,
    scope: Scope,
) -> MetricReport:
    rows, target = _task_rows(table, task, row_idx)
    out, _ = forward(params, spec, table.matrix[np.ix_(rows, columns)], Mode.EVAL)
    report = MetricReport(scope=scope, n=int(rows.size))
    report.mse = mse(out, target)
    if task is Task.CONDITIONAL:
        report.r2 = r2(out, target)
    else:
        report.accuracy = accuracy(out, target)
        try:
            report.auroc = auroc(out, target)
        except OneClassOnly:
            pass
    return report


def candidate_seed(base_seed: int, index: int, stage: str) -> int:
    """Stable derived seed for (candidate, protocol stage)."""
    stage_offset = {"train": 0, "retrain": 1, "final": 2}[stage]
    return int(np.random.SeedSequence([base_seed, index, stage_offset]).generate_state(1)[0])


@dataclass
class CandidateResult:
    candidate: Candidate
    cv_report: MetricReport | None
    n_parameters: int
    failed: bool = False
    failure: str = ""


@dataclass
class ProtocolResult:
    task: Task
    results: list[CandidateResult]
    best_index: int
    test_report: MetricReport
    test_params: NetworkParams  # retrained on train+cv, evaluated on test
    final_params: NetworkParams  # retrained on 100% for deployment
    best_spec: NetworkSpec
    columns: list[int]
    final_history: TrainHistory | None = None
    log: list[str] = field(default_factory=list)


def _train_candidate(
    table: FeatureTable,
    columns: list[int],
    candidate: Candidate,
    rows: np.ndarray,
    seed: int,
) -> tuple[NetworkParams, TrainHistory]:
    used, target = _task_rows(table, candidate.task, rows)
    spec = candidate.network_spec(len(columns))
    params = init_params(spec, seed)
    _, history = train(
        spec, params, table.matrix[np.ix_(used, columns)], target, candidate.train_config(seed)
    )
    return params, history


def select_best(results: list[CandidateResult], task: Task) -> int:
    """Index of the winning candidate: minimal CV MSE for conditional models,
    maximal CV AUROC for classifiers; ties broken by fewer parameters, then
    lexicographic name."""
    viable = [(i, r) for i, r in enumerate(results) if not r.failed]
    if not viable:
        raise TornadoDamageError("every candidate failed to train")

    def sort_key(item):
        _, r = item
        metric = r.cv_report.mse if task is Task.CONDITIONAL else -r.cv_report.auroc
        return (metric, r.n_parameters, r.candidate.name)

    return min(viable, key=sort_key)[0]


def run_protocol(
    table: FeatureTable,
    assignment: SplitAssignment,
    candidates: list[Candidate],
    base_seed: int = 0,
) -> ProtocolResult:
    if not candidates:
        raise ValueError("candidate list is empty")
    task = candidates[0].task
    if any(c.task is not task for c in candidates):
        raise ValueError("all candidates in one protocol run must share a task")

    train_idx = assignment.indices(Scope.TRAIN)
    cv_idx = assignment.indices(Scope.CV)
    test_idx = assignment.indices(Scope.TEST)
    log: list[str] = []

    results: list[CandidateResult] = []
    for i, cand in enumerate(candidates):
        columns = variable_sets(table)[cand.variable_set]
        spec = cand.network_spec(len(columns))
        try:
            params, _ = _train_candidate(table, columns, cand, train_idx, candidate_seed(base_seed, i, "train"))
            report = score(table, columns, task, spec, params, cv_idx, Scope.CV)
            results.append(CandidateResult(cand, report, spec.n_parameters()))
            log.append(f"stage1 train+cv: {cand.name} cv_mse={report.mse!r} cv_auroc={report.auroc!r}")
        except TornadoDamageError as exc:
            results.append(CandidateResult(cand, None, spec.n_parameters(), failed=True, failure=str(exc)))
            log.append(f"stage1 train+cv: {cand.name} FAILED: {exc}")

    best_index = select_best(results, task)
    best = results[best_index]
    log.append(f"stage2 select: {best.candidate.name}")

    best_columns = variable_sets(table)[best.candidate.variable_set]
    best_spec = best.candidate.network_spec(len(best_columns))

    train_cv_idx = np.concatenate([train_idx, cv_idx])
    test_params, _ = _train_candidate(
        table, best_columns, best.candidate, train_cv_idx, candidate_seed(base_seed, best_index, "retrain")
    )
    log.append("stage3 retrain on train+cv")
    test_report = score(table, best_columns, task, best_spec, test_params, test_idx, Scope.TEST)
    log.append(f"stage4 test: mse={test_report.mse!r} auroc={test_report.auroc!r}")

    all_idx = np.arange(table.n_rows)
    final_params, final_history = _train_candidate(
        table, best_columns, best.candidate, all_idx, candidate_seed(base_seed, best_index, "final")
    )
    log.append("stage5 retrain on full data for deployment")

    return ProtocolResult(
        task=task,
        results=results,
        best_index=best_index,
        test_report=test_report,
        test_params=test_params,
        final_params=final_params,
        best_spec=best_spec,
        columns=best_columns,
        final_history=final_history,
        log=log,
    )


# ---------------------------------------------------------------------------
# Sweep enumeration and reporting.

def enumerate_candidates(
    task: Task,
    variable_set: str,
    family: str,
    n_inputs: int,
    architectures: list[list[int]],
    dropouts: tuple[float, ...] = (0.0,),
    l2s: tuple[float, ...] = (0.0,),
    activation: HiddenActivation = HiddenActivation.RELU,
    epochs: int = 200,
    learning_rate: float = 0.01,
) -> list[Candidate]:
    out = []
    for widths in architectures:
        for p in dropouts:
            for l2 in l2s:
                name = (
                    f"{task.value}-{variable_set}-{family}-"
                    + "x".join(str(w) for w in widths)
                    + f"-{activation.value}-p{p:g}-l2{l2:g}"
                )
                out.append(Candidate(
                    name=name,
                    task=task,
                    variable_set=variable_set,
                    hidden_widths=tuple(widths),
                    hidden_activation=activation,
                    dropout_p=p,
                    l2=l2,
                    epochs=epochs,
                    learning_rate=learning_rate,
                ))
    return out


def write_sweep_report(results: list[CandidateResult], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "name", "task", "variable_set", "hidden_widths", "activation",
            "dropout", "l2", "n_parameters", "cv_mse", "cv_r2", "cv_accuracy", "cv_auroc", "failed",
        ])
        for r in results:
            rep = r.cv_report
            writer.writerow([
                r.candidate.name, r.candidate.task.value, r.candidate.variable_set,
                "x".join(str(w) for w in r.candidate.hidden_widths),
                r.candidate.hidden_activation.value,
                repr(r.candidate.dropout_p), repr(r.candidate.l2), r.n_parameters,
                repr(rep.mse) if rep else "", repr(rep.r2) if rep else "",
                repr(rep.accuracy) if rep else "", repr(rep.auroc) if rep else "",
                int(r.failed),
            ])


def residual_export(
    table: FeatureTable,
    assignment: SplitAssignment,
    task: Task,
    spec: NetworkSpec,
    params: NetworkParams,
    columns: list[int],
) -> list[tuple[float, float, float]]:
    """Per-row test residuals at the event's beginning coordinates.

    Conditional: absolute transformed-scale residuals over positive-damage
    test rows. Classifier: squared probability residuals over all test rows.
    """
    test_idx = assignment.indices(Scope.TEST)
    rows, target = _task_rows(table, task, test_idx)
    out, _ = forward(params, spec, table.matrix[np.ix_(rows, columns)], Mode.EVAL)
    if task is Task.CONDITIONAL:
        residuals = np.abs(out - target)
    else:
        residuals = (out - target) ** 2
    return [
        (float(table.lats[i]), float(table.lons[i]), float(residuals[k]))
        for k, i in enumerate(rows)
    ]


def write_residuals(rows: list[tuple[float, float, float]], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lat", "lon", "residual"])
        for lat, lon, res in rows:
            writer.writerow([repr(lat), repr(lon), repr(res)])
