"""Column transformations: standardization, optionally preceded by a log map.

Three kinds are supported; each standardizes on an intermediate scale:

    standardize:          z = (x - mean) / sd
    log1p_standardize:    z = (log(x + 1) - mean) / sd
    log1000_standardize:  z = (log(1000 x + 1) - mean) / sd

`mean` and `sd` are the sample statistics of the intermediate values
(natural log, sd with the n-1 denominator), fitted once and reused for
both model fitting and inference-time encoding.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateColumn, NegativeInput


class TransformKind(str, enum.Enum):
    STANDARDIZE = "standardize"
    LOG1P_STANDARDIZE = "log1p_standardize"
    LOG1000_STANDARDIZE = "log1000_standardize"


@dataclass(frozen=True)
class TransformSpec:
    kind: TransformKind
    mean: float
    sd: float

    def __post_init__(self):
        if not self.sd > 0:
            raise DegenerateColumn(f"sd must be positive, got {self.sd}")


def _to_intermediate(kind: TransformKind, x: np.ndarray) -> np.ndarray:
    if kind is TransformKind.STANDARDIZE:
        return x
    if np.any(x < 0):
        bad = float(np.asarray(x)[np.asarray(x) < 0].flat[0])
        raise NegativeInput(f"log transform requires nonnegative input, got {bad}")
    if kind is TransformKind.LOG1P_STANDARDIZE:
        return np.log1p(x)
    return np.log1p(1000.0 * x)


def _from_intermediate(kind: TransformKind, u: np.ndarray) -> np.ndarray:
    if kind is TransformKind.STANDARDIZE:
        return u
    if kind is TransformKind.LOG1P_STANDARDIZE:
        return np.expm1(u)
    return np.expm1(u) / 1000.0


def fit_transform(kind: TransformKind, values: Sequence[float]) -> TransformSpec:
    """Fit a TransformSpec so that applying it to `values` yields mean 0, sd 1.

    Raises DegenerateColumn when fewer than two distinct values are present,
    NegativeInput when a log kind sees a negative value.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise DegenerateColumn("cannot fit a transformation on an empty column")
    inter = _to_intermediate(kind, arr)
    mean = float(np.mean(inter))
    sd = float(np.std(inter, ddof=1)) if arr.size > 1 else 0.0
    # variance at float rounding-noise level is as unusable as exactly zero
    if sd <= abs(mean) * 1e-12 or not math.isfinite(sd):
        raise DegenerateColumn(f"column has no usable variance (mean {mean}, sd {sd} on the {kind.value} scale)")
    return TransformSpec(kind=kind, mean=mean, sd=sd)


def apply_transform(spec: TransformSpec, x):
    """Encode natural-scale x to the transformed scale. Accepts scalars or arrays."""
    arr = np.asarray(x, dtype=np.float64)
    z = (_to_intermediate(spec.kind, arr) - spec.mean) / spec.sd
    return float(z) if np.isscalar(x) or arr.ndim == 0 else z


def invert_transform(spec: TransformSpec, z):
    """Decode transformed-scale z back to the natural scale."""
    arr = np.asarray(z, dtype=np.float64)
    x = _from_intermediate(spec.kind, arr * spec.sd + spec.mean)
    return float(x) if np.isscalar(z) or arr.ndim == 0 else x
