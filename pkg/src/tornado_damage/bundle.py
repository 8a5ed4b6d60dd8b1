"""Versioned, checksummed model persistence.

A bundle is one JSON document::

    {"format": "tornado-damage-bundle", "version": 1, "created": <ISO-8601>,
     "sha256": <hex digest of the canonical payload>, "payload": {...}}

The payload holds the feature roster (with fitted transformations and
natural-scale means), both network specs and parameter tensors, the outcome
transformation, and training metadata. Parameter arrays are serialized as
base64 of their little-endian float64 bytes, so save/load round trips are
bit-exact. The checksum covers the canonical (sorted-key, no-whitespace)
payload encoding and is verified on every load.

`created` honors SOURCE_DATE_EPOCH for reproducible outputs.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .dataset import ColumnDescriptor, Source
from .errors import CorruptBundle, VersionMismatch
from .nn import HiddenActivation, NetworkParams, NetworkSpec, OutputActivation
from .transforms import TransformKind, TransformSpec
from .zero_inflated import ZeroInflatedModel

BUNDLE_FORMAT = "tornado-damage-bundle"
BUNDLE_VERSION = 1


@dataclass
class ModelBundle:
    model: ZeroInflatedModel
    columns: list[ColumnDescriptor]  # roster for the model's inputs, in order
    aux_means: dict[str, float]
    training_meta: dict = field(default_factory=dict)
    version: int = BUNDLE_VERSION
    created: str = ""

    def __post_init__(self):
        if not self.created:
            self.created = _creation_timestamp()
        names = [c.name for c in self.columns]
        if names != self.model.feature_names:
            raise CorruptBundle("roster columns do not match the model's feature names")


def _creation_timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        stamp = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        stamp = datetime.now(tz=timezone.utc)
    return stamp.replace(microsecond=0).isoformat()


def _array_to_json(a: np.ndarray) -> dict:
    a = np.ascontiguousarray(a, dtype="<f8")
    return {
        "shape": list(a.shape),
        "dtype": "<f8",
        "data_b64": base64.b64encode(a.tobytes()).decode("ascii"),
    }


def _array_from_json(obj: dict) -> np.ndarray:
    raw = base64.b64decode(obj["data_b64"])
    return np.frombuffer(raw, dtype=obj["dtype"]).reshape(obj["shape"]).copy()


def _spec_to_json(spec: NetworkSpec) -> dict:
    return {
        "n_inputs": spec.n_inputs,
        "hidden_widths": list(spec.hidden_widths),
        "hidden_activation": spec.hidden_activation.value,
        "output_activation": spec.output_activation.value,
        "dropout_p": spec.dropout_p,
        "l2": spec.l2,
    }


def _spec_from_json(obj: dict) -> NetworkSpec:
    return NetworkSpec(
        n_inputs=obj["n_inputs"],
        hidden_widths=tuple(obj["hidden_widths"]),
        hidden_activation=HiddenActivation(obj["hidden_activation"]),
        output_activation=OutputActivation(obj["output_activation"]),
        dropout_p=obj["dropout_p"],
        l2=obj["l2"],
    )


def _params_to_json(params: NetworkParams) -> dict:
    return {
        "weights": [_array_to_json(w) for w in params.weights],
        "biases": [_array_to_json(b) for b in params.biases],
    }


def _params_from_json(obj: dict) -> NetworkParams:
    return NetworkParams(
        weights=[_array_from_json(w) for w in obj["weights"]],
        biases=[_array_from_json(b) for b in obj["biases"]],
    )


def _transform_to_json(spec: TransformSpec | None) -> dict | None:
    if spec is None:
        return None
    return {"kind": spec.kind.value, "mean": spec.mean, "sd": spec.sd}


def _transform_from_json(obj: dict | None) -> TransformSpec | None:
    if obj is None:
        return None
    return TransformSpec(kind=TransformKind(obj["kind"]), mean=obj["mean"], sd=obj["sd"])


def _column_to_json(col: ColumnDescriptor) -> dict:
    return {
        "name": col.name,
        "source": col.source.value,
        "kind": col.kind.value if col.kind else None,
        "unit": col.unit,
        "beforehand": col.beforehand,
        "spline_group": col.spline_group,
        "transform": _transform_to_json(col.transform),
        "natural_mean": col.natural_mean,
    }


def _column_from_json(obj: dict) -> ColumnDescriptor:
    return ColumnDescriptor(
        name=obj["name"],
        source=Source(obj["source"]),
        kind=TransformKind(obj["kind"]) if obj["kind"] else None,
        unit=obj["unit"],
        beforehand=obj["beforehand"],
        spline_group=obj["spline_group"],
        transform=_transform_from_json(obj["transform"]),
        natural_mean=obj["natural_mean"],
    )


def _payload(bundle: ModelBundle) -> dict:
    return {
        "columns": [_column_to_json(c) for c in bundle.columns],
        "outcome_transform": _transform_to_json(bundle.model.outcome_transform),
        "classifier": {
            "spec": _spec_to_json(bundle.model.classifier_spec),
            "params": _params_to_json(bundle.model.classifier_params),
        },
        "conditional": {
            "spec": _spec_to_json(bundle.model.conditional_spec),
            "params": _params_to_json(bundle.model.conditional_params),
        },
        "aux_means": bundle.aux_means,
        "training_meta": bundle.training_meta,
    }


def _canonical(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


def save_bundle(bundle: ModelBundle, path: str | Path) -> None:
    payload = _payload(bundle)
    document = {
        "format": BUNDLE_FORMAT,
        "version": bundle.version,
        "created": bundle.created,
        "sha256": hashlib.sha256(_canonical(payload)).hexdigest(),
        "payload": payload,
    }
    Path(path).write_text(json.dumps(document, indent=1))


def load_bundle(path: str | Path) -> ModelBundle:
    try:
        document = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CorruptBundle(f"cannot parse bundle at {path}: {exc}") from exc
    if not isinstance(document, dict) or document.get("format") != BUNDLE_FORMAT:
        raise CorruptBundle(f"{path} is not a {BUNDLE_FORMAT} file")
    version = document.get("version")
    if version != BUNDLE_VERSION:
        raise VersionMismatch(f"bundle version {version} unsupported (expected {BUNDLE_VERSION})")
    payload = document.get("payload")
    digest = hashlib.sha256(_canonical(payload)).hexdigest()
    if digest != document.get("sha256"):
        raise CorruptBundle(f"{path}: checksum mismatch (file corrupted?)")

    columns = [_column_from_json(c) for c in payload["columns"]]
    model = ZeroInflatedModel(
        classifier_spec=_spec_from_json(payload["classifier"]["spec"]),
        classifier_params=_params_from_json(payload["classifier"]["params"]),
        conditional_spec=_spec_from_json(payload["conditional"]["spec"]),
        conditional_params=_params_from_json(payload["conditional"]["params"]),
        outcome_transform=_transform_from_json(payload["outcome_transform"]),
        feature_names=[c.name for c in columns],
    )
    return ModelBundle(
        model=model,
        columns=columns,
        aux_means=payload["aux_means"],
        training_meta=payload["training_meta"],
        version=version,
        created=document.get("created", ""),
    )
