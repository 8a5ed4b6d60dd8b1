"""HTTP inference service backing the dashboard.

Endpoints::

    GET  /healthz                 liveness, body "ok"
    GET  /api/v1/model            bundle metadata and training metrics
    GET  /api/v1/grid/{year}/{month}   precomputed monthly grid predictions
    POST /api/v1/predict          PredictRequest -> PredictResponse

Predict bodies are JSON objects with required ``lat``, ``lon``, ``datetime``
(ISO 8601) and optional ``length``, ``width``, ``duration`` and
``overrides`` ({roster feature: natural-scale value}). Omitted storm fields
sit at the training mean (0 on the transformed scale). Malformed bodies get
400; override names outside the roster get 422 listing the offenders. The
bundle is immutable; identical requests yield identical responses.
"""

from __future__ import annotations

import json
import math
from datetime import datetime
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .bundle import ModelBundle
from .splines import bspline_basis, day_of_year_spec, time_of_day_spec
from .transforms import apply_transform
from .zero_inflated import predict

ALLOWED_REQUEST_FIELDS = {"lat", "lon", "datetime", "length", "width", "duration", "overrides"}


def json_safe(value):
    """Strict-JSON copy: non-finite floats become null (older bundles may
    carry NaN metric placeholders in their metadata)."""
    if isinstance(value, dict):
        return {k: json_safe(v) for k, v in value.items()}
    if isinstance(value, list):
        return [json_safe(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


class BadRequest(Exception):
    pass


class RosterViolation(Exception):
    def __init__(self, names: list[str]):
        self.names = names
        super().__init__(f"unknown roster features: {names}")


def _require_number(body: dict, key: str, required: bool) -> float | None:
    if key not in body or body[key] is None:
        if required:
            raise BadRequest(f"missing required field {key!r}")
        return None
    value = body[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise BadRequest(f"field {key!r} must be a number")
    return float(value)


def parse_predict_request(body) -> dict:
    if not isinstance(body, dict):
        raise BadRequest("request body must be a JSON object")
    unknown = sorted(set(body) - ALLOWED_REQUEST_FIELDS)
    if unknown:
        raise BadRequest(f"unknown request fields: {unknown}")
    req = {
        "lat": _require_number(body, "lat", required=True),
        "lon": _require_number(body, "lon", required=True),
        "length": _require_number(body, "length", required=False),
        "width": _require_number(body, "width", required=False),
        "duration": _require_number(body, "duration", required=False),
    }
    if "datetime" not in body or not isinstance(body["datetime"], str):
        raise BadRequest("missing required field 'datetime' (ISO 8601 string)")
    try:
        req["when"] = datetime.fromisoformat(body["datetime"])
    except ValueError as exc:
        raise BadRequest(f"bad datetime: {exc}") from exc
    overrides = body.get("overrides", {})
    if not isinstance(overrides, dict) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in overrides.values()
    ):
        raise BadRequest("'overrides' must map feature names to numbers")
    req["overrides"] = {k: float(v) for k, v in overrides.items()}
    if not -90.0 <= req["lat"] <= 90.0:
        raise RosterViolation(["begin_lat (must be in [-90, 90])"])
    if not -180.0 <= req["lon"] <= 180.0:
        raise RosterViolation(["begin_lon (must be in [-180, 180])"])
    return req


def request_features(bundle: ModelBundle, req: dict) -> tuple[np.ndarray, dict[str, float]]:
    """Transformed feature vector per the bundle roster; overrides win."""
    names = {c.name for c in bundle.columns}
    unknown = sorted(set(req["overrides"]) - names)
    if unknown:
        raise RosterViolation(unknown)

    when: datetime = req["when"]
    doy_basis = bspline_basis(float(when.timetuple().tm_yday), day_of_year_spec())
    minutes = when.hour * 60 + when.minute + when.second / 60.0
    time_basis = bspline_basis(minutes, time_of_day_spec())

    natural: dict[str, float] = {
        "begin_lat": req["lat"],
        "begin_lon": req["lon"],
        "year": float(when.year),
    }
    for key in ("length", "width", "duration"):
        if req[key] is not None:
            natural[key] = req[key]
    if req["length"] is not None and req["width"] is not None:
        natural["tornado_area"] = req["length"] * req["width"]
    income = req["overrides"].get("median_household_income")
    if income is not None and "tornado_area" in natural:
        natural["total_income_estimate"] = natural["tornado_area"] * income
    natural.update(req["overrides"])

    vector = np.empty(len(bundle.columns))
    echo: dict[str, float] = {}
    for j, col in enumerate(bundle.columns):
        if col.name in natural:
            value = natural[col.name]
            vector[j] = apply_transform(col.transform, value) if col.transform else value
        elif col.spline_group == "day_of_year":
            vector[j] = apply_transform(col.transform, float(doy_basis[int(col.name.rsplit('_', 1)[1])]))
        elif col.spline_group == "begin_time":
            vector[j] = apply_transform(col.transform, float(time_basis[int(col.name.rsplit('_', 1)[1])]))
        elif col.transform is not None:
            vector[j] = 0.0  # training mean on the transformed scale
        else:
            vector[j] = 0.0  # untransformed indicator defaults to absent
        echo[col.name] = float(vector[j])
    return vector, echo


def create_app(
    bundle: ModelBundle,
    grid_dir: str | Path | None = None,
    dashboard_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="tornado-damage inference service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    grid_path = Path(grid_dir) if grid_dir else None

    @app.get("/healthz", response_class=PlainTextResponse)
    def healthz() -> str:
        return "ok"

    @app.get("/api/v1/model")
    def model_info():
        return {
            "format_version": bundle.version,
            "created": bundle.created,
            "feature_count": len(bundle.columns),
            "feature_names": [c.name for c in bundle.columns],
            "outcome_transform": {
                "kind": bundle.model.outcome_transform.kind.value,
                "mean": bundle.model.outcome_transform.mean,
                "sd": bundle.model.outcome_transform.sd,
            },
            "training_meta": json_safe(bundle.training_meta),
        }

    @app.get("/api/v1/grid/{year}/{month}")
    def grid_month(year: int, month: int):
        if grid_path is None:
            return JSONResponse({"detail": "no grid directory configured"}, status_code=404)
        source = grid_path / f"grid_{year}-{month:02d}.geojsonl"
        if not 1 <= month <= 12 or not source.exists():
            return JSONResponse(
                {"detail": f"no precomputed grid for {year}-{month:02d}; run the grid command"},
                status_code=404,
            )
        points = []
        with source.open() as fh:
            for line in fh:
                feature = json.loads(line)
                lon, lat = feature["geometry"]["coordinates"]
                props = feature["properties"]
                points.append({
                    "name": props.get("name", ""),
                    "lat": lat,
                    "lon": lon,
                    "p_damage": props["p_damage"],
                    "conditional_usd": props["conditional_usd"],
                    "expected_usd": props["expected_usd"],
                })
        return {"year": year, "month": month, "points": points}

    @app.post("/api/v1/predict")
    async def predict_endpoint(request: Request):
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            return JSONResponse({"detail": f"malformed JSON: {exc}"}, status_code=400)
        try:
            req = parse_predict_request(body)
            vector, echo = request_features(bundle, req)
        except BadRequest as exc:
            return JSONResponse({"detail": str(exc)}, status_code=400)
        except RosterViolation as exc:
            return JSONResponse(
                {"detail": "unknown or invalid roster features", "features": exc.names},
                status_code=422,
            )
        result = predict(bundle.model, vector)
        return {
            "p_damage": result.p_damage,
            "conditional_transformed": result.conditional_transformed,
            "conditional_usd": result.conditional_usd,
            "expected_usd": result.expected_usd,
            "damage_flag": result.damage_flag,
            "features": echo,
        }

    if dashboard_dir is not None and Path(dashboard_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(dashboard_dir), html=True), name="dashboard")
    return app
