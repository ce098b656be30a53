"""HTTP facade over the explanation engine.

App factory + routes only; all real behavior lives in the library
modules. Reports and models are persisted as canonical JSON and the
explain/compare endpoints return the stored bytes verbatim, so an HTTP
response, a stored artifact, and the CLI output of the same request are
byte-identical.
"""

from __future__ import annotations

import json
import os
import secrets

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware

from .data import Dataset, load_csv
from .errors import (
    AlignmentError,
    ClusterLensError,
    DegenerateDataError,
    DegenerateLabelsError,
    DegenerateSelectionError,
    EmptyInputError,
    NoDataError,
    NotFoundError,
    ParseError,
    RangeError,
    SelectionOverlapError,
    ShapeError,
    StructuralError,
    ValidationError,
)
from .explain import ClusterSelection, compare_selections, explain_selection
from .model import model_from_json_dict, model_to_json_dict
from .projection import ingest_projection, pca_project
from .store import ArtifactStore
from .training import TrainingConfig

_STATUS_BY_ERROR = {
    ParseError: 400,
    StructuralError: 400,
    EmptyInputError: 400,
    ShapeError: 400,
    NotFoundError: 404,
    NoDataError: 422,
    RangeError: 422,
    DegenerateLabelsError: 422,
    DegenerateSelectionError: 422,
    SelectionOverlapError: 422,
    AlignmentError: 422,
    ValidationError: 422,
    DegenerateDataError: 422,
}

DEFAULT_DATA_DIR = "./data"


def _error_detail(exc: ClusterLensError):
    if isinstance(exc, ParseError):
        return {"row": exc.row, "column": exc.column}
    if isinstance(exc, StructuralError):
        return {"row": exc.row}
    if isinstance(exc, DegenerateSelectionError):
        return {"kind": exc.kind}
    if isinstance(exc, SelectionOverlapError):
        return {"ids": exc.ids}
    if isinstance(exc, NotFoundError):
        return exc.detail
    return None


def _error_response(exc: ClusterLensError) -> Response:
    status = 422
    for cls, code in _STATUS_BY_ERROR.items():
        if isinstance(exc, cls):
            status = code
            break
    body = {"error": {"code": exc.code, "message": str(exc), "detail": _error_detail(exc)}}
    return Response(json.dumps(body), status_code=status, media_type="application/json")


def _require(payload: dict, key: str):
    if not isinstance(payload, dict) or key not in payload:
        raise ValidationError(f"request body is missing {key!r}")
    return payload[key]


def _parse_selection(doc, field_name: str) -> ClusterSelection:
    """Selections arrive as a plain id array; an object form
    {point_ids, label?} is also accepted so comparisons can be labeled."""
    label = None
    if isinstance(doc, dict):
        label = doc.get("label")
        if label is not None and not isinstance(label, str):
            raise ValidationError(f"{field_name}.label must be a string")
        doc = doc.get("point_ids")
    if not isinstance(doc, list) or not all(
        isinstance(i, int) and not isinstance(i, bool) for i in doc
    ):
        raise ValidationError(f"{field_name} must be a list of integer point ids")
    return ClusterSelection(tuple(doc), label)


def _resolve_config(payload: dict) -> TrainingConfig:
    """Build the training config from the request: optional config
    overrides plus an optional top-level seed. A request without any seed
    gets a generated one (echoed back in the report) so the run stays
    reproducible after the fact."""
    overrides = payload.get("config") or {}
    if not isinstance(overrides, dict):
        raise ValidationError("config must be an object")
    if "identity_bags" in overrides:
        raise ValidationError("identity_bags is not accepted over HTTP")
    if "seed" in payload and payload["seed"] is not None:
        if not isinstance(payload["seed"], int):
            raise ValidationError("seed must be an integer")
        overrides = {**overrides, "seed": payload["seed"]}
    if "seed" not in overrides:
        overrides = {**overrides, "seed": secrets.randbelow(2**31)}
    try:
        return TrainingConfig.from_json_dict(overrides)
    except TypeError as exc:
        raise ValidationError(f"bad training config: {exc}") from None


def _load_dataset(store: ArtifactStore, dataset_id) -> Dataset:
    if not isinstance(dataset_id, str):
        raise ValidationError("dataset_id must be a string")
    return Dataset.from_json_dict(store.get("datasets", dataset_id))


def _dataset_summary(dataset: Dataset, dataset_id: str) -> dict:
    return {
        "dataset_id": dataset_id,
        "n_rows": dataset.n_rows,
        "features": [
            {"name": f.name, "stats": f.stats().to_json_dict()}
            for f in dataset.features
        ],
    }


def create_app(data_dir=None) -> FastAPI:
    store = ArtifactStore(data_dir or os.environ.get("DATA_DIR", DEFAULT_DATA_DIR))
    app = FastAPI(title="clusterlens", docs_url=None, redoc_url=None)
    origin = os.environ.get("CORS_ORIGIN", "*")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store

    @app.exception_handler(ClusterLensError)
    async def _handle_domain_error(request: Request, exc: ClusterLensError):
        return _error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def _handle_framework_error(request: Request, exc: RequestValidationError):
        # Framework-level body parsing failures get the same error shape
        # as domain errors.
        return _error_response(ValidationError(str(exc.errors()[:1])))

    @app.post("/datasets")
    async def upload_dataset(request: Request):
        form = await request.form()
        if "file" not in form:
            raise ValidationError("multipart upload must include a 'file' part")
        upload = form["file"]
        raw = await upload.read() if hasattr(upload, "read") else upload
        if isinstance(raw, str):
            raw = raw.encode("utf-8")
        name = getattr(upload, "filename", None) or "dataset"
        dataset = load_csv(raw, name=name)
        dataset_id = store.put("datasets", dataset.to_json_dict())
        store.ensure_session(dataset_id)
        return _dataset_summary(dataset, dataset_id)

    @app.post("/datasets/{dataset_id}/projection")
    async def add_projection(dataset_id: str, request: Request):
        dataset = _load_dataset(store, dataset_id)
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("application/json"):
            try:
                body = await request.json()
            except json.JSONDecodeError as exc:
                raise ValidationError(f"request body is not valid JSON: {exc}") from None
            if not isinstance(body, dict) or body.get("method") != "pca":
                raise ValidationError('JSON body must be {"method": "pca"}')
            projection = pca_project(dataset)
        else:
            form = await request.form()
            if "file" not in form:
                raise ValidationError(
                    "send a multipart coordinate CSV or a JSON PCA request"
                )
            upload = form["file"]
            raw = await upload.read() if hasattr(upload, "read") else upload
            if isinstance(raw, str):
                raw = raw.encode("utf-8")
            projection = ingest_projection(raw, dataset)
        doc = projection.to_json_dict()
        projection_id = store.put("projections", doc)
        store.set_session_projection(dataset_id, projection_id)
        return {
            "projection_id": projection_id,
            "method": projection.method_tag,
            "coords": doc["coords"],
        }

    def _run_report(payload: dict, build) -> Response:
        dataset_id = _require(payload, "dataset_id")
        dataset = _load_dataset(store, dataset_id)
        config = _resolve_config(payload)
        report = build(dataset, payload, config)
        model_id = store.put("models", model_to_json_dict(report.model))
        doc = report.to_json_dict()
        assert doc["meta"]["model_id"] == model_id
        report_id = store.put("reports", doc)
        store.append_history(
            dataset_id,
            {"kind": doc["mode"], "report_id": report_id, "model_id": model_id,
             "seed": doc["meta"]["seed"]},
        )
        body = store.get_bytes("reports", report_id)
        return Response(
            body,
            media_type="application/json",
            headers={"X-Report-Id": report_id},
        )

    @app.post("/explain")
    def explain(payload: dict) -> Response:
        def build(dataset, payload, config):
            selection = _parse_selection(_require(payload, "selection"), "selection")
            return explain_selection(dataset, selection, config)

        return _run_report(payload, build)

    @app.post("/compare")
    def compare(payload: dict) -> Response:
        def build(dataset, payload, config):
            sel_a = _parse_selection(_require(payload, "selection_a"), "selection_a")
            sel_b = _parse_selection(_require(payload, "selection_b"), "selection_b")
            return compare_selections(dataset, sel_a, sel_b, config)

        return _run_report(payload, build)

    @app.get("/reports/{report_id}")
    def get_report(report_id: str) -> Response:
        return Response(
            store.get_bytes("reports", report_id), media_type="application/json"
        )

    @app.get("/models/{model_id}/terms/{feature}")
    def get_term(model_id: str, feature: str):
        doc = store.get("models", model_id)
        model = model_from_json_dict(doc)
        if feature not in model.feature_names:
            raise NotFoundError(
                f"model has no term for feature {feature!r}",
                detail={"features": list(model.feature_names)},
            )
        term = model.terms[model.feature_names.index(feature)]
        return {
            "feature": feature,
            "edges": [float(e) for e in term.bin_edges],
            "contributions": [float(c) for c in term.contributions],
        }

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return store.get_session(session_id)

    return app


def default_app() -> FastAPI:
    return create_app()
