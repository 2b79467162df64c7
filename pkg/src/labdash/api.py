"""HTTP API for the lab dashboard.

Endpoints are patient-scoped and stateless; handlers share only the
immutable config and the on-disk response cache. Every non-2xx body is a
uniform error object with a code from a closed set, and malformed client
input always maps to 400, never 500. Successful bodies carry no server
timestamps, so identical reads against an unchanged EHR return identical
bytes.

Query parameters are parsed by hand from the raw request instead of by
framework injection; that is what guarantees the 400-not-500 contract for
arbitrary malformed input.
"""

from __future__ import annotations

import logging
import math
from datetime import date

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .cache import CacheError, ResponseCache
from .classify import classify
from .config import ConfigError, DashboardConfig, config_to_dict
from .convert import UnitConversionError, convert_unit
from .ehr import EhrClient, EhrEndpoint, EhrUnavailableError, Fetched, ProtocolError, UnknownPatientError
from .model import BandSpec, Observation, PatientHeader, UnitKind
from .trends import (
    GaugeBoard,
    PageRequest,
    TrendSeries,
    build_gauge_summaries,
    build_trend_series,
    build_visit_table,
    filter_rows,
    paginate,
)

logger = logging.getLogger(__name__)


class ApiException(Exception):
    """Raised inside handlers to produce a uniform error response."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def _bad_request(message: str) -> ApiException:
    return ApiException(400, "bad_request", message)


def create_app(
    config: DashboardConfig,
    cache_dir,
    ehr_url: str | None = None,
    ui_dir=None,
    ehr_auth: tuple[str, str] | None = None,
) -> FastAPI:
    """Build the FastAPI application.

    Args:
        config: Validated dashboard configuration.
        cache_dir: Directory for the offline response cache.
        ehr_url: EHR base URL; overrides the config value when given.
        ui_dir: Optional directory of built web UI statics to serve at /.
        ehr_auth: Optional (username, secret) for EHR basic auth.

    Raises:
        ConfigError: Neither ehr_url nor the config provides an EHR base URL.
    """
    base_url = ehr_url or config.ehr_base_url
    if not base_url:
        raise ConfigError("ehr_base_url is not set: pass --ehr-url or add ehr_base_url to the config")

    endpoint = EhrEndpoint(base_url=base_url, auth=ehr_auth)
    client = EhrClient(endpoint, ResponseCache(cache_dir), config)

    app = FastAPI(title="labdash", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.config = config
    app.state.client = client

    @app.exception_handler(ApiException)
    async def handle_api_exception(request: Request, exc: ApiException) -> JSONResponse:
        return _error_response(exc.status, exc.code, exc.message)

    @app.exception_handler(UnknownPatientError)
    async def handle_unknown_patient(request: Request, exc: UnknownPatientError) -> JSONResponse:
        return _error_response(404, "unknown_patient", str(exc))

    @app.exception_handler(EhrUnavailableError)
    async def handle_unavailable(request: Request, exc: EhrUnavailableError) -> JSONResponse:
        return _error_response(503, "ehr_unavailable", str(exc))

    @app.exception_handler(ProtocolError)
    async def handle_protocol_error(request: Request, exc: ProtocolError) -> JSONResponse:
        logger.error("EHR protocol violation: %s", exc)
        return _error_response(500, "internal", f"EHR protocol violation: {exc}")

    @app.exception_handler(CacheError)
    async def handle_cache_error(request: Request, exc: CacheError) -> JSONResponse:
        logger.error("cache failure: %s", exc)
        return _error_response(500, "internal", f"cache failure: {exc}")

    @app.exception_handler(RequestValidationError)
    async def handle_validation(request: Request, exc: RequestValidationError) -> JSONResponse:
        return _error_response(400, "bad_request", "malformed request")

    @app.exception_handler(StarletteHTTPException)
    async def handle_http_exception(request: Request, exc: StarletteHTTPException) -> JSONResponse:
        code = "bad_request" if exc.status_code < 500 else "internal"
        return _error_response(exc.status_code, code, str(exc.detail))

    @app.exception_handler(Exception)
    async def handle_unexpected(request: Request, exc: Exception) -> JSONResponse:
        logger.exception("unhandled error serving %s", request.url.path)
        return _error_response(500, "internal", "internal error")

    @app.get("/api/patients/{patient_uuid}/summary")
    def get_summary(patient_uuid: str) -> JSONResponse:
        header, observations, stale = _load_patient_data(client, config, patient_uuid)
        board = build_gauge_summaries(observations, config)
        return JSONResponse(
            {
                "header": _header_dict(header.value),
                "gauges": [_gauge_dict(s, config) for s in board.summaries],
                "missing": _missing_list(board),
                "stale": stale,
            }
        )

    @app.get("/api/patients/{patient_uuid}/table")
    def get_table(patient_uuid: str, request: Request) -> JSONResponse:
        page_req = _parse_page_request(request)
        _, observations, stale = _load_patient_data(client, config, patient_uuid)
        rows = build_visit_table(observations, config)
        rows = filter_rows(rows, page_req.date_query)
        page_rows, total_rows, total_pages = paginate(rows, page_req)
        return JSONResponse(
            {
                "rows": [_row_dict(r, config) for r in page_rows],
                "total_rows": total_rows,
                "total_pages": total_pages,
                "page": page_req.page,
                "size": page_req.size,
                "stale": stale,
            }
        )

    @app.get("/api/patients/{patient_uuid}/trends")
    def get_trends(patient_uuid: str, request: Request) -> JSONResponse:
        concept_uuid, unit = _parse_trend_params(request, config)
        _, observations, stale = _load_patient_data(client, config, patient_uuid)
        series = build_trend_series(observations, concept_uuid, config)
        body = _series_dict(series, unit, config)
        body["stale"] = stale
        return JSONResponse(body)

    @app.get("/api/config/ranges")
    def get_ranges() -> JSONResponse:
        return JSONResponse(config_to_dict(config))

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


# -- data loading ----------------------------------------------------------


def _load_patient_data(
    client: EhrClient, config: DashboardConfig, patient_uuid: str
) -> tuple[Fetched[PatientHeader], list[Observation], bool]:
    header = client.fetch_patient(patient_uuid)
    per_concept = client.fetch_all_observations(patient_uuid)
    observations = [obs for fetched in per_concept.values() for obs in fetched.value]
    stale = header.stale or any(f.stale for f in per_concept.values())
    return header, observations, stale


# -- parameter parsing -----------------------------------------------------


def _parse_page_request(request: Request) -> PageRequest:
    params = request.query_params
    try:
        page = int(params.get("page", "1"))
    except ValueError:
        raise _bad_request(f"'page' must be an integer, got {params.get('page')!r}") from None
    try:
        size = int(params.get("size", "10"))
    except ValueError:
        raise _bad_request(f"'size' must be an integer, got {params.get('size')!r}") from None

    date_query: date | None = None
    if "date" in params:
        try:
            date_query = date.fromisoformat(params["date"])
        except ValueError:
            raise _bad_request(f"'date' must be YYYY-MM-DD, got {params['date']!r}") from None

    try:
        return PageRequest(page=page, size=size, date_query=date_query)
    except ValueError as exc:
        raise _bad_request(str(exc)) from None


def _parse_trend_params(request: Request, config: DashboardConfig) -> tuple[str, UnitKind | None]:
    params = request.query_params
    concept_uuid = params.get("concept")
    if not concept_uuid:
        raise _bad_request("'concept' parameter is required")
    if concept_uuid not in config.registry:
        raise _bad_request(f"unknown concept uuid {concept_uuid!r}")

    unit: UnitKind | None = None
    if "unit" in params:
        try:
            unit = UnitKind(params["unit"])
        except ValueError:
            raise _bad_request(f"unknown unit {params['unit']!r}") from None
    return concept_uuid, unit


# -- serialization ---------------------------------------------------------


def _header_dict(header: PatientHeader) -> dict:
    return {
        "patient_uuid": header.patient_uuid,
        "display_name": header.display_name,
        "gender": header.gender.value,
        "birthdate": header.birthdate.isoformat(),
    }


def _bands_list(spec: BandSpec) -> list[list]:
    return [
        [band.lower, "inf" if math.isinf(band.upper) else band.upper, band.color.value]
        for band in spec.bands
    ]


def _gauge_dict(summary, config: DashboardConfig) -> dict:
    concept = config.registry.get(summary.concept_uuid)
    spec = config.band_spec_for(summary.concept_uuid)
    return {
        "concept_uuid": summary.concept_uuid,
        "name": concept.name,
        "profile": concept.profile.value,
        "value": summary.latest_value,
        "unit": summary.unit.value,
        "obs_datetime": summary.obs_datetime.isoformat(),
        "color": summary.classification.color.value,
        "band_index": summary.classification.band_index,
        "bands": _bands_list(spec) if spec is not None else [],
    }


def _missing_list(board: GaugeBoard) -> list[str]:
    missing = list(board.missing)
    missing.extend(uuid for uuid in board.failed if uuid not in missing)
    return missing


def _row_dict(row, config: DashboardConfig) -> dict:
    cells = {}
    for concept_uuid, value in row.values.items():
        concept = config.registry.get(concept_uuid)
        spec = config.band_spec_for(concept_uuid)
        cell = {"value": value, "color": None}
        if spec is not None:
            try:
                cell["color"] = classify(
                    value, concept.canonical_unit, spec, analyte=concept.analyte, conversions=config.conversions
                ).color.value
            except (UnitConversionError, ValueError):
                logger.warning("cannot classify table cell for %s", concept.name)
        cells[concept_uuid] = cell
    return {"visit_date": row.visit_date.isoformat(), "cells": cells}


def _series_dict(series: TrendSeries, unit: UnitKind | None, config: DashboardConfig) -> dict:
    concept = config.registry.get(series.concept_uuid)
    out_unit = series.unit
    points = [[when.isoformat(), value] for when, value in series.points]
    if unit is not None and unit is not series.unit:
        try:
            points = [
                [when, convert_unit(value, concept, series.unit, unit, config.conversions)]
                for when, value in points
            ]
        except UnitConversionError as exc:
            raise _bad_request(str(exc)) from None
        out_unit = unit
    elif unit is not None:
        out_unit = unit
    return {
        "concept_uuid": series.concept_uuid,
        "unit": out_unit.value,
        "points": points,
        "month_labels": list(series.month_labels),
    }
