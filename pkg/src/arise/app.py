"""HTTP JSON API over the service facade.

Every error body has the same shape: {"error": <slug>, "detail": <text>}.
The simulate endpoint serializes through the same canonical dump as the
CLI so the two produce identical bytes for identical inputs.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from .reports import WireError
from .service import AriseService, NotFoundError, ValidationError


def dump_json(payload) -> str:
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"), allow_nan=False)


class ApiError(Exception):
    def __init__(self, status_code: int, error: str, detail: str):
        self.status_code = status_code
        self.error = error
        self.detail = detail


class SimulateRequest(BaseModel):
    use_case: str
    water_level: float | None = None
    temp_delta: float = 0.0


class EventRequest(BaseModel):
    user_id: str
    event_type: str


def create_app(service: AriseService) -> FastAPI:
    app = FastAPI(title="arise", docs_url=None, redoc_url=None)
    app.state.service = service
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(ApiError)
    async def _api_error(_request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status_code, content={"error": exc.error, "detail": exc.detail}
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"error": "validation_error", "detail": str(exc.errors())}
        )

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(_request, exc: StarletteHTTPException):
        return JSONResponse(
            status_code=exc.status_code, content={"error": "http_error", "detail": str(exc.detail)}
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "use_cases": sorted(service.use_cases)}

    @app.post("/chat/webhook")
    async def chat_webhook(request: Request):
        try:
            payload = await request.json()
        except Exception:
            raise ApiError(400, "malformed_json", "request body is not valid JSON") from None
        try:
            return service.handle_chat(payload)
        except WireError as exc:
            raise ApiError(400, "invalid_message", str(exc)) from None

    @app.get("/onsite/reports")
    def onsite_reports(
        lat: float = Query(...),
        lon: float = Query(...),
        radius_m: float | None = Query(None),
    ):
        try:
            return service.onsite_reports(lat, lon, radius_m)
        except ValidationError as exc:
            raise ApiError(400, "validation_error", str(exc)) from None

    @app.get("/onsite/pois")
    def onsite_pois(
        lat: float = Query(...),
        lon: float = Query(...),
        radius_m: float | None = Query(None),
    ):
        try:
            return service.onsite_pois(lat, lon, radius_m)
        except ValidationError as exc:
            raise ApiError(400, "validation_error", str(exc)) from None

    @app.get("/offsite/terrain/{use_case}")
    def offsite_terrain(use_case: str, vertical_exaggeration: float = Query(1.0)):
        try:
            return service.terrain_payload(use_case, vertical_exaggeration)
        except NotFoundError as exc:
            raise ApiError(404, "not_found", str(exc)) from None
        except ValueError as exc:
            raise ApiError(400, "validation_error", str(exc)) from None

    @app.post("/offsite/simulate")
    def offsite_simulate(body: SimulateRequest):
        try:
            payload = service.simulate_payload(body.use_case, body.water_level, body.temp_delta)
        except NotFoundError as exc:
            raise ApiError(404, "not_found", str(exc)) from None
        return Response(content=dump_json(payload), media_type="application/json")

    @app.get("/offsite/gallery/{use_case}")
    def offsite_gallery(use_case: str):
        try:
            return service.gallery_payload(use_case)
        except NotFoundError as exc:
            raise ApiError(404, "not_found", str(exc)) from None

    @app.get("/offsite/artworks/{artwork_id}.png")
    def artwork_image(artwork_id: str):
        try:
            image = service.artwork_image(artwork_id)
        except NotFoundError as exc:
            raise ApiError(404, "not_found", str(exc)) from None
        return Response(content=image, media_type="image/png")

    @app.post("/events")
    def record_event(body: EventRequest):
        try:
            return service.record_event(body.user_id, body.event_type)
        except ValidationError as exc:
            raise ApiError(400, "validation_error", str(exc)) from None

    @app.get("/profile/{user_id}")
    def profile(user_id: str):
        return service.profile_payload(user_id)

    return app
