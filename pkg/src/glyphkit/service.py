"""HTTP service exposing rendering, validation and evaluation.

All endpoints are stateless: the font and template pool are read-only
after startup and every request is a pure function of its body, so
concurrent request streams cannot interfere.

Error mapping: 400 for instruction schema violations (with the offending
box and field), 422 for instruction sets that parse but fail validation,
500 for everything unexpected.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .benchmark import DEFAULT_CREATIVE_TEMPLATES, SIMPLE_TEMPLATE
from .errors import EmptyBucket, EmptyGroundTruth, InstructionError
from .instructions import parse_instructions
from .render import render
from .report import build_report, reading_order
from .validation import validate


def create_app(creative_templates: list[str] | None = None, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="glyphkit service")
    templates = list(creative_templates) if creative_templates else list(DEFAULT_CREATIVE_TEMPLATES)

    @app.post("/api/render")
    async def api_render(request: Request) -> Response:
        raw = await request.body()
        try:
            instr = parse_instructions(raw)
        except InstructionError as exc:
            return _instruction_error(exc)
        report = validate(instr)
        if not report.ok:
            return JSONResponse(status_code=422, content=report.to_dict())
        image = render(instr)
        return Response(content=image.png_bytes(), media_type="image/png")

    @app.post("/api/validate")
    async def api_validate(request: Request) -> Response:
        raw = await request.body()
        try:
            instr = parse_instructions(raw)
        except InstructionError as exc:
            return _instruction_error(exc)
        return JSONResponse(status_code=200, content=validate(instr).to_dict())

    @app.post("/api/eval")
    async def api_eval(request: Request) -> Response:
        raw = await request.body()
        try:
            bundle = json.loads(raw)
            cases = bundle["cases"]
            predictions = {
                str(p["case_id"]): reading_order(p.get("words", []))
                for p in bundle.get("predictions", [])
            }
            report = build_report(cases, predictions)
        except (EmptyBucket, EmptyGroundTruth, KeyError, TypeError, ValueError) as exc:
            return JSONResponse(
                status_code=400,
                content={"error": {"code": type(exc).__name__, "message": str(exc)}},
            )
        return JSONResponse(status_code=200, content=report)

    @app.get("/api/templates")
    async def api_templates() -> dict:
        return {"simple": SIMPLE_TEMPLATE, "creative": templates}

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="studio")
    else:

        @app.get("/")
        async def index() -> Response:
            return Response(
                content="<html><body><h1>glyphkit service</h1>"
                "<p>No studio assets configured; the JSON API lives under /api/.</p></body></html>",
                media_type="text/html",
            )

    return app


def _instruction_error(exc: InstructionError) -> JSONResponse:
    return JSONResponse(
        status_code=400,
        content={
            "error": {
                "code": exc.code,
                "message": str(exc),
                "box": exc.box_index,
                "field": exc.field,
            }
        },
    )
