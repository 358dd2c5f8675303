"""HTTP surface: POST /v1/classify plus a /healthz probe.

Validation is explicit so malformed bodies yield 400 (not a framework
default), and results always come back in request order.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .backends import NliBackend


def _bad_request(detail: str) -> JSONResponse:
    return JSONResponse(status_code=400, content={"error": detail})


def _parse_pairs(body: object) -> list[tuple[str, str]] | str:
    """The validated pair list, or an error string."""
    if not isinstance(body, dict):
        return "body must be a JSON object"
    pairs = body.get("pairs")
    if not isinstance(pairs, list):
        return "body must carry a 'pairs' array"
    parsed: list[tuple[str, str]] = []
    for index, item in enumerate(pairs):
        if not isinstance(item, dict):
            return f"pairs[{index}] must be an object"
        premise = item.get("premise")
        hypothesis = item.get("hypothesis")
        if not isinstance(premise, str):
            return f"pairs[{index}] is missing a string 'premise'"
        if not isinstance(hypothesis, str):
            return f"pairs[{index}] is missing a string 'hypothesis'"
        parsed.append((premise, hypothesis))
    return parsed


def create_app(backend: NliBackend, max_batch: int = 64) -> FastAPI:
    app = FastAPI(title="nli-sidecar", docs_url=None, redoc_url=None)

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok", "backend": backend.name}

    @app.post("/v1/classify")
    async def classify(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _bad_request("body is not valid JSON")
        pairs = _parse_pairs(body)
        if isinstance(pairs, str):
            return _bad_request(pairs)
        results: list[dict] = []
        for start in range(0, len(pairs), max_batch):
            results.extend(backend.classify(pairs[start:start + max_batch]))
        return {"results": results}

    return app
