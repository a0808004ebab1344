"""Read-only HTTP service over one export document.

Every response is a pure function of (document, query); there is no mutable
server state. The explorer UI is served from a static directory when one is
available, otherwise a minimal index page lists the API.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from .analysis import ClusterConfig, cluster, filter_links, rule_series
from .export import windows_from_document
from .influence import DinWindow

_FALLBACK_INDEX = """<!doctype html>
<html><head><title>din server</title></head><body>
<h1>din server</h1>
<p>No UI bundle is installed. API endpoints:</p>
<ul>
<li><code>GET /api/meta</code></li>
<li><code>GET /api/observables</code></li>
<li><code>GET /api/window/{k}?visibility=X</code></li>
<li><code>GET /api/window/{k}/clusters?threshold=X&amp;mode=step|window:N|global&amp;pinned=ids</code></li>
<li><code>GET /api/rule/{id}/series</code></li>
</ul>
</body></html>
"""


def _window_payload(w: DinWindow) -> dict:
    return {
        "t_start": w.t_start,
        "t_end": w.t_end,
        "partial": w.partial,
        "nodes": [{"rule": i, "hits": h} for i, h in enumerate(w.hits)],
        "links": [{"src": r, "dst": s, "value": v} for (r, s), v in sorted(w.matrix.items())],
    }


def parse_mode(mode: str) -> tuple[str, int]:
    """``step`` | ``global`` | ``window:N`` -> (mode, half_width)."""
    if mode in ("step", "global"):
        return mode, 0
    if mode.startswith("window:"):
        try:
            w = int(mode.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad window half-width in mode {mode!r}")
        if w < 0:
            raise ValueError("window half-width must be nonnegative")
        return "window", w
    raise ValueError(f"unknown clustering mode {mode!r}")


def _parse_pinned(pinned: str, n_rules: int) -> frozenset[int]:
    if not pinned:
        return frozenset()
    try:
        ids = frozenset(int(p) for p in pinned.split(","))
    except ValueError:
        raise ValueError(f"bad pinned rule list {pinned!r}")
    if any(not 0 <= i < n_rules for i in ids):
        raise ValueError("pinned rule id out of range")
    return ids


def create_app(doc: dict, ui_dir: str | Path | None = None) -> FastAPI:
    windows = windows_from_document(doc)
    n_rules = len(doc["meta"]["rules"])
    app = FastAPI(title="din server", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def _malformed_query(request, exc):
        return JSONResponse({"error": str(exc)}, status_code=400)

    def _not_found(what: str) -> JSONResponse:
        return JSONResponse({"error": what}, status_code=404)

    def _bad_request(what: str) -> JSONResponse:
        return JSONResponse({"error": what}, status_code=400)

    @app.get("/api/meta")
    def get_meta():
        return doc["meta"]

    @app.get("/api/observables")
    def get_observables():
        return doc["observables"]

    @app.get("/api/window/{k}")
    def get_window(k: int, visibility: float = 0.0):
        if not 0 <= k < len(windows):
            return _not_found(f"window {k} out of range")
        if visibility < 0:
            return _bad_request("visibility must be nonnegative")
        return _window_payload(filter_links(windows[k], visibility))

    @app.get("/api/window/{k}/clusters")
    def get_clusters(k: int, threshold: float = 0.0, mode: str = "step", pinned: str = ""):
        if not 0 <= k < len(windows):
            return _not_found(f"window {k} out of range")
        try:
            mode_name, half_width = parse_mode(mode)
            pins = _parse_pinned(pinned, n_rules)
            config = ClusterConfig(threshold, mode_name, half_width, pins)
            config.validate()
        except ValueError as e:
            return _bad_request(str(e))
        clustering = cluster(windows, k, config)
        return {
            "window": k,
            "threshold": threshold,
            "mode": mode,
            "clusters": [list(c) for c in clustering.clusters],
            "assignment": {str(r): c for r, c in sorted(clustering.assignment.items())},
        }

    @app.get("/api/rule/{rid}/series")
    def get_series(rid: int):
        if not 0 <= rid < n_rules:
            return _not_found(f"rule {rid} out of range")
        series = rule_series(windows, rid)
        return {
            "rule": rid,
            "incoming": {str(q): s for q, s in sorted(series.incoming.items())},
            "outgoing": {str(q): s for q, s in sorted(series.outgoing.items())},
            "self": series.self_series,
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index():
            return _FALLBACK_INDEX

    return app


def serve(doc: dict, port: int, host: str = "127.0.0.1", ui_dir: str | Path | None = None) -> None:
    """Run the service until interrupted."""
    import uvicorn

    uvicorn.run(create_app(doc, ui_dir), host=host, port=port, log_level="warning")
