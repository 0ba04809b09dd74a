"""HTTP JSON service: search with explanations, entity lookup, health.

Entities are addressed by label; ids stay internal. The graph and index are
immutable once loaded, so requests are served concurrently without locking
and identical request bodies produce identical payloads.
"""

from __future__ import annotations

import time

from fastapi import FastAPI, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .errors import GreaseError, UnknownEntityError
from .kg import KnowledgeGraph
from .payloads import build_search_payload, canonical_json
from .search import SearchRequest, grease_search
from .stats import StatsIndex, build_index
from .weighting import ModelParams

ADJACENCY_TRUNCATION = 200


class ParamsBody(BaseModel):
    alpha_mp: int | None = None
    alpha_prop: float | None = None
    beta: float | None = None
    max_len: int | None = None
    top_mp: int | None = None


class SearchBody(BaseModel):
    query: str
    examples: list[tuple[str, str]]
    k: int | None = None
    params: ParamsBody | None = None
    variant: str = "full"


def _json_response(payload: dict, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json(payload),
        status_code=status_code,
        media_type="application/json",
    )


def create_app(
    kg: KnowledgeGraph,
    index: StatsIndex | None = None,
    cors_origins: list[str] | None = None,
) -> FastAPI:
    app = FastAPI(title="grease", docs_url=None, redoc_url=None)
    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )
    app.state.kg = kg
    app.state.index = index

    def get_index() -> StatsIndex:
        if app.state.index is None:
            app.state.index = build_index(app.state.kg)
        return app.state.index

    @app.post("/api/search")
    def search(body: SearchBody) -> Response:
        if not body.examples:
            return _json_response({"error": "empty examples"}, 400)
        overrides = {}
        if body.params is not None:
            overrides = {
                name: value
                for name, value in body.params.model_dump().items()
                if value is not None
            }
        if body.k is not None:
            overrides["k"] = body.k
        try:
            params = ModelParams(**overrides)
        except ValueError as e:
            return _json_response({"error": "invalid params", "detail": str(e)}, 422)
        try:
            request = SearchRequest(
                query=body.query,
                examples=tuple((s, t) for s, t in body.examples),
                params=params,
                variant=body.variant,
            )
        except ValueError as e:
            return _json_response({"error": str(e)}, 400)
        started = time.perf_counter()
        try:
            outcome = grease_search(kg, get_index(), request)
        except UnknownEntityError as e:
            return _json_response({"error": "unknown entity", "entity": e.label}, 400)
        except (GreaseError, ValueError) as e:
            return _json_response({"error": str(e)}, 400)
        payload = build_search_payload(outcome)
        payload["timing_ms"] = int((time.perf_counter() - started) * 1000)
        return _json_response(payload)

    @app.get("/api/entities")
    def entities(prefix: str = "", limit: int = 20) -> Response:
        limit = max(1, min(limit, 100))
        needle = prefix.lower()
        matches = sorted(
            label for label in kg.labels() if label.lower().startswith(needle)
        )[:limit]
        idx = get_index()
        out = []
        for label in matches:
            v = kg.id_of(label)
            out.append({"label": label, "type": idx.most_specific_type[v]})
        return _json_response({"entities": out})

    @app.get("/api/entity/{label}")
    def entity(label: str) -> Response:
        try:
            v = kg.id_of(label)
        except UnknownEntityError:
            return _json_response({"error": "unknown entity", "entity": label}, 404)
        props = sorted(kg.properties_of(v))
        out_edges = [
            {"relation": rel, "target": kg.label_of(o)} for rel, o in kg.out_edges(v)
        ]
        in_edges = [
            {"relation": rel, "source": kg.label_of(s)} for rel, s in kg.in_edges(v)
        ]
        cap = ADJACENCY_TRUNCATION
        payload = {
            "label": label,
            "properties": [{"attribute": a, "value": val} for a, val in props[:cap]],
            "out_edges": out_edges[:cap],
            "in_edges": in_edges[:cap],
            "truncated": {
                "properties": len(props) > cap,
                "out_edges": len(out_edges) > cap,
                "in_edges": len(in_edges) > cap,
            },
        }
        return _json_response(payload)

    @app.get("/api/health")
    def health() -> Response:
        return _json_response(
            {
                "status": "ok",
                "kg": {"entities": kg.entity_count, "edges": kg.edge_count},
                "index_loaded": app.state.index is not None,
            }
        )

    return app
