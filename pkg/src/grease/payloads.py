"""Canonical JSON payloads shared by the HTTP service and the CLI.

The CLI's ``--json`` output must be byte-identical to the service's response
body apart from the timing field, so both go through the same builder and
the same serializer settings.
"""

from __future__ import annotations

import json

from .kg import Property
from .search import SearchOutcome
from .weighting import regularizer


def build_search_payload(outcome: SearchOutcome) -> dict:
    answers = [
        {
            "entity": a.entity,
            "score": a.score,
            "contributions": [
                {
                    "facet": c.facet,
                    "gamma": c.gamma,
                    "weight": c.weight,
                    "regularizer": c.regularizer,
                }
                for c in a.contributions
            ],
        }
        for a in outcome.answers
    ]
    meta_paths = [
        {
            "text": wf.text,
            "weight": wf.weight,
            "regularizer": regularizer(wf.facet, outcome.params),
        }
        for wf in outcome.meta_path_facets
    ]
    properties = []
    for wf in outcome.property_facets:
        prop = wf.facet
        assert isinstance(prop, Property)
        properties.append(
            {"attribute": prop.attribute, "value": prop.value, "weight": wf.weight}
        )
    return {
        "answers": answers,
        "facets": {"meta_paths": meta_paths, "properties": properties},
    }


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))
