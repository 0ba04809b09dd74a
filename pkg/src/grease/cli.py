"""Operator command line: convert, index, search, eval, synth, serve.

Exit codes: 0 success, 1 usage or validation error, 2 data error. Errors
print one line on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import GreaseError
from .evaluation import (
    PlantedSpec,
    dump_instances,
    generate_planted,
    parse_instances,
    run_benchmark,
)
from .kg import KnowledgeGraph, load_kg
from .ntriples import convert_ntriples
from .payloads import build_search_payload, canonical_json
from .search import SearchOutcome, SearchRequest, grease_search
from .stats import StatsIndex, build_index, load_index, save_index
from .weighting import ModelParams

DEFAULT_PORT = 8080


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_params_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha-mp", type=int, default=5, help="path-count clamp")
    p.add_argument("--alpha-prop", type=float, default=2.0, help="property strength")
    p.add_argument("--beta", type=float, default=10.0, help="length penalty decay")
    p.add_argument("--max-len", type=int, default=3, help="max meta-path length")
    p.add_argument("--top-mp", type=int, default=3, help="meta-paths used for candidates")
    p.add_argument("--k", type=int, default=10, help="answers returned")
    p.add_argument("--variant", choices=["full", "np"], default="full")


def _params_from(args) -> ModelParams:
    try:
        return ModelParams(
            alpha_mp=args.alpha_mp,
            alpha_prop=args.alpha_prop,
            beta=args.beta,
            max_len=args.max_len,
            top_mp=args.top_mp,
            k=args.k,
        )
    except ValueError as e:
        raise _UsageError(str(e)) from None


def _build_parser() -> _Parser:
    parser = _Parser(prog="grease", description="Relevance search over knowledge graphs")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("convert-nt", help="convert an N-Triples dump to TSV inputs")
    p.add_argument("input", help="N-Triples file")
    p.add_argument("--relations-out", required=True)
    p.add_argument("--attributes-out", required=True)

    p = sub.add_parser("index", help="build and save the statistics index")
    p.add_argument("--kg", nargs=2, metavar=("RELATIONS", "ATTRIBUTES"), required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--type-attribute", default="type")

    p = sub.add_parser("search", help="one-shot search")
    p.add_argument("--kg", nargs=2, metavar=("RELATIONS", "ATTRIBUTES"), required=True)
    p.add_argument("--index", help="saved index (built in memory when omitted)")
    p.add_argument("--type-attribute", default="type")
    p.add_argument("--query", required=True)
    p.add_argument(
        "--example",
        action="append",
        default=[],
        metavar="SOURCE:TARGET",
        help="query-answer example pair; repeatable",
    )
    p.add_argument(
        "--example-json",
        help='example pairs as JSON, e.g. [["s","t"]], for labels containing ":"',
    )
    p.add_argument("--json", action="store_true", help="print the service payload")
    _add_params_flags(p)

    p = sub.add_parser("eval", help="run a query-instance benchmark")
    p.add_argument("--kg", nargs=2, metavar=("RELATIONS", "ATTRIBUTES"), required=True)
    p.add_argument("--index")
    p.add_argument("--type-attribute", default="type")
    p.add_argument("--queries", required=True, help="JSON-lines query instances")
    p.add_argument("--json", action="store_true", help="print the JSON report")
    p.add_argument("--out", help="also write the JSON report to a file")
    _add_params_flags(p)

    p = sub.add_parser("synth", help="generate a planted-semantics benchmark")
    p.add_argument("--spec", required=True, help="JSON file of generator settings")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--kg", nargs=2, metavar=("RELATIONS", "ATTRIBUTES"), required=True)
    p.add_argument("--index")
    p.add_argument("--type-attribute", default="type")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--cors-origin", action="append", default=[])

    return parser


def _load_graph(args) -> KnowledgeGraph:
    relations_path, attributes_path = args.kg
    with open(relations_path, encoding="utf-8") as rf:
        relations = rf.readlines()
    with open(attributes_path, encoding="utf-8") as af:
        attributes = af.readlines()
    return load_kg(relations, attributes, type_attribute=args.type_attribute)


def _load_or_build_index(args, kg: KnowledgeGraph) -> StatsIndex:
    if getattr(args, "index", None):
        return load_index(args.index)
    return build_index(kg)


def _parse_examples(args) -> tuple[tuple[str, str], ...]:
    examples: list[tuple[str, str]] = []
    for item in args.example:
        if ":" not in item:
            raise _UsageError(f"--example must be SOURCE:TARGET, got {item!r}")
        s, t = item.split(":", 1)
        if not s or not t:
            raise _UsageError(f"--example must be SOURCE:TARGET, got {item!r}")
        examples.append((s, t))
    if args.example_json:
        try:
            parsed = json.loads(args.example_json)
            for pair in parsed:
                s, t = pair
                examples.append((str(s), str(t)))
        except (ValueError, TypeError) as e:
            raise _UsageError(f"bad --example-json: {e}") from None
    if not examples:
        raise _UsageError("at least one example pair is required")
    return tuple(examples)


def _format_table(outcome: SearchOutcome) -> str:
    lines = [f"{'rank':<6}{'entity':<32}{'score':>14}  top facet"]
    for rank, answer in enumerate(outcome.answers, start=1):
        best = max(answer.contributions, key=lambda c: c.product, default=None)
        facet = best.facet if best else "-"
        lines.append(f"{rank:<6}{answer.entity:<32}{answer.score:>14.6g}  {facet}")
    if not outcome.answers:
        lines.append("(no answers)")
    return "\n".join(lines)


def cmd_convert_nt(args) -> int:
    with open(args.input, encoding="utf-8") as f:
        result = convert_ntriples(f)
    Path(args.relations_out).write_text(
        "".join(line + "\n" for line in result.relations_lines), encoding="utf-8"
    )
    Path(args.attributes_out).write_text(
        "".join(line + "\n" for line in result.attributes_lines), encoding="utf-8"
    )
    print(
        f"wrote {len(result.relations_lines)} relations, "
        f"{len(result.attributes_lines)} attributes"
        + (f", skipped {result.skipped_blank_nodes} blank-node lines" if result.skipped_blank_nodes else "")
    )
    return 0


def cmd_index(args) -> int:
    kg = _load_graph(args)
    index = build_index(kg)
    save_index(index, args.out)
    print(
        f"indexed {kg.entity_count} entities, {kg.edge_count} edges, "
        f"{len(index.pair_counts)} step pairs -> {args.out}"
    )
    return 0


def cmd_search(args) -> int:
    params = _params_from(args)
    examples = _parse_examples(args)
    kg = _load_graph(args)
    index = _load_or_build_index(args, kg)
    request = SearchRequest(
        query=args.query, examples=examples, params=params, variant=args.variant
    )
    outcome = grease_search(kg, index, request)
    if args.json:
        print(canonical_json(build_search_payload(outcome)))
    else:
        print(_format_table(outcome))
    return 0


def cmd_eval(args) -> int:
    params = _params_from(args)
    kg = _load_graph(args)
    index = _load_or_build_index(args, kg)
    with open(args.queries, encoding="utf-8") as f:
        instances = parse_instances(f)
    report = run_benchmark(kg, index, instances, params=params, variant=args.variant)
    if args.out:
        Path(args.out).write_text(
            canonical_json(report.to_json_dict()) + "\n", encoding="utf-8"
        )
    if args.json:
        print(canonical_json(report.to_json_dict()))
    else:
        print(report.to_table())
    return 0


def cmd_synth(args) -> int:
    with open(args.spec, encoding="utf-8") as f:
        raw = json.load(f)
    if "planted_property" in raw and raw["planted_property"] is not None:
        raw["planted_property"] = tuple(raw["planted_property"])
    try:
        spec = PlantedSpec(**raw)
    except TypeError as e:
        raise _UsageError(f"bad generator spec: {e}") from None
    relations, attributes, instances = generate_planted(args.seed, spec)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "relations.tsv").write_text(
        "".join(line + "\n" for line in relations), encoding="utf-8"
    )
    (out / "attributes.tsv").write_text(
        "".join(line + "\n" for line in attributes), encoding="utf-8"
    )
    (out / "queries.jsonl").write_text(dump_instances(instances), encoding="utf-8")
    print(
        f"wrote {len(relations)} relations, {len(attributes)} attributes, "
        f"{len(instances)} instances to {out}"
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    kg = _load_graph(args)
    index = load_index(args.index) if args.index else build_index(kg)
    app = create_app(kg, index, cors_origins=args.cors_origin or None)
    port = args.port
    if port is None:
        port = int(os.environ.get("GREASE_PORT", DEFAULT_PORT))
    uvicorn.run(app, host=args.host, port=port)
    return 0


_HANDLERS = {
    "convert-nt": cmd_convert_nt,
    "index": cmd_index,
    "search": cmd_search,
    "eval": cmd_eval,
    "synth": cmd_synth,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return _HANDLERS[args.command](args)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (GreaseError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())
