from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from grease.cli import main
from grease.service import create_app
from grease import build_index, load_kg

from conftest import S1, TINY_ATTRIBUTES, TINY_RELATIONS


@pytest.fixture()
def fixture_files(tmp_path):
    relations = tmp_path / "relations.tsv"
    attributes = tmp_path / "attributes.tsv"
    relations.write_text("".join(line + "\n" for line in TINY_RELATIONS), encoding="utf-8")
    attributes.write_text("".join(line + "\n" for line in TINY_ATTRIBUTES), encoding="utf-8")
    return relations, attributes


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestUsage:
    def test_no_subcommand(self, capsys):
        code, _out, err = run(capsys)
        assert code == 1
        assert "usage" in err.lower()

    def test_bad_beta(self, fixture_files, capsys):
        relations, attributes = fixture_files
        code, _out, err = run(
            capsys,
            "search",
            "--kg", str(relations), str(attributes),
            "--query", "TomHardy",
            "--example", "DaveChappelle:LadyGaga",
            "--beta", "-1",
        )
        assert code == 1
        assert "beta" in err

    def test_missing_example(self, fixture_files, capsys):
        relations, attributes = fixture_files
        code, _out, err = run(
            capsys,
            "search",
            "--kg", str(relations), str(attributes),
            "--query", "TomHardy",
        )
        assert code == 1
        assert "example" in err

    def test_malformed_example(self, fixture_files, capsys):
        relations, attributes = fixture_files
        code, _out, err = run(
            capsys,
            "search",
            "--kg", str(relations), str(attributes),
            "--query", "TomHardy",
            "--example", "no-colon-here",
        )
        assert code == 1


class TestDataErrors:
    def test_missing_file(self, tmp_path, capsys):
        code, _out, err = run(
            capsys,
            "index",
            "--kg", str(tmp_path / "nope.tsv"), str(tmp_path / "nope2.tsv"),
            "--out", str(tmp_path / "out.idx"),
        )
        assert code == 2
        assert err.strip()

    def test_unknown_entity(self, fixture_files, capsys):
        relations, attributes = fixture_files
        code, _out, err = run(
            capsys,
            "search",
            "--kg", str(relations), str(attributes),
            "--query", "Nobody",
            "--example", "DaveChappelle:LadyGaga",
        )
        assert code == 2
        assert "Nobody" in err

    def test_corrupt_index_file(self, fixture_files, tmp_path, capsys):
        relations, attributes = fixture_files
        bad = tmp_path / "bad.idx"
        bad.write_bytes(b"garbage")
        code, _out, err = run(
            capsys,
            "search",
            "--kg", str(relations), str(attributes),
            "--index", str(bad),
            "--query", "TomHardy",
            "--example", "DaveChappelle:LadyGaga",
        )
        assert code == 2
        assert "not an index file" in err


class TestIndexAndSearch:
    def test_index_then_search(self, fixture_files, tmp_path, capsys):
        relations, attributes = fixture_files
        index_path = tmp_path / "tiny.idx"
        code, out, _err = run(
            capsys,
            "index",
            "--kg", str(relations), str(attributes),
            "--out", str(index_path),
        )
        assert code == 0
        assert index_path.exists()
        assert "14 entities" in out

        code, out, _err = run(
            capsys,
            "search",
            "--kg", str(relations), str(attributes),
            "--index", str(index_path),
            "--query", "TomHardy",
            "--example", "DaveChappelle:LadyGaga",
            "--example", "MattDamon:JuliaRoberts",
        )
        assert code == 0
        first_row = out.splitlines()[1]
        assert first_row.startswith("1")
        assert "LeonardoDiCaprio" in first_row

    def test_example_json_flag(self, fixture_files, capsys):
        relations, attributes = fixture_files
        code, out, _err = run(
            capsys,
            "search",
            "--kg", str(relations), str(attributes),
            "--query", "TomHardy",
            "--example-json", json.dumps([list(p) for p in S1]),
        )
        assert code == 0
        assert "LeonardoDiCaprio" in out

    def test_json_output_matches_service_payload(self, fixture_files, tiny_kg, tiny_index, capsys):
        relations, attributes = fixture_files
        code, out, _err = run(
            capsys,
            "search",
            "--kg", str(relations), str(attributes),
            "--query", "TomHardy",
            "--example", "DaveChappelle:LadyGaga",
            "--example", "MattDamon:JuliaRoberts",
            "--json",
        )
        assert code == 0
        client = TestClient(create_app(tiny_kg, tiny_index))
        response = client.post(
            "/api/search",
            json={"query": "TomHardy", "examples": [list(p) for p in S1]},
        )
        # Byte-identical apart from the trailing timing field.
        service_body = response.content.decode("utf-8")
        prefix, _timing = service_body.rsplit(',"timing_ms":', 1)
        assert out.rstrip("\n") == prefix + "}"


class TestConvert:
    def test_convert_then_load(self, tmp_path, capsys):
        nt = tmp_path / "dump.nt"
        nt.write_text(
            "<http://ex.org/A> <http://ex.org/stars> <http://ex.org/B> .\n"
            '<http://ex.org/A> <http://ex.org/label> "Movie A" .\n',
            encoding="utf-8",
        )
        relations = tmp_path / "rel.tsv"
        attributes = tmp_path / "attr.tsv"
        code, out, _err = run(
            capsys,
            "convert-nt",
            str(nt),
            "--relations-out", str(relations),
            "--attributes-out", str(attributes),
        )
        assert code == 0
        assert "1 relations, 1 attributes" in out
        kg = load_kg(
            relations.read_text(encoding="utf-8").splitlines(),
            attributes.read_text(encoding="utf-8").splitlines(),
        )
        assert kg.entity_count == 2


class TestSynthAndEval:
    def test_synth_eval_roundtrip(self, tmp_path, capsys):
        spec = {
            "group": "demo",
            "entity_count": 220,
            "planted_metapath": "works_at^-1/leads",
            "instance_count": 3,
            "extra_anchors": 3,
            "targets_per_anchor": 6,
            "gold_targets_per_anchor": 6,
            "noise_edge_rate": 1.0,
        }
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(spec), encoding="utf-8")
        out_dir = tmp_path / "bench"
        code, out, _err = run(
            capsys, "synth", "--spec", str(spec_path), "--seed", "3", "--out-dir", str(out_dir)
        )
        assert code == 0
        assert (out_dir / "relations.tsv").exists()

        report_path = tmp_path / "report.json"
        code, out, _err = run(
            capsys,
            "eval",
            "--kg", str(out_dir / "relations.tsv"), str(out_dir / "attributes.tsv"),
            "--queries", str(out_dir / "queries.jsonl"),
            "--variant", "np",
            "--out", str(report_path),
        )
        assert code == 0
        assert "mean NDCG" in out
        report = json.loads(report_path.read_text(encoding="utf-8"))
        assert report["groups"][0]["group"] == "demo"
        assert report["groups"][0]["mean_ndcg"] >= 0.9

    def test_synth_deterministic_files(self, tmp_path, capsys):
        spec = {
            "group": "demo",
            "entity_count": 220,
            "planted_metapath": "works_at^-1/leads",
            "instance_count": 2,
            "extra_anchors": 2,
            "targets_per_anchor": 5,
            "gold_targets_per_anchor": 5,
            "noise_edge_rate": 0.5,
        }
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(spec), encoding="utf-8")
        outputs = []
        for name in ("one", "two"):
            out_dir = tmp_path / name
            code, _out, _err = run(
                capsys, "synth", "--spec", str(spec_path), "--seed", "9", "--out-dir", str(out_dir)
            )
            assert code == 0
            outputs.append(
                tuple(
                    (out_dir / f).read_bytes()
                    for f in ("relations.tsv", "attributes.tsv", "queries.jsonl")
                )
            )
        assert outputs[0] == outputs[1]


class TestServeParser:
    def test_help_does_not_crash(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["serve", "--help"])
        assert exc.value.code == 0
