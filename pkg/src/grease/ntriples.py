"""N-Triples to TSV conversion.

A convenience importer for RDF dumps: IRIs are stripped to their local names
(the part after the last ``#`` or ``/``), triples with literal objects become
attribute lines, and triples with IRI objects become relation lines. Blank
nodes are skipped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from .errors import LoadError

_IRI = r"<([^>]*)>"
_LITERAL = r'"((?:[^"\\]|\\.)*)"(?:\^\^<[^>]*>|@[A-Za-z0-9\-]+)?'
_TRIPLE_RE = re.compile(
    rf"^\s*{_IRI}\s+{_IRI}\s+(?:{_IRI}|{_LITERAL})\s*\.\s*$"
)
_BLANK_RE = re.compile(r"^\s*(_:|<[^>]*>\s+<[^>]*>\s+_:)")

_UNESCAPES = {
    '\\"': '"',
    "\\\\": "\\",
    "\\n": "\n",
    "\\r": "\r",
    "\\t": "\t",
}


def _local_name(iri: str) -> str:
    for sep in ("#", "/"):
        idx = iri.rfind(sep)
        if idx >= 0:
            iri = iri[idx + 1 :]
            break
    return iri


def _unescape_literal(text: str) -> str:
    def sub(m: "re.Match[str]") -> str:
        esc = m.group(0)
        if esc.startswith("\\u"):
            return chr(int(esc[2:], 16))
        return _UNESCAPES.get(esc, esc[1:])

    return re.sub(r"\\u[0-9A-Fa-f]{4}|\\.", sub, text)


def _tsv_safe(value: str) -> str:
    return value.replace("\t", " ").replace("\n", " ").replace("\r", " ")


@dataclass
class ConversionResult:
    relations_lines: list[str] = field(default_factory=list)
    attributes_lines: list[str] = field(default_factory=list)
    skipped_blank_nodes: int = 0


def convert_ntriples(lines: Iterable[str]) -> ConversionResult:
    """Convert N-Triples lines to relation/attribute TSV lines."""
    result = ConversionResult()
    for n, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if _BLANK_RE.match(line):
            result.skipped_blank_nodes += 1
            continue
        m = _TRIPLE_RE.match(line)
        if m is None:
            raise LoadError(f"input line {n}: not a valid N-Triples statement", line_number=n)
        subj_iri, pred_iri, obj_iri, obj_literal = m.groups()
        subj = _tsv_safe(_local_name(subj_iri))
        pred = _tsv_safe(_local_name(pred_iri))
        if obj_iri is not None:
            obj = _tsv_safe(_local_name(obj_iri))
            result.relations_lines.append(f"{subj}\t{pred}\t{obj}")
        else:
            value = _tsv_safe(_unescape_literal(obj_literal))
            result.attributes_lines.append(f"{subj}\t{pred}\t{value}")
    return result
