"""Reading and writing paired system outputs.

Three formats are understood:

``entry-tsv``
    One entry per line. Two tab-separated fields ``correct<TAB>length`` for
    accuracy data, or three ``true_positive<TAB>incorrect<TAB>length`` for
    F1 data. Every line of a file must use the same layout.
``token-tsv``
    One entry per line, space-separated 0/1 correctness flags per token.
    ``correct`` is the number of ones, ``length`` the number of flags.
``json``
    An array of objects using the field names above.

In the line formats, blank lines and lines starting with ``#`` are skipped,
and both Unix and Windows line endings are accepted.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterable, List, Sequence

from .errors import AlignmentError, EmptyDatasetError, InvalidInputError, ParseError
from .statistics import EntryRecord, PairedDataset

ENTRY_TSV = "entry-tsv"
TOKEN_TSV = "token-tsv"
JSON = "json"
FORMATS = (ENTRY_TSV, TOKEN_TSV, JSON)

_ACC_FIELDS = ("correct", "length")
_F1_FIELDS = ("true_positive", "incorrect", "length")


@dataclass(frozen=True)
class CorpusFile:
    format: str
    path: "str | os.PathLike"

    def __post_init__(self):
        if self.format not in FORMATS:
            raise InvalidInputError(f"unknown format {self.format!r}; expected one of {FORMATS}")


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield lineno, line


def _parse_int(token: str, path, lineno) -> int:
    try:
        return int(token.strip())
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", path, lineno) from None


def _record(fields: dict, path, where) -> EntryRecord:
    try:
        return EntryRecord(
            fields.get("correct"),
            fields.get("length"),
            fields.get("true_positive"),
            fields.get("incorrect"),
        )
    except InvalidInputError as exc:
        raise ParseError(str(exc), path, where) from None


def parse_entry_tsv(text: str, path=None) -> List[EntryRecord]:
    records = []
    width = None
    for lineno, line in _content_lines(text):
        cols = line.split("\t")
        if len(cols) not in (2, 3):
            raise ParseError(f"expected 2 or 3 tab-separated fields, got {len(cols)}", path, lineno)
        if width is None:
            width = len(cols)
        elif len(cols) != width:
            raise ParseError(f"expected {width} fields like earlier lines, got {len(cols)}", path, lineno)
        values = [_parse_int(c, path, lineno) for c in cols]
        names = _ACC_FIELDS if width == 2 else _F1_FIELDS
        records.append(_record(dict(zip(names, values)), path, lineno))
    return records


def parse_token_tsv(text: str, path=None) -> List[EntryRecord]:
    records = []
    for lineno, line in _content_lines(text):
        flags = line.split()
        if any(f not in ("0", "1") for f in flags):
            raise ParseError("token flags must be 0 or 1", path, lineno)
        records.append(_record({"correct": flags.count("1"), "length": len(flags)}, path, lineno))
    return records


def parse_json(text: str, path=None) -> List[EntryRecord]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path, exc.lineno) from None
    if not isinstance(data, list):
        raise ParseError("top-level JSON value must be an array", path)
    records = []
    known = set(_ACC_FIELDS) | set(_F1_FIELDS)
    for i, obj in enumerate(data):
        if not isinstance(obj, dict):
            raise ParseError(f"entry {i} is not an object", path)
        extra = set(obj) - known
        if extra:
            raise ParseError(f"entry {i} has unknown fields {sorted(extra)}", path)
        if "length" not in obj:
            raise ParseError(f"entry {i} has no length", path)
        try:
            records.append(
                EntryRecord(obj.get("correct"), obj["length"], obj.get("true_positive"), obj.get("incorrect"))
            )
        except InvalidInputError as exc:
            raise ParseError(f"entry {i}: {exc}", path) from None
    return records


_PARSERS = {ENTRY_TSV: parse_entry_tsv, TOKEN_TSV: parse_token_tsv, JSON: parse_json}


def read_entries(corpus: CorpusFile) -> List[EntryRecord]:
    try:
        with open(corpus.path, encoding="utf-8", newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {corpus.path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise ParseError("file is not valid UTF-8", corpus.path) from None
    return _PARSERS[corpus.format](text, corpus.path)


def load_paired(u_file: CorpusFile, v_file: CorpusFile) -> PairedDataset:
    """Read and align two system output files."""
    u = read_entries(u_file)
    v = read_entries(v_file)
    for n, (a, b) in enumerate(zip(u, v)):
        if a.length != b.length:
            raise AlignmentError(
                f"entry {n}: length {a.length} in {u_file.path} but {b.length} in {v_file.path}", n
            )
    if len(u) != len(v):
        n = min(len(u), len(v))
        raise AlignmentError(
            f"entry {n}: {u_file.path} has {len(u)} entries but {v_file.path} has {len(v)}", n
        )
    if not u:
        raise EmptyDatasetError("both files contain no entries")
    return PairedDataset(tuple(u), tuple(v))


def format_entries(entries: Sequence[EntryRecord], fmt: str) -> str:
    if fmt == JSON:
        rows = []
        for e in entries:
            row = {k: getattr(e, k) for k in ("correct", "true_positive", "incorrect")}
            row = {k: v for k, v in row.items() if v is not None}
            row["length"] = e.length
            rows.append(row)
        return json.dumps(rows, indent=1) + "\n"
    if fmt == TOKEN_TSV:
        lines = []
        for e in entries:
            if e.correct is None:
                raise InvalidInputError("token-tsv needs correct counts")
            lines.append(" ".join(["1"] * e.correct + ["0"] * (e.length - e.correct)))
        return "".join(line + "\n" for line in lines)
    if fmt == ENTRY_TSV:
        lines = []
        for e in entries:
            has_f1 = e.true_positive is not None or e.incorrect is not None
            if e.correct is not None and not has_f1:
                lines.append(f"{e.correct}\t{e.length}")
            elif e.correct is None and e.true_positive is not None and e.incorrect is not None:
                lines.append(f"{e.true_positive}\t{e.incorrect}\t{e.length}")
            else:
                raise InvalidInputError(
                    "entry-tsv holds either accuracy or F1 counts per file; use json for both"
                )
        return "".join(line + "\n" for line in lines)
    raise InvalidInputError(f"unknown format {fmt!r}")


def write_entries(entries: Iterable[EntryRecord], corpus: CorpusFile) -> None:
    text = format_entries(list(entries), corpus.format)
    with open(corpus.path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def save_paired(dataset: PairedDataset, u_file: CorpusFile, v_file: CorpusFile) -> None:
    write_entries(dataset.u_entries, u_file)
    write_entries(dataset.v_entries, v_file)
