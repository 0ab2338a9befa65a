"""Contingency tables: ingestion, validation, corpus statistics and the
square-root-of-margins normalization shared by FCA and KORRESP."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DuplicateLabel,
    EmptyInput,
    MalformedInput,
    NegativeCount,
    RaggedRow,
    ZeroMarginal,
)

_INT_RE = re.compile(r"[+-]?\d+")
_LONG_HEADER = ("word", "doc", "count")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _check_unique(labels: Sequence[str], axis: str) -> None:
    seen = set()
    for lab in labels:
        if lab in seen:
            raise DuplicateLabel(f"duplicate {axis} label {lab!r}")
        seen.add(lab)


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """Word-by-document count matrix with its axis labels."""

    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.size and not np.issubdtype(counts.dtype, np.integer):
            raise MalformedInput("counts must be integers")
        counts = counts.astype(np.int64).reshape(len(self.row_labels), len(self.col_labels))
        if counts.size and counts.min() < 0:
            raise NegativeCount("counts must be nonnegative")
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "col_labels", tuple(self.col_labels))
        _check_unique(self.row_labels, "row")
        _check_unique(self.col_labels, "column")
        object.__setattr__(self, "counts", _frozen(counts))

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def __eq__(self, other):
        if not isinstance(other, ContingencyTable):
            return NotImplemented
        return (
            self.row_labels == other.row_labels
            and self.col_labels == other.col_labels
            and np.array_equal(self.counts, other.counts)
        )


@dataclass(frozen=True, eq=False)
class NormalizedTable:
    """``t[i, j] / sqrt(rowsum_i * colsum_j)`` with the source labels.

    The marginal totals of the source counts travel along when known; FCA
    needs them because block-diagonal tables do not determine their margins
    from the normalized values alone.
    """

    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    values: np.ndarray
    row_totals: np.ndarray | None = None
    col_totals: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        values = values.reshape(len(self.row_labels), len(self.col_labels))
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "col_labels", tuple(self.col_labels))
        object.__setattr__(self, "values", _frozen(values))
        if (self.row_totals is None) != (self.col_totals is None):
            raise ValueError("row_totals and col_totals go together")
        if self.row_totals is not None:
            object.__setattr__(self, "row_totals", _frozen(np.asarray(self.row_totals, dtype=np.float64)))
            object.__setattr__(self, "col_totals", _frozen(np.asarray(self.col_totals, dtype=np.float64)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class DocumentStats:
    label: str
    occurrences: int
    distinct_words: int
    hapax: int


@dataclass(frozen=True)
class CorpusStats:
    documents: tuple[DocumentStats, ...]

    def __getitem__(self, label: str) -> DocumentStats:
        for doc in self.documents:
            if doc.label == label:
                return doc
        raise KeyError(label)


# -- parsing -----------------------------------------------------------------

def _split(line: str, lineno: int) -> list[str]:
    if '"' in line:
        raise MalformedInput(f"line {lineno}: quoted fields are not supported")
    return [f.strip() for f in line.split(",")]


def _parse_count(field: str, lineno: int) -> int:
    if not _INT_RE.fullmatch(field):
        raise MalformedInput(f"line {lineno}: {field!r} is not an integer count")
    value = int(field)
    if value < 0:
        raise NegativeCount(f"line {lineno}: negative count {value}")
    return value


def _read_lines(path) -> list[tuple[int, str]]:
    text = Path(path).read_text(encoding="utf-8-sig")
    return [(k + 1, ln.rstrip("\r")) for k, ln in enumerate(text.split("\n")) if ln.strip()]


def load_matrix_csv(path) -> ContingencyTable:
    """Read a wide CSV: header of document labels (first field is a corner
    label and ignored), then one ``word,count,count,...`` line per word.

    The table is returned as parsed; zero marginals are caught by
    :func:`validate`, not here.
    """
    lines = _read_lines(path)
    if not lines:
        raise EmptyInput(f"{path}: no data")
    lineno, header = lines[0]
    fields = _split(header, lineno)
    if len(fields) < 2:
        raise MalformedInput(f"line {lineno}: header needs at least one column label")
    cols = fields[1:]
    if any(not c for c in cols):
        raise MalformedInput(f"line {lineno}: empty column label")
    _check_unique(cols, "column")

    rows, counts = [], []
    for lineno, line in lines[1:]:
        fields = _split(line, lineno)
        if len(fields) != len(cols) + 1:
            raise RaggedRow(
                f"line {lineno}: expected {len(cols) + 1} fields, got {len(fields)}"
            )
        if not fields[0]:
            raise MalformedInput(f"line {lineno}: empty row label")
        rows.append(fields[0])
        counts.append([_parse_count(f, lineno) for f in fields[1:]])
    _check_unique(rows, "row")
    arr = np.array(counts, dtype=np.int64).reshape(len(rows), len(cols))
    return ContingencyTable(tuple(rows), tuple(cols), arr)


def load_long_csv(path) -> ContingencyTable:
    """Read ``word,doc,count`` records into a table.

    Rows and columns are ordered by first appearance and repeated
    ``(word, doc)`` records are summed. A literal ``word,doc,count`` header
    line is skipped.
    """
    lines = _read_lines(path)
    if lines and tuple(f.lower() for f in _split(lines[0][1], lines[0][0])) == _LONG_HEADER:
        lines = lines[1:]
    if not lines:
        raise EmptyInput(f"{path}: no records")

    row_index: dict[str, int] = {}
    col_index: dict[str, int] = {}
    cells: dict[tuple[int, int], int] = {}
    for lineno, line in lines:
        fields = _split(line, lineno)
        if len(fields) != 3 or not fields[0] or not fields[1]:
            raise MalformedInput(f"line {lineno}: expected word,doc,count")
        i = row_index.setdefault(fields[0], len(row_index))
        j = col_index.setdefault(fields[1], len(col_index))
        cells[i, j] = cells.get((i, j), 0) + _parse_count(fields[2], lineno)

    arr = np.zeros((len(row_index), len(col_index)), dtype=np.int64)
    for (i, j), c in cells.items():
        arr[i, j] = c
    return ContingencyTable(tuple(row_index), tuple(col_index), arr)


def write_matrix_csv(table: ContingencyTable, path, corner: str = "word") -> None:
    for lab in table.row_labels + table.col_labels:
        if "," in lab or '"' in lab or "\n" in lab:
            raise MalformedInput(f"label {lab!r} cannot be written unquoted")
    lines = [",".join((corner,) + table.col_labels)]
    for lab, row in zip(table.row_labels, table.counts):
        lines.append(",".join([lab] + [str(int(c)) for c in row]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# -- operations --------------------------------------------------------------

def top_k_filter(t: ContingencyTable, k: int) -> ContingencyTable:
    """Keep the ``k`` most frequent rows, ordered by descending total then label."""
    if k < 1:
        raise ValueError("k must be >= 1")
    totals = t.row_sums()
    order = sorted(range(len(t.row_labels)), key=lambda i: (-int(totals[i]), t.row_labels[i]))
    keep = order[:k]
    return ContingencyTable(
        tuple(t.row_labels[i] for i in keep),
        t.col_labels,
        t.counts[keep, :] if keep else np.zeros((0, len(t.col_labels)), dtype=np.int64),
    )


def validate(t: ContingencyTable) -> ContingencyTable:
    if not t.row_labels or not t.col_labels:
        raise EmptyInput("table has no rows or no columns")
    rows = t.row_sums()
    for i, s in enumerate(rows):
        if s == 0:
            raise ZeroMarginal("row", i, t.row_labels[i])
    cols = t.col_sums()
    for j, s in enumerate(cols):
        if s == 0:
            raise ZeroMarginal("col", j, t.col_labels[j])
    return t


def normalize(t: ContingencyTable) -> NormalizedTable:
    validate(t)
    counts = t.counts.astype(np.float64)
    rows = t.row_sums().astype(np.float64)
    cols = t.col_sums().astype(np.float64)
    return NormalizedTable(
        t.row_labels, t.col_labels, counts / np.sqrt(np.outer(rows, cols)), rows, cols
    )


def corpus_stats(t: ContingencyTable) -> CorpusStats:
    docs = []
    for j, label in enumerate(t.col_labels):
        col = t.counts[:, j]
        docs.append(
            DocumentStats(
                label=label,
                occurrences=int(col.sum()),
                distinct_words=int(np.count_nonzero(col)),
                hapax=int(np.count_nonzero(col == 1)),
            )
        )
    return CorpusStats(tuple(docs))
