"""Document-by-event 0/1 incidence matrices, OR-merge aggregation and pruning."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateMatrix, UnknownMention, UnmappedColumn

MATRIX_FILE = "matrix.csv"


@dataclass
class IncidenceMatrix:
    data: np.ndarray
    col_labels: list
    row_ids: list
    dropped: list = field(default_factory=list)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.uint8)
        if self.data.ndim != 2:
            raise ValueError("incidence data must be 2-D")
        n, c = self.data.shape
        if len(self.row_ids) != n or len(self.col_labels) != c:
            raise ValueError(f"labels do not match a {n}x{c} matrix")
        if len(set(self.col_labels)) != c:
            raise ValueError("column labels must be distinct")
        if self.data.size and self.data.max() > 1:
            raise ValueError("incidence entries must be 0 or 1")

    @property
    def shape(self):
        return self.data.shape


def build_raw_matrix(event_lists, vocab):
    """``X[i, m] = 1`` iff document ``i`` mentions vocabulary item ``m``."""
    if not isinstance(event_lists, dict):
        event_lists = dict(enumerate(event_lists))
    rows = sorted(event_lists)
    X = np.zeros((len(rows), len(vocab)), dtype=np.uint8)
    index = {u: m for m, u in enumerate(vocab)}
    for r, doc_id in enumerate(rows):
        for s in event_lists[doc_id]:
            if not s:
                continue
            if s not in index:
                raise UnknownMention(f"doc {doc_id}: {s!r} is not in the vocabulary")
            X[r, index[s]] = 1
    return IncidenceMatrix(X, list(vocab), rows)


def aggregate(X, reg):
    """OR-merge raw columns into one column per canonical event (canon_id order)."""
    Z = np.zeros((X.data.shape[0], len(reg.events)), dtype=np.uint8)
    for m, label in enumerate(X.col_labels):
        if label not in reg.map:
            raise UnmappedColumn(f"raw column {label!r} has no canonical event")
        c = reg.map[label]
        np.maximum(Z[:, c], X.data[:, m], out=Z[:, c])
    return IncidenceMatrix(Z, [ev.name for ev in reg.events], list(X.row_ids), list(X.dropped))


def drop_noninformative(Z):
    """Remove all-0 and all-1 columns; needs two survivors."""
    keep, dropped = [], list(Z.dropped)
    for c, label in enumerate(Z.col_labels):
        col = Z.data[:, c]
        if col.size and (col == col[0]).all():
            dropped.append((label, "all-1" if col[0] else "all-0"))
        else:
            keep.append(c)
    if len(keep) < 2:
        raise DegenerateMatrix(f"only {len(keep)} informative column(s) left")
    return IncidenceMatrix(
        Z.data[:, keep], [Z.col_labels[c] for c in keep], list(Z.row_ids), dropped
    )


def write_matrix_csv(path, Z):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["doc_id", *Z.col_labels])
        for doc_id, row in zip(Z.row_ids, Z.data):
            w.writerow([doc_id, *(int(v) for v in row)])


def read_matrix_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[int(v) for v in r[1:]] for r in body], dtype=np.uint8)
    data = data.reshape(len(body), len(header) - 1)
    return IncidenceMatrix(data, header[1:], [int(r[0]) for r in body])
