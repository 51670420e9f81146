"""PPMI-weighted sparse space and per-word statistics derived from raw counts."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ._io import atomic_write, read_metadata, write_metadata
from .corpus import RawCounts
from .exceptions import DataError


@dataclass
class WeightedSpace:
    """Sparse target x context matrix holding strictly positive weights."""

    matrix: sp.csr_matrix
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.matrix = sp.csr_matrix(self.matrix, dtype=np.float64)
        self.matrix.sort_indices()

    @property
    def n_rows(self):
        return self.matrix.shape[0]

    def row(self, word) -> dict[int, float]:
        if word is None or not 0 <= word < self.n_rows:
            return {}
        start, end = self.matrix.indptr[word], self.matrix.indptr[word + 1]
        return dict(zip(self.matrix.indices[start:end].tolist(),
                        self.matrix.data[start:end].tolist()))

    def save(self, path):
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        with atomic_write(path) as fh:
            for r, c, w in zip(coo.row[order], coo.col[order], coo.data[order]):
                fh.write(f"{r}\t{c}\t{w:.6f}\n")
        write_metadata(str(path) + ".meta", {**self.meta, "weighting": "ppmi"})

    @classmethod
    def load(cls, path):
        meta = read_metadata(str(path) + ".meta")
        n = int(meta["vocab_size"])
        rows, cols, vals = [], [], []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                parts = line.split("\t")
                if len(parts) != 3:
                    raise DataError(f"{path}:{lineno}: expected 3 columns, got {len(parts)}")
                rows.append(int(parts[0]))
                cols.append(int(parts[1]))
                vals.append(float(parts[2]))
        return cls(sp.csr_matrix((vals, (rows, cols)), shape=(n, n)), meta)


def ppmi_weight(raw: RawCounts) -> WeightedSpace:
    """Positive PMI (base 2) of every observed cell; non-positive cells are dropped."""
    if raw.total <= 0:
        raise ValueError("cannot weight an empty co-occurrence matrix")
    coo = raw.matrix.tocoo()
    count = coo.data.astype(np.float64)
    expected = raw.row_marginals[coo.row].astype(np.float64) * raw.col_marginals[coo.col]
    pmi = np.log2(count * float(raw.total) / expected)
    keep = pmi > 0
    matrix = sp.csr_matrix((pmi[keep], (coo.row[keep], coo.col[keep])), shape=raw.matrix.shape)
    return WeightedSpace(matrix, raw.metadata())


def row_entropy(raw: RawCounts, word) -> float:
    """Shannon entropy (bits) of the word's raw context distribution; 0 for empty rows."""
    if word is None or raw.row_marginals[word] == 0:
        return 0.0
    start, end = raw.matrix.indptr[word], raw.matrix.indptr[word + 1]
    p = raw.matrix.data[start:end] / float(raw.row_marginals[word])
    return float(max(0.0, -np.sum(p * np.log2(p))))


@dataclass
class TopContexts:
    """A word's ``n`` highest-weighted contexts; entry k has rank k + 1."""

    word: int | None
    n: int
    ranked: list[tuple[int, float]]

    def __len__(self):
        return len(self.ranked)

    @property
    def ranks(self) -> dict[int, int]:
        return {ctx: k + 1 for k, (ctx, _) in enumerate(self.ranked)}


def top_n_contexts(space: WeightedSpace, word, n: int) -> TopContexts:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if word is None or not 0 <= word < space.n_rows:
        return TopContexts(word, n, [])
    start, end = space.matrix.indptr[word], space.matrix.indptr[word + 1]
    ctx = space.matrix.indices[start:end]
    w = space.matrix.data[start:end]
    order = np.lexsort((ctx, -w))[:n]
    return TopContexts(word, n, list(zip(ctx[order].tolist(), w[order].tolist())))


def pair_cooc(raw: RawCounts, w1, w2) -> int:
    if w1 is None or w2 is None:
        return 0
    return raw.get(w1, w2)
