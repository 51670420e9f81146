"""Corpus ingestion: vocabulary building and windowed co-occurrence counting.

The corpus format is one sentence per line with whitespace-separated
``lemma|POS`` tokens. Counting is vectorised over chunks of sentences and
accumulated into a ``scipy.sparse`` matrix, so memory stays proportional to
the number of distinct (target, context) cells rather than to corpus size.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np
import scipy.sparse as sp

from ._io import atomic_write, read_metadata, write_metadata
from .exceptions import CorpusFormatError, DataError

Sentence = list  # list of (lemma, pos) tuples

# tokens per vectorised counting batch
_CHUNK_TOKENS = 500_000


def parse_line(line: str, lineno: int = 0) -> list[tuple[str, str]]:
    tokens = []
    for tok in line.split():
        lemma, sep, pos = tok.rpartition("|")
        if not sep or not lemma or not pos:
            raise CorpusFormatError(f"line {lineno}: malformed token {tok!r} (expected lemma|POS)")
        tokens.append((lemma, pos))
    return tokens


def parse_corpus(path) -> Iterator[list[tuple[str, str]]]:
    """Yield sentences from a ``lemma|POS`` corpus file, skipping blank lines."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            yield parse_line(line, lineno)


@dataclass
class Vocabulary:
    """Lemma inventory with dense ids, token counts and per-POS counts.

    Ids are assigned in descending frequency order, ties broken by lemma.
    """

    lemmas: list[str] = field(default_factory=list)
    counts: list[int] = field(default_factory=list)
    pos_counts: list[dict[str, int]] = field(default_factory=list)
    min_count: int = 1

    def __post_init__(self):
        self._index = {lemma: i for i, lemma in enumerate(self.lemmas)}

    def __len__(self):
        return len(self.lemmas)

    def __contains__(self, lemma):
        return lemma in self._index

    def __iter__(self):
        return iter(self.lemmas)

    def get_id(self, lemma, default=None):
        return self._index.get(lemma, default)

    def count(self, lemma) -> int:
        i = self._index.get(lemma)
        return 0 if i is None else self.counts[i]

    def top_pos(self, lemma):
        """Most frequent POS tag of ``lemma`` (ties: lexicographically smallest), or None."""
        i = self._index.get(lemma)
        if i is None or not self.pos_counts[i]:
            return None
        return min(self.pos_counts[i].items(), key=lambda kv: (-kv[1], kv[0]))[0]

    def save(self, path):
        with atomic_write(path) as fh:
            for i, lemma in enumerate(self.lemmas):
                pos = ",".join(f"{p}:{c}" for p, c in sorted(self.pos_counts[i].items()))
                fh.write(f"{lemma}\t{i}\t{self.counts[i]}\t{pos}\n")

    @classmethod
    def load(cls, path, min_count=1):
        lemmas, counts, pos_counts = [], [], []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                parts = line.rstrip("\n").split("\t")
                if len(parts) != 4:
                    raise DataError(f"{path}:{lineno}: expected 4 columns, got {len(parts)}")
                lemma, idx, total, pos_field = parts
                if int(idx) != len(lemmas):
                    raise DataError(f"{path}:{lineno}: ids must be dense and in order")
                pc = {}
                for item in filter(None, pos_field.split(",")):
                    tag, _, c = item.rpartition(":")
                    pc[tag] = int(c)
                lemmas.append(lemma)
                counts.append(int(total))
                pos_counts.append(pc)
        return cls(lemmas, counts, pos_counts, min_count=min_count)


def build_vocabulary(sentences: Iterable, min_count: int = 1) -> Vocabulary:
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    pos_counts: dict[str, Counter] = defaultdict(Counter)
    for sentence in sentences:
        for lemma, pos in sentence:
            pos_counts[lemma][pos] += 1
    totals = {lemma: sum(c.values()) for lemma, c in pos_counts.items()}
    kept = sorted((lemma for lemma, n in totals.items() if n >= min_count),
                  key=lambda lemma: (-totals[lemma], lemma))
    return Vocabulary(
        lemmas=kept,
        counts=[totals[lemma] for lemma in kept],
        pos_counts=[dict(pos_counts[lemma]) for lemma in kept],
        min_count=min_count,
    )


@dataclass
class RawCounts:
    """Sparse target x context co-occurrence counts with marginals."""

    matrix: sp.csr_matrix
    window: int
    min_count: int = 1
    scope: str = "window"

    def __post_init__(self):
        self.matrix = sp.csr_matrix(self.matrix, dtype=np.int64)
        self.matrix.sum_duplicates()
        self.matrix.eliminate_zeros()
        self.matrix.sort_indices()
        self.row_marginals = np.asarray(self.matrix.sum(axis=1)).ravel()
        self.col_marginals = np.asarray(self.matrix.sum(axis=0)).ravel()
        self.total = int(self.matrix.sum())

    @property
    def vocab_size(self):
        return self.matrix.shape[0]

    def get(self, target: int, context: int) -> int:
        return int(self.matrix[target, context])

    def row(self, target: int) -> dict[int, int]:
        start, end = self.matrix.indptr[target], self.matrix.indptr[target + 1]
        return dict(zip(self.matrix.indices[start:end].tolist(),
                        self.matrix.data[start:end].tolist()))

    def triples(self) -> Iterator[tuple[int, int, int]]:
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            yield int(r), int(c), int(v)

    def metadata(self) -> dict:
        return {
            "window": self.window,
            "scope": self.scope,
            "total": self.total,
            "vocab_size": self.vocab_size,
            "min_count": self.min_count,
            "units": "lemma",
        }

    def save(self, path):
        with atomic_write(path) as fh:
            for r, c, v in self.triples():
                fh.write(f"{r}\t{c}\t{v}\n")
        write_metadata(str(path) + ".meta", self.metadata())

    @classmethod
    def load(cls, path):
        meta = read_metadata(str(path) + ".meta")
        n = int(meta["vocab_size"])
        data = _load_int_triples(path)
        matrix = sp.csr_matrix((data[:, 2], (data[:, 0], data[:, 1])), shape=(n, n))
        raw = cls(matrix, window=int(meta["window"]), min_count=int(meta.get("min_count", 1)),
                  scope=meta.get("scope", "window"))
        if raw.total != int(meta["total"]):
            raise DataError(f"{path}: total {raw.total} disagrees with metadata {meta['total']}")
        return raw


def _load_int_triples(path) -> np.ndarray:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 columns, got {len(parts)}")
            rows.append((int(parts[0]), int(parts[1]), int(parts[2])))
    return np.array(rows, dtype=np.int64).reshape(-1, 3)


def _count_chunk(ids: np.ndarray, sent: np.ndarray, window: int, n: int) -> sp.csr_matrix:
    rows, cols = [], []
    for d in range(1, window + 1):
        a, b = ids[:-d], ids[d:]
        mask = (sent[:-d] == sent[d:]) & (a >= 0) & (b >= 0)
        a, b = a[mask], b[mask]
        rows += [a, b]
        cols += [b, a]
    if not rows:
        return sp.csr_matrix((n, n), dtype=np.int64)
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    return sp.csr_matrix((np.ones(len(r), dtype=np.int64), (r, c)), shape=(n, n))


def count_cooccurrences(sentences: Iterable, vocab: Vocabulary, window: int = 2) -> RawCounts:
    """Count symmetric-window co-occurrences inside sentence boundaries.

    Out-of-vocabulary tokens keep their position (so they still take up window
    slots) but never count as target or context.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    n = len(vocab)
    total = sp.csr_matrix((n, n), dtype=np.int64)
    ids: list[int] = []
    sent: list[int] = []
    k = 0

    def flush():
        nonlocal total
        if ids:
            total = total + _count_chunk(np.array(ids, dtype=np.int64),
                                         np.array(sent, dtype=np.int64), window, n)
            ids.clear()
            sent.clear()

    for sentence in sentences:
        ids.extend(vocab.get_id(lemma, -1) for lemma, _ in sentence)
        sent.extend([k] * len(sentence))
        k += 1
        if len(ids) >= _CHUNK_TOKENS:
            flush()
    flush()
    return RawCounts(total, window=window, min_count=vocab.min_count)


def count_sentence_cooccurrences(sentences: Iterable, vocab: Vocabulary) -> RawCounts:
    """Same-sentence co-occurrence counts: every ordered token pair in a sentence."""
    sentences = list(sentences)
    longest = max((len(s) for s in sentences), default=1)
    raw = count_cooccurrences(sentences, vocab, window=max(1, longest - 1))
    raw.scope = "sentence"
    return raw
