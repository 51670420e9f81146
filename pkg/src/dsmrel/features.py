"""The 18-dimensional pair feature vector and its TSV serialisation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import measures
from ._io import atomic_write
from .corpus import RawCounts, Vocabulary, build_vocabulary, count_cooccurrences, \
    count_sentence_cooccurrences, parse_corpus
from .exceptions import FeatureFormatError
from .space import WeightedSpace, pair_cooc, ppmi_weight, row_entropy, top_n_contexts

FEATURE_NAMES = (
    "freq1", "freq2", "diff_freq", "cooc", "entr1", "entr2", "diff_entr",
    "cos", "lin", "weeds_prec", "cos_weeds", "clarke_de", "inv_cl",
    "apsyn_100", "apsyn_1000", "apant_100", "apant_1000", "same_pos",
)
N_FEATURES = len(FEATURE_NAMES)
HEADER = ("w1", "w2", "label") + FEATURE_NAMES + ("oov1", "oov2")
UNLABELED = "?"


@dataclass(frozen=True)
class WordPair:
    w1: str
    w2: str
    label: str | None = None


@dataclass
class PairFeatures:
    values: np.ndarray
    oov1: bool = False
    oov2: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (N_FEATURES,):
            raise ValueError(f"expected {N_FEATURES} feature values, got shape {self.values.shape}")

    def __getitem__(self, name):
        return float(self.values[FEATURE_NAMES.index(name)])

    def as_dict(self):
        return dict(zip(FEATURE_NAMES, self.values.tolist()))


@dataclass
class DistributionalModel:
    """Everything feature extraction needs from a corpus.

    ``cooc`` holds the counts the Cooc feature reads; it is ``raw`` itself
    unless same-sentence counting was requested.
    """

    vocab: Vocabulary
    raw: RawCounts
    space: WeightedSpace
    cooc: RawCounts | None = None

    def __post_init__(self):
        if self.cooc is None:
            self.cooc = self.raw

    @classmethod
    def from_corpus(cls, path, window=2, min_count=1, cooc_scope="window"):
        vocab = build_vocabulary(parse_corpus(path), min_count=min_count)
        raw = count_cooccurrences(parse_corpus(path), vocab, window=window)
        cooc = None
        if cooc_scope == "sentence":
            cooc = count_sentence_cooccurrences(parse_corpus(path), vocab)
        elif cooc_scope != "window":
            raise ValueError(f"cooc_scope must be 'window' or 'sentence', got {cooc_scope!r}")
        return cls(vocab, raw, ppmi_weight(raw), cooc)


def extract_features(pair: WordPair, vocab: Vocabulary, raw: RawCounts, space: WeightedSpace,
                     top_n=(100, 1000), cooc_raw: RawCounts | None = None) -> PairFeatures:
    """Compute the canonical feature vector for ``pair``.

    Directional measures use w1's vector as ``u`` and w2's as ``v``. Words
    outside the vocabulary get zero frequency, entropy and similarity, and set
    the matching ``oov`` flag.
    """
    small, large = top_n
    i1, i2 = vocab.get_id(pair.w1), vocab.get_id(pair.w2)
    u, v = space.row(i1), space.row(i2)
    freq1, freq2 = vocab.count(pair.w1), vocab.count(pair.w2)
    entr1, entr2 = row_entropy(raw, i1), row_entropy(raw, i2)
    apsyn_small = measures.apsyn(top_n_contexts(space, i1, small), top_n_contexts(space, i2, small))
    apsyn_large = measures.apsyn(top_n_contexts(space, i1, large), top_n_contexts(space, i2, large))
    pos1, pos2 = vocab.top_pos(pair.w1), vocab.top_pos(pair.w2)
    values = [
        freq1, freq2, freq1 - freq2,
        pair_cooc(cooc_raw if cooc_raw is not None else raw, i1, i2),
        entr1, entr2, entr1 - entr2,
        measures.cosine(u, v),
        measures.lin(u, v),
        measures.weeds_prec(u, v),
        measures.cos_weeds(u, v),
        measures.clarke_de(u, v),
        measures.inv_cl(u, v),
        apsyn_small, apsyn_large,
        measures.apant(apsyn_small), measures.apant(apsyn_large),
        float(pos1 is not None and pos1 == pos2),
    ]
    return PairFeatures(values, oov1=i1 is None, oov2=i2 is None)


class PairFeaturizer(TransformerMixin, BaseEstimator):
    """Transformer mapping word pairs to an ``(n_pairs, 18)`` feature matrix.

    Parameters
    ----------
    model : DistributionalModel
        Vocabulary, counts and weighted space built from a corpus.
    top_n : tuple of int
        Context list sizes for the ``apsyn_100``/``apsyn_1000`` slots.
    """

    def __init__(self, model=None, top_n=(100, 1000)):
        self.model = model
        self.top_n = top_n

    def fit(self, X=None, y=None):
        if self.model is None:
            raise ValueError("PairFeaturizer needs a DistributionalModel")
        small, large = self.top_n
        if small < 1 or large < 1:
            raise ValueError(f"top_n values must be >= 1, got {self.top_n}")
        self.n_features_out_ = N_FEATURES
        return self

    def extract(self, pairs) -> list[PairFeatures]:
        if not hasattr(self, "n_features_out_"):
            self.fit()
        m = self.model
        out = []
        for p in pairs:
            if not isinstance(p, WordPair):
                p = WordPair(*p)
            out.append(extract_features(p, m.vocab, m.raw, m.space, self.top_n, m.cooc))
        return out

    def transform(self, X):
        feats = self.extract(X)
        if not feats:
            return np.zeros((0, N_FEATURES))
        return np.vstack([f.values for f in feats])

    def get_feature_names_out(self, input_features=None):
        return np.asarray(FEATURE_NAMES, dtype=object)


def _fmt(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def format_row(pair: WordPair, feats: PairFeatures) -> str:
    label = pair.label if pair.label is not None else UNLABELED
    cells = [pair.w1, pair.w2, label, *(_fmt(x) for x in feats.values),
             str(int(feats.oov1)), str(int(feats.oov2))]
    return "\t".join(cells)


def write_features(rows, path) -> None:
    try:
        with atomic_write(path) as fh:
            fh.write("\t".join(HEADER) + "\n")
            for pair, feats in rows:
                fh.write(format_row(pair, feats) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write features to {path}: {exc}") from exc


def read_features(path) -> list[tuple[WordPair, PairFeatures]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if tuple(header) != HEADER:
            raise FeatureFormatError(f"{path}:1: unrecognised feature header")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split("\t")
            if len(cells) != len(HEADER):
                raise FeatureFormatError(
                    f"{path}:{lineno}: expected {len(HEADER)} columns, got {len(cells)}")
            try:
                values = [float(x) for x in cells[3:3 + N_FEATURES]]
                oov1, oov2 = (bool(int(x)) for x in cells[-2:])
            except ValueError as exc:
                raise FeatureFormatError(f"{path}:{lineno}: {exc}") from exc
            label = None if cells[2] == UNLABELED else cells[2]
            rows.append((WordPair(cells[0], cells[1], label), PairFeatures(values, oov1, oov2)))
    return rows


def to_arrays(rows):
    """Split feature rows into ``X`` (n, 18) and a label array ``y``."""
    X = np.array([f.values for _, f in rows], dtype=np.float64).reshape(-1, N_FEATURES)
    y = np.array([p.label for p, _ in rows], dtype=object)
    return X, y
