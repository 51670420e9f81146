"""Count-based distributional features and a random forest for lexical relations."""

__version__ = "0.1.0"

from .corpus import RawCounts, Vocabulary, build_vocabulary, count_cooccurrences, parse_corpus
from .evaluation import Dataset, EvaluationReport, load_pairs, score
from .features import (FEATURE_NAMES, DistributionalModel, PairFeatures, PairFeaturizer, WordPair,
                       extract_features, read_features, write_features)
from .forest import RandomForest, load_model, save_model, train_forest
from .space import WeightedSpace, ppmi_weight, row_entropy, top_n_contexts

__all__ = [
    "FEATURE_NAMES", "Dataset", "DistributionalModel", "EvaluationReport", "PairFeatures",
    "PairFeaturizer", "RandomForest", "RawCounts", "Vocabulary", "WeightedSpace", "WordPair",
    "build_vocabulary", "count_cooccurrences", "extract_features", "load_model", "load_pairs",
    "parse_corpus", "ppmi_weight", "read_features", "row_entropy", "save_model", "score",
    "top_n_contexts", "train_forest", "write_features",
]
