class DataError(ValueError):
    """Malformed input data (corpus, pair, feature, or model files)."""


class CorpusFormatError(DataError):
    pass


class PairFormatError(DataError):
    pass


class FeatureFormatError(DataError):
    pass


class ModelFormatError(DataError):
    pass
