"""Command-line interface: build, features, train, predict, eval, importances."""
from __future__ import annotations

import argparse
import logging
import os
import sys
import warnings

from . import __version__
from ._io import atomic_write
from .corpus import RawCounts, Vocabulary, build_vocabulary, count_cooccurrences, \
    count_sentence_cooccurrences, parse_corpus
from .evaluation import TASK_LABELS, load_pairs, score, shared_pairs
from .exceptions import DataError
from .features import DistributionalModel, PairFeaturizer, read_features, to_arrays, write_features
from .forest import RandomForest, load_model, save_model
from .space import ppmi_weight

log = logging.getLogger("dsmrel")

VOCAB_FILE = "vocab.tsv"
COUNTS_FILE = "counts.tsv"
SPACE_FILE = "space.tsv"
SENTENCE_COUNTS_FILE = "sentence_counts.tsv"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _min_split(text):
    value = _positive_int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"must be >= 2, got {value}")
    return value


def _top_n(text):
    try:
        values = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated integers, got {text!r}") from None
    if len(values) != 2 or min(values) < 1:
        raise argparse.ArgumentTypeError(f"expected two positive integers (small,large), got {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dsmrel", description="Distributional features and a random forest "
                                                "for lexical relation classification.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("build", help="corpus -> vocabulary, counts and PPMI space")
    p.add_argument("corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--window", type=_positive_int, default=2)
    p.add_argument("--min-count", type=_positive_int, default=100)
    p.add_argument("--cooc-scope", choices=("window", "sentence"), default="window")

    p = sub.add_parser("features", help="space + pair file -> feature TSV")
    p.add_argument("--space", required=True, help="directory written by `build`")
    p.add_argument("--pairs", required=True)
    p.add_argument("--task", choices=(*TASK_LABELS, "none"), default="none")
    p.add_argument("--top-n", type=_top_n, default=(100, 1000), help="small,large (default 100,1000)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="feature TSV -> model JSON")
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--trees", type=_positive_int, default=100)
    p.add_argument("--depth", type=_positive_int, default=10)
    p.add_argument("--criterion", choices=("gini", "entropy"), default="gini")
    p.add_argument("--max-features", type=_positive_int, default=9)
    p.add_argument("--min-split", type=_min_split, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--class-weight", choices=("balanced",), default=None)
    p.add_argument("--jobs", type=int, default=None)

    p = sub.add_parser("predict", help="model + feature TSV -> predicted pair TSV")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="predictions + gold -> report")
    p.add_argument("--pred", required=True, help="pair TSV with predicted labels")
    p.add_argument("--gold", required=True, help="pair TSV with gold labels")
    p.add_argument("--task", choices=tuple(TASK_LABELS), required=True)
    p.add_argument("--tsv", help="also write the machine-readable report here")
    p.add_argument("--check-split", metavar="TRAIN_PAIRS",
                   help="warn about pairs shared between this training file and --gold")

    p = sub.add_parser("importances", help="model -> ranked feature importances")
    p.add_argument("--model", required=True)
    return parser


def cmd_build(args, out):
    os.makedirs(args.out, exist_ok=True)
    vocab = build_vocabulary(parse_corpus(args.corpus), min_count=args.min_count)
    raw = count_cooccurrences(parse_corpus(args.corpus), vocab, window=args.window)
    if raw.total == 0:
        raise DataError(f"{args.corpus}: no in-vocabulary co-occurrences (check --min-count)")
    space = ppmi_weight(raw)
    log.info("writing %s", args.out)
    vocab.save(os.path.join(args.out, VOCAB_FILE))
    raw.save(os.path.join(args.out, COUNTS_FILE))
    space.save(os.path.join(args.out, SPACE_FILE))
    if args.cooc_scope == "sentence":
        count_sentence_cooccurrences(parse_corpus(args.corpus), vocab).save(
            os.path.join(args.out, SENTENCE_COUNTS_FILE))
    print(f"vocabulary {len(vocab)}  cells {raw.matrix.nnz}  events {raw.total}  "
          f"ppmi cells {space.matrix.nnz}", file=out)


def load_model_dir(directory) -> DistributionalModel:
    raw = RawCounts.load(os.path.join(directory, COUNTS_FILE))
    vocab = Vocabulary.load(os.path.join(directory, VOCAB_FILE), min_count=raw.min_count)
    if len(vocab) != raw.vocab_size:
        raise DataError(f"{directory}: vocabulary and counts disagree on size")
    # weights are recomputed from exact counts; space.tsv is rounded to 6 decimals
    cooc = None
    sentence_path = os.path.join(directory, SENTENCE_COUNTS_FILE)
    if os.path.exists(sentence_path):
        cooc = RawCounts.load(sentence_path)
    return DistributionalModel(vocab, raw, ppmi_weight(raw), cooc)


def cmd_features(args, out):
    model = load_model_dir(args.space)
    dataset = load_pairs(args.pairs, None if args.task == "none" else args.task)
    featurizer = PairFeaturizer(model, top_n=args.top_n).fit()
    feats = featurizer.extract(dataset.pairs)
    write_features(list(zip(dataset.pairs, feats)), args.out)
    n_oov = sum(f.oov1 or f.oov2 for f in feats)
    print(f"{len(feats)} pairs written to {args.out} ({n_oov} with an out-of-vocabulary word)", file=out)


def cmd_train(args, out):
    rows = read_features(args.features)
    if not rows:
        raise DataError(f"{args.features}: no training rows")
    X, y = to_arrays(rows)
    if any(label is None for label in y):
        raise DataError(f"{args.features}: training rows must be labelled")
    forest = RandomForest(n_estimators=args.trees, max_depth=args.depth, criterion=args.criterion,
                          max_features=args.max_features, min_split=args.min_split, seed=args.seed,
                          class_weight=args.class_weight, n_jobs=args.jobs)
    try:
        forest.fit(X, y)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    save_model(forest, args.out)
    print(f"trained {args.trees} trees on {len(y)} pairs, classes {', '.join(map(str, forest.classes_))}", file=out)


def cmd_predict(args, out):
    forest = load_model(args.model)
    rows = read_features(args.features)
    X, _ = to_arrays(rows)
    labels = forest.predict(X) if rows else []
    with atomic_write(args.out) as fh:
        for (pair, _), label in zip(rows, labels):
            fh.write(f"{pair.w1}\t{pair.w2}\t{label}\n")
    print(f"{len(rows)} predictions written to {args.out}", file=out)


def cmd_eval(args, out):
    gold = load_pairs(args.gold, args.task)
    pred = load_pairs(args.pred, args.task)
    if [(p.w1, p.w2) for p in pred.pairs] != [(p.w1, p.w2) for p in gold.pairs]:
        raise DataError("prediction and gold files must list the same pairs in the same order")
    if args.check_split:
        train = load_pairs(args.check_split, None)
        shared = shared_pairs(gold, train)
        if shared:
            listed = ", ".join(f"{a}/{b}" for a, b in shared[:20])
            warnings.warn(f"{len(shared)} pairs shared between train and test: {listed}")
    report = score(pred.labels, gold)
    out.write(report.render_text())
    if args.tsv:
        with atomic_write(args.tsv) as fh:
            fh.write(report.render_tsv())


def cmd_importances(args, out):
    forest = load_model(args.model)
    ranked = sorted(forest.importances().items(), key=lambda kv: (-kv[1], kv[0]))
    out.write(f"{'rank':<6}{'feature':<14}{'importance':>12}\n")
    for k, (name, value) in enumerate(ranked, start=1):
        out.write(f"{k:<6}{name:<14}{value:>12.4f}\n")


COMMANDS = {
    "build": cmd_build,
    "features": cmd_features,
    "train": cmd_train,
    "predict": cmd_predict,
    "eval": cmd_eval,
    "importances": cmd_importances,
}


def run_cli(argv=None, out=None, err=None) -> int:
    """Run one subcommand. Returns 0 on success, 1 on usage errors, 2 on data errors."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=err)
        return 1
    except SystemExit as exc:  # --help / --version
        return 0 if exc.code in (0, None) else 1
    if args.command is None:
        parser.print_usage(err)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            COMMANDS[args.command](args, out)
            code = 0
        except (DataError, OSError, UnicodeDecodeError) as exc:
            print(f"dsmrel {args.command}: error: {exc}", file=err)
            code = 2
    for w in caught:
        print(f"warning: {w.message}", file=err)
    return code


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
