"""Pair datasets, scoring for the two relation tasks, and report rendering."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import PairFormatError
from .features import WordPair

TASK_LABELS = {
    "task1": ("TRUE", "FALSE"),
    "task2": ("SYN", "ANT", "HYPER", "PART_OF", "RANDOM"),
}
POSITIVE_LABEL = "TRUE"
DISTRACTOR_LABEL = "RANDOM"


def check_task(task: str) -> tuple[str, ...]:
    try:
        return TASK_LABELS[task]
    except KeyError:
        raise ValueError(f"unknown task {task!r}; expected one of {sorted(TASK_LABELS)}") from None


@dataclass
class Dataset:
    task: str
    pairs: list[WordPair] = field(default_factory=list)

    def __len__(self):
        return len(self.pairs)

    @property
    def labels(self):
        return [p.label for p in self.pairs]


def load_pairs(path, task: str | None) -> Dataset:
    """Read ``w1<TAB>w2<TAB>label`` rows; ``task=None`` accepts unlabelled 2-column rows."""
    tags = check_task(task) if task is not None else None
    pairs, seen = [], {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            cells = line.split("\t")
            if tags is None and len(cells) == 2:
                cells.append(None)
            if len(cells) != 3 or not cells[0] or not cells[1]:
                raise PairFormatError(f"{path}:{lineno}: expected w1<TAB>w2<TAB>label")
            w1, w2, label = cells
            if label == "?":
                label = None
            if tags is not None and label not in tags:
                raise PairFormatError(f"{path}:{lineno}: label {label!r} is not a {task} tag")
            key = (w1, w2)
            if key in seen:
                warnings.warn(f"{path}:{lineno}: duplicate pair {w1}/{w2} (first on line {seen[key]})")
            else:
                seen[key] = lineno
            pairs.append(WordPair(w1, w2, label))
    return Dataset(task or "none", pairs)


def shared_pairs(a: Dataset, b: Dataset) -> list[tuple[str, str]]:
    """Pairs present in both datasets, in ``a``'s order."""
    other = {(p.w1, p.w2) for p in b.pairs}
    out = []
    for p in a.pairs:
        key = (p.w1, p.w2)
        if key in other and key not in out:
            out.append(key)
    return out


def _prf(tp, fp, fn):
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


@dataclass
class EvaluationReport:
    task: str
    labels: tuple
    confusion: np.ndarray
    per_class: dict = field(init=False)
    overall: tuple = field(init=False)
    macro: tuple = field(init=False)
    overall_all: tuple = field(init=False)
    macro_all: tuple = field(init=False)

    def __post_init__(self):
        cm = self.confusion
        self.per_class = {}
        for k, label in enumerate(self.labels):
            tp = cm[k, k]
            p, r, f = _prf(tp, cm[:, k].sum() - tp, cm[k, :].sum() - tp)
            self.per_class[label] = (p, r, f, int(cm[k, :].sum()))
        if self.task == "task1":
            relations = [POSITIVE_LABEL]
        else:
            relations = [lab for lab in self.labels if lab != DISTRACTOR_LABEL]
        self.overall = self._weighted(relations)
        self.macro = self._macro(relations)
        self.overall_all = self._weighted(list(self.labels))
        self.macro_all = self._macro(list(self.labels))

    def _weighted(self, labels):
        support = np.array([self.per_class[lab][3] for lab in labels], dtype=np.float64)
        if support.sum() == 0:
            return (0.0, 0.0, 0.0)
        m = np.array([self.per_class[lab][:3] for lab in labels])
        return tuple(float(x) for x in support @ m / support.sum())

    def _macro(self, labels):
        m = np.array([self.per_class[lab][:3] for lab in labels])
        return tuple(float(x) for x in m.mean(axis=0))

    @property
    def accuracy(self) -> float:
        n = self.confusion.sum()
        return float(np.trace(self.confusion) / n) if n else 0.0

    @property
    def n(self) -> int:
        return int(self.confusion.sum())

    def render_text(self) -> str:
        lines = [f"Task: {self.task}   pairs: {self.n}   accuracy: {self.accuracy:.3f}", ""]
        scope = "TRUE class" if self.task == "task1" else "relations, RANDOM excluded"
        lines.append(f"{'Average':<40}{'P':>8}{'R':>8}{'F':>8}")
        for name, vals in ((f"weighted ({scope})", self.overall),
                           (f"macro ({scope})", self.macro),
                           ("weighted (all classes)", self.overall_all),
                           ("macro (all classes)", self.macro_all)):
            lines.append(f"{name:<40}" + "".join(f"{v:>8.3f}" for v in vals))
        lines.append("")
        lines.append(f"{'Relation':<12}{'Precision':>10}{'Recall':>10}{'F-measure':>10}{'Support':>9}")
        for label in self.labels:
            p, r, f, s = self.per_class[label]
            lines.append(f"{label:<12}{p:>10.3f}{r:>10.3f}{f:>10.3f}{s:>9d}")
        lines.append("")
        lines.append("Confusion matrix (rows: gold, columns: predicted)")
        width = max(8, max(len(lab) for lab in self.labels) + 2,
                    len(str(int(self.confusion.max(initial=0)))) + 2)
        lines.append(" " * 12 + "".join(f"{lab:>{width}}" for lab in self.labels))
        for k, label in enumerate(self.labels):
            lines.append(f"{label:<12}" + "".join(f"{int(c):>{width}d}" for c in self.confusion[k]))
        return "\n".join(lines) + "\n"

    def render_tsv(self) -> str:
        """Long-format ``metric<TAB>scope<TAB>label<TAB>value`` table."""
        rows = [("metric", "scope", "label", "value")]
        for label in self.labels:
            p, r, f, s = self.per_class[label]
            rows += [("precision", "class", label, f"{p:.6f}"), ("recall", "class", label, f"{r:.6f}"),
                     ("f1", "class", label, f"{f:.6f}"), ("support", "class", label, str(s))]
        for scope, vals in (("weighted", self.overall), ("macro", self.macro),
                            ("weighted_all", self.overall_all), ("macro_all", self.macro_all)):
            for metric, v in zip(("precision", "recall", "f1"), vals):
                rows.append((metric, scope, "overall", f"{v:.6f}"))
        rows.append(("accuracy", "all", "overall", f"{self.accuracy:.6f}"))
        for i, gold in enumerate(self.labels):
            for j, pred in enumerate(self.labels):
                rows.append(("confusion", gold, pred, str(int(self.confusion[i, j]))))
        return "".join("\t".join(r) + "\n" for r in rows)


def confusion_matrix(predictions, gold, labels) -> np.ndarray:
    index = {lab: i for i, lab in enumerate(labels)}
    cm = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for p, g in zip(predictions, gold):
        if g not in index:
            raise ValueError(f"gold label {g!r} is not in {labels}")
        if p not in index:
            raise ValueError(f"predicted label {p!r} is not in {labels}")
        cm[index[g], index[p]] += 1
    return cm


def score(predictions, gold: Dataset | list, task: str | None = None) -> EvaluationReport:
    """Per-class and averaged P/R/F plus the confusion matrix (rows gold, columns predicted)."""
    if isinstance(gold, Dataset):
        task = task or gold.task
        gold_labels = gold.labels
    else:
        gold_labels = list(gold)
    labels = check_task(task)
    predictions = list(predictions)
    if len(predictions) != len(gold_labels):
        raise ValueError(f"{len(predictions)} predictions for {len(gold_labels)} gold pairs")
    return EvaluationReport(task, labels, confusion_matrix(predictions, gold_labels, labels))


def report_from_confusion(confusion, task: str = "task2") -> EvaluationReport:
    return EvaluationReport(task, check_task(task), np.asarray(confusion, dtype=np.int64))
