"""Brute-force reference implementation, independent of the dsmrel package.

Plain Python only: O(n^2) per-sentence counting, dense loops for every
measure. Used by the tests as an oracle and, run as a script, to produce the
golden feature file for the toy corpus:

    python tests/oracle.py tests/data/toy_corpus.txt tests/data/toy_pairs.tsv \
        --window 2 --min-count 1 --top-n 2,5 > tests/data/toy_features.golden.tsv
"""
import argparse
import math
import sys

NAMES = [
    "freq1", "freq2", "diff_freq", "cooc", "entr1", "entr2", "diff_entr",
    "cos", "lin", "weeds_prec", "cos_weeds", "clarke_de", "inv_cl",
    "apsyn_100", "apsyn_1000", "apant_100", "apant_1000", "same_pos",
]


def read_corpus(path):
    sentences = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            sentence = []
            for tok in line.split():
                i = tok.rindex("|")
                sentence.append((tok[:i], tok[i + 1:]))
            sentences.append(sentence)
    return sentences


def vocabulary(sentences, min_count=1):
    counts, pos = {}, {}
    for s in sentences:
        for lemma, tag in s:
            counts[lemma] = counts.get(lemma, 0) + 1
            pos.setdefault(lemma, {})
            pos[lemma][tag] = pos[lemma].get(tag, 0) + 1
    kept = [w for w in counts if counts[w] >= min_count]
    kept.sort(key=lambda w: (-counts[w], w))
    return {w: i for i, w in enumerate(kept)}, counts, pos


def naive_counts(sentences, ids, window):
    """(target, context) -> count by comparing every position pair."""
    table = {}
    for s in sentences:
        for i in range(len(s)):
            for j in range(len(s)):
                if i == j or abs(i - j) > window:
                    continue
                a, b = s[i][0], s[j][0]
                if a in ids and b in ids:
                    key = (ids[a], ids[b])
                    table[key] = table.get(key, 0) + 1
    return table


def ppmi_table(table):
    rows, cols, total = {}, {}, 0
    for (r, c), n in table.items():
        rows[r] = rows.get(r, 0) + n
        cols[c] = cols.get(c, 0) + n
        total += n
    out = {}
    for (r, c), n in table.items():
        w = math.log2(n * total / (rows[r] * cols[c]))
        if w > 0:
            out[(r, c)] = w
    return out


def entropy(table, word):
    row = [n for (r, _), n in table.items() if r == word]
    total = sum(row)
    h = 0.0
    for n in row:
        p = n / total
        h -= p * math.log2(p)
    return max(0.0, h)


def dense(vec, dim):
    return [vec.get(i, 0.0) for i in range(dim)]


def cosine(u, v):
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    if nu == 0 or nv == 0:
        return 0.0
    return min(1.0, dot / (nu * nv))


def lin(u, v):
    num = sum(a + b for a, b in zip(u, v) if a > 0 and b > 0)
    den = sum(u) + sum(v)
    return num / den if den else 0.0


def weeds_prec(u, v):
    den = sum(u)
    return sum(a for a, b in zip(u, v) if a > 0 and b > 0) / den if den else 0.0


def clarke_de(u, v):
    den = sum(u)
    return sum(min(a, b) for a, b in zip(u, v) if a > 0 and b > 0) / den if den else 0.0


def cos_weeds(u, v):
    return math.sqrt(cosine(u, v) * weeds_prec(u, v))


def inv_cl(u, v):
    return math.sqrt(clarke_de(u, v) * max(0.0, 1.0 - clarke_de(v, u)))


def top(vec, n):
    """Context ids of the n largest weights, ties by lower id."""
    return [c for c, _ in sorted(vec.items(), key=lambda kv: (-kv[1], kv[0]))[:n]]


def apsyn(top1, top2):
    total = 0.0
    for r1, f in enumerate(top1, start=1):
        for r2, g in enumerate(top2, start=1):
            if f == g:
                total += 1.0 / ((r1 + r2) / 2.0)
    return total


def apant(x):
    return 1.0 / (1.0 + x)


def features(w1, w2, ids, counts, pos, table, weights, top_n):
    dim = len(ids)
    oov1, oov2 = w1 not in ids, w2 not in ids

    def vec(w):
        if w not in ids:
            return {}
        return {c: x for (r, c), x in weights.items() if r == ids[w]}

    def main_pos(w):
        if w not in ids:
            return None
        return sorted(pos[w].items(), key=lambda kv: (-kv[1], kv[0]))[0][0]

    f1 = counts[w1] if not oov1 else 0
    f2 = counts[w2] if not oov2 else 0
    e1 = entropy(table, ids[w1]) if not oov1 else 0.0
    e2 = entropy(table, ids[w2]) if not oov2 else 0.0
    cooc = 0 if oov1 or oov2 else table.get((ids[w1], ids[w2]), 0)
    a, b = vec(w1), vec(w2)
    u, v = dense(a, dim), dense(b, dim)
    small, large = top_n
    s_small = apsyn(top(a, small), top(b, small))
    s_large = apsyn(top(a, large), top(b, large))
    p1, p2 = main_pos(w1), main_pos(w2)
    values = [f1, f2, f1 - f2, cooc, e1, e2, e1 - e2,
              cosine(u, v), lin(u, v), weeds_prec(u, v), cos_weeds(u, v),
              clarke_de(u, v), inv_cl(u, v), s_small, s_large, apant(s_small), apant(s_large),
              1.0 if (p1 is not None and p1 == p2) else 0.0]
    return values, oov1, oov2


def node_impurity(labels, criterion="gini"):
    n = len(labels)
    props = [labels.count(c) / n for c in set(labels)]
    if criterion == "gini":
        return 1.0 - sum(p * p for p in props)
    return -sum(p * math.log2(p) for p in props)


def exhaustive_split(X, y, criterion="gini"):
    """Every feature, every midpoint; returns (feature, threshold, gain) or None."""
    parent = node_impurity(y, criterion)
    best = None
    for f in range(len(X[0])):
        values = sorted(set(row[f] for row in X))
        for lo, hi in zip(values, values[1:]):
            thr = (lo + hi) / 2
            left = [c for row, c in zip(X, y) if row[f] <= thr]
            right = [c for row, c in zip(X, y) if row[f] > thr]
            gain = parent - len(left) / len(y) * node_impurity(left, criterion) \
                - len(right) / len(y) * node_impurity(right, criterion)
            if best is None or gain > best[2] + 1e-12:
                best = (f, thr, gain)
    if best is None or best[2] <= 1e-12:
        return None
    return best


def fmt(x):
    s = "%.6f" % x
    return "0.000000" if s == "-0.000000" else s


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("corpus")
    ap.add_argument("pairs")
    ap.add_argument("--window", type=int, default=2)
    ap.add_argument("--min-count", type=int, default=1)
    ap.add_argument("--top-n", default="100,1000")
    args = ap.parse_args(argv)
    top_n = tuple(int(x) for x in args.top_n.split(","))
    sentences = read_corpus(args.corpus)
    ids, counts, pos = vocabulary(sentences, args.min_count)
    table = naive_counts(sentences, ids, args.window)
    weights = ppmi_table(table)
    out = sys.stdout
    out.write("\t".join(["w1", "w2", "label"] + NAMES + ["oov1", "oov2"]) + "\n")
    with open(args.pairs, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            w1, w2, label = line.rstrip("\n").split("\t")
            values, o1, o2 = features(w1, w2, ids, counts, pos, table, weights, top_n)
            out.write("\t".join([w1, w2, label] + [fmt(x) for x in values]
                                + [str(int(o1)), str(int(o2))]) + "\n")


if __name__ == "__main__":
    main()
