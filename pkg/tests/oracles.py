"""Slow, obviously-correct reference implementations used by the tests."""

import itertools
from collections import Counter

import numpy as np


def pair_oracle(hist):
    """Count same-cluster and cross-cluster pairs by listing every pair."""
    labels = [i for i, c in enumerate(hist) for _ in range(c)]
    same = cross = 0
    for a, b in itertools.combinations(labels, 2):
        if a == b:
            same += 1
        else:
            cross += 1
    return same, cross


def set_partitions(items):
    """Every partition of ``items`` into non-empty unlabeled blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def compositions(n, k):
    """All ordered ways to write ``n`` as ``k`` non-negative parts."""
    for cut in itertools.combinations(range(n + k - 1), k - 1):
        yield tuple(b - a - 1 for a, b in zip((-1,) + cut, cut + (n + k - 1,)))


def margin_split(m):
    """Balanced k=2 labels from a sort: the top n/2 margins go to cluster 0."""
    margin = m[:, 0] - m[:, 1]
    order = np.argsort(-margin, kind="stable")
    labels = np.ones(len(m), dtype=np.int64)
    labels[order[: len(m) // 2]] = 0
    return labels, margin


def agrees_with_margin_split(m, labels):
    """True if ``labels`` is the margin split up to rows tied at the threshold."""
    expected, margin = margin_split(m)
    half = len(m) // 2
    if np.count_nonzero(labels == 0) != half:
        return False
    diff = labels != expected
    if not diff.any():
        return True
    thr = np.sort(margin)[::-1][half - 1]
    return bool(np.all(margin[diff] == thr))


def majority_oracle(train, labels, query, neighbors):
    """Unweighted vote among the most cosine-similar rows, full sort.

    Returns the voted labels and a mask of queries whose vote had a unique
    winner.
    """
    tn = train / np.linalg.norm(train, axis=1, keepdims=True)
    out, unique = [], []
    for q in query:
        sims = tn @ (q / np.linalg.norm(q))
        top = np.argsort(-sims, kind="stable")[:neighbors]
        votes = Counter(labels[top].tolist()).most_common()
        unique.append(len(votes) == 1 or votes[0][1] > votes[1][1])
        out.append(votes[0][0])
    return np.array(out), np.array(unique)
