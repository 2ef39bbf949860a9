"""Score matrices, winner-takes-all assignment and histogram statistics.

A score matrix is a dense ``(n_samples, n_clusters)`` float64 array; a row is
one sample's output vector.  Cluster assignment is the row-wise argmax of the
matrix after subtracting a shared translation vector, with the lowest index
winning ties.  The translation is never applied to the matrix in place: the
original scores stay untouched and only the k-vector moves.
"""

import numpy as np

__all__ = [
    "as_scores",
    "argmax_assign",
    "histogram",
    "uniform_target",
    "check_target",
    "frequency_indicator",
    "indicator_std",
    "max_std",
    "min_achievable_std",
    "nearest_integer_histogram",
    "score_range",
    "CachedAssigner",
]

_CHUNK_ROWS = 4096


def as_scores(values):
    """Validate and return ``values`` as a C-contiguous float64 score matrix.

    Raises
    ------
    ValueError
        If the input is not 2-D, has fewer than one row or two columns, or
        contains NaN/Inf.
    """
    m = np.ascontiguousarray(values, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"score matrix must be 2-D, got shape {m.shape}")
    n, k = m.shape
    if n < 1:
        raise ValueError("score matrix needs at least one row")
    if k < 2:
        raise ValueError(f"score matrix needs at least 2 columns, got {k}")
    if not np.all(np.isfinite(m)):
        raise ValueError("score matrix contains non-finite entries")
    return m


def _as_translation(translation, k):
    if translation is None:
        return np.zeros(k)
    t = np.asarray(translation, dtype=np.float64)
    if t.shape != (k,):
        raise ValueError(
            f"translation must have shape ({k},), got {t.shape}")
    return t


def _argmax_rows(scores, translation, out):
    # np.argmax returns the first maximal index, i.e. the lowest-index rule.
    for a in range(0, scores.shape[0], _CHUNK_ROWS):
        np.argmax(scores[a:a + _CHUNK_ROWS] - translation, axis=1,
                  out=out[a:a + _CHUNK_ROWS])
    return out


def argmax_assign(scores, translation=None):
    """Assign every row to the column maximizing ``scores[s] - translation``.

    Parameters
    ----------
    scores : array-like, shape (n, k)
    translation : array-like, shape (k,), optional
        Net translation subtracted from every row. Defaults to zeros.

    Returns
    -------
    labels : ndarray of int64, shape (n,)
        Ties go to the smallest column index.
    """
    m = as_scores(scores)
    t = _as_translation(translation, m.shape[1])
    return _argmax_rows(m, t, np.empty(m.shape[0], dtype=np.int64))


def histogram(labels, k):
    """Count how many labels fall into each of ``k`` clusters."""
    lab = np.asarray(labels)
    if lab.ndim != 1:
        raise ValueError("labels must be 1-D")
    if lab.size and not np.issubdtype(lab.dtype, np.integer):
        raise ValueError(f"labels must be integers, got dtype {lab.dtype}")
    if lab.size and (lab.min() < 0 or lab.max() >= k):
        bad = lab[(lab < 0) | (lab >= k)][0]
        raise ValueError(f"label {bad} out of range [0, {k})")
    return np.bincount(lab.astype(np.int64), minlength=k)


def uniform_target(n, k):
    return np.full(k, n / k)


def check_target(target, n, k):
    """Validate a target distribution: ``k`` non-negative reals summing to ``n``."""
    t = np.asarray(target, dtype=np.float64)
    if t.shape != (k,):
        raise ValueError(f"target must have shape ({k},), got {t.shape}")
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise ValueError("target entries must be finite and non-negative")
    if abs(t.sum() - n) > 1e-6:
        raise ValueError(f"target sums to {t.sum()!r}, expected {n}")
    return t


def frequency_indicator(counts, target):
    """Per-cluster excess ``counts - target``; sums to zero."""
    c = np.asarray(counts, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if c.shape != t.shape:
        raise ValueError(
            f"histogram has {c.shape[0]} clusters but target has {t.shape[0]}")
    if abs(c.sum() - t.sum()) > 1e-6:
        raise ValueError(
            f"histogram total {c.sum()} does not match target total {t.sum()}")
    return c - t


def indicator_std(deltas):
    """Population standard deviation ``sqrt(mean(deltas**2))`` of a zero-sum indicator."""
    d = np.asarray(deltas, dtype=np.float64)
    return float(np.sqrt(np.mean(d * d)))


def max_std(n, k):
    """Indicator std when all ``n`` samples sit in a single cluster."""
    if k < 2:
        raise ValueError("k must be at least 2")
    return n * np.sqrt(k - 1) / k


def nearest_integer_histogram(target):
    """Integer histogram closest to ``target`` in squared error.

    Floors every target and hands the leftover units to the clusters with the
    largest fractional parts (lowest index first on equal remainders).
    """
    t = np.asarray(target, dtype=np.float64)
    base = np.floor(t + 1e-9)
    n = int(round(t.sum()))
    short = n - int(base.sum())
    frac = t - base
    h = base.astype(np.int64)
    if short >= 0:
        order = np.lexsort((np.arange(t.size), -frac))
        h[order[:short]] += 1
    else:
        order = np.lexsort((np.arange(t.size), frac))
        h[order[:-short]] -= 1
    return h


def min_achievable_std(n, k, target=None):
    """Smallest indicator std any integer histogram of ``n`` samples can reach.

    For the uniform target this is the std of ``n % k`` clusters at
    ``ceil(n/k)`` and the rest at ``floor(n/k)``; zero iff ``k`` divides ``n``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if target is None:
        q, r = divmod(n, k)
        h = np.array([q + 1] * r + [q] * (k - r), dtype=np.float64)
        return indicator_std(h - n / k)
    t = np.asarray(target, dtype=np.float64)
    return indicator_std(nearest_integer_histogram(t) - t)


def score_range(scores):
    """Spread ``max - min`` over every entry of the matrix."""
    m = np.asarray(scores, dtype=np.float64)
    return float(m.max() - m.min())


class CachedAssigner:
    """Exact ``argmax_assign`` for one fixed matrix under many translations.

    Keeps, for every row, the ``top`` best columns under a reference
    translation plus the value of the next-best column.  For a new translation
    ``T`` no column outside the cached set can gain more than
    ``max(T_ref - T)``, so a row whose cached winner beats that bound is
    settled without touching the other columns.  Rows that fail the check
    are rescanned in full, and the cache is rebuilt once too many rows fail.
    Labels are identical to :func:`argmax_assign` bit for bit.
    """

    def __init__(self, scores, top=8, rebuild_fraction=0.05):
        self.scores = as_scores(scores)
        n, k = self.scores.shape
        self.top = top
        self.rebuild_fraction = rebuild_fraction
        self.enabled = k > top + 1
        self.rebuilds = 0
        self._ref = None
        self._abs_max = float(np.abs(self.scores).max())

    def _build(self, t):
        m = self.scores
        n, k = m.shape
        top = self.top
        idx = np.empty((n, top), dtype=np.int64)
        bound = np.empty(n)
        for a in range(0, n, _CHUNK_ROWS):
            d = m[a:a + _CHUNK_ROWS] - t
            part = np.argpartition(d, k - top - 1, axis=1)
            # sorted column order makes the first maximal position the lowest index
            idx[a:a + _CHUNK_ROWS] = np.sort(part[:, k - top:], axis=1)
            bound[a:a + _CHUNK_ROWS] = np.take_along_axis(
                d, part[:, k - top - 1:k - top], axis=1)[:, 0]
        self._idx = idx
        self._vals = np.take_along_axis(m, idx, axis=1)
        self._bound = bound
        self._ref = t.copy()
        self.rebuilds += 1

    def __call__(self, translation):
        t = _as_translation(translation, self.scores.shape[1])
        n = self.scores.shape[0]
        if not self.enabled:
            return _argmax_rows(self.scores, t, np.empty(n, dtype=np.int64))
        if self._ref is None:
            self._build(t)
        return self._assign(t, may_rebuild=True)

    def _assign(self, t, may_rebuild):
        n = self.scores.shape[0]
        shift = float(np.max(self._ref - t))
        # a few ulps of slack for rounding in the three subtractions involved
        scale = self._abs_max + np.abs(t).max() + np.abs(self._ref).max()
        slack = 8 * np.finfo(np.float64).eps * scale
        cand = self._vals - t[self._idx]
        pos = np.argmax(cand, axis=1)[:, None]
        best = np.take_along_axis(cand, pos, axis=1)[:, 0]
        labels = np.take_along_axis(self._idx, pos, axis=1)[:, 0]
        unsure = np.flatnonzero(~(best > self._bound + shift + slack))
        if may_rebuild and unsure.size > self.rebuild_fraction * n:
            self._build(t)
            return self._assign(t, may_rebuild=False)
        if unsure.size:
            sub = np.empty(unsure.size, dtype=np.int64)
            for a in range(0, unsure.size, _CHUNK_ROWS):
                rows = unsure[a:a + _CHUNK_ROWS]
                np.argmax(self.scores[rows] - t, axis=1,
                          out=sub[a:a + _CHUNK_ROWS])
            labels[unsure] = sub
        return labels
