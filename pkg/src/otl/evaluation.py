"""Cross-entropy losses over score matrices and a weighted kNN evaluator."""

from dataclasses import dataclass

import numpy as np

from .matrix_core import as_scores

__all__ = [
    "KnnConfig",
    "softmax_cross_entropy",
    "lct_loss",
    "weighted_knn_predict",
]


def _per_row_ce(scores, targets):
    m = as_scores(scores)
    y = np.asarray(targets, dtype=np.float64)
    if y.shape != m.shape:
        raise ValueError(
            f"label matrix shape {y.shape} does not match scores {m.shape}")
    top = np.argmax(m, axis=1)
    rowmax = m[np.arange(m.shape[0]), top]
    gap = rowmax[:, None] - m              # >= 0, exactly 0 at the max
    e = np.exp(-gap)
    e[np.arange(m.shape[0]), top] = 0.0
    # log-sum-exp minus the max, via log1p so tiny tails keep full precision
    lse_tail = np.log1p(e.sum(axis=1))
    return (y * (gap + lse_tail[:, None])).sum(axis=1)


def softmax_cross_entropy(scores, onehot):
    """Mean over rows of ``-sum_i y_i * log softmax(scores)_i``."""
    return float(np.mean(_per_row_ce(scores, onehot)))


def _as_onehot(labels, k):
    y = np.asarray(labels)
    if y.ndim == 2:
        return y.astype(np.float64)
    out = np.zeros((y.size, k))
    out[np.arange(y.size), y.astype(np.int64)] = 1.0
    return out


def lct_loss(outputs, labels):
    """Sum of cross-entropies over every ordered pair of views.

    ``outputs[b]`` is scored against the pseudo-labels of view ``a`` for all
    ``a, b`` in ``range(g)``, diagonal included.

    Parameters
    ----------
    outputs : sequence of g score matrices, each (n, k)
    labels : sequence of g label vectors (n,) or one-hot matrices (n, k)
    """
    outputs = [as_scores(o) for o in outputs]
    if not outputs:
        raise ValueError("need at least one view")
    onehots = [_as_onehot(y, outputs[0].shape[1]) for y in labels]
    if len(outputs) != len(onehots):
        raise ValueError("need one label set per view")
    shape = outputs[0].shape
    if any(o.shape != shape for o in outputs) or any(
            y.shape != shape for y in onehots):
        raise ValueError("all views must share the same (n, k) shape")
    return float(sum(softmax_cross_entropy(o, y)
                     for y in onehots for o in outputs))


@dataclass(frozen=True)
class KnnConfig:
    neighbors: int = 50
    sigma: float = 0.1

    def __post_init__(self):
        if self.neighbors < 1:
            raise ValueError("neighbors must be at least 1")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


def _normalize(x, what):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"{what} must be 2-D")
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    if np.any(norms == 0):
        row = int(np.flatnonzero(norms[:, 0] == 0)[0])
        raise ValueError(f"{what} row {row} has zero norm")
    return x / norms


def _top_neighbors(train, query, neighbors):
    sims = query @ train.T
    kk = min(neighbors, train.shape[0])
    if kk < train.shape[0]:
        idx = np.argpartition(-sims, kk - 1, axis=1)[:, :kk]
    else:
        idx = np.broadcast_to(np.arange(kk), (sims.shape[0], kk))
    return idx, np.take_along_axis(sims, idx, axis=1)


def _vote(neighbor_labels, weights, n_classes):
    q = neighbor_labels.shape[0]
    scores = np.zeros((q, n_classes))
    np.add.at(scores, (np.arange(q)[:, None], neighbor_labels), weights)
    return np.argmax(scores, axis=1)


def weighted_knn_predict(train_features, train_labels, query_features,
                         config=None, n_classes=None, batch_size=1024):
    """Cosine-similarity kNN with ``exp(sim / sigma)`` vote weights.

    Features are L2-normalized; each query takes its ``config.neighbors``
    most similar training rows and predicts the class with the largest
    summed weight (lowest class index on ties).
    """
    config = config or KnnConfig()
    train = _normalize(train_features, "train_features")
    query = _normalize(query_features, "query_features")
    labels = np.asarray(train_labels, dtype=np.int64)
    if labels.shape != (train.shape[0],):
        raise ValueError("train_labels must have one entry per training row")
    if n_classes is None:
        n_classes = int(labels.max()) + 1
    out = np.empty(query.shape[0], dtype=np.int64)
    for a in range(0, query.shape[0], batch_size):
        idx, sims = _top_neighbors(train, query[a:a + batch_size],
                                   config.neighbors)
        out[a:a + batch_size] = _vote(labels[idx], np.exp(sims / config.sigma),
                                      n_classes)
    return out

