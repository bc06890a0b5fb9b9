"""
Nearest-template matching over binary encodings.
"""

from dataclasses import dataclass
from typing import Dict, Sequence, Union

import numpy as np

from .template_store import RecognizerError, TemplateStore, TemplateStoreError

try:
    from ..imaging import EncodedImage
    from ..utils import get_logger
except ImportError:
    from imaging import EncodedImage
    from utils import get_logger

logger = get_logger(__name__)

METRICS = ("hamming", "cosine")
MATCH_STRATEGIES = ("template", "class_mean")

Bits = Union[EncodedImage, np.ndarray, Sequence[int]]


def _bits(value: Bits) -> np.ndarray:
    if isinstance(value, EncodedImage):
        return value.bits.ravel()
    return np.asarray(value).astype(np.uint8).ravel()


def _check_same_size(a: np.ndarray, b: np.ndarray):
    if a.size != b.size:
        raise RecognizerError(f"cannot compare encodings of {a.size} and {b.size} bits")


def similarity(a: Bits, b: Bits) -> float:
    """Fraction of positions where both encodings agree"""
    if isinstance(a, EncodedImage) and isinstance(b, EncodedImage) and a.dims != b.dims:
        raise RecognizerError(f"cannot compare encodings of dims {a.dims} and {b.dims}")
    x, y = _bits(a), _bits(b)
    _check_same_size(x, y)
    if x.size == 0:
        return 1.0
    return int(np.count_nonzero(x == y)) / x.size


def cosine_similarity(a: Bits, b: Bits) -> float:
    """Cosine of the bit vectors; two all-zero vectors count as identical"""
    x = _bits(a).astype(np.float64)
    y = _bits(b).astype(np.float64)
    _check_same_size(x, y)
    return float(_cosine_rows(x[None, :], y)[0])


def _cosine_rows(matrix: np.ndarray, query: np.ndarray) -> np.ndarray:
    row_norms = np.sqrt((matrix * matrix).sum(axis=1))
    query_norm = float(np.sqrt(query @ query))
    denom = row_norms * query_norm
    scores = np.zeros(matrix.shape[0], dtype=np.float64)
    nonzero = denom > 0
    scores[nonzero] = (matrix[nonzero] @ query) / denom[nonzero]
    if query_norm == 0:
        scores[row_norms == 0] = 1.0
    return np.clip(scores, 0.0, 1.0)


@dataclass(frozen=True)
class MatchResult:
    """Predicted label, its score and the best score of every class"""

    label: str
    score: float
    class_scores: Dict[str, float]


def _template_scores(store: TemplateStore, query: np.ndarray, metric: str) -> np.ndarray:
    matrix, owners = store.bit_matrix()
    if metric == "hamming":
        matches = (matrix == query).sum(axis=1)
        scores = matches / query.size
    else:
        scores = _cosine_rows(matrix.astype(np.float64), query.astype(np.float64))

    best = np.full(len(store.labels), -np.inf)
    np.maximum.at(best, owners, scores)
    return best


def _class_mean_scores(store: TemplateStore, query: np.ndarray, metric: str) -> np.ndarray:
    matrix, owners = store.bit_matrix()
    counts = np.bincount(owners, minlength=len(store.labels)).astype(np.float64)
    means = np.zeros((len(store.labels), matrix.shape[1]), dtype=np.float64)
    np.add.at(means, owners, matrix.astype(np.float64))
    means /= counts[:, None]

    q = query.astype(np.float64)
    if metric == "hamming":
        return 1.0 - np.abs(means - q).mean(axis=1)
    return _cosine_rows(means, q)


def classify(query: Bits, store: TemplateStore, metric: str = "hamming",
             match: str = "template") -> MatchResult:
    """Best-scoring class; equal scores go to the smallest label"""
    if metric not in METRICS:
        raise RecognizerError(f"unknown metric '{metric}' (expected one of {', '.join(METRICS)})")
    if match not in MATCH_STRATEGIES:
        raise RecognizerError(f"unknown match strategy '{match}' "
                              f"(expected one of {', '.join(MATCH_STRATEGIES)})")
    if len(store) == 0:
        raise TemplateStoreError("cannot classify against an empty store")
    if isinstance(query, EncodedImage) and query.dims != store.dims:
        raise RecognizerError(f"query dims {query.dims} differ from store dims {store.dims}")

    q = _bits(query)
    _check_same_size(q, np.empty(store.dims[0] * store.dims[1]))

    if match == "template":
        scores = _template_scores(store, q, metric)
    else:
        scores = _class_mean_scores(store, q, metric)

    labels = store.labels
    top = scores.max()
    winner = min(label for label, score in zip(labels, scores) if score == top)
    class_scores = {label: float(score) for label, score in zip(labels, scores)}
    return MatchResult(winner, float(top), class_scores)
