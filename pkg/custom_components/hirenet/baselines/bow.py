"""
Bag of * Words: a k-means codebook over low-level frames and per-answer tf-idf vectors.

Text answers skip the codebook: their word ids already are the words.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import ContractViolation, DegenerateInputError, NumericError

logger = logging.getLogger(__name__)

DEFAULT_K = 64


@dataclass(frozen=True)
class Codebook:
    """
    Attributes:
        centroids: ``(k, feature_dim)`` cluster centres.
        inertia_history: Sum of squared distances to the assigned centroid after every iteration.
    """
    centroids: np.ndarray
    inertia_history: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.centroids.ndim != 2 or self.centroids.shape[0] < 1:
            raise ContractViolation(f"a codebook needs at least one centroid; got shape {self.centroids.shape}")
        if not np.all(np.isfinite(self.centroids)):
            raise NumericError("codebook centroids are not finite")

    @property
    def k(self) -> int:
        return int(self.centroids.shape[0])

    def assign(self, frames: np.ndarray) -> np.ndarray:
        """Nearest centroid of every frame; ties go to the lowest index."""
        frames = np.atleast_2d(np.asarray(frames, dtype=np.float64))
        if frames.shape[1] != self.centroids.shape[1]:
            raise ContractViolation(f"frames {frames.shape} do not match centroids {self.centroids.shape}")
        return np.argmin(cdist(frames, self.centroids, "sqeuclidean"), axis=1)


def _inertia(frames: np.ndarray, centroids: np.ndarray, assignment: np.ndarray) -> float:
    return float(((frames - centroids[assignment]) ** 2).sum())


def kmeans_fit(frames: np.ndarray, k: int = DEFAULT_K, seed: int = 0, max_iterations: int = 100) -> Codebook:
    """
    Lloyd's algorithm from ``k`` distinct frames drawn with ``seed``.

    Iterates until the assignment no longer changes or ``max_iterations``. A centroid left
    without frames moves to the frame farthest from its current centroid.

    Raises:
        ContractViolation: ``k`` exceeds the number of frames.
        NumericError: The inertia increased, which Lloyd's iterations cannot do.
    """
    frames = np.atleast_2d(np.asarray(frames, dtype=np.float64))
    if k < 1:
        raise ContractViolation(f"k must be >= 1; got {k}")
    if k > frames.shape[0]:
        raise ContractViolation(f"cannot fit {k} centroids on {frames.shape[0]} frames")

    rng = np.random.default_rng(seed)
    distinct = np.unique(frames, axis=0)
    if distinct.shape[0] >= k:
        centroids = distinct[np.sort(rng.choice(distinct.shape[0], size=k, replace=False))].copy()
    else:
        centroids = frames[rng.choice(frames.shape[0], size=k, replace=False)].copy()

    assignment = np.argmin(cdist(frames, centroids, "sqeuclidean"), axis=1)
    history = [_inertia(frames, centroids, assignment)]
    for iteration in range(max_iterations):
        for j in range(k):
            members = frames[assignment == j]
            if members.shape[0]:
                centroids[j] = members.mean(axis=0)
        for j in range(k):
            if not np.any(assignment == j):
                farthest = int(np.argmax(((frames - centroids[assignment]) ** 2).sum(axis=1)))
                logger.warning(f"k-means cluster {j} is empty at iteration {iteration}; reseeding it to frame {farthest}")
                centroids[j] = frames[farthest]
                assignment[farthest] = j
        updated = np.argmin(cdist(frames, centroids, "sqeuclidean"), axis=1)
        inertia = _inertia(frames, centroids, updated)
        logger.debug(f"k-means iteration {iteration}: inertia {inertia:.6g}")
        if inertia > history[-1] * (1 + 1e-12) + 1e-12:
            raise NumericError(f"k-means inertia increased from {history[-1]} to {inertia} at iteration {iteration}")
        history.append(inertia)
        if np.array_equal(updated, assignment):
            break
        assignment = updated
    return Codebook(centroids, tuple(history))


def document_frequencies(documents: Sequence[np.ndarray], k: int) -> np.ndarray:
    """Number of documents (word-id arrays) in which each of the ``k`` words occurs."""
    df = np.zeros(k, dtype=np.int64)
    for words in documents:
        df[np.unique(np.asarray(words, dtype=np.int64))] += 1
    return df


def inverse_document_frequency(df: np.ndarray, documents: int) -> np.ndarray:
    """``ln((1 + N) / (1 + df)) + 1``."""
    return np.log((1.0 + documents) / (1.0 + np.asarray(df, dtype=np.float64))) + 1.0


def tfidf(words: np.ndarray, idf: np.ndarray) -> np.ndarray:
    words = np.asarray(words, dtype=np.int64).reshape(-1)
    if words.size == 0:
        raise DegenerateInputError("cannot encode an empty answer")
    if words.min() < 0 or words.max() >= idf.shape[0]:
        raise ContractViolation(f"word ids must lie in [0, {idf.shape[0]})")
    tf = np.bincount(words, minlength=idf.shape[0]) / words.size
    return tf * idf


def bow_encode(answer: np.ndarray, codebook: Codebook, doc_freqs: np.ndarray, documents: int) -> np.ndarray:
    """
    tf-idf vector of an answer's frames over the codebook words.

    Args:
        answer: ``(frames, feature_dim)`` matrix.
        codebook: Fitted codebook.
        doc_freqs: Per word, the number of training answers it occurs in.
        documents: Number of training answers ``N``.
    """
    answer = np.atleast_2d(np.asarray(answer, dtype=np.float64))
    if answer.shape[0] == 0:
        raise DegenerateInputError("cannot encode an empty answer")
    return tfidf(codebook.assign(answer), inverse_document_frequency(doc_freqs, documents))


@dataclass(frozen=True)
class BowVocabulary:
    """Codebook (``None`` for word ids) with the document frequencies of the training answers."""
    k: int
    doc_freqs: np.ndarray
    documents: int
    codebook: Optional[Codebook] = None

    def words(self, answer: np.ndarray) -> np.ndarray:
        if self.codebook is None:
            return np.asarray(answer, dtype=np.float64)[:, 0].astype(np.int64)
        return self.codebook.assign(answer)

    def encode(self, answer: np.ndarray) -> np.ndarray:
        return tfidf(self.words(answer), inverse_document_frequency(self.doc_freqs, self.documents))


def fit_vocabulary(answers: List[np.ndarray], k: int = DEFAULT_K, seed: int = 0, text_vocab: int = 0,
                   max_frames: int = 20000) -> BowVocabulary:
    """
    Fits the words of the training answers: k-means over their frames, or word ids when
    ``text_vocab`` gives a vocabulary size.

    At most ``max_frames`` frames, drawn with ``seed``, are clustered.
    """
    if not answers:
        raise DegenerateInputError("cannot fit a vocabulary without answers")
    if text_vocab:
        vocabulary = BowVocabulary(text_vocab, np.zeros(text_vocab, dtype=np.int64), len(answers))
    else:
        frames = np.vstack(answers)
        if frames.shape[0] > max_frames:
            rng = np.random.default_rng(seed)
            frames = frames[np.sort(rng.choice(frames.shape[0], size=max_frames, replace=False))]
        codebook = kmeans_fit(frames, k=k, seed=seed)
        vocabulary = BowVocabulary(codebook.k, np.zeros(codebook.k, dtype=np.int64), len(answers), codebook)
    df = document_frequencies([vocabulary.words(a) for a in answers], vocabulary.k)
    return BowVocabulary(vocabulary.k, df, len(answers), vocabulary.codebook)
