"""
Non-sequential baselines end to end: answer vectors, answer-wise logistic training and
candidate scores averaged over answers.
"""
import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..baselines.bow import DEFAULT_K, BowVocabulary, fit_vocabulary
from ..baselines.linear import LogisticModel, train_linear_classifier
from ..baselines.statistics import FeatureKind, aggregate_stats
from ..baselines.votes import VoteResults, candidate_score_from_answers, vote_baselines
from ..errors import ContractViolation, DegenerateInputError
from ..interview_data.interview_models import Interview
from .evaluation import CandidateScore, Evaluation
from .metrics import compute_metrics

logger = logging.getLogger(__name__)

AnswerEncoder = Callable[[np.ndarray], np.ndarray]


def infer_feature_kinds(records: Sequence[Interview]) -> List[FeatureKind]:
    """A column is binary when every training frame holds 0 or 1 in it."""
    frames = np.vstack([pair.answer for record in records for pair in record.qa])
    return ["binary" if np.all((column == 0) | (column == 1)) else "continuous" for column in frames.T]


def answer_matrix(records: Sequence[Interview], encode: AnswerEncoder) -> Tuple[np.ndarray, np.ndarray]:
    """One row per answer, labelled with its candidate's label."""
    rows, labels = [], []
    for record in records:
        for pair in record.qa:
            rows.append(encode(pair.answer))
            labels.append(record.y)
    return np.stack(rows), np.asarray(labels)


def score_candidates(model: LogisticModel, records: Sequence[Interview], encode: AnswerEncoder,
                     threshold: float = 0.5) -> List[CandidateScore]:
    scores = []
    for record in records:
        answer_scores = model.predict_proba(np.stack([encode(pair.answer) for pair in record.qa]))
        score, prediction = candidate_score_from_answers(answer_scores.tolist(), threshold)
        scores.append(CandidateScore(candidate_id=record.candidate_id, label=record.label, score=score,
                                     prediction=prediction))
    return scores


def run_answerwise_baseline(name: str, train: Sequence[Interview], test: Sequence[Interview], encode: AnswerEncoder,
                            l2: float = 1e-3, split: str = "test") -> Tuple[Evaluation, LogisticModel]:
    """Trains a standardized logistic classifier on answers and scores the test candidates."""
    if not train or not test:
        raise DegenerateInputError(f"the {name} baseline needs training and {split} interviews")
    x, y = answer_matrix(train, encode)
    model = train_linear_classifier(x, y, l2=l2, standardize=True)
    scores = score_candidates(model, test, encode)
    metrics = compute_metrics([s.prediction for s in scores], [s.label for s in scores])
    logger.info(f"{name} baseline on {split} ({test[0].modality}): F1 {metrics.f1:.4f}")
    return Evaluation(model=name, modality=test[0].modality, split=split, metrics=metrics, scores=scores), model


def run_stats_baseline(train: Sequence[Interview], test: Sequence[Interview],
                       feature_kinds: Optional[Sequence[FeatureKind]] = None, l2: float = 1e-3,
                       split: str = "test") -> Tuple[Evaluation, LogisticModel]:
    """Statistical aggregation of audio or video frames per answer."""
    if train and train[0].modality == "text":
        raise ContractViolation("the statistics baseline applies to audio and video answers; use bow for text")
    kinds = list(feature_kinds) if feature_kinds is not None else infer_feature_kinds(train)
    return run_answerwise_baseline("stats", train, test, lambda answer: aggregate_stats(answer, kinds).as_array(),
                                   l2, split)


def run_bow_baseline(train: Sequence[Interview], test: Sequence[Interview], k: int = DEFAULT_K, seed: int = 0,
                     vocab_size: int = 0, l2: float = 1e-3,
                     split: str = "test") -> Tuple[Evaluation, LogisticModel, BowVocabulary]:
    """
    Bag of * Words: tf-idf over codebook words (audio, video) or word ids (text, with
    ``vocab_size`` words) fitted on the training answers.
    """
    if not train:
        raise DegenerateInputError("the bow baseline needs training interviews")
    text = train[0].modality == "text"
    if text and vocab_size < 1:
        vocab_size = max(r.max_token() for r in list(train) + list(test)) + 1
    vocabulary = fit_vocabulary([pair.answer for r in train for pair in r.qa], k=k, seed=seed,
                                text_vocab=vocab_size if text else 0)
    evaluation, model = run_answerwise_baseline("bow", train, test, vocabulary.encode, l2, split)
    return evaluation, model, vocabulary


def one_record_per_candidate(records: Sequence[Interview]) -> List[Interview]:
    seen, out = set(), []
    for record in records:
        if record.candidate_id not in seen:
            seen.add(record.candidate_id)
            out.append(record)
    return out


def run_vote_baselines(train: Sequence[Interview], test: Sequence[Interview], draws: int = 1000,
                       seed: int = 0) -> VoteResults:
    return vote_baselines(one_record_per_candidate(train), one_record_per_candidate(test), draws, seed)
