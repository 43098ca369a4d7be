"""Reference scores that ignore the interview content: averaged answer scores, random and majority votes."""
import logging
from collections import Counter, defaultdict
from typing import Dict, List, Sequence, Tuple

import numpy as np
import pydantic

from ..errors import DegenerateInputError
from ..harness.metrics import Metrics, compute_metrics
from ..interview_data.interview_models import HIRABLE, NOT_HIRABLE, Interview, Label

logger = logging.getLogger(__name__)

Position = Tuple[int, ...]


def candidate_score_from_answers(answer_scores: Sequence[float], threshold: float = 0.5) -> Tuple[float, Label]:
    """Mean of the answer-wise scores of a candidate, with its thresholded label."""
    if len(answer_scores) == 0:
        raise DegenerateInputError("a candidate needs at least one answer score")
    score = float(np.mean(answer_scores))
    return score, HIRABLE if score >= threshold else NOT_HIRABLE


class VoteResults(pydantic.BaseModel):
    """
    Attributes:
        random: Mean metrics of the random draws.
        random_f1_std: Standard deviation of the F1 over the draws.
        majority: Metrics of the position-wise majority vote.
        draws: Number of random draws.
        fallbacks: Test candidates whose position never occurs in training.
    """
    random: Metrics
    random_f1_std: float
    majority: Metrics
    draws: int
    fallbacks: int


def position_majorities(train: Sequence[Interview]) -> Dict[Position, int]:
    """Most frequent training label per position; draws count as hirable."""
    counts: Dict[Position, Counter] = defaultdict(Counter)
    for record in train:
        counts[record.position][record.y] += 1
    return {position: int(c[1] >= c[0]) for position, c in counts.items()}


def _mean_metrics(all_metrics: List[Metrics]) -> Metrics:
    def mean(name: str) -> float:
        return float(np.mean([getattr(m, name) for m in all_metrics]))

    return Metrics(precision=mean("precision"), recall=mean("recall"), f1=mean("f1"))


def vote_baselines(train: Sequence[Interview], test: Sequence[Interview], draws: int = 1000, seed: int = 0) -> VoteResults:
    """
    Random vote respecting the training label balance, averaged over ``draws``, and
    position-wise majority vote.

    Test candidates of a position absent from training get the global training majority.
    """
    if not test:
        raise DegenerateInputError("vote baselines need a non-empty test set")
    if not train:
        raise DegenerateInputError("vote baselines need a non-empty training set")
    labels = [record.y for record in test]
    rate = float(np.mean([record.y for record in train]))

    rng = np.random.default_rng(seed)
    random_metrics = [compute_metrics((rng.random(len(test)) < rate).astype(int).tolist(), labels) for _ in range(draws)]

    majorities = position_majorities(train)
    overall = int(rate >= 0.5)
    predictions, fallbacks = [], 0
    for record in test:
        if record.position not in majorities:
            fallbacks += 1
        predictions.append(majorities.get(record.position, overall))
    if fallbacks:
        logger.warning(f"{fallbacks} test candidates hold positions unseen in training; they get the global majority")

    results = VoteResults(random=_mean_metrics(random_metrics),
                          random_f1_std=float(np.std([m.f1 for m in random_metrics])),
                          majority=compute_metrics(predictions, labels),
                          draws=draws,
                          fallbacks=fallbacks)
    logger.info(f"Random vote F1 {results.random.f1:.3f}, majority vote F1 {results.majority.f1:.3f}")
    return results
