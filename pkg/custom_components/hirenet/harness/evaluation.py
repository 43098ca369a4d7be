import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Mapping, Sequence

import numpy as np
import pydantic

from ..errors import CheckpointError, ContractViolation, DegenerateInputError
from ..interview_data.interview_models import Interview, Label
from ..lib.config import HireNetConfig
from ..lib.hirenet import Prediction, forward_interview
from ..lib.parameters import HireNetParams
from .metrics import Metrics, compute_metrics

logger = logging.getLogger(__name__)


class CandidateScore(pydantic.BaseModel):
    candidate_id: str
    label: Label
    score: float
    prediction: Label


class Evaluation(pydantic.BaseModel):
    """
    Metrics of a model on one split, with the score of every candidate.

    Attributes:
        model: Variant (or baseline) name.
        modality: Modality evaluated, or ``fusion``.
        split: Split evaluated.
        metrics: Precision, recall and F1 of the hirable class.
        scores: Per-candidate score and thresholded prediction.
    """
    model: str
    modality: str
    split: str
    metrics: Metrics
    scores: List[CandidateScore]


def predict_records(params: Mapping[str, np.ndarray], config: HireNetConfig, records: Sequence[Interview],
                    workers: int = 1) -> List[Prediction]:
    """
    Scores records with frozen parameters, optionally on a thread pool.

    A shape or vocabulary mismatch between the model and the records is reported as a
    [CheckpointError][hirenet.errors.CheckpointError].
    """
    if isinstance(params, HireNetParams) and not params.frozen:
        params = params.snapshot()

    def predict(record: Interview) -> Prediction:
        try:
            return forward_interview(params, config, record)
        except ContractViolation as e:
            if isinstance(e, DegenerateInputError):
                raise
            raise CheckpointError(f"model does not match candidate {record.candidate_id!r}: {e}")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(predict, records))
    return [predict(record) for record in records]


def evaluate(params: HireNetParams, records: Sequence[Interview], split: str = "test", workers: int = 1) -> Evaluation:
    """
    Frozen-parameter inference on the records of the model's modality.

    Raises:
        DegenerateInputError: No record of the model's modality.
        CheckpointError: The model does not fit the records.
    """
    config = params.config
    records = [r for r in records if r.modality == config.modality]
    if not records:
        raise DegenerateInputError(f"the {split} split has no {config.modality} interview to evaluate")
    predictions = predict_records(params, config, records, workers)
    scores = [CandidateScore(candidate_id=r.candidate_id, label=r.label, score=p.score, prediction=p.label)
              for r, p in zip(records, predictions)]
    metrics = compute_metrics([s.prediction for s in scores], [s.label for s in scores])
    logger.info(f"{config.variant} on {split} ({config.modality}): P {metrics.precision:.4f} "
                f"R {metrics.recall:.4f} F1 {metrics.f1:.4f}")
    return Evaluation(model=config.variant, modality=config.modality, split=split, metrics=metrics, scores=scores)


def scores_by_candidate(evaluation: Evaluation) -> Dict[str, float]:
    return {s.candidate_id: s.score for s in evaluation.scores}
