"""
Fusion of frozen monomodal HireNet models over a split.

Every model only sees the candidates that have its modality; per candidate, the
available representations (early fusion) or scores (late fusion) are combined.
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ContractViolation, DegenerateInputError
from ..interview_data.interview_models import Interview, Label, int_to_label
from ..interview_data.protocol import candidate_labels
from ..lib.fusion import FusionModel, early_fusion, fit_early_fusion, late_fusion
from ..lib.hirenet import label_for
from ..lib.parameters import HireNetParams
from .evaluation import CandidateScore, Evaluation, predict_records
from .metrics import compute_metrics

logger = logging.getLogger(__name__)

FUSION_MODES = ("early", "late")

# candidate id -> modality -> (representation, score)
ModalOutputs = Dict[str, Dict[str, Tuple[np.ndarray, float]]]


def check_models(models: Sequence[HireNetParams]) -> List[str]:
    """Modalities of the models, which must be distinct."""
    modalities = [m.config.modality for m in models]
    if not modalities:
        raise DegenerateInputError("fusion needs at least one model")
    if len(set(modalities)) != len(modalities):
        raise ContractViolation(f"fusion needs one model per modality, got {modalities}")
    return modalities


def modal_outputs(models: Sequence[HireNetParams], records: Sequence[Interview], workers: int = 1) -> ModalOutputs:
    outputs: ModalOutputs = {}
    for params in models:
        modality = params.config.modality
        selected = [r for r in records if r.modality == modality]
        for record, prediction in zip(selected, predict_records(params, params.config, selected, workers)):
            outputs.setdefault(record.candidate_id, {})[modality] = (prediction.representation, prediction.score)
        logger.debug(f"Scored {len(selected)} {modality} interviews for fusion")
    return outputs


def _representations(outputs: ModalOutputs, candidate_id: str, modalities: Sequence[str]) -> Dict[str, Optional[np.ndarray]]:
    available = outputs.get(candidate_id, {})
    return {m: available[m][0] if m in available else None for m in modalities}


def _evaluation(mode: str, split: str, ids: Sequence[str], labels: Dict[str, int],
                scored: Sequence[Tuple[float, Label]]) -> Evaluation:
    scores = [CandidateScore(candidate_id=c, label=int_to_label(labels[c]), score=s, prediction=p)
              for c, (s, p) in zip(ids, scored)]
    metrics = compute_metrics([s.prediction for s in scores], [s.label for s in scores])
    logger.info(f"{mode} fusion on {split}: P {metrics.precision:.4f} R {metrics.recall:.4f} F1 {metrics.f1:.4f}")
    return Evaluation(model=f"{mode}_fusion", modality="fusion", split=split, metrics=metrics, scores=scores)


def fit_fusion(models: Sequence[HireNetParams], train: Sequence[Interview], l2: float = 1e-3,
               workers: int = 1) -> FusionModel:
    """Fits the early-fusion classifier on the training representations of frozen models."""
    modalities = check_models(models)
    outputs = modal_outputs(models, train, workers)
    labels = candidate_labels(train)
    ids = [c for c in sorted(labels) if c in outputs]
    if not ids:
        raise DegenerateInputError("no training candidate has a modality the models read")
    rows = [_representations(outputs, c, modalities) for c in ids]
    return fit_early_fusion(rows, [labels[c] for c in ids], modalities, l2)


def run_fusion(mode: str, models: Sequence[HireNetParams], test: Sequence[Interview],
               fusion_model: Optional[FusionModel] = None, threshold: float = 0.5, split: str = "test",
               workers: int = 1) -> Evaluation:
    """
    Scores every candidate of ``test`` that at least one model can read.

    Raises:
        ContractViolation: Unknown mode, or early fusion without a fitted ``fusion_model``.
        DegenerateInputError: No candidate of ``test`` can be scored.
    """
    if mode not in FUSION_MODES:
        raise ContractViolation(f"fusion mode must be one of {FUSION_MODES}, got {mode!r}")
    if mode == "early" and fusion_model is None:
        raise ContractViolation("early fusion needs a fitted fusion model")
    modalities = check_models(models)
    outputs = modal_outputs(models, test, workers)
    labels = candidate_labels(test)
    ids = [c for c in sorted(labels) if c in outputs]
    if not ids:
        raise DegenerateInputError(f"no {split} candidate has a modality the models read")

    scored = []
    for candidate_id in ids:
        if mode == "early":
            score = early_fusion(_representations(outputs, candidate_id, modalities), fusion_model)
            scored.append((score, label_for(score, threshold)))
        else:
            available = outputs[candidate_id]
            scored.append(late_fusion({m: available[m][1] for m in available}, threshold))
    return _evaluation(mode, split, ids, labels, scored)
