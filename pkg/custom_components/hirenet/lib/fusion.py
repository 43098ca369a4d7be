"""
Multimodal fusion of frozen monomodal models.

Early fusion concatenates the interview representations ``v`` of every modality and
classifies them with one logistic classifier. Late fusion averages the scores of the
monomodal models. A candidate may lack some modalities: early fusion imputes the
training mean ``v`` of a missing modality, late fusion averages the scores available.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..baselines.linear import LogisticModel, train_linear_classifier
from ..errors import ContractViolation, DegenerateInputError
from ..interview_data.interview_models import Label
from .hirenet import label_for

logger = logging.getLogger(__name__)

Vectors = Mapping[str, Optional[np.ndarray]]


@dataclass
class FusionModel:
    """
    Attributes:
        modalities: Order in which representations are concatenated.
        means: Training mean representation of every modality, used for missing ones.
        classifier: Logistic classifier over the concatenation.
    """
    modalities: List[str]
    means: Dict[str, np.ndarray]
    classifier: LogisticModel

    @property
    def input_dim(self) -> int:
        return int(sum(self.means[m].shape[0] for m in self.modalities))

    def concatenate(self, vectors: Vectors) -> np.ndarray:
        present = [m for m in self.modalities if vectors.get(m) is not None]
        if not present:
            raise DegenerateInputError("early fusion needs at least one modality")
        parts = []
        for modality in self.modalities:
            v = vectors.get(modality)
            if v is None:
                parts.append(self.means[modality])
                continue
            v = np.asarray(v, dtype=np.float64).reshape(-1)
            if v.shape != self.means[modality].shape:
                raise ContractViolation(
                    f"{modality} representation has shape {v.shape}, expected {self.means[modality].shape}")
            parts.append(v)
        return np.concatenate(parts)


def early_fusion(vectors: Vectors, model: FusionModel) -> float:
    """Score of the logistic classifier on the concatenated representations."""
    return float(model.classifier.predict_proba(model.concatenate(vectors))[0])


def training_means(rows: Sequence[Vectors], modalities: Sequence[str]) -> Dict[str, np.ndarray]:
    means = {}
    for modality in modalities:
        available = [np.asarray(r[modality], dtype=np.float64) for r in rows if r.get(modality) is not None]
        if not available:
            raise DegenerateInputError(f"no training candidate has the {modality} modality")
        means[modality] = np.mean(available, axis=0)
    return means


def fit_early_fusion(rows: Sequence[Vectors], labels: Sequence[int], modalities: Sequence[str],
                     l2: float = 1e-3) -> FusionModel:
    """
    Fits the early-fusion classifier on the representations of training candidates.

    Args:
        rows: Per candidate, the representation of each modality (``None`` when missing).
        labels: Per candidate, 1 for hirable.
        modalities: Modalities to fuse, in concatenation order.
        l2: Regularization strength of the classifier.
    """
    means = training_means(rows, modalities)
    imputed = sum(1 for r in rows for m in modalities if r.get(m) is None)
    if imputed:
        logger.warning(f"Imputed {imputed} missing representations with the training mean")
    model = FusionModel(list(modalities), means, LogisticModel(np.zeros(0), 0.0))
    x = np.stack([model.concatenate(r) for r in rows])
    model.classifier = train_linear_classifier(x, np.asarray(labels), l2=l2, standardize=True)
    return model


def late_fusion(scores: Union[Mapping[str, Optional[float]], Sequence[Optional[float]]],
                threshold: float = 0.5) -> Tuple[float, Label]:
    """Mean of the available scores, with its thresholded label."""
    values = scores.values() if isinstance(scores, Mapping) else scores
    available = [float(s) for s in values if s is not None]
    if not available:
        raise DegenerateInputError("late fusion needs at least one score")
    score = float(np.mean(available))
    return score, label_for(score, threshold)
