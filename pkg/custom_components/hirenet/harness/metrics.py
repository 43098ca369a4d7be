from typing import Sequence, Union

import numpy as np
import pydantic
from sklearn.metrics import confusion_matrix, precision_recall_fscore_support

from ..errors import ContractViolation, DegenerateInputError
from ..interview_data.interview_models import HIRABLE, NOT_HIRABLE

LabelLike = Union[int, bool, str]


class Metrics(pydantic.BaseModel):
    """
    Precision, recall and F1 of the hirable class, with the confusion counts.

    Attributes:
        precision: ``TP / (TP + FP)``, 0 when nothing is predicted hirable.
        recall: ``TP / (TP + FN)``, 0 when nothing is hirable.
        f1: ``2 P R / (P + R)``, 0 when ``P + R = 0``.
    """
    model_config = pydantic.ConfigDict(frozen=True)

    precision: float = pydantic.Field(ge=0, le=1)
    recall: float = pydantic.Field(ge=0, le=1)
    f1: float = pydantic.Field(ge=0, le=1)
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def accuracy(self) -> float:
        total = self.tp + self.fp + self.fn + self.tn
        return (self.tp + self.tn) / total if total else 0.0


def as_binary(values: Sequence[LabelLike]) -> np.ndarray:
    """Maps ``hirable`` / ``not_hirable`` (or 1 / 0) to 1 / 0."""
    out = np.empty(len(values), dtype=np.int64)
    for i, value in enumerate(values):
        if value == HIRABLE or (not isinstance(value, str) and value == 1):
            out[i] = 1
        elif value == NOT_HIRABLE or (not isinstance(value, str) and value == 0):
            out[i] = 0
        else:
            raise ContractViolation(f"label {value!r} is neither hirable nor not_hirable")
    return out


def compute_metrics(predictions: Sequence[LabelLike], labels: Sequence[LabelLike]) -> Metrics:
    if len(predictions) != len(labels):
        raise ContractViolation(f"{len(predictions)} predictions for {len(labels)} labels")
    if len(labels) == 0:
        raise DegenerateInputError("cannot compute metrics without predictions")
    p, y = as_binary(predictions), as_binary(labels)
    precision, recall, f1, _ = precision_recall_fscore_support(y, p, average="binary", pos_label=1, zero_division=0)
    tn, fp, fn, tp = (int(count) for count in confusion_matrix(y, p, labels=[0, 1]).ravel())
    return Metrics(precision=float(precision), recall=float(recall), f1=float(f1), tp=tp, fp=fp, fn=fn, tn=tn)
