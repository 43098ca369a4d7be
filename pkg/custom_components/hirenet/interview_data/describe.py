from typing import Dict, List, Optional, Sequence

import numpy as np
import pydantic

from ..errors import DegenerateInputError
from .interview_models import Interview, Modality


class CorpusDescription(pydantic.BaseModel):
    """
    Descriptive statistics of the records of one modality in one split.

    Attributes:
        modality: The modality described.
        split: The split described (``all`` for the whole corpus).
        candidates: Number of candidates.
        questions_per_interview: Mean number of questions per interview.
        mean_answer_length: Mean number of frames (or words) per answer.
        mean_interview_length: Mean number of frames (or words) per interview.
        hirable_proportion: Share of hirable candidates.
    """
    modality: Modality
    split: str
    candidates: int
    questions_per_interview: float
    mean_answer_length: float
    mean_interview_length: float
    hirable_proportion: float


def describe_records(records: Sequence[Interview], split: str = "all") -> CorpusDescription:
    if not records:
        raise DegenerateInputError(f"cannot describe an empty set of records (split {split!r})")
    answer_lengths = [pair.length for record in records for pair in record.qa]
    return CorpusDescription(
        modality=records[0].modality,
        split=split,
        candidates=len(records),
        questions_per_interview=float(np.mean([record.n for record in records])),
        mean_answer_length=float(np.mean(answer_lengths)),
        mean_interview_length=float(sum(answer_lengths)) / len(records),
        hirable_proportion=float(np.mean([record.y for record in records])),
    )


def describe_corpus(corpus: Sequence[Interview],
                    splits: Optional[Dict[str, Sequence[Interview]]] = None) -> List[CorpusDescription]:
    """
    One description per modality of the corpus, then one per modality and split when
    ``splits`` is given.
    """
    parts: Dict[str, Sequence[Interview]] = {"all": corpus, **(splits or {})}
    rows = []
    for split, records in parts.items():
        modalities = sorted({record.modality for record in records})
        for modality in modalities:
            rows.append(describe_records([r for r in records if r.modality == modality], split))
    return rows
