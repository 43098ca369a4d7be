"""
Suffix padding of interviews into masked sequences.

Interviews of a mini-batch have different numbers of questions and answer lengths.
Collation pads every answer, question and job title at the end and records a
contiguous prefix mask for each of them, plus a mask over question slots. Padded
content never reaches the arithmetic of the model.
"""
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from ..autodiff import Tensor
from ..interview_data.interview_models import Interview, Modality
from .encoders import SequenceBatchItem


class TokenSequence(NamedTuple):
    tokens: np.ndarray
    mask: np.ndarray

    @property
    def true_length(self) -> int:
        return int(self.mask.sum())

    @classmethod
    def pad(cls, tokens: Sequence[int], length: int) -> "TokenSequence":
        ids = np.zeros(length, dtype=np.int64)
        ids[:len(tokens)] = tokens
        return cls(ids, np.arange(length) < len(tokens))


@dataclass(frozen=True, eq=False)
class PaddedInterview:
    """
    An interview whose sequences are padded to common lengths.

    Attributes:
        candidate_id: Identifier of the candidate.
        y: Label, 1 for hirable.
        modality: Modality of the answers.
        job: Job-title tokens and mask.
        questions: Per question slot, tokens and mask.
        answers: Per question slot, the answer rows and mask. Text answers hold word ids.
        qa_mask: Which question slots hold an actual question/answer pair.
    """
    candidate_id: str
    y: int
    modality: Modality
    job: TokenSequence
    questions: List[TokenSequence]
    answers: List[SequenceBatchItem]
    qa_mask: np.ndarray

    @property
    def n(self) -> int:
        return int(self.qa_mask.sum())

    @property
    def answer_lengths(self) -> List[int]:
        return [self.answers[i].true_length for i in range(self.n)]


def pad_interview(
        interview: Interview,
        answer_length: Optional[int] = None,
        question_length: Optional[int] = None,
        slots: Optional[int] = None,
        job_length: Optional[int] = None,
) -> PaddedInterview:
    """Pads ``interview`` to the given lengths (its own lengths by default)."""
    n = len(interview.qa)
    slots = max(slots or 0, n)
    answer_length = max([answer_length or 0] + [pair.length for pair in interview.qa])
    question_length = max([question_length or 0] + [len(pair.q_tokens) for pair in interview.qa])
    job_length = max(job_length or 0, len(interview.job_tokens))
    width = interview.qa[0].answer.shape[1] if interview.qa else 1

    questions, answers = [], []
    for i in range(slots):
        if i < n:
            pair = interview.qa[i]
            questions.append(TokenSequence.pad(pair.q_tokens, question_length))
            answers.append(SequenceBatchItem.from_array(pair.answer, pad_to=answer_length))
        else:
            questions.append(TokenSequence.pad([], question_length))
            answers.append(SequenceBatchItem(Tensor.constant(np.zeros((answer_length, width))),
                                             np.zeros(answer_length, dtype=bool)))
    return PaddedInterview(
        candidate_id=interview.candidate_id,
        y=interview.y,
        modality=interview.modality,
        job=TokenSequence.pad(interview.job_tokens, job_length),
        questions=questions,
        answers=answers,
        qa_mask=np.arange(slots) < n,
    )


def collate_batch(interviews: Sequence[Interview]) -> List[PaddedInterview]:
    """Pads every interview of a mini-batch to the batch-wide maxima."""
    if not interviews:
        return []
    slots = max(len(r.qa) for r in interviews)
    answer_length = max(pair.length for r in interviews for pair in r.qa)
    question_length = max(len(pair.q_tokens) for r in interviews for pair in r.qa)
    job_length = max(len(r.job_tokens) for r in interviews)
    return [pad_interview(r, answer_length, question_length, slots, job_length) for r in interviews]
