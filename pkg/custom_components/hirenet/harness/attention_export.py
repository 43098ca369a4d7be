"""
Attention reports for visualization.

Raw attention weights shrink with the length of what they are spread over, so reports
use relative values instead: ``p_w = α_t · l`` for a low-level step of an answer of
length ``l``, ``p_q = α_i · n`` for question ``i`` of ``n``, and ``√p_q · p_w`` to rank
low-level steps across the whole interview.
"""
import logging
from collections import defaultdict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pydantic

from ..errors import DegenerateInputError, UnsupportedVariantError
from ..interview_data.generator import decisive_question, find_motif
from ..interview_data.interview_models import GeneratorSpec, Interview, Label
from ..lib.hirenet import Prediction
from ..lib.parameters import HireNetParams
from .evaluation import predict_records

logger = logging.getLogger(__name__)


class StepAttention(pydantic.BaseModel):
    """
    Attributes:
        question_index: Index of the answer.
        step: Index of the frame (or word) in the answer.
        alpha: Low-level attention weight.
        p_w: Relative low-level attention.
        combined: ``√p_q · p_w``.
        token: Word id, for text answers.
    """
    question_index: int
    step: int
    alpha: float
    p_w: float
    combined: float
    token: Optional[int] = None


class QuestionAttention(pydantic.BaseModel):
    question_index: int
    alpha: float
    p_q: float
    length: int


class AttentionReport(pydantic.BaseModel):
    candidate_id: str
    variant: str
    modality: str
    score: float
    label: Label
    job_tokens: List[int]
    questions: List[QuestionAttention]
    steps: List[StepAttention]


def _require_attention(params: HireNetParams) -> None:
    if not params.config.has_attention:
        raise UnsupportedVariantError(
            f"attention export needs an attention model (hirenet or hn_satt); got {params.config.variant}")


def report_from(interview: Interview, prediction: Prediction, variant: str) -> AttentionReport:
    trace = prediction.trace
    p_q = trace.relative_question
    questions = [QuestionAttention(question_index=i, alpha=float(trace.question_alphas[i]), p_q=float(p_q[i]),
                                   length=len(trace.frame_alphas[i]))
                 for i in range(len(trace.frame_alphas))]
    steps = []
    for i, (alphas, p_w, combined) in enumerate(zip(trace.frame_alphas, trace.relative_word, trace.combined)):
        tokens = interview.qa[i].tokens if interview.modality == "text" else None
        for t in range(len(alphas)):
            steps.append(StepAttention(question_index=i, step=t, alpha=float(alphas[t]), p_w=float(p_w[t]),
                                       combined=float(combined[t]),
                                       token=int(tokens[t]) if tokens is not None else None))
    return AttentionReport(candidate_id=interview.candidate_id, variant=variant, modality=interview.modality,
                           score=prediction.score, label=prediction.label, job_tokens=list(interview.job_tokens),
                           questions=questions, steps=steps)


def export_attention(params: HireNetParams, interview: Interview) -> AttentionReport:
    """
    Attention of one candidate, question by question and step by step.

    Raises:
        UnsupportedVariantError: The model averages instead of attending.
    """
    _require_attention(params)
    prediction = predict_records(params, params.config, [interview])[0]
    return report_from(interview, prediction, params.config.variant)


def find_candidate(records: Sequence[Interview], candidate_id: str, modality: str) -> Interview:
    for record in records:
        if record.candidate_id == candidate_id and record.modality == modality:
            return record
    raise DegenerateInputError(f"no {modality} interview for candidate {candidate_id!r}")


class SalientItem(pydantic.BaseModel):
    """A word (text) or a step position (audio, video) and its mean ``√p_q · p_w``."""
    item: int
    mean_combined: float
    occurrences: int


class PositionAttention(pydantic.BaseModel):
    job_tokens: List[int]
    candidates: int
    mean_question_alpha: List[float]


class AttentionSummary(pydantic.BaseModel):
    variant: str
    modality: str
    candidates: int
    top_items: List[SalientItem]
    positions: List[PositionAttention]


def summarize_attention(params: HireNetParams, records: Sequence[Interview], top_k: int = 20,
                        workers: int = 1) -> AttentionSummary:
    """
    Aggregates attention over many candidates.

    Returns the ``top_k`` items with the highest mean ``√p_q · p_w`` and, per position,
    the mean question attention ``α_i`` by question index.
    """
    _require_attention(params)
    config = params.config
    records = [r for r in records if r.modality == config.modality]
    if not records:
        raise DegenerateInputError(f"no {config.modality} interview to summarize")
    predictions = predict_records(params, config, records, workers)

    sums: Dict[int, float] = defaultdict(float)
    counts: Dict[int, int] = defaultdict(int)
    by_position: Dict[Tuple[int, ...], List[np.ndarray]] = defaultdict(list)
    for record, prediction in zip(records, predictions):
        for i, combined in enumerate(prediction.trace.combined):
            items = record.qa[i].tokens if config.modality == "text" else np.arange(len(combined))
            for item, value in zip(items, combined):
                sums[int(item)] += float(value)
                counts[int(item)] += 1
        by_position[record.position].append(prediction.trace.question_alphas)

    ranked = sorted(sums, key=lambda item: (-sums[item] / counts[item], item))[:top_k]
    top = [SalientItem(item=item, mean_combined=sums[item] / counts[item], occurrences=counts[item]) for item in ranked]
    positions = []
    for position in sorted(by_position):
        alphas = by_position[position]
        slots = max(len(a) for a in alphas)
        means = [float(np.mean([a[i] for a in alphas if len(a) > i])) for i in range(slots)]
        positions.append(PositionAttention(job_tokens=list(position), candidates=len(alphas), mean_question_alpha=means))
    return AttentionSummary(variant=config.variant, modality=config.modality, candidates=len(records),
                            top_items=top, positions=positions)


class LocalizationResult(pydantic.BaseModel):
    """
    Attributes:
        considered: Correctly classified hirable candidates.
        question_hits: Among them, those whose most attended question is the decisive one.
        hits: Those whose most attended question is decisive and whose three highest
            ``p_w`` steps in it overlap the planted motif.
        fraction: ``hits / considered`` (0 when nothing is considered).
    """
    considered: int
    question_hits: int
    hits: int
    fraction: float


def salience_localization(params: HireNetParams, records: Sequence[Interview], spec: GeneratorSpec,
                          workers: int = 1) -> LocalizationResult:
    """Checks that attention points at the planted evidence of correctly classified hirable candidates."""
    _require_attention(params)
    config = params.config
    records = [r for r in records if r.modality == config.modality]
    predictions = predict_records(params, config, records, workers)
    considered = question_hits = hits = 0
    for record, prediction in zip(records, predictions):
        if record.y != 1 or prediction.label != record.label:
            continue
        considered += 1
        decisive = decisive_question(spec, record)
        if int(np.argmax(prediction.trace.question_alphas)) != decisive:
            continue
        question_hits += 1
        start = find_motif(spec, record.modality, record.qa[decisive].answer,
                           spec.motif_of_type(record.job_tokens[0]))
        top3 = set(np.argsort(-prediction.trace.relative_word[decisive], kind="stable")[:3].tolist())
        if start is not None and top3 & {start, start + 1, start + 2}:
            hits += 1
    fraction = hits / considered if considered else 0.0
    logger.info(f"Salience localized for {hits} of {considered} correctly classified hirable candidates")
    return LocalizationResult(considered=considered, question_hits=question_hits, hits=hits, fraction=fraction)
