"""
Deterministic synthetic interview corpora with planted, context-dependent salience.

Every candidate draws from its own random stream derived from ``(seed, candidate index)``,
so corpora can be generated in any order or in parallel with identical results.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ContractViolation
from .interview_models import Annotation, GeneratorSpec, Interview, Modality, QAPair, int_to_label

logger = logging.getLogger(__name__)

POSITIONS_STREAM = 2 ** 31 - 1
ANNOTATOR_POOL = 12


@dataclass(frozen=True)
class Position:
    job_type: int
    job_tokens: Tuple[int, ...]
    questions: Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class Planting:
    """What is planted in one answer: ``None``, or ``(motif index, reversed)``."""
    motif: Optional[int]
    reversed: bool = False


def _stream(spec: GeneratorSpec, key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([spec.seed, key]))


def build_positions(spec: GeneratorSpec) -> List[Position]:
    """Job titles (job-type token first) and question lists of every open position."""
    rng = _stream(spec, POSITIONS_STREAM)
    fillers = np.arange(spec.first_filler_token, spec.vocab_size)
    positions, titles = [], set()
    for p in range(spec.positions):
        job_type = p % spec.job_types
        for _ in range(1000):
            title = (job_type,) + tuple(int(t) for t in rng.choice(fillers, spec.job_title_length - 1))
            if title not in titles:
                break
        else:
            raise ContractViolation(f"cannot draw {spec.positions} distinct job titles from {fillers.size} filler words")
        titles.add(title)
        questions = []
        for q in range(spec.question_pool_size):
            length = int(rng.integers(spec.question_length[0], spec.question_length[1] + 1))
            words = rng.choice(fillers, length - 1)
            questions.append((spec.first_question_token + q,) + tuple(int(w) for w in words))
        positions.append(Position(job_type, title, tuple(questions)))
    return positions


def motif_tokens(spec: GeneratorSpec, motif: int) -> Tuple[int, int, int]:
    first = spec.first_motif_token + 3 * motif
    return first, first + 1, first + 2


def _motif_frames(spec: GeneratorSpec, modality: Modality, motif: int, reverse: bool) -> np.ndarray:
    """The three rows written over an answer when planting ``motif``."""
    order = [2, 1, 0] if reverse else [0, 1, 2]
    if modality == "text":
        tokens = motif_tokens(spec, motif)
        return np.array([[tokens[j]] for j in order], dtype=np.float64)
    if modality == "audio":
        rows = np.zeros((3, spec.audio_dim))
        rows[:, motif] = [spec.motif_level * (j + 1) for j in order]
        return rows
    rows = np.zeros((3, spec.video_dim))
    first = spec.video_continuous_dim + 3 * motif
    for step, j in enumerate(order):
        rows[step, first + j] = 1.0
    return rows


def _background(spec: GeneratorSpec, modality: Modality, length: int, rng: np.random.Generator) -> np.ndarray:
    if modality == "text":
        return rng.integers(spec.first_filler_token, spec.vocab_size, size=(length, 1)).astype(np.float64)
    if modality == "audio":
        return rng.uniform(-spec.noise, spec.noise, size=(length, spec.audio_dim))
    frames = np.zeros((length, spec.video_dim))
    frames[:, :spec.video_continuous_dim] = rng.uniform(-spec.noise, spec.noise, size=(length, spec.video_continuous_dim))
    noise_start = spec.video_dim - spec.video_noise_binary_dim
    frames[:, noise_start:] = rng.random((length, spec.video_noise_binary_dim)) < spec.binary_noise_rate
    return frames


def _write(frames: np.ndarray, rows: np.ndarray, start: int, modality: Modality) -> None:
    if modality == "audio":
        # levels replace the motif channel; other channels keep their noise
        channel = int(np.flatnonzero(rows.any(axis=0))[0])
        frames[start:start + 3, channel] = rows[:, channel]
    elif modality == "video":
        mask = rows.any(axis=0)
        frames[start:start + 3, mask] = rows[:, mask]
    else:
        frames[start:start + 3] = rows


def find_motif(spec: GeneratorSpec, modality: Modality, answer: np.ndarray, motif: int) -> Optional[int]:
    """First frame index at which ``motif`` occurs in its planted order, or ``None``."""
    length = answer.shape[0]
    for start in range(length - 2):
        window = answer[start:start + 3]
        if modality == "text":
            if tuple(int(t) for t in window[:, 0]) == motif_tokens(spec, motif):
                return start
        elif modality == "audio":
            levels = np.array([spec.motif_level * (j + 1) for j in range(3)])
            if np.all(np.abs(window[:, motif] - levels) < 1.0):
                return start
        else:
            first = spec.video_continuous_dim + 3 * motif
            if all(window[j, first + j] == 1.0 for j in range(3)):
                return start
    return None


def _job_type(spec: GeneratorSpec, interview: Interview) -> int:
    token = interview.job_tokens[0]
    if not 0 <= token < spec.job_types:
        raise ContractViolation(f"candidate {interview.candidate_id!r}: job title does not start with a job-type token")
    return token


def decisive_question(spec: GeneratorSpec, interview: Interview) -> int:
    return spec.decisive_index_by_type[_job_type(spec, interview)]


def oracle_label(spec: GeneratorSpec, interview: Interview) -> int:
    """The planted rule: hirable iff the decisive answer carries the job type's motif."""
    job_type = _job_type(spec, interview)
    pair = interview.qa[spec.decisive_index_by_type[job_type]]
    return int(find_motif(spec, pair.modality, pair.answer, spec.motif_of_type(job_type)) is not None)


def flip_job_type(spec: GeneratorSpec, interview: Interview, job_type: Optional[int] = None) -> Interview:
    """The same interview under another job type (next type by default), answers untouched."""
    current = _job_type(spec, interview)
    target = (current + 1) % spec.job_types if job_type is None else job_type
    tokens = [target] + list(interview.job_tokens[1:])
    return interview.model_copy(update={"job_tokens": tokens})


def _plan(spec: GeneratorSpec, y: int, n: int, decisive: int, job_type: int, rng: np.random.Generator) -> List[Planting]:
    own = spec.motif_of_type(job_type)
    plan = []
    for i in range(n):
        if i == decisive and y == 1:
            plan.append(Planting(own))
            continue
        if i != decisive and rng.random() < spec.distractor_rate:
            plan.append(Planting(int(rng.integers(spec.motif_count))))
            continue
        if rng.random() < spec.decoy_rate:
            motif = own if i == decisive else int(rng.integers(spec.motif_count))
            plan.append(Planting(motif, reversed=True))
        else:
            plan.append(Planting(None))
    return plan


def _annotations(y: int, rng: np.random.Generator) -> List[Annotation]:
    """Recruiter reactions whose majority vote (draws count as hirable) gives ``y``."""
    count = int(rng.integers(1, 5))
    if y == 1:
        positives = int(rng.integers((count + 1) // 2, count + 1))
    else:
        positives = int(rng.integers(0, (count - 1) // 2 + 1))
    annotators = rng.choice(ANNOTATOR_POOL, size=count, replace=False)
    votes = [True] * positives + [False] * (count - positives)
    rng.shuffle(votes)
    out = []
    for annotator, vote in zip(annotators, votes):
        if vote:
            liked = bool(rng.random() < 0.5)
            out.append(Annotation(annotator_id=f"r{annotator:02d}", liked=liked, shortlisted=not liked or bool(rng.random() < 0.3)))
        else:
            out.append(Annotation(annotator_id=f"r{annotator:02d}", disliked=True))
    return out


def generate_candidate(spec: GeneratorSpec, index: int, positions: Sequence[Position]) -> Dict[Modality, Interview]:
    """Every available modality record of candidate ``index``."""
    rng = _stream(spec, index)
    position = positions[int(rng.integers(len(positions)))]
    y = int(rng.random() < spec.hirable_rate)
    n = spec.questions_per_interview + int(rng.random() < spec.extra_question_rate)
    decisive = spec.decisive_index_by_type[position.job_type]
    plan = _plan(spec, y, n, decisive, position.job_type, rng)
    lengths = rng.integers(spec.min_answer_length, spec.max_answer_length + 1, size=n)
    starts = [int(rng.integers(0, length - 2)) for length in lengths]
    annotations = _annotations(y, rng)

    available = [m for m in spec.modalities if rng.random() >= spec.missing_rate]
    if not available:
        available = [spec.modalities[int(rng.integers(len(spec.modalities)))]]

    records = {}
    candidate_id = f"c{index:05d}"
    for modality in spec.modalities:
        stream = np.random.default_rng(np.random.SeedSequence([spec.seed, index, spec.modalities.index(modality) + 1]))
        pairs = []
        for i in range(n):
            frames = _background(spec, modality, int(lengths[i]), stream)
            if plan[i].motif is not None:
                rows = _motif_frames(spec, modality, plan[i].motif, plan[i].reversed)
                _write(frames, rows, starts[i], modality)
            pairs.append(QAPair(q_tokens=list(position.questions[i]), answer=frames, modality=modality))
        if modality in available:
            records[modality] = Interview(candidate_id=candidate_id, job_tokens=list(position.job_tokens),
                                          qa=pairs, label=int_to_label(y), annotations=annotations)
    return records


def generate_corpus(spec: GeneratorSpec) -> List[Interview]:
    """
    Generates every candidate of ``spec``, one record per candidate and modality.

    Records are ordered by candidate, then by the order of ``spec.modalities``.
    """
    positions = build_positions(spec)
    corpus: List[Interview] = []
    for index in range(spec.candidates):
        records = generate_candidate(spec, index, positions)
        corpus.extend(records[m] for m in spec.modalities if m in records)
    hirable = sum(r.y for r in corpus if r.modality == corpus[0].modality)
    logger.info(f"Generated {spec.candidates} candidates ({len(corpus)} records) over {spec.positions} positions, "
                f"{hirable} hirable in the {corpus[0].modality} modality")
    return corpus
