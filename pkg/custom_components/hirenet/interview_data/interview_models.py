from typing import List, Literal, Optional, Tuple

import numpy as np
import pydantic

Modality = Literal["text", "audio", "video"]
Label = Literal["hirable", "not_hirable"]

HIRABLE: Label = "hirable"
NOT_HIRABLE: Label = "not_hirable"


def label_to_int(label: Label) -> int:
    return 1 if label == HIRABLE else 0


def int_to_label(y: int) -> Label:
    return HIRABLE if y == 1 else NOT_HIRABLE


class Annotation(pydantic.BaseModel):
    """
    One recruiter's reaction to a candidate.

    Attributes:
        annotator_id: Identifier of the recruiter.
        liked: The recruiter liked the candidate.
        shortlisted: The recruiter shortlisted the candidate.
        disliked: The recruiter disliked the candidate.
    """
    annotator_id: str
    liked: bool = False
    shortlisted: bool = False
    disliked: bool = False

    @pydantic.model_validator(mode="after")
    def _at_least_one_reaction(self) -> "Annotation":
        if not (self.liked or self.shortlisted or self.disliked):
            raise ValueError(f"annotation by {self.annotator_id!r} sets none of liked/shortlisted/disliked")
        return self

    @property
    def votes_hirable(self) -> bool:
        return self.liked or self.shortlisted


class QAPair(pydantic.BaseModel):
    """
    A question and the candidate's answer to it.

    Attributes:
        q_tokens: Word ids of the question.
        answer: ``(length, feature_dim)`` low-level descriptors. Text answers hold one
            word id per row.
        modality: The stream the answer was extracted from.
    """
    model_config = pydantic.ConfigDict(arbitrary_types_allowed=True)

    q_tokens: List[int]
    answer: np.ndarray
    modality: Modality

    @pydantic.field_validator("q_tokens")
    @classmethod
    def _non_empty_question(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("question has no tokens")
        if min(value) < 0:
            raise ValueError(f"question token ids must be >= 0; got {min(value)}")
        return value

    @pydantic.field_validator("answer", mode="before")
    @classmethod
    def _as_matrix(cls, value) -> np.ndarray:
        try:
            array = np.asarray(value, dtype=np.float64)
        except (TypeError, ValueError):
            raise ValueError("answer must be a rectangular matrix of numbers")
        if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
            raise ValueError(f"answer must have at least one frame of at least one feature; got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise ValueError("answer contains non-finite values")
        return array

    @pydantic.model_validator(mode="after")
    def _text_answers_hold_ids(self) -> "QAPair":
        if self.modality == "text":
            ids = self.answer
            if ids.shape[1] != 1 or np.any(ids < 0) or np.any(ids != np.round(ids)):
                raise ValueError("text answers hold one non-negative integer word id per row")
        return self

    @pydantic.field_serializer("answer")
    def _answer_to_lists(self, value: np.ndarray) -> list:
        if self.modality == "text":
            return value.astype(np.int64).tolist()
        return value.tolist()

    @property
    def length(self) -> int:
        return int(self.answer.shape[0])

    @property
    def tokens(self) -> np.ndarray:
        return self.answer[:, 0].astype(np.int64)


class Interview(pydantic.BaseModel):
    """
    A job title and an ordered list of question/answer pairs, with the recruiters' label.

    Attributes:
        candidate_id: Identifier of the candidate, shared by the candidate's records of every modality.
        job_tokens: Word ids of the job title.
        qa: Question/answer pairs in the order they were answered.
        label: ``hirable`` or ``not_hirable``.
        annotations: The raw recruiter reactions the label was aggregated from, when known.
    """
    candidate_id: str
    job_tokens: List[int]
    qa: List[QAPair]
    label: Label
    annotations: Optional[List[Annotation]] = None

    @pydantic.field_validator("job_tokens")
    @classmethod
    def _non_empty_title(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("job title has no tokens")
        if min(value) < 0:
            raise ValueError(f"job title token ids must be >= 0; got {min(value)}")
        return value

    @pydantic.field_validator("qa")
    @classmethod
    def _non_empty_interview(cls, value: List[QAPair]) -> List[QAPair]:
        if not value:
            raise ValueError("interview has no question/answer pair")
        return value

    @pydantic.model_validator(mode="after")
    def _one_stream(self) -> "Interview":
        modalities = {pair.modality for pair in self.qa}
        if len(modalities) > 1:
            raise ValueError(f"question/answer pairs mix modalities {sorted(modalities)}")
        widths = {pair.answer.shape[1] for pair in self.qa}
        if len(widths) > 1:
            raise ValueError(f"answers mix feature widths {sorted(widths)}")
        return self

    @property
    def y(self) -> int:
        return label_to_int(self.label)

    @property
    def n(self) -> int:
        return len(self.qa)

    @property
    def modality(self) -> Modality:
        return self.qa[0].modality

    @property
    def position(self) -> Tuple[int, ...]:
        """Job-title tokens identify the open position."""
        return tuple(self.job_tokens)

    def max_token(self) -> int:
        ids = list(self.job_tokens)
        for pair in self.qa:
            ids.extend(pair.q_tokens)
            if pair.modality == "text":
                ids.append(int(pair.answer.max()))
        return max(ids)


class GeneratorSpec(pydantic.BaseModel):
    """
    Parameters of the synthetic interview generator.

    The label of a candidate is decided by one answer only: the decisive question of
    the position's job type. That answer carries the job type's motif (three ordered
    tokens or frames) exactly when the candidate is hirable. Other answers carry
    motifs that are uncorrelated with the label, and any answer may carry a reversed
    motif as a decoy.

    Attributes:
        candidates: Number of candidates.
        positions: Number of open positions; each has a job title and its questions.
        job_types: Number of job types, the first token of every job title.
        questions_per_interview: Questions every candidate answers.
        extra_question_rate: Probability that a candidate answers one more question.
        decisive_questions: Decisive question index per job type; spread over the interview by default.
        distinct_motifs: Whether every job type has its own motif (else all share one).
        hirable_rate: Probability of the hirable class.
        distractor_rate: Probability that a non-decisive answer carries a motif.
        decoy_rate: Probability that an answer without a motif carries a reversed one.
        min_answer_length: Minimum frames (or words) per answer.
        max_answer_length: Maximum frames (or words) per answer.
        question_length: Words per question (range, inclusive).
        job_title_length: Words per job title.
        vocab_size: Word vocabulary size.
        audio_dim: Audio descriptor size.
        video_continuous_dim: Continuous video descriptors (head pose, gaze...).
        video_noise_binary_dim: Binary video descriptors that only carry noise.
        noise: Amplitude of the bounded uniform noise of continuous descriptors.
        binary_noise_rate: Activation rate of the noise binary descriptors.
        motif_level: Step between the three levels of an audio motif.
        modalities: Modalities to generate.
        missing_rate: Probability that a modality is unavailable for a candidate.
        seed: Seed of every random stream.
    """
    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    candidates: int = pydantic.Field(2000, ge=1)
    positions: int = pydantic.Field(40, ge=1)
    job_types: int = pydantic.Field(2, ge=1)
    questions_per_interview: int = pydantic.Field(5, ge=1)
    extra_question_rate: float = pydantic.Field(0.05, ge=0, le=1)
    decisive_questions: Optional[List[int]] = None
    distinct_motifs: bool = False
    hirable_rate: float = pydantic.Field(0.45, gt=0, lt=1)
    distractor_rate: float = pydantic.Field(0.5, ge=0, le=1)
    decoy_rate: float = pydantic.Field(0.5, ge=0, le=1)
    min_answer_length: int = pydantic.Field(20, ge=8)
    max_answer_length: int = pydantic.Field(60, ge=8)
    question_length: Tuple[int, int] = (3, 6)
    job_title_length: int = pydantic.Field(3, ge=1)
    vocab_size: int = pydantic.Field(128, ge=1)
    audio_dim: int = pydantic.Field(8, ge=1)
    video_continuous_dim: int = pydantic.Field(4, ge=0)
    video_noise_binary_dim: int = pydantic.Field(2, ge=0)
    noise: float = pydantic.Field(0.5, ge=0, lt=1)
    binary_noise_rate: float = pydantic.Field(0.05, ge=0, le=1)
    motif_level: float = pydantic.Field(3.0, gt=2)
    modalities: List[Modality] = ["text", "audio", "video"]
    missing_rate: float = pydantic.Field(0.0, ge=0, lt=1)
    seed: int = 0

    @pydantic.model_validator(mode="after")
    def _consistent(self) -> "GeneratorSpec":
        if self.min_answer_length > self.max_answer_length:
            raise ValueError(f"min_answer_length {self.min_answer_length} exceeds max_answer_length {self.max_answer_length}")
        low, high = self.question_length
        if not 1 <= low <= high:
            raise ValueError(f"question_length must be an increasing positive range; got {self.question_length}")
        decisive = self.decisive_index_by_type
        if len(decisive) != self.job_types:
            raise ValueError(f"decisive_questions needs one index per job type ({self.job_types}); got {decisive}")
        if min(decisive) < 0 or max(decisive) >= self.questions_per_interview:
            raise ValueError(f"decisive question indices {decisive} must be < {self.questions_per_interview}")
        if self.audio_dim < self.motif_count:
            raise ValueError(f"audio_dim must be at least the number of motifs ({self.motif_count})")
        if self.vocab_size < self.first_filler_token + max(8, high + self.job_title_length):
            raise ValueError(f"vocab_size {self.vocab_size} leaves too few filler words "
                             f"(reserved ids end at {self.first_filler_token})")
        if not self.modalities:
            raise ValueError("at least one modality must be generated")
        return self

    @property
    def decisive_index_by_type(self) -> List[int]:
        if self.decisive_questions is not None:
            return list(self.decisive_questions)
        n = self.questions_per_interview
        return [((k + 1) * n) // (self.job_types + 1) for k in range(self.job_types)]

    @property
    def motif_count(self) -> int:
        return self.job_types if self.distinct_motifs else 1

    def motif_of_type(self, job_type: int) -> int:
        return job_type if self.distinct_motifs else 0

    @property
    def question_pool_size(self) -> int:
        return self.questions_per_interview + 1

    # word ids: job-type tokens, question-type tokens, motif tokens, then fillers
    @property
    def first_question_token(self) -> int:
        return self.job_types

    @property
    def first_motif_token(self) -> int:
        return self.first_question_token + self.question_pool_size

    @property
    def first_filler_token(self) -> int:
        return self.first_motif_token + 3 * self.motif_count

    @property
    def video_dim(self) -> int:
        return self.video_continuous_dim + 3 * self.motif_count + self.video_noise_binary_dim

    def feature_dim(self, modality: Modality) -> int:
        return {"text": 1, "audio": self.audio_dim, "video": self.video_dim}[modality]

    def feature_kinds(self, modality: Modality) -> List[str]:
        """Per-column ``continuous`` / ``binary`` kind of the generated descriptors."""
        if modality == "audio":
            return ["continuous"] * self.audio_dim
        if modality == "video":
            return ["continuous"] * self.video_continuous_dim + ["binary"] * (self.video_dim - self.video_continuous_dim)
        return ["token"]
