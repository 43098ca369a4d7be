"""
The HireNet hierarchy and its ablations.

Per answer, a bidirectional GRU encodes the low-level descriptors and an attention
conditioned on the encoded question pools them. The sequence of
``[question encoding, pooled answer]`` is encoded by a second bidirectional GRU and
pooled by an attention conditioned on the encoded job title into the interview
representation ``v``, which a logistic unit maps to the hirability score.

``hn_satt`` removes the question/job-title conditioning of both attentions,
``hn_avg`` replaces both attentions with averaging, and ``bigru_answerwise`` scores
each answer on its own from the final states of the answer encoder.
"""
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..autodiff import Tensor, affine, binary_cross_entropy, concat, scalar_combine, sigmoid, stack
from ..errors import ContractViolation, DegenerateInputError
from ..interview_data.interview_models import HIRABLE, NOT_HIRABLE, Interview, Label
from .attention import AttentionTrace, ContextAttentionParams, average_pool, context_attention, self_attention
from .collate import PaddedInterview, TokenSequence, pad_interview
from .config import HireNetConfig
from .encoders import BiGRUParams, GRUCellParams, SequenceBatchItem, bigru_final_states, bigru_run, embed_tokens, \
    encode_token_sequence

InterviewLike = Union[Interview, PaddedInterview]


@dataclass
class Prediction:
    """
    Output of one forward pass.

    Attributes:
        score: Hirability score in ``(0, 1)``.
        label: ``hirable`` exactly when ``score >= threshold``.
        trace: Attention weights of the pass (uniform for ``hn_avg``).
        representation: The interview representation ``v``.
        answer_scores: Per-answer scores of the answer-wise model, ``None`` otherwise.
    """
    score: float
    label: Label
    trace: AttentionTrace
    representation: np.ndarray
    answer_scores: Optional[np.ndarray] = None


@dataclass
class ForwardPass:
    """Graph outputs of one interview, kept for the loss and for inspection."""
    score: Tensor
    representation: Tensor
    trace: AttentionTrace
    answer_scores: Optional[List[Tensor]] = None


def label_for(score: float, threshold: float) -> Label:
    return HIRABLE if score >= threshold else NOT_HIRABLE


def _padded(interview: InterviewLike) -> PaddedInterview:
    if isinstance(interview, PaddedInterview):
        return interview
    if not interview.qa:
        raise DegenerateInputError(f"candidate {interview.candidate_id!r}: interview has no question/answer pair")
    return pad_interview(interview)


def _check_inputs(config: HireNetConfig, padded: PaddedInterview) -> None:
    if padded.modality != config.modality:
        raise ContractViolation(
            f"candidate {padded.candidate_id!r}: a {config.modality} model cannot read {padded.modality} answers")
    if padded.n == 0:
        raise DegenerateInputError(f"candidate {padded.candidate_id!r}: interview has no question/answer pair")
    if not padded.qa_mask[:padded.n].all():
        raise ContractViolation("question slots must be padded at the end")
    width = padded.answers[0].features.shape[1]
    expected = 1 if config.modality == "text" else config.feature_dim
    if width != expected:
        raise ContractViolation(
            f"candidate {padded.candidate_id!r}: answers have {width} features per frame, the model expects {expected}")
    for i in range(padded.n):
        if padded.answers[i].true_length == 0:
            raise DegenerateInputError(f"candidate {padded.candidate_id!r}: answer {i} is empty")
        if config.is_hierarchical and padded.questions[i].true_length == 0:
            raise DegenerateInputError(f"candidate {padded.candidate_id!r}: question {i} is empty")
    if config.variant == "hirenet" and padded.job.true_length == 0:
        raise DegenerateInputError(f"candidate {padded.candidate_id!r}: job title is empty")


def _answer_table(config: HireNetConfig, leaves: Mapping[str, Tensor]) -> Tensor:
    return leaves["embeddings.words" if config.share_text_embeddings else "embeddings.answer"]


def _answer_input(config: HireNetConfig, leaves: Mapping[str, Tensor], answer: SequenceBatchItem) -> SequenceBatchItem:
    """Text answers are embedded; masked rows read word 0 and are never used."""
    if config.modality != "text":
        return answer
    ids = np.where(answer.mask, answer.features.values[:, 0], 0).astype(np.int64)
    return SequenceBatchItem(embed_tokens(_answer_table(config, leaves), ids), answer.mask)


def _encode_tokens(leaves: Mapping[str, Tensor], prefix: str, sequence: TokenSequence) -> Tensor:
    return encode_token_sequence(leaves["embeddings.words"], GRUCellParams.from_leaves(leaves, prefix),
                                 sequence.tokens, sequence.mask)


def _pool(config: HireNetConfig, states: Tensor, mask: np.ndarray, ctx: Optional[Tensor],
          params: Optional[ContextAttentionParams]) -> Tuple[Tensor, np.ndarray]:
    if config.variant == "hirenet":
        return context_attention(states, mask, ctx, params)
    if config.variant == "hn_satt":
        return self_attention(states, mask, params)
    count = int(np.asarray(mask, dtype=bool).sum())
    alphas = np.where(mask, 1.0 / max(count, 1), 0.0)
    return average_pool(states, mask), alphas


def _classify(leaves: Mapping[str, Tensor], v: Tensor) -> Tensor:
    return sigmoid(affine(leaves["classifier.W_v"], v, leaves["classifier.b_v"]))


def _hierarchical(config: HireNetConfig, leaves: Mapping[str, Tensor], padded: PaddedInterview) -> ForwardPass:
    answer_cell = BiGRUParams.from_leaves(leaves, "answer")
    low = ContextAttentionParams.from_leaves(leaves, "low_attention") if config.has_attention else None
    high = ContextAttentionParams.from_leaves(leaves, "high_attention") if config.has_attention else None

    rows, frame_alphas = [], []
    for i in range(padded.n):
        question = _encode_tokens(leaves, "question", padded.questions[i])
        answer = _answer_input(config, leaves, padded.answers[i])
        states = bigru_run(answer_cell, answer)
        pooled, alphas = _pool(config, states, answer.mask, question, low)
        frame_alphas.append(alphas[:answer.true_length])
        rows.append(concat([question, pooled]))

    high_states = bigru_run(BiGRUParams.from_leaves(leaves, "high"),
                            SequenceBatchItem(stack(rows), np.ones(padded.n, dtype=bool)))
    job = _encode_tokens(leaves, "job", padded.job) if config.variant == "hirenet" else None
    v, question_alphas = _pool(config, high_states, np.ones(padded.n, dtype=bool), job, high)
    trace = AttentionTrace(frame_alphas, question_alphas, uniform=not config.has_attention)
    return ForwardPass(_classify(leaves, v), v, trace)


def _answerwise(config: HireNetConfig, leaves: Mapping[str, Tensor], padded: PaddedInterview) -> ForwardPass:
    cell = BiGRUParams.from_leaves(leaves, "answer")
    finals, scores = [], []
    for i in range(padded.n):
        final = bigru_final_states(cell, _answer_input(config, leaves, padded.answers[i]))
        finals.append(final)
        scores.append(_classify(leaves, final))
    share = 1.0 / padded.n
    score = scalar_combine(scores, [share] * padded.n)
    representation = scalar_combine(finals, [share] * padded.n)
    trace = AttentionTrace.uniform_for(padded.answer_lengths)
    return ForwardPass(score, representation, trace, answer_scores=scores)


def forward_pass(config: HireNetConfig, leaves: Mapping[str, Tensor], interview: InterviewLike) -> ForwardPass:
    """Builds the computation graph of one interview over the given parameter leaves."""
    padded = _padded(interview)
    _check_inputs(config, padded)
    if config.is_hierarchical:
        return _hierarchical(config, leaves, padded)
    return _answerwise(config, leaves, padded)


def constants_from(arrays: Mapping[str, np.ndarray]) -> Dict[str, Tensor]:
    """Wraps parameters without gradient tracking for inference."""
    return {name: Tensor(value, op="constant", name=name) for name, value in arrays.items()}


def forward_interview(params: Mapping[str, np.ndarray], config: HireNetConfig, interview: InterviewLike) -> Prediction:
    """
    Scores one interview with frozen parameters.

    Args:
        params: Parameter arrays by canonical name, usually a ``HireNetParams``.
        config: The model configuration.
        interview: An interview record, or an already padded one.

    Returns:
        The score, its thresholded label and the attention trace.

    Example:
        ```python
        params = init_model(config)
        prediction = forward_interview(params, config, corpus[0])
        prediction.trace.relative_question
        ```
    """
    result = forward_pass(config, constants_from(params), interview)
    score = result.score.item()
    answer_scores = None
    if result.answer_scores is not None:
        answer_scores = np.array([s.item() for s in result.answer_scores])
    return Prediction(score=score,
                      label=label_for(score, config.threshold),
                      trace=result.trace,
                      representation=result.representation.values.copy(),
                      answer_scores=answer_scores)


def bce_loss(score: Union[float, Tensor], label: int) -> Union[float, Tensor]:
    """
    Binary cross-entropy of one score, clamped to ``[1e-12, 1 - 1e-12]``.

    A graph node is returned for a tensor score, a float for a float score.
    """
    if isinstance(score, Tensor):
        return binary_cross_entropy(score, label)
    return binary_cross_entropy(Tensor.constant(np.array([score])), label).item()


def interview_loss(config: HireNetConfig, leaves: Mapping[str, Tensor], interview: InterviewLike) -> Tuple[Tensor, ForwardPass]:
    """
    Training loss of one interview.

    Hierarchical models are trained on the interview score. The answer-wise model is
    trained on every answer with the candidate's label, and its loss is the mean over answers.
    """
    result = forward_pass(config, leaves, interview)
    y = interview.y
    if result.answer_scores is None:
        return binary_cross_entropy(result.score, y), result
    losses = [binary_cross_entropy(s, y) for s in result.answer_scores]
    return scalar_combine(losses, [1.0 / len(losses)] * len(losses)), result


def predict_many(params: Mapping[str, np.ndarray], config: HireNetConfig,
                 interviews: Sequence[InterviewLike]) -> List[Prediction]:
    return [forward_interview(params, config, interview) for interview in interviews]
