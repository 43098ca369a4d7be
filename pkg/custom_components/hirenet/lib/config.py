from pathlib import Path
from typing import Literal, Optional, Union

import pydantic

Variant = Literal["hirenet", "hn_satt", "hn_avg", "bigru_answerwise"]
Modality = Literal["text", "audio", "video"]

ATTENTION_VARIANTS = ("hirenet", "hn_satt")
HIERARCHICAL_VARIANTS = ("hirenet", "hn_satt", "hn_avg")
VARIANT_ALIASES = {"bigru": "bigru_answerwise"}


class OptimizerSettings(pydantic.BaseModel):
    """
    Adaptive moment estimation settings and the training schedule.
    """
    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    learning_rate: float = pydantic.Field(1e-3, gt=0)
    beta1: float = pydantic.Field(0.9, ge=0, lt=1)
    beta2: float = pydantic.Field(0.999, ge=0, lt=1)
    epsilon: float = pydantic.Field(1e-8, gt=0)
    batch_size: int = pydantic.Field(16, ge=1)
    max_epochs: int = pydantic.Field(50, ge=1)
    patience: int = pydantic.Field(5, ge=1)
    clip_norm: float = pydantic.Field(5.0, gt=0)


class HireNetConfig(pydantic.BaseModel):
    """
    Dimensions, variant and training settings of one monomodal model.

    Attributes:
        variant: ``hirenet``, the ablations ``hn_satt`` / ``hn_avg``, or the answer-wise
            ``bigru_answerwise`` baseline.
        modality: Which answer streams the model reads. Text answers are token ids embedded
            with a trainable table; audio and video answers are feature rows.
        feature_dim: Size of an audio/video low-level descriptor.
        vocab_size: Size of the word vocabulary shared by questions, job titles and text answers.
        share_text_embeddings: Whether text answers reuse the question/job-title word table.
        low_attention_dim: Size of ``u_p``; defaults to the low-level state size ``2 * low_hidden``.
        high_attention_dim: Size of ``u_J``; defaults to ``2 * high_hidden``.
        threshold: Scores at or above it are labelled hirable.
    """
    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    variant: Variant = "hirenet"
    modality: Modality = "audio"
    feature_dim: int = pydantic.Field(8, ge=1)
    vocab_size: int = pydantic.Field(128, ge=1)
    embed_dim: int = pydantic.Field(32, ge=1)
    low_hidden: int = pydantic.Field(64, ge=1)
    question_hidden: int = pydantic.Field(64, ge=1)
    high_hidden: int = pydantic.Field(64, ge=1)
    job_hidden: int = pydantic.Field(64, ge=1)
    low_attention_dim: Optional[int] = pydantic.Field(None, ge=1)
    high_attention_dim: Optional[int] = pydantic.Field(None, ge=1)
    share_text_embeddings: bool = True
    seed: int = 0
    optimizer: OptimizerSettings = OptimizerSettings()
    threshold: float = pydantic.Field(0.5, gt=0, lt=1)

    @pydantic.field_validator("variant", mode="before")
    @classmethod
    def _resolve_alias(cls, value):
        return VARIANT_ALIASES.get(value, value)

    @property
    def answer_input_dim(self) -> int:
        return self.embed_dim if self.modality == "text" else self.feature_dim

    @property
    def low_attention_size(self) -> int:
        return self.low_attention_dim or 2 * self.low_hidden

    @property
    def high_attention_size(self) -> int:
        return self.high_attention_dim or 2 * self.high_hidden

    @property
    def has_attention(self) -> bool:
        return self.variant in ATTENTION_VARIANTS

    @property
    def is_hierarchical(self) -> bool:
        return self.variant in HIERARCHICAL_VARIANTS

    @classmethod
    def from_file(cls, path: Union[str, Path], **overrides) -> "HireNetConfig":
        """Reads a JSON config; keyword overrides (e.g. from the command line) win over the file."""
        data = pydantic.TypeAdapter(dict).validate_json(Path(path).read_text())
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls.model_validate(data)
