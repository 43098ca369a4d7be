"""
Versioned JSON checkpoints.

Every checkpoint records a format version, its kind, the configuration it was built
with and each array by canonical dotted name, with its shape and row-major values.
"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Union

import numpy as np
import pydantic

from ..baselines.bow import BowVocabulary, Codebook
from ..baselines.linear import LogisticModel, restore_scaler
from ..errors import CheckpointError, ContractViolation
from ..interview_data.corpus_io import write_atomic
from .config import HireNetConfig
from .fusion import FusionModel
from .parameters import HireNetParams, parameter_shapes

logger = logging.getLogger(__name__)

FORMAT_VERSION = "hirenet-checkpoint/1"
Kind = Literal["hirenet", "linear", "codebook", "fusion"]
PathLike = Union[str, Path]


class ParameterRecord(pydantic.BaseModel):
    """
    Attributes:
        name: Canonical dotted name.
        shape: Dimensions of the array.
        values: Row-major values.
    """
    name: str
    shape: List[int]
    values: List[float]

    @pydantic.model_validator(mode="after")
    def _size_matches_shape(self) -> "ParameterRecord":
        if int(np.prod(self.shape, dtype=np.int64)) != len(self.values):
            raise ValueError(f"{self.name}: {len(self.values)} values do not fill shape {self.shape}")
        return self

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64).reshape(self.shape)

    @classmethod
    def of(cls, name: str, array: np.ndarray) -> "ParameterRecord":
        array = np.asarray(array, dtype=np.float64)
        return cls(name=name, shape=list(array.shape), values=array.reshape(-1).tolist())


class Checkpoint(pydantic.BaseModel):
    format_version: str = FORMAT_VERSION
    kind: Kind
    config: Dict[str, Any] = {}
    parameters: List[ParameterRecord] = []

    def arrays(self) -> Dict[str, np.ndarray]:
        return {record.name: record.array() for record in self.parameters}


def save_arrays(path: PathLike, kind: Kind, arrays: Mapping[str, np.ndarray], config: Optional[Dict[str, Any]] = None) -> Path:
    checkpoint = Checkpoint(kind=kind, config=config or {},
                            parameters=[ParameterRecord.of(name, a) for name, a in arrays.items()])
    path = write_atomic(path, checkpoint.model_dump_json())
    logger.info(f"Wrote {kind} checkpoint with {len(arrays)} arrays to {path}")
    return path


def load_arrays(path: PathLike, kind: Kind) -> Tuple[Dict[str, Any], Dict[str, np.ndarray]]:
    """
    Reads a checkpoint of the expected kind.

    Raises:
        CheckpointError: The file cannot be read, has another version or another kind.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}")
    try:
        checkpoint = Checkpoint.model_validate_json(text)
    except pydantic.ValidationError as e:
        raise CheckpointError(f"{path} is not a valid checkpoint: {e.errors()[0]['msg']}")
    if checkpoint.format_version != FORMAT_VERSION:
        raise CheckpointError(f"{path} has format {checkpoint.format_version!r}; this version reads {FORMAT_VERSION!r}")
    if checkpoint.kind != kind:
        raise CheckpointError(f"{path} holds a {checkpoint.kind} checkpoint, not a {kind} one")
    return checkpoint.config, checkpoint.arrays()


def save_checkpoint(path: PathLike, params: HireNetParams) -> Path:
    return save_arrays(path, "hirenet", params, params.config.model_dump(mode="json"))


def load_checkpoint(path: PathLike) -> HireNetParams:
    """Reads a model checkpoint and validates the whole dimension chain against its config."""
    config_data, arrays = load_arrays(path, "hirenet")
    try:
        config = HireNetConfig.model_validate(config_data)
    except pydantic.ValidationError as e:
        raise CheckpointError(f"{path} holds an invalid model config: {e.errors()[0]['msg']}")
    unknown = set(arrays) - set(parameter_shapes(config))
    if unknown:
        raise CheckpointError(f"{path} holds parameters {sorted(unknown)} unknown to a {config.variant} model")
    return HireNetParams(config, arrays, frozen=True)


def _linear_arrays(model: LogisticModel, prefix: str = "") -> Dict[str, np.ndarray]:
    arrays = {f"{prefix}weights": model.weights, f"{prefix}bias": np.array([model.bias])}
    if model.standardizer is not None:
        arrays[f"{prefix}standardizer.mean"] = model.standardizer.mean_
        arrays[f"{prefix}standardizer.scale"] = model.standardizer.scale_
    return arrays


def _linear_from(arrays: Mapping[str, np.ndarray], l2: float, prefix: str = "") -> LogisticModel:
    try:
        standardizer = None
        if f"{prefix}standardizer.mean" in arrays:
            standardizer = restore_scaler(arrays[f"{prefix}standardizer.mean"], arrays[f"{prefix}standardizer.scale"])
        return LogisticModel(arrays[f"{prefix}weights"], float(arrays[f"{prefix}bias"][0]), l2, standardizer)
    except KeyError as e:
        raise CheckpointError(f"linear checkpoint lacks {e.args[0]}")
    except ContractViolation as e:
        raise CheckpointError(f"linear checkpoint holds an unusable scaler: {e}")


def save_linear(path: PathLike, model: LogisticModel, **config) -> Path:
    return save_arrays(path, "linear", _linear_arrays(model), {"l2": model.l2, **config})


def load_linear(path: PathLike) -> Tuple[LogisticModel, Dict[str, Any]]:
    config, arrays = load_arrays(path, "linear")
    return _linear_from(arrays, float(config.get("l2", 0.0))), config


def save_vocabulary(path: PathLike, vocabulary: BowVocabulary, **config) -> Path:
    arrays = {"doc_freqs": vocabulary.doc_freqs}
    if vocabulary.codebook is not None:
        arrays["centroids"] = vocabulary.codebook.centroids
    return save_arrays(path, "codebook", arrays, {"k": vocabulary.k, "documents": vocabulary.documents, **config})


def load_vocabulary(path: PathLike) -> BowVocabulary:
    config, arrays = load_arrays(path, "codebook")
    codebook = Codebook(arrays["centroids"]) if "centroids" in arrays else None
    return BowVocabulary(int(config["k"]), arrays["doc_freqs"].astype(np.int64), int(config["documents"]), codebook)


def save_fusion(path: PathLike, model: FusionModel, **config) -> Path:
    arrays = {f"means.{m}": model.means[m] for m in model.modalities}
    arrays.update(_linear_arrays(model.classifier, "classifier."))
    return save_arrays(path, "fusion", arrays, {"modalities": model.modalities, "l2": model.classifier.l2, **config})


def load_fusion(path: PathLike) -> Tuple[FusionModel, Dict[str, Any]]:
    config, arrays = load_arrays(path, "fusion")
    modalities = list(config["modalities"])
    means = {m: arrays[f"means.{m}"] for m in modalities}
    return FusionModel(modalities, means, _linear_from(arrays, float(config.get("l2", 0.0)), "classifier.")), config
