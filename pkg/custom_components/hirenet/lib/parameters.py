"""Named parameter sets of the HireNet family and their initialization."""
import logging
from collections import OrderedDict
from typing import Dict, Iterator, Mapping, Optional, Tuple

import numpy as np

from ..autodiff import Tensor, leaves_from
from ..errors import CheckpointError
from .config import HireNetConfig
from .encoders import GATES

logger = logging.getLogger(__name__)

Shape = Tuple[int, ...]
EMBEDDING_BOUND = 0.05


def _gru_shapes(prefix: str, input_dim: int, hidden: int) -> Dict[str, Shape]:
    shapes: Dict[str, Shape] = {}
    for gate in GATES:
        shapes[f"{prefix}.W_{gate}"] = (hidden, input_dim)
    for gate in GATES:
        shapes[f"{prefix}.U_{gate}"] = (hidden, hidden)
    for gate in GATES:
        shapes[f"{prefix}.b_{gate}"] = (hidden,)
    return shapes


def _bigru_shapes(prefix: str, input_dim: int, hidden: int) -> Dict[str, Shape]:
    return {**_gru_shapes(f"{prefix}.fwd", input_dim, hidden), **_gru_shapes(f"{prefix}.bwd", input_dim, hidden)}


def _attention_shapes(prefix: str, state_dim: int, attention_dim: int, ctx_dim: Optional[int]) -> Dict[str, Shape]:
    shapes: Dict[str, Shape] = {f"{prefix}.W_state": (attention_dim, state_dim)}
    if ctx_dim is not None:
        shapes[f"{prefix}.W_ctx"] = (attention_dim, ctx_dim)
    shapes[f"{prefix}.b"] = (attention_dim,)
    shapes[f"{prefix}.u"] = (attention_dim,)
    return shapes


def parameter_shapes(config: HireNetConfig) -> "OrderedDict[str, Shape]":
    """
    Canonical dotted names and shapes of every parameter of ``config.variant``.

    The order is the canonical order used for initialization and checkpoints. Only the
    parameters a variant actually reads are listed: ``hn_satt`` has no job encoder and no
    ``W_ctx``, ``hn_avg`` has no attention at all.
    """
    shapes: Dict[str, Shape] = OrderedDict()
    text = config.modality == "text"
    if config.is_hierarchical or (text and config.share_text_embeddings):
        shapes["embeddings.words"] = (config.vocab_size, config.embed_dim)
    if text and not config.share_text_embeddings:
        shapes["embeddings.answer"] = (config.vocab_size, config.embed_dim)

    low_state = 2 * config.low_hidden
    shapes.update(_bigru_shapes("answer", config.answer_input_dim, config.low_hidden))

    if not config.is_hierarchical:
        shapes["classifier.W_v"] = (1, low_state)
        shapes["classifier.b_v"] = (1,)
        return shapes

    contextual = config.variant == "hirenet"
    high_state = 2 * config.high_hidden
    shapes.update(_gru_shapes("question", config.embed_dim, config.question_hidden))
    if config.has_attention:
        shapes.update(_attention_shapes("low_attention", low_state, config.low_attention_size,
                                        config.question_hidden if contextual else None))
    shapes.update(_bigru_shapes("high", config.question_hidden + low_state, config.high_hidden))
    if contextual:
        shapes.update(_gru_shapes("job", config.embed_dim, config.job_hidden))
    if config.has_attention:
        shapes.update(_attention_shapes("high_attention", high_state, config.high_attention_size,
                                        config.job_hidden if contextual else None))
    shapes["classifier.W_v"] = (1, high_state)
    shapes["classifier.b_v"] = (1,)
    return shapes


def is_bias(name: str) -> bool:
    leaf = name.rsplit(".", 1)[-1]
    return leaf == "b" or leaf.startswith("b_")


def glorot_bound(shape: Shape) -> float:
    fan_out, fan_in = (shape[0], shape[1]) if len(shape) == 2 else (shape[0], 1)
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


class HireNetParams(Mapping[str, np.ndarray]):
    """
    Every weight of a HireNet-family model, addressable by canonical dotted name.

    Example:
        ```python
        params = init_model(HireNetConfig(variant="hirenet", modality="audio"))
        params["low_attention.u"].shape   # (128,)
        ```
    """

    def __init__(self, config: HireNetConfig, arrays: Mapping[str, np.ndarray], frozen: bool = False):
        self.config = config
        self._arrays: "OrderedDict[str, np.ndarray]" = OrderedDict()
        for name in parameter_shapes(config):
            if name in arrays:
                array = np.array(arrays[name], dtype=np.float64, copy=True)
                array.flags.writeable = not frozen
                self._arrays[name] = array
        self.frozen = frozen
        self.validate()

    def validate(self) -> None:
        """Checks the full dimension chain against the config."""
        expected = parameter_shapes(self.config)
        problems = []
        for name, shape in expected.items():
            if name not in self._arrays:
                problems.append(f"missing {name} {shape}")
            elif self._arrays[name].shape != shape:
                problems.append(f"{name} has shape {self._arrays[name].shape}, expected {shape}")
        if problems:
            raise CheckpointError(f"parameters do not match a {self.config.variant} model: " + "; ".join(problems))

    def __getitem__(self, name: str) -> np.ndarray:
        return self._arrays[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._arrays)

    def __len__(self) -> int:
        return len(self._arrays)

    def leaves(self) -> Dict[str, Tensor]:
        return leaves_from(self._arrays)

    def snapshot(self) -> "HireNetParams":
        """An immutable copy that may be shared read-only between workers."""
        return HireNetParams(self.config, self._arrays, frozen=True)

    def copy(self) -> "HireNetParams":
        return HireNetParams(self.config, self._arrays)

    def replace(self, arrays: Mapping[str, np.ndarray]) -> "HireNetParams":
        """A copy with the named arrays swapped in."""
        unknown = set(arrays) - set(self._arrays)
        if unknown:
            raise KeyError(f"unknown parameters {sorted(unknown)}")
        return HireNetParams(self.config, {**self._arrays, **arrays})

    def update(self, name: str, delta: np.ndarray) -> None:
        if self.frozen:
            raise ValueError("cannot update a parameter snapshot")
        self._arrays[name] += delta

    def count(self) -> int:
        return int(sum(a.size for a in self._arrays.values()))


def init_model(config: HireNetConfig) -> HireNetParams:
    """
    Initializes a model deterministically from ``config.seed``.

    Matrices and attention vectors are drawn uniformly in ``±sqrt(6 / (fan_in + fan_out))``,
    embeddings uniformly in ``±0.05`` and biases are zero.
    """
    rng = np.random.default_rng(config.seed)
    arrays = OrderedDict()
    for name, shape in parameter_shapes(config).items():
        if is_bias(name):
            arrays[name] = np.zeros(shape)
        elif name.startswith("embeddings."):
            arrays[name] = rng.uniform(-EMBEDDING_BOUND, EMBEDDING_BOUND, size=shape)
        else:
            bound = glorot_bound(shape)
            arrays[name] = rng.uniform(-bound, bound, size=shape)
    params = HireNetParams(config, arrays)
    logger.info(f"Initialized {config.variant} ({config.modality}) with {params.count()} parameters")
    return params
