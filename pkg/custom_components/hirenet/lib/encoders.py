"""GRU cells, uni- and bidirectional sequence encoders, token-sequence encoders."""
from dataclasses import dataclass
from typing import List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..autodiff import Tensor, affine, concat, hadamard, scalar_combine, sigmoid, stack, take, tanh
from ..errors import ContractViolation, DegenerateInputError, LookupContractError

GATES = ("z", "r", "h")


class GRUCellParams(NamedTuple):
    """
    Gate parameters of one GRU direction.

    ``W_*`` are ``(hidden, input)``, ``U_*`` are ``(hidden, hidden)`` and ``b_*`` are ``(hidden,)``.
    """
    W_z: Tensor
    W_r: Tensor
    W_h: Tensor
    U_z: Tensor
    U_r: Tensor
    U_h: Tensor
    b_z: Tensor
    b_r: Tensor
    b_h: Tensor

    @classmethod
    def from_leaves(cls, leaves: Mapping[str, Tensor], prefix: str) -> "GRUCellParams":
        return cls(**{field: leaves[f"{prefix}.{field}"] for field in cls._fields})

    @property
    def hidden_dim(self) -> int:
        return self.U_z.shape[0]

    @property
    def input_dim(self) -> int:
        return self.W_z.shape[1]

    def validate(self) -> None:
        hidden, inputs = self.hidden_dim, self.input_dim
        for gate in GATES:
            W, U, b = getattr(self, f"W_{gate}"), getattr(self, f"U_{gate}"), getattr(self, f"b_{gate}")
            if W.shape != (hidden, inputs) or U.shape != (hidden, hidden) or b.shape != (hidden,):
                raise ContractViolation(
                    f"GRU gate {gate!r} has W {W.shape}, U {U.shape}, b {b.shape}; "
                    f"expected ({hidden}, {inputs}), ({hidden}, {hidden}), ({hidden},)")


class BiGRUParams(NamedTuple):
    forward: GRUCellParams
    backward: GRUCellParams

    @classmethod
    def from_leaves(cls, leaves: Mapping[str, Tensor], prefix: str) -> "BiGRUParams":
        return cls(GRUCellParams.from_leaves(leaves, f"{prefix}.fwd"),
                   GRUCellParams.from_leaves(leaves, f"{prefix}.bwd"))

    def swapped(self) -> "BiGRUParams":
        return BiGRUParams(self.backward, self.forward)


@dataclass(frozen=True, eq=False)
class SequenceBatchItem:
    """
    One padded sequence: ``features`` rows past ``true_length`` are padding.

    Attributes:
        features: ``(length, feature_dim)`` rows (low-level descriptors or embedded words).
        mask: Boolean vector, a contiguous prefix of ``True`` entries.
    """
    features: Tensor
    mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        object.__setattr__(self, "mask", mask)
        if self.features.values.ndim != 2 or mask.shape != (self.features.shape[0],):
            raise ContractViolation(
                f"sequence features {self.features.shape} do not match mask {mask.shape}")
        n = int(mask.sum())
        if not mask[:n].all():
            raise ContractViolation("sequence mask must be a contiguous prefix (padding only at the end)")

    @classmethod
    def from_array(cls, features, true_length: Optional[int] = None, pad_to: Optional[int] = None) -> "SequenceBatchItem":
        values = np.asarray(features, dtype=np.float64)
        length = values.shape[0] if true_length is None else true_length
        total = max(values.shape[0], pad_to or 0)
        if total > values.shape[0]:
            values = np.vstack([values, np.zeros((total - values.shape[0], values.shape[1]))])
        return cls(Tensor.constant(values), np.arange(total) < length)

    @property
    def true_length(self) -> int:
        return int(self.mask.sum())

    @property
    def length(self) -> int:
        return int(self.mask.shape[0])


def _gru_update(params: GRUCellParams, zx: Tensor, rx: Tensor, hx: Tensor, h_prev: Tensor) -> Tensor:
    z = sigmoid(scalar_combine([zx, affine(params.U_z, h_prev)], [1.0, 1.0]))
    r = sigmoid(scalar_combine([rx, affine(params.U_r, h_prev)], [1.0, 1.0]))
    candidate = tanh(scalar_combine([hx, affine(params.U_h, hadamard(r, h_prev))], [1.0, 1.0]))
    keep = scalar_combine([z], [-1.0], const=1.0)
    return scalar_combine([hadamard(keep, h_prev), hadamard(z, candidate)], [1.0, 1.0])


def gru_step(params: GRUCellParams, x_t: Tensor, h_prev: Tensor) -> Tensor:
    """
    One GRU transition.

    ``z = σ(W_z x + U_z h + b_z)``, ``r = σ(W_r x + U_r h + b_r)``,
    ``h̃ = tanh(W_h x + U_h (r ⊙ h) + b_h)`` and ``h_t = (1 - z) ⊙ h + z ⊙ h̃``.
    """
    if x_t.shape != (params.input_dim,) or h_prev.shape != (params.hidden_dim,):
        raise ContractViolation(
            f"gru_step expects x ({params.input_dim},) and h ({params.hidden_dim},); got {x_t.shape} and {h_prev.shape}")
    return _gru_update(params,
                       affine(params.W_z, x_t, params.b_z),
                       affine(params.W_r, x_t, params.b_r),
                       affine(params.W_h, x_t, params.b_h),
                       h_prev)


def _run_cell(params: GRUCellParams, inputs: Tensor, h_0: Optional[Tensor]) -> List[Tensor]:
    if inputs.shape[1] != params.input_dim:
        raise ContractViolation(f"GRU input dim is {params.input_dim}; got sequence of shape {inputs.shape}")
    h = h_0 if h_0 is not None else Tensor.constant(np.zeros(params.hidden_dim))
    if h.shape != (params.hidden_dim,):
        raise ContractViolation(f"initial state must have shape ({params.hidden_dim},); got {h.shape}")

    # input projections for every step at once; the recurrence stays step by step
    zx = affine(params.W_z, inputs, params.b_z)
    rx = affine(params.W_r, inputs, params.b_r)
    hx = affine(params.W_h, inputs, params.b_h)
    states = []
    for t in range(inputs.shape[0]):
        h = _gru_update(params, take(zx, t), take(rx, t), take(hx, t), h)
        states.append(h)
    return states


def _valid_prefix(seq: SequenceBatchItem) -> Tuple[Tensor, int]:
    n = seq.true_length
    if n == 0:
        raise DegenerateInputError("sequence has no unmasked step")
    return take(seq.features, np.arange(n)), n


def _pad_rows(states: Tensor, n: int, length: int) -> Tensor:
    if length == n:
        return states
    # masked steps repeat the last valid state
    return take(states, np.minimum(np.arange(length), n - 1))


def gru_run(params: GRUCellParams, seq: SequenceBatchItem, h_0: Optional[Tensor] = None) -> Tuple[Tensor, Tensor]:
    """
    Runs a forward GRU over the unmasked prefix of ``seq``.

    Returns:
        ``(states, last)``: a ``(length, hidden)`` matrix whose masked rows copy the last
        valid state, and the state at index ``true_length - 1``.
    """
    inputs, n = _valid_prefix(seq)
    states = _run_cell(params, inputs, h_0)
    return _pad_rows(stack(states), n, seq.length), states[-1]


def _bidirectional(params: BiGRUParams, seq: SequenceBatchItem) -> Tuple[List[Tensor], List[Tensor], int]:
    inputs, n = _valid_prefix(seq)
    forward = _run_cell(params.forward, inputs, None)
    reversed_inputs = take(inputs, np.arange(n - 1, -1, -1))
    backward = _run_cell(params.backward, reversed_inputs, None)[::-1]
    return forward, backward, n


def bigru_run(params: BiGRUParams, seq: SequenceBatchItem) -> Tensor:
    """
    Bidirectional encoding: row ``t`` is ``[→h_t, ←h_t]``.

    The backward direction reads only the unmasked steps, from last to first.
    """
    if params.forward.input_dim != params.backward.input_dim:
        raise ContractViolation(
            f"bidirectional GRU directions disagree on input dim: "
            f"{params.forward.input_dim} and {params.backward.input_dim}")
    forward, backward, n = _bidirectional(params, seq)
    states = concat([stack(forward), stack(backward)], axis=1)
    return _pad_rows(states, n, seq.length)


def bigru_final_states(params: BiGRUParams, seq: SequenceBatchItem) -> Tensor:
    """``[→h_last, ←h_first]``: both directions after reading the whole sequence."""
    forward, backward, _ = _bidirectional(params, seq)
    return concat([forward[-1], backward[0]])


def embed_tokens(embedding: Tensor, tokens: Sequence[int]) -> Tensor:
    ids = np.asarray(tokens, dtype=np.int64).reshape(-1)
    vocab = embedding.shape[0]
    if ids.size and (ids.min() < 0 or ids.max() >= vocab):
        bad = ids[(ids < 0) | (ids >= vocab)][0]
        raise LookupContractError(f"token id {int(bad)} is outside of the vocabulary of size {vocab}")
    return take(embedding, ids)


def encode_token_sequence(
        embedding: Tensor,
        cell: GRUCellParams,
        tokens: Sequence[int],
        mask: Optional[np.ndarray] = None,
) -> Tensor:
    """
    Embeds ``tokens`` and returns the last forward GRU state (question or job-title encoding).
    """
    if len(tokens) == 0:
        raise DegenerateInputError("token sequence is empty")
    embedded = embed_tokens(embedding, tokens)
    mask = np.ones(len(tokens), dtype=bool) if mask is None else mask
    _, last = gru_run(cell, SequenceBatchItem(embedded, mask))
    return last
