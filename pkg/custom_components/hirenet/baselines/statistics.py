"""Non-sequential summary of one answer: per-feature statistics over its frames."""
from typing import List, Literal, NamedTuple, Sequence

import numpy as np

from ..errors import ContractViolation, DegenerateInputError

FeatureKind = Literal["continuous", "binary"]

CONTINUOUS_STATS = ("mean", "std", "min", "max", "sum_pos_grad", "sum_neg_grad")
BINARY_STATS = ("mean", "active_segments", "segment_mean_duration", "segment_std_duration")


class ContinuousStats(NamedTuple):
    mean: float
    std: float
    min: float
    max: float
    sum_pos_grad: float
    sum_neg_grad: float


class BinaryStats(NamedTuple):
    mean: float
    active_segments: int
    segment_mean_duration: float
    segment_std_duration: float


class StatVector(NamedTuple):
    """
    Statistics of every feature of an answer, in column order.

    Attributes:
        continuous: Mean, population std, min, max and the sums of positive and negative
            first differences (the latter as a magnitude) of each continuous column.
        binary: Activation rate and the count, mean and std of the durations of the active
            segments of each binary column.
    """
    continuous: List[ContinuousStats]
    binary: List[BinaryStats]

    def as_array(self) -> np.ndarray:
        values = [v for stats in self.continuous for v in stats] + [float(v) for stats in self.binary for v in stats]
        return np.array(values, dtype=np.float64)


def continuous_stats(column: np.ndarray) -> ContinuousStats:
    steps = np.diff(column)
    return ContinuousStats(
        mean=float(column.mean()),
        std=float(column.std()),
        min=float(column.min()),
        max=float(column.max()),
        sum_pos_grad=float(steps[steps > 0].sum()),
        sum_neg_grad=float(-steps[steps < 0].sum()),
    )


def active_segments(column: np.ndarray) -> List[int]:
    """Durations of the maximal runs of ones."""
    padded = np.concatenate([[0], column.astype(np.int8), [0]])
    edges = np.diff(padded)
    starts, stops = np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)
    return (stops - starts).tolist()


def binary_stats(column: np.ndarray) -> BinaryStats:
    durations = np.array(active_segments(column), dtype=np.float64)
    return BinaryStats(
        mean=float(column.mean()),
        active_segments=int(durations.size),
        segment_mean_duration=float(durations.mean()) if durations.size else 0.0,
        segment_std_duration=float(durations.std()) if durations.size else 0.0,
    )


def aggregate_stats(answer: np.ndarray, feature_kinds: Sequence[FeatureKind]) -> StatVector:
    """
    Summarizes an answer's frames column by column.

    Args:
        answer: ``(frames, features)`` matrix.
        feature_kinds: ``continuous`` or ``binary`` per column.
    """
    answer = np.atleast_2d(np.asarray(answer, dtype=np.float64))
    if answer.shape[0] == 0:
        raise DegenerateInputError("cannot summarize an answer without frames")
    if len(feature_kinds) != answer.shape[1]:
        raise ContractViolation(f"{len(feature_kinds)} feature kinds for an answer of shape {answer.shape}")
    continuous, binary = [], []
    for j, kind in enumerate(feature_kinds):
        column = answer[:, j]
        if kind == "continuous":
            continuous.append(continuous_stats(column))
        elif kind == "binary":
            if not np.all((column == 0) | (column == 1)):
                raise ContractViolation(f"binary feature {j} holds values other than 0 and 1")
            binary.append(binary_stats(column))
        else:
            raise ContractViolation(f"unknown feature kind {kind!r} for feature {j}")
    return StatVector(continuous, binary)


def stat_dim(feature_kinds: Sequence[FeatureKind]) -> int:
    return sum(len(CONTINUOUS_STATS) if kind == "continuous" else len(BINARY_STATS) for kind in feature_kinds)
