"""Exceptions raised by hirenet."""
from typing import Optional


class HireNetError(Exception):
    """Base class for every error raised by this package."""


class ContractViolation(HireNetError, ValueError):
    """An argument breaks a documented precondition (shape, range, vocabulary...)."""


class DegenerateInputError(ContractViolation):
    """An input is empty where at least one element is required."""


class LookupContractError(ContractViolation, LookupError):
    """A token id falls outside of the embedding table."""


class UnsupportedVariantError(ContractViolation):
    """The requested operation is not defined for the model variant."""


class NumericError(HireNetError, ArithmeticError):
    """A NaN or an infinity was produced or consumed by a computation."""


class TrainingDivergedError(NumericError):
    def __init__(self, message: str, epoch: int, batch: int):
        super().__init__(f"{message} (epoch {epoch}, batch {batch})")
        self.epoch = epoch
        self.batch = batch


class CorpusParseError(HireNetError):
    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class CorpusValidationError(ContractViolation):
    def __init__(self, message: str, candidate_id: Optional[str] = None):
        prefix = f"candidate {candidate_id!r}: " if candidate_id is not None else ""
        super().__init__(f"{prefix}{message}")
        self.candidate_id = candidate_id


class CheckpointError(HireNetError):
    """A checkpoint cannot be read, or does not match the data it is applied to."""
