"""
Mini-batch training of one monomodal model with early stopping on validation F1.
"""
import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pydantic

from ..autodiff import backward
from ..errors import ContractViolation, DegenerateInputError, NumericError, TrainingDivergedError
from ..interview_data.interview_models import Interview
from ..lib.checkpoint import save_checkpoint
from ..lib.collate import collate_batch
from ..lib.config import HireNetConfig
from ..lib.hirenet import constants_from, interview_loss, predict_many
from ..lib.parameters import HireNetParams, init_model
from .metrics import Metrics, compute_metrics
from .optim import Adam

logger = logging.getLogger(__name__)

SHUFFLE_STREAM = 1


class EarlyStopping:
    """
    Tracks the best validation score; signals a stop after ``patience`` epochs without
    a strict improvement, so ties keep the earliest epoch.
    """

    def __init__(self, patience: int):
        self.patience = patience
        self.counter = 0
        self.best_score: Optional[float] = None
        self.best_epoch = 0
        self.early_stop = False

    def __call__(self, score: float, epoch: int) -> bool:
        """Records ``score``; returns True when it improved on the best so far."""
        if self.best_score is None or score > self.best_score:
            self.best_score, self.best_epoch, self.counter = score, epoch, 0
            return True
        self.counter += 1
        if self.counter >= self.patience:
            self.early_stop = True
        return False


class EpochRecord(pydantic.BaseModel):
    epoch: int
    train_loss: float
    validation: Metrics


class TrainReport(pydantic.BaseModel):
    """
    Attributes:
        variant: The trained variant.
        modality: The modality the model reads.
        seed: Seed of initialization and shuffling.
        config: The full configuration, optimizer settings included.
        initial_train_loss: Mean training loss before the first update.
        epochs: Training loss and validation metrics of every epoch.
        best_epoch: Epoch (from 1) with the best validation F1, the earliest on ties.
        best_validation: Validation metrics at ``best_epoch``.
        checkpoint_path: Where the parameters of ``best_epoch`` were written, if anywhere.
        stopped_early: Whether training ran out of patience before ``max_epochs``.
    """
    variant: str
    modality: str
    seed: int
    config: Dict
    initial_train_loss: float
    epochs: List[EpochRecord]
    best_epoch: int
    best_validation: Metrics
    checkpoint_path: Optional[str] = None
    stopped_early: bool = False

    @property
    def final_train_loss(self) -> float:
        return self.epochs[-1].train_loss


def _records_for(config: HireNetConfig, records: Sequence[Interview], name: str) -> List[Interview]:
    selected = [r for r in records if r.modality == config.modality]
    if not selected:
        raise DegenerateInputError(f"the {name} split has no {config.modality} interview")
    return selected


def check_vocabulary(config: HireNetConfig, records: Sequence[Interview]) -> None:
    """Every token id must fit the model's vocabulary, every frame its feature size."""
    largest = max(r.max_token() for r in records)
    if largest >= config.vocab_size:
        raise ContractViolation(f"corpus uses token id {largest}, the model vocabulary has {config.vocab_size} words")
    if config.modality != "text":
        widths = {r.qa[0].answer.shape[1] for r in records}
        if widths != {config.feature_dim}:
            raise ContractViolation(f"answers have {sorted(widths)} features per frame, the model expects {config.feature_dim}")


def validation_metrics(params: HireNetParams, config: HireNetConfig, records: Sequence[Interview]) -> Metrics:
    predictions = predict_many(params, config, records)
    return compute_metrics([p.label for p in predictions], [r.label for r in records])


def mean_loss(params: HireNetParams, config: HireNetConfig, records: Sequence[Interview]) -> float:
    leaves = constants_from(params)
    return float(np.mean([interview_loss(config, leaves, r)[0].item() for r in records]))


def _batch_step(params: HireNetParams, config: HireNetConfig, optimizer: Adam, batch: Sequence[Interview],
                epoch: int, index: int) -> float:
    leaves = params.leaves()
    total = 0.0
    try:
        for padded in collate_batch(batch):
            loss, _ = interview_loss(config, leaves, padded)
            total += loss.item()
            backward(loss, leaves)
    except NumericError as e:
        raise TrainingDivergedError(f"training diverged: {e}", epoch, index)
    if not np.isfinite(total):
        raise TrainingDivergedError(f"training loss is {total}", epoch, index)
    scale = 1.0 / len(batch)
    grads = {name: (leaf.grad if leaf.grad is not None else np.zeros_like(leaf.values)) * scale
             for name, leaf in leaves.items()}
    optimizer.step(params, grads)
    logger.debug(f"epoch {epoch} batch {index}: mean loss {total * scale:.6f}")
    return total


def fit(
        train_set: Sequence[Interview],
        val_set: Sequence[Interview],
        config: HireNetConfig,
        out_dir: Optional[Union[str, Path]] = None,
        checkpoint_name: str = "model.json",
        on_epoch: Optional[Callable[[EpochRecord], None]] = None,
) -> Tuple[TrainReport, HireNetParams]:
    """
    Trains a model and returns its report together with the parameters of the best epoch.

    Interviews are shuffled every epoch by a stream derived from ``config.seed``; each
    mini-batch is padded together and its gradients are averaged before one clipped
    Adam step. Validation F1 (candidate level) is computed after every epoch.

    Raises:
        ContractViolation: The training split holds a single class or does not fit the config.
        DegenerateInputError: A split has no interview of the configured modality.
        TrainingDivergedError: A loss or a gradient became non-finite.
    """
    train_set = _records_for(config, train_set, "training")
    val_set = _records_for(config, val_set, "validation")
    if len({r.y for r in train_set}) < 2:
        raise ContractViolation("the training split holds a single class")
    check_vocabulary(config, list(train_set) + list(val_set))

    settings = config.optimizer
    params = init_model(config)
    optimizer = Adam(settings)
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, SHUFFLE_STREAM]))
    stopper = EarlyStopping(settings.patience)
    initial = mean_loss(params, config, train_set)
    logger.info(f"Training {config.variant} on {len(train_set)} {config.modality} interviews; initial loss {initial:.4f}")

    checkpoint_path = Path(out_dir) / checkpoint_name if out_dir is not None else None
    best = params.snapshot()
    epochs: List[EpochRecord] = []
    for epoch in range(1, settings.max_epochs + 1):
        order = rng.permutation(len(train_set))
        total = 0.0
        for index, start in enumerate(range(0, len(order), settings.batch_size)):
            batch = [train_set[i] for i in order[start:start + settings.batch_size]]
            total += _batch_step(params, config, optimizer, batch, epoch, index)
        record = EpochRecord(epoch=epoch, train_loss=total / len(train_set),
                             validation=validation_metrics(params, config, val_set))
        epochs.append(record)
        improved = stopper(record.validation.f1, epoch)
        logger.info(f"epoch {epoch}: train loss {record.train_loss:.4f}, validation F1 {record.validation.f1:.4f}"
                    + (" (best)" if improved else ""))
        if improved:
            best = params.snapshot()
            if checkpoint_path is not None:
                save_checkpoint(checkpoint_path, best)
        if on_epoch is not None:
            on_epoch(record)
        if stopper.early_stop:
            logger.info(f"No improvement for {settings.patience} epochs; stopping at epoch {epoch}")
            break

    report = TrainReport(
        variant=config.variant,
        modality=config.modality,
        seed=config.seed,
        config=config.model_dump(mode="json"),
        initial_train_loss=initial,
        epochs=epochs,
        best_epoch=stopper.best_epoch,
        best_validation=epochs[stopper.best_epoch - 1].validation,
        checkpoint_path=str(checkpoint_path) if checkpoint_path is not None else None,
        stopped_early=stopper.early_stop,
    )
    return report, best


def train(train_set: Sequence[Interview], val_set: Sequence[Interview], config: HireNetConfig,
          out_dir: Optional[Union[str, Path]] = None) -> TrainReport:
    """Trains a model and writes the checkpoint of its best epoch to ``out_dir``."""
    report, _ = fit(train_set, val_set, config, out_dir)
    return report
