"""L2-regularized logistic regression trained by full-batch gradient descent."""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.special import expit
from sklearn.preprocessing import StandardScaler

from ..errors import ContractViolation, DegenerateInputError, NumericError

logger = logging.getLogger(__name__)

ARMIJO = 1e-4


def restore_scaler(mean: np.ndarray, scale: np.ndarray) -> StandardScaler:
    """Rebuilds a fitted scaler from the ``mean_`` and ``scale_`` a checkpoint stores."""
    mean, scale = np.asarray(mean, dtype=np.float64), np.asarray(scale, dtype=np.float64)
    if mean.shape != scale.shape or mean.ndim != 1:
        raise ContractViolation(f"scaler mean {mean.shape} and scale {scale.shape} must be matching vectors")
    scaler = StandardScaler()
    scaler.mean_, scaler.scale_, scaler.var_ = mean, scale, scale ** 2
    scaler.n_features_in_ = mean.shape[0]
    scaler.n_samples_seen_ = 0
    return scaler


@dataclass
class LogisticModel:
    """
    ``σ(w · x + b)``, optionally on standardized inputs.

    Attributes:
        weights: ``w``, one entry per feature.
        bias: ``b``.
        l2: Regularization strength the model was trained with.
        standardizer: Fitted ``StandardScaler`` applied to inputs before scoring, when present.
        loss_history: Training objective after every accepted step.
    """
    weights: np.ndarray
    bias: float
    l2: float = 0.0
    standardizer: Optional[StandardScaler] = None
    loss_history: List[float] = field(default_factory=list)

    def decision(self, vectors: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
        if x.shape[1] != self.weights.shape[0]:
            raise ContractViolation(f"classifier expects {self.weights.shape[0]} features; got {x.shape[1]}")
        if self.standardizer is not None:
            x = self.standardizer.transform(x)
        return x @ self.weights + self.bias

    def predict_proba(self, vectors: np.ndarray) -> np.ndarray:
        return expit(self.decision(vectors))


def logistic_objective(weights: np.ndarray, bias: float, x: np.ndarray, y: np.ndarray, l2: float) -> float:
    """Mean binary cross-entropy plus ``l2 * ||w||²``."""
    z = x @ weights + bias
    # -[y ln σ(z) + (1 - y) ln(1 - σ(z))] = ln(1 + e^z) - y z
    return float(np.mean(np.logaddexp(0.0, z) - y * z) + l2 * weights @ weights)


def _gradient(weights: np.ndarray, bias: float, x: np.ndarray, y: np.ndarray, l2: float) -> Tuple[np.ndarray, float]:
    residual = expit(x @ weights + bias) - y
    return x.T @ residual / len(y) + 2.0 * l2 * weights, float(residual.mean())


def train_linear_classifier(
        vectors: np.ndarray,
        labels: np.ndarray,
        l2: float = 1e-3,
        tolerance: float = 1e-6,
        max_iterations: int = 5000,
        standardize: bool = False,
) -> LogisticModel:
    """
    Minimizes the regularized logistic objective from ``w = 0, b = 0``.

    Each step follows the negative gradient with a backtracking line search (sufficient
    decrease), so the recorded objective never increases. Training stops when the gradient
    norm falls below ``tolerance`` or after ``max_iterations`` steps.

    Args:
        vectors: ``(N, d)`` training inputs.
        labels: ``N`` labels in ``{0, 1}`` with both classes present.
        l2: Regularization strength, ``>= 0``.
        standardize: Fit a ``StandardScaler`` on ``vectors`` and train on standardized
            inputs; constant features keep scale 1.
    """
    x = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    if x.shape[0] == 0:
        raise DegenerateInputError("cannot train a classifier without examples")
    if x.shape[0] != y.shape[0]:
        raise ContractViolation(f"{x.shape[0]} vectors but {y.shape[0]} labels")
    if not np.all((y == 0) | (y == 1)):
        raise ContractViolation("labels must be 0 or 1")
    if y.min() == y.max():
        raise ContractViolation("training set holds a single class; both classes are needed")
    if l2 < 0:
        raise ContractViolation(f"l2 must be >= 0; got {l2}")
    if not np.all(np.isfinite(x)):
        raise NumericError("training vectors contain non-finite values")

    standardizer = StandardScaler().fit(x) if standardize else None
    if standardizer is not None:
        x = standardizer.transform(x)

    w, b = np.zeros(x.shape[1]), 0.0
    loss = logistic_objective(w, b, x, y, l2)
    history = [loss]
    step = 1.0
    for _ in range(max_iterations):
        gw, gb = _gradient(w, b, x, y, l2)
        squared = float(gw @ gw + gb * gb)
        if np.sqrt(squared) < tolerance:
            break
        while True:
            candidate_w, candidate_b = w - step * gw, b - step * gb
            candidate = logistic_objective(candidate_w, candidate_b, x, y, l2)
            if candidate <= loss - ARMIJO * step * squared or step < 1e-16:
                break
            step *= 0.5
        if candidate > loss:
            break
        w, b, loss = candidate_w, candidate_b, candidate
        history.append(loss)
        step = min(step * 2.0, 1e3)
    logger.debug(f"Logistic training stopped after {len(history) - 1} steps at objective {loss:.6g}")
    return LogisticModel(weights=w, bias=b, l2=l2, standardizer=standardizer, loss_history=history)
