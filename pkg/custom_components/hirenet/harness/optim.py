"""Adaptive moment estimation over named parameters, with global-norm gradient clipping."""
import logging
from typing import Dict, Mapping, Tuple

import numpy as np

from ..lib.config import OptimizerSettings
from ..lib.parameters import HireNetParams

logger = logging.getLogger(__name__)


def clip_by_global_norm(grads: Mapping[str, np.ndarray], max_norm: float) -> Tuple[Dict[str, np.ndarray], float]:
    """Rescales every gradient by ``min(1, max_norm / ||g||)``, where ``||g||`` spans all of them."""
    norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))
    scale = min(1.0, max_norm / norm) if norm > 0 else 1.0
    return {name: g * scale for name, g in grads.items()}, norm


class Adam:
    def __init__(self, settings: OptimizerSettings):
        self.settings = settings
        self.step_count = 0
        self.first: Dict[str, np.ndarray] = {}
        self.second: Dict[str, np.ndarray] = {}

    def step(self, params: HireNetParams, grads: Mapping[str, np.ndarray]) -> float:
        """
        Clips ``grads`` and applies one update to ``params`` in place.

        Returns:
            The global gradient norm before clipping.
        """
        s = self.settings
        grads, norm = clip_by_global_norm(grads, s.clip_norm)
        logger.debug(f"gradient norm {norm:.6g} (clip {s.clip_norm})")
        self.step_count += 1
        t = self.step_count
        for name, g in grads.items():
            m = self.first.get(name, np.zeros_like(g))
            v = self.second.get(name, np.zeros_like(g))
            m = s.beta1 * m + (1 - s.beta1) * g
            v = s.beta2 * v + (1 - s.beta2) * g * g
            self.first[name], self.second[name] = m, v
            m_hat = m / (1 - s.beta1 ** t)
            v_hat = v / (1 - s.beta2 ** t)
            params.update(name, -s.learning_rate * m_hat / (np.sqrt(v_hat) + s.epsilon))
        return norm
