"""Central finite-difference verification of analytic gradients."""
from typing import Callable, Dict, Mapping

import numpy as np

from ..errors import ContractViolation, NumericError
from .tensor import Tensor, backward, leaves_from

ScalarFunction = Callable[[Dict[str, Tensor]], Tensor]


def _evaluate(fn: ScalarFunction, arrays: Mapping[str, np.ndarray]) -> float:
    out = fn(leaves_from(arrays))
    value = out.item()
    if not np.isfinite(value):
        raise NumericError(f"checked function returned {value}")
    return value


def numerical_gradient(fn: ScalarFunction, params: Mapping[str, np.ndarray], eps: float) -> Dict[str, np.ndarray]:
    """Central differences ``(f(x + eps) - f(x - eps)) / 2 eps`` per coordinate."""
    work = {name: np.array(value, dtype=np.float64, copy=True) for name, value in params.items()}
    grads = {}
    for name, array in work.items():
        grad = np.zeros_like(array)
        flat, gflat = array.reshape(-1), grad.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + eps
            upper = _evaluate(fn, work)
            flat[i] = original - eps
            lower = _evaluate(fn, work)
            flat[i] = original
            gflat[i] = (upper - lower) / (2.0 * eps)
        grads[name] = grad
    return grads


def grad_check(fn: ScalarFunction, params: Mapping[str, np.ndarray], eps: float = 1e-5) -> float:
    """
    Compares reverse-mode gradients of ``fn`` with central finite differences.

    Args:
        fn: Deterministic function mapping named leaves to a scalar tensor.
        params: Named parameter values at which gradients are compared.
        eps: Finite-difference step.

    Returns:
        The maximum over every coordinate of
        ``|analytic - numeric| / max(1e-8, |analytic| + |numeric|)``.
    """
    if eps <= 0:
        raise ContractViolation(f"grad_check needs eps > 0; got {eps}")

    leaves = leaves_from({name: np.array(v, dtype=np.float64) for name, v in params.items()})
    out = fn(leaves)
    if not np.isfinite(out.item()):
        raise NumericError(f"checked function returned {out.item()}")
    analytic = backward(out, leaves)
    numeric = numerical_gradient(fn, params, eps)

    worst = 0.0
    for name in params:
        a, n = analytic[name], numeric[name]
        err = np.abs(a - n) / np.maximum(1e-8, np.abs(a) + np.abs(n))
        if err.size:
            worst = max(worst, float(err.max()))
    return worst
