"""Dense tensors recorded in a define-by-run computation graph."""
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..errors import ContractViolation, NumericError

BackwardRule = Callable[[np.ndarray], None]


class Tensor:
    """
    A dense float64 array (rank 0 to 2) that is also a node of the computation graph.

    Leaf tensors are created with [Tensor.leaf][hirenet.autodiff.tensor.Tensor.leaf]
    (trainable values addressed by name) or
    [Tensor.constant][hirenet.autodiff.tensor.Tensor.constant] (data). Every primitive
    returns a new non-leaf tensor holding its inputs and a backward rule which adds
    (never assigns) into the inputs' gradient buffers.

    Attributes:
        values: The forward value, row-major float64.
        grad: Gradient buffer of the same shape, allocated lazily on the first backward pass.
        op: Tag of the primitive which produced the tensor (``"leaf"`` / ``"constant"``).
        inputs: Input tensors of the producing primitive.
        name: Canonical parameter name for named leaves.
    """

    __slots__ = ("values", "grad", "op", "inputs", "name", "requires_grad", "_backward")

    def __init__(
            self,
            values: np.ndarray,
            op: str = "constant",
            inputs: Sequence["Tensor"] = (),
            backward: Optional[BackwardRule] = None,
            name: Optional[str] = None,
            requires_grad: bool = False,
    ):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim > 2:
            raise ContractViolation(f"tensors have rank <= 2, got shape {values.shape} from {op}")
        if not np.all(np.isfinite(values)):
            where = f" {name!r}" if name else ""
            raise NumericError(f"non-finite value produced by {op} node{where}")
        self.values = values
        self.grad: Optional[np.ndarray] = None
        self.op = op
        self.inputs: Tuple["Tensor", ...] = tuple(inputs)
        self.name = name
        self.requires_grad = requires_grad or any(t.requires_grad for t in self.inputs)
        self._backward = backward if self.requires_grad else None

    @classmethod
    def leaf(cls, values: np.ndarray, name: str) -> "Tensor":
        return cls(values, op="leaf", name=name, requires_grad=True)

    @classmethod
    def constant(cls, values) -> "Tensor":
        return cls(values, op="constant")

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    @property
    def is_leaf(self) -> bool:
        return not self.inputs

    def item(self) -> float:
        return float(self.values.reshape(-1)[0])

    def accumulate(self, delta: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.values)
        self.grad += delta

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"Tensor({self.op}{label}, shape={self.shape})"


def topological_order(root: Tensor) -> List[Tensor]:
    """Returns every node reachable from ``root``, inputs before consumers."""
    order: List[Tensor] = []
    visited = set()
    stack: List[Tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node.inputs:
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(loss: Tensor, params: Optional[Mapping[str, Tensor]] = None) -> Dict[str, np.ndarray]:
    """
    Reverse-mode differentiation of a scalar loss.

    Intermediate gradients are reset on every call, while leaf gradients accumulate
    across calls until [Tensor.zero_grad][hirenet.autodiff.tensor.Tensor.zero_grad]
    is called. Summing the maps of two separate calls therefore equals the map of
    the summed loss.

    Args:
        loss: A tensor holding exactly one value.
        params: Optional named leaves; any of them unreachable from ``loss`` is
            reported with a zero gradient.

    Returns:
        A mapping from leaf name to the gradient accumulated in that leaf.
    """
    if loss.values.size != 1:
        raise ContractViolation(f"backward needs a scalar root, got shape {loss.shape}")

    order = topological_order(loss)
    for node in order:
        if not node.is_leaf:
            node.grad = None
    loss.accumulate(np.ones_like(loss.values))

    for node in reversed(order):
        if node._backward is not None and node.grad is not None:
            node._backward(node.grad)

    grads: Dict[str, np.ndarray] = {}
    for node in order:
        if node.is_leaf and node.name is not None:
            grads[node.name] = node.grad if node.grad is not None else np.zeros_like(node.values)
    for name, leaf in (params or {}).items():
        if name not in grads:
            grads[name] = leaf.grad if leaf.grad is not None else np.zeros_like(leaf.values)
    return grads


def leaves_from(arrays: Mapping[str, np.ndarray], names: Optional[Iterable[str]] = None) -> Dict[str, Tensor]:
    """Wraps named arrays into fresh leaves for one forward pass."""
    selected = names if names is not None else arrays.keys()
    return {name: Tensor.leaf(arrays[name], name) for name in selected}
