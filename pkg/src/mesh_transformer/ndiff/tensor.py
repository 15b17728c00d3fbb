"""Dense tensors recorded on a reverse-mode tape."""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..exceptions import NonFiniteError, ShapeMismatchError

logger = logging.getLogger("mesh-transformer.ndiff")

VJP = Callable[[np.ndarray], tuple[np.ndarray | None, ...]]


class Tensor:
    """A value produced on a tape.

    ``index`` is the creation position on the tape, so reverse creation order
    is a valid reverse topological order.
    """

    __slots__ = ("value", "tape", "index", "requires_grad", "name")

    def __init__(
        self,
        value: np.ndarray,
        tape: Tape,
        index: int,
        requires_grad: bool,
        name: str | None = None,
    ) -> None:
        self.value = value
        self.tape = tape
        self.index = index
        self.requires_grad = requires_grad
        self.name = name

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.value.shape)

    @property
    def dtype(self) -> np.dtype:
        return self.value.dtype

    def numpy(self) -> np.ndarray:
        return self.value

    def item(self) -> float:
        return float(self.value.reshape(-1)[0])

    def __add__(self, other: Tensor) -> Tensor:
        from .ops import add

        return add(self, other)

    def __mul__(self, other: Tensor | float) -> Tensor:
        from .ops import hadamard, scale

        if isinstance(other, Tensor):
            return hadamard(self, other)
        return scale(self, float(other))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}{label})"


@dataclass(frozen=True)
class _Node:
    op: str
    output: int
    inputs: tuple[int, ...]
    vjp: VJP


class Gradients(Mapping[str, np.ndarray]):
    """Gradients of one backward pass, keyed by watched parameter name."""

    def __init__(self, by_index: dict[int, np.ndarray], tape: Tape) -> None:
        self._by_index = by_index
        self._tape = tape

    def __getitem__(self, name: str) -> np.ndarray:
        tensor = self._tape.params[name]
        grad = self._by_index.get(tensor.index)
        return np.zeros_like(tensor.value) if grad is None else grad

    def __iter__(self) -> Any:
        return iter(self._tape.params)

    def __len__(self) -> int:
        return len(self._tape.params)

    def of(self, tensor: Tensor) -> np.ndarray:
        """Gradient with respect to any tensor on the tape."""
        grad = self._by_index.get(tensor.index)
        return np.zeros_like(tensor.value) if grad is None else grad


class Tape:
    """
    Reverse-mode recorder for the differentiable ops in ``ndiff.ops``.

    Args:
        dtype: Float width of every value on the tape
        record: When False, ops evaluate without recording (inference)
        check_finite: Raise NonFiniteError as soon as an op yields NaN or Inf
    """

    def __init__(
        self,
        dtype: type[np.floating] | np.dtype = np.float64,
        record: bool = True,
        check_finite: bool = False,
    ) -> None:
        self.dtype = np.dtype(dtype)
        self.recording = record
        self.check_finite = check_finite
        self.params: dict[str, Tensor] = {}
        self._nodes: list[_Node] = []
        self._count = 0

    def _next_index(self) -> int:
        index = self._count
        self._count += 1
        return index

    def watch(self, name: str, array: np.ndarray) -> Tensor:
        """Register a named leaf whose gradient backward() reports."""
        if name in self.params:
            raise ValueError(f"Parameter '{name}' is already watched")
        tensor = Tensor(
            np.array(array, dtype=self.dtype, copy=True),
            self,
            self._next_index(),
            requires_grad=self.recording,
            name=name,
        )
        self.params[name] = tensor
        return tensor

    def watch_all(self, arrays: Mapping[str, np.ndarray]) -> dict[str, Tensor]:
        return {name: self.watch(name, array) for name, array in arrays.items()}

    def constant(self, array: np.ndarray) -> Tensor:
        return Tensor(
            np.asarray(array, dtype=self.dtype), self, self._next_index(), requires_grad=False
        )

    def record(
        self,
        op: str,
        value: np.ndarray,
        inputs: Iterable[Tensor],
        vjp: VJP,
    ) -> Tensor:
        """Append an op result; ``vjp`` maps the output cotangent to one per input."""
        inputs = tuple(inputs)
        for tensor in inputs:
            if tensor.tape is not self:
                raise ShapeMismatchError(f"Op '{op}' mixes tensors from different tapes")
        value = np.asarray(value, dtype=self.dtype)
        if self.check_finite and not np.all(np.isfinite(value)):
            raise NonFiniteError(f"Op '{op}' produced a non-finite value")
        requires_grad = self.recording and any(t.requires_grad for t in inputs)
        out = Tensor(value, self, self._next_index(), requires_grad=requires_grad)
        if requires_grad:
            self._nodes.append(_Node(op, out.index, tuple(t.index for t in inputs), vjp))
        return out

    @property
    def num_ops(self) -> int:
        return len(self._nodes)

    def backward(self, output: Tensor, seed: np.ndarray | None = None) -> Gradients:
        """
        Propagate cotangents from ``output`` back to every recorded input.

        Args:
            output: The tensor to differentiate (a scalar unless ``seed`` is given)
            seed: Output cotangent; defaults to ones

        Returns:
            Gradients for the watched parameters (and any tape tensor via ``of``)
        """
        if not self.recording:
            raise RuntimeError("backward() called on a non-recording tape")
        if seed is None:
            if output.value.size != 1:
                raise ShapeMismatchError(
                    f"backward() needs a scalar output or a seed, got shape {output.shape}"
                )
            seed = np.ones_like(output.value)
        grads: dict[int, np.ndarray] = {output.index: np.asarray(seed, dtype=self.dtype)}

        for node in reversed(self._nodes):
            upstream = grads.get(node.output)
            if upstream is None:
                continue
            for index, grad in zip(node.inputs, node.vjp(upstream), strict=True):
                if grad is None:
                    continue
                grad = np.asarray(grad, dtype=self.dtype)
                previous = grads.get(index)
                grads[index] = grad if previous is None else previous + grad
        return Gradients(grads, self)
