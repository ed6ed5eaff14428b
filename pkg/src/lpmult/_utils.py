from __future__ import annotations

import asyncio
from asyncio import Task
from typing import Any, Coroutine

import numpy as np
import numpy.typing as npt

from lpmult.lptyping import FloatArray


def create_task(coro: Coroutine[Any, Any, Any], *, name: Any = None) -> Task[Any]:
    task = asyncio.create_task(coro, name=name)
    task.add_done_callback(_raise_error)
    return task


def _raise_error(task: Task[Any]):
    try:
        exception = task.exception()
        if exception is not None:
            raise exception
    except asyncio.CancelledError:
        pass


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def lq_combine(a: npt.ArrayLike, q: float, axis: int = 0) -> FloatArray:
    """ℓ^q norm of a nonnegative array along `axis`.

    Values are rescaled by their maximum first so large q neither overflows nor underflows.
    """
    arr = np.asarray(a, dtype=np.float64)
    if np.isinf(q):
        return np.max(arr, axis=axis)
    if q == 1:
        return np.sum(arr, axis=axis)
    top = np.max(arr, axis=axis, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    scaled = np.sum((arr / safe) ** q, axis=axis, keepdims=True) ** (1.0 / q)
    return np.squeeze(top * scaled, axis=axis)


def smooth_step(u: npt.ArrayLike, lo: float, hi: float) -> FloatArray:
    """C^∞ transition equal to 1 for u ≤ lo and 0 for u ≥ hi.

    Built from ψ(v) = exp(−1/v) for v > 0 as ψ(hi−u) / (ψ(hi−u) + ψ(u−lo)).
    """
    x = np.asarray(u, dtype=np.float64)
    a = _psi(hi - x)
    b = _psi(x - lo)
    return a / (a + b)


def _psi(v: FloatArray) -> FloatArray:
    out = np.zeros_like(v)
    positive = v > 0
    out[positive] = np.exp(-1.0 / v[positive])
    return out
