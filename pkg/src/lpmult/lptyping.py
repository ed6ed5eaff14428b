from logging import Logger, LoggerAdapter
from typing import TYPE_CHECKING, Any, Callable, Dict, List, NewType, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

if TYPE_CHECKING:
    LoggerLike = Union[Logger, LoggerAdapter[Any]]
else:
    LoggerLike = Union[Logger, LoggerAdapter]
FloatArray = npt.NDArray[np.float64]
"""A real-valued array."""
ComplexArray = npt.NDArray[np.complex128]
"""A complex-valued array."""
IntArray = npt.NDArray[np.int64]
"""An integer array."""
Frequencies = Tuple[FloatArray, ...]
"""Meshgrid arrays of the frequency lattice, one per axis."""
Symbol = Union[Callable[[Frequencies], npt.ArrayLike], npt.ArrayLike]
"""A Fourier symbol, either sampled on the lattice or a callable of the lattice meshgrid."""
SeedLike = Union[int, Sequence[int]]
"""Anything `numpy.random.default_rng` accepts as entropy."""
Level = NewType("Level", int)
"""A dyadic level k (frequencies near 2^k)."""
JSONObject = Union[int, float, str, bool, Dict[str, "JSONObject"], List["JSONObject"], None]
"""An attribute with the structure of a JSON object."""
JSONDict = Dict[str, JSONObject]
"""An attribute with the structure of a JSON dict."""
