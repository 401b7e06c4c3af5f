"""
Common interface of the reference-point families U_c
"""

from abc import ABC, abstractmethod
from typing import Any

import numpy as np


class ExcessiveFunction(ABC):
    """
    U_c: the excessive function with U_c(c) = 1 and U_c'(c) = 0 for a
    finite interior reference point c.

    All evaluation methods accept scalars or numpy arrays.
    """

    c: float

    @abstractmethod
    def _value(self, y: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def _first(self, y: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def _second(self, y: np.ndarray) -> np.ndarray:
        pass

    @staticmethod
    def _apply(fn, y: Any):
        arr = np.asarray(y, dtype=float)
        out = fn(arr)
        return float(out) if np.ndim(y) == 0 else out

    def __call__(self, y: Any):
        return self._apply(self._value, y)

    def derivative(self, y: Any):
        return self._apply(self._first, y)

    def second_derivative(self, y: Any):
        return self._apply(self._second, y)
