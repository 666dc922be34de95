"""
Library Utils.
"""
import threading
from collections import OrderedDict
from typing import Callable, Hashable, TypeVar

from .consts import GRID_TOLERANCE
from .exceptions import GridMismatch

V = TypeVar("V")


class BoundedCache(OrderedDict):
    """Least recently used mapping holding at most max entries."""

    def __init__(self, *args, max=0, **kwargs) -> None:
        self._max = max
        self._lock = threading.Lock()
        super().__init__(*args, **kwargs)

    def __setitem__(self, key, value) -> None:
        OrderedDict.__setitem__(self, key, value)
        if self._max > 0:
            if len(self) > self._max:
                self.popitem(False)

    def get_or_compute(self, key: Hashable, compute: Callable[[], V]) -> V:
        """Return the cached value for key, computing and storing it if missing."""
        with self._lock:
            if key in self:
                self.move_to_end(key)
                return self[key]
        value = compute()
        with self._lock:
            self[key] = value
        return value


def steps_in(duration: float, dt: float) -> int:
    """Return the number of dt steps in duration, which dt must divide."""
    if not dt > 0:
        raise GridMismatch(f"Time step must be positive, got {dt}")
    steps = round(duration / dt)
    if abs(steps * dt - duration) > GRID_TOLERANCE:
        raise GridMismatch(f"Time step {dt} s does not divide {duration} s")
    return int(steps)
