import logging
import time
from collections import OrderedDict
from contextlib import contextmanager
from typing import Dict

logger = logging.getLogger(__name__)


class StageTimer:
    """
    Wall-clock durations of named pipeline stages, measured with perf_counter.

    A stage entered more than once accumulates its time.
    """

    def __init__(self) -> None:
        self._durations: "OrderedDict[str, float]" = OrderedDict()

    @contextmanager
    def stage(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            self._durations[name] = self._durations.get(name, 0.0) + elapsed
            logger.debug(f"Stage {name} took {elapsed:.3f} s")

    def durations(self) -> Dict[str, float]:
        return dict(self._durations)

    def total(self) -> float:
        return sum(self._durations.values())
