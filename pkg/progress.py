import logging
import threading
from abc import abstractmethod
from threading import Lock
from typing import TypeVar, Generic

logger = logging.getLogger(__name__)

T = TypeVar("T")


class LockedValue(Generic[T]):
    """
    A value shared between the sweep loop and the reporting thread; every read
    and write goes through one lock.
    """

    def __init__(self, value: T):
        self._value: T = value
        self._lock: Lock = Lock()

    def getv(self) -> T:
        with self._lock:
            return self._value

    def setv(self, value: T) -> None:
        with self._lock:
            self._value = value

    def add(self, amount) -> T:
        with self._lock:
            self._value += amount
            return self._value


class Task:
    """
    A background daemon thread executing `run` until `stop` is called.

    Attributes:
    - running: A `LockedValue` flag that `run` implementations poll.
    - thread: The `threading.Thread` executing `run`.
    """

    def __init__(self):
        self.running = LockedValue(False)
        self._wakeup = threading.Event()
        self.thread = threading.Thread(target=self.run)
        self.thread.daemon = True

    def start(self):
        logger.debug(f"Starting new thread: {self}")
        self.running.setv(True)
        self.thread.start()

    def stop(self):
        self.running.setv(False)
        self._wakeup.set()
        logger.debug(f"Exiting: {self}")
        self.thread.join()
        logger.debug(f"Exited: {self}")

    def sleep(self, seconds: float):
        self._wakeup.wait(seconds)

    @abstractmethod
    def run(self):
        pass

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop()


class ProgressMonitor(Task):
    """Logs the number of finished work units of a long stage every `interval` seconds."""

    def __init__(self, label: str, total: int, interval: float = 5.0):
        super().__init__()
        self.label = label
        self.total = total
        self.interval = interval
        self.done = LockedValue(0)

    def __str__(self):
        return f"ProgressMonitor(label={self.label}, total={self.total})"

    def advance(self, amount: int = 1) -> int:
        return self.done.add(amount)

    def run(self):
        reported = -1
        while self.running.getv():
            self.sleep(self.interval)
            done = self.done.getv()
            if self.running.getv() and done != reported:
                logger.info(f"{self.label}: {done}/{self.total}")
                reported = done
