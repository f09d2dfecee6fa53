"""Process resource readings for the benchmark"""

import os
import time
from typing import Optional

import psutil


class ResourceMonitor:
    """Wraps psutil.Process for the current (or a given) process

    Reports resident memory in MiB and wall-clock laps. Falls back to NaN
    when the process is gone.
    """

    def __init__(self, pid: Optional[int] = None):
        self.pid = pid if pid is not None else os.getpid()
        self.process = psutil.Process(self.pid)
        self._lap_start = time.perf_counter()

    def rss_mb(self) -> float:
        """Resident set size in MiB"""
        try:
            return self.process.memory_info().rss / 1024**2
        except psutil.NoSuchProcess:
            return float("nan")

    def lap(self) -> float:
        """Seconds since the previous lap (or construction)"""
        now = time.perf_counter()
        elapsed = now - self._lap_start
        self._lap_start = now
        return elapsed

    def __repr__(self) -> str:
        return f"ResourceMonitor(pid={self.pid})"
