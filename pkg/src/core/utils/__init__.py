from .logs import configure_logging, reset_logging
from .monitor import ResourceMonitor

__all__ = [
    "configure_logging",
    "reset_logging",
    "ResourceMonitor",
]
