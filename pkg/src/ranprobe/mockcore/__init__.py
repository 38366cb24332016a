"""Reference core stub: the loopback oracle for the whole test catalog."""

from .config import CoreConfig, Subscriber
from .core import BindFailure, CoreSession, CoreUeState, DebugCounters, MockCore, serve

__all__ = [name for name in dir() if not name.startswith("_")]
