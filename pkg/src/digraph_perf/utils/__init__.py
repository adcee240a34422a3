"""
digraph-perf 的实用程序模块
"""
from .logger import logger, set_level

__all__ = ["logger", "set_level"]
