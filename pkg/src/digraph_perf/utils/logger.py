"""
digraph-perf 的日志工具

stdout 用于输出 JSON/CSV 结果，因此日志写到 stderr。
"""
import logging
import sys

from digraph_perf.core.config import settings

# 创建全局logger
logger = logging.getLogger("digraph_perf")

# 如果还没有配置handler，则配置
if not logger.handlers:
    logger.setLevel(settings.LOG_LEVEL)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.DEBUG)

    formatter = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

# 防止日志传播到根logger
logger.propagate = False


def set_level(level: str) -> None:
    """Apply a level name such as "INFO" to the package logger."""
    logger.setLevel(level.strip().upper())
