"""digraph-perf CLI 模块。

Usage:
    digraph-perf COMMAND [OPTIONS]

Example:
    digraph-perf compute --graph star:5 --dynamics first
"""
from digraph_perf.cli.commands import AVAILABLE_COMMANDS
from digraph_perf.cli.main import main

__all__ = ["main", "AVAILABLE_COMMANDS"]
