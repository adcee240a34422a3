"""扫描执行器模块.

按行执行参数扫描（ω 扫描、γ_p 扫描、n 范围），支持：
- 单行执行，领域错误（如不稳定）按行记录而不中断扫描
- 批量执行（串行/并行），输出顺序与输入顺序一致
- 执行时间统计

每行在线程中运行（numpy/scipy 在 BLAS 调用中释放 GIL），并发数由
Settings.THREADS（环境变量 DIGRAPH_PERF_THREADS）限制。

使用示例:
    executor = SweepExecutor(parallel_execution=True)
    rows = executor.run_batch([(omega, evaluate, {"omega": omega}) for omega in range(1, 51)])
"""
import asyncio
import logging
import time
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any, Optional

from digraph_perf.core.config import settings
from digraph_perf.core.errors import DigraphPerfError

logger = logging.getLogger(__name__)

RowCall = tuple[int, Callable[..., Any], dict[str, Any]]


@dataclass
class RowResult:
    index: int
    arguments: dict[str, Any]
    value: Any
    error: Optional[dict[str, Any]]
    execution_time: float

    @property
    def success(self) -> bool:
        return self.error is None


class SweepExecutor:
    def __init__(
        self,
        threads: Optional[int] = None,
        parallel_execution: bool = True,
    ) -> None:
        self._threads = threads or settings.THREADS
        self._parallel_execution = parallel_execution

    @property
    def threads(self) -> int:
        return self._threads

    async def execute_single(
        self,
        index: int,
        fn: Callable[..., Any],
        arguments: dict[str, Any],
        semaphore: Optional[asyncio.Semaphore] = None,
    ) -> RowResult:
        start_time = time.time()
        value: Any = None
        error: Optional[dict[str, Any]] = None
        try:
            if semaphore is None:
                value = fn(**arguments)
            else:
                async with semaphore:
                    value = await asyncio.to_thread(fn, **arguments)
        except DigraphPerfError as e:
            logger.info("row %d failed: %s", index, e)
            error = e.to_dict()

        return RowResult(
            index=index,
            arguments=arguments,
            value=value,
            error=error,
            execution_time=time.time() - start_time,
        )

    async def execute_batch(self, calls: list[RowCall]) -> list[RowResult]:
        if not calls:
            return []

        if self._parallel_execution and len(calls) > 1 and self._threads > 1:
            semaphore = asyncio.Semaphore(self._threads)
            tasks = [
                self.execute_single(index, fn, args, semaphore) for index, fn, args in calls
            ]
            results = list(await asyncio.gather(*tasks))
        else:
            results = []
            for index, fn, args in calls:
                results.append(await self.execute_single(index, fn, args))
        return results

    def run_batch(self, calls: list[RowCall]) -> list[RowResult]:
        """Synchronous entry point for library and CLI callers."""
        return asyncio.run(self.execute_batch(calls))
