"""Asynchronous parameter sweeps over the phase and catalog computations."""

from __future__ import annotations

import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from typing import Any, Callable, List, Optional, Sequence, Tuple, TypeVar

from sigma_lagrangian.models import CatalogEntry, HSParams, PhaseResult
from sigma_lagrangian.phase_analysis import catalog_samples, classify_catalog

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class SweepRunner:
    """Run pure computations on a thread pool, a bounded number at a time."""

    def __init__(self, max_workers: int = 4, concurrency: Optional[int] = None) -> None:
        """Initialize the runner.

        :param max_workers: Threads in the executor.
        :type max_workers: int
        :param concurrency: Evaluations allowed in flight, ``max_workers`` by default.
        :type concurrency: Optional[int]
        """
        if max_workers < 1:
            raise ValueError("max_workers must be positive")
        self.max_workers = max_workers
        self.concurrency = concurrency or max_workers
        self._limit: Optional[asyncio.Semaphore] = None
        self._executor: Optional[ThreadPoolExecutor] = None

    @property
    def executor(self) -> ThreadPoolExecutor:
        """The thread pool, created on first use."""
        if self._executor is None:
            self._executor = ThreadPoolExecutor(max_workers=self.max_workers)
        return self._executor

    async def _submit(self, fn: Callable[[], R]) -> R:
        if self._limit is None:
            self._limit = asyncio.Semaphore(self.concurrency)
        async with self._limit:
            loop = asyncio.get_running_loop()
            return await loop.run_in_executor(self.executor, fn)

    async def map(self, fn: Callable[[T], R], items: Sequence[T]) -> List[R]:
        """Apply ``fn`` to every item; results come back in input order."""
        results = await asyncio.gather(
            *(self._submit(partial(fn, item)) for item in items)
        )
        logger.info("Sweep finished %d evaluations", len(results))
        return list(results)

    async def close(self) -> None:
        """Shut the thread pool down."""
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    async def __aenter__(self) -> SweepRunner:
        """Enter the asynchronous context."""
        return self

    async def __aexit__(
        self,
        exc_type: Optional[type],
        exc_val: Optional[BaseException],
        exc_tb: Optional[Any],
    ) -> None:
        """Shut the executor down when leaving the context."""
        await self.close()


PhaseRow = Tuple[float, str, PhaseResult, int]


def _phase_row(params: HSParams, E: float) -> PhaseRow:
    entry = classify_catalog(params, E=E)
    return E, entry.energy_class.tag.value, entry.phi, entry.self_intersections


async def phase_table(
    params: HSParams,
    energies: Sequence[float],
    runner: Optional[SweepRunner] = None,
) -> List[PhaseRow]:
    """Rows ``(E, class, Phi, self-intersections)`` for each energy, in input order.

    Levels carrying two components report the bounded one.

    :param params: ODE parameters with nonzero flux.
    :type params: HSParams
    :param energies: Energy levels.
    :type energies: Sequence[float]
    :param runner: Shared runner; a private one is used when omitted.
    :type runner: Optional[SweepRunner]
    :return: One row per energy.
    :rtype: List[PhaseRow]
    """
    evaluate = partial(_phase_row, params)
    if runner is not None:
        return await runner.map(evaluate, [float(E) for E in energies])
    async with SweepRunner() as private:
        return await private.map(evaluate, [float(E) for E in energies])


async def catalog_table(
    sweep: Sequence[HSParams], runner: Optional[SweepRunner] = None
) -> List[Tuple[HSParams, List[CatalogEntry]]]:
    """Catalog samples for every parameter pair of a sweep."""
    if runner is not None:
        entries = await runner.map(catalog_samples, list(sweep))
    else:
        async with SweepRunner() as private:
            entries = await private.map(catalog_samples, list(sweep))
    return list(zip(sweep, entries))
