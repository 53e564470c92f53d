"""Tests for the sweep module."""

import threading
import time
from typing import List

import pytest
from pytest_mock import MockerFixture

from sigma_lagrangian.models import HSParams
from sigma_lagrangian.phase_analysis import phase_for_energy
from sigma_lagrangian.sweep import SweepRunner, catalog_table, phase_table


@pytest.mark.asyncio
async def test_map_keeps_input_order() -> None:
    """Test that results come back in input order whatever the finishing order."""
    delays = [0.05, 0.0, 0.03, 0.01]

    def slow_identity(delay: float) -> float:
        time.sleep(delay)
        return delay

    async with SweepRunner(max_workers=4) as runner:
        assert await runner.map(slow_identity, delays) == delays
    assert runner._executor is None


@pytest.mark.asyncio
async def test_concurrency_limit() -> None:
    """Test that no more than the allowed number of evaluations run at once."""
    lock = threading.Lock()
    active: List[int] = [0]
    peak: List[int] = [0]

    def tracked(item: int) -> int:
        with lock:
            active[0] += 1
            peak[0] = max(peak[0], active[0])
        time.sleep(0.02)
        with lock:
            active[0] -= 1
        return item * item

    async with SweepRunner(max_workers=4, concurrency=2) as runner:
        assert await runner.map(tracked, range(8)) == [i * i for i in range(8)]
    assert 1 <= peak[0] <= 2


@pytest.mark.asyncio
async def test_phase_table(hs_params: HSParams) -> None:
    """Test classes and phases of a small energy sweep."""
    rows = await phase_table(hs_params, [1.0, -0.5, -3.0])
    assert [tag for _, tag, _, _ in rows] == ["TypeI", "TypeIII", "TypeII"]
    for E, _, phi, _ in rows:
        assert phi.value == pytest.approx(phase_for_energy(hs_params, E).value)
    assert rows[2][3] >= 1


@pytest.mark.asyncio
async def test_catalog_table_uses_shared_runner(mocker: MockerFixture) -> None:
    """Test that every parameter pair of a sweep is cataloged."""
    samples = mocker.patch("sigma_lagrangian.sweep.catalog_samples", return_value=[])
    sweep = [HSParams(n=3, C=3.0), HSParams(n=4, C=2.0)]
    async with SweepRunner(max_workers=2) as runner:
        result = await catalog_table(sweep, runner)
    assert result == [(sweep[0], []), (sweep[1], [])]
    assert samples.call_count == 2


def test_runner_needs_workers() -> None:
    """Test that a runner without threads is rejected."""
    with pytest.raises(ValueError):
        SweepRunner(max_workers=0)
