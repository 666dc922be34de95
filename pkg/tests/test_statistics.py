"""Test for the sweep statistics."""
import pytest as pytest

from pushpull_fatigue.consts import STATUS_ERROR, STATUS_OK
from pushpull_fatigue.statistics import SweepStatistics


@pytest.mark.asyncio
async def test_basic_statistics():
    """Test some basic statistics behaviour."""
    statistics = SweepStatistics()
    assert repr(statistics) == "<SweepStatistics(0.0%)>"
    assert statistics.total == 0
    assert statistics.get(0) is None
    assert statistics.error(0) is None


@pytest.mark.asyncio
async def test_update():
    """Test recording cells."""
    statistics = SweepStatistics()
    # 1. successful cell.
    await statistics.cell_successful(0)
    assert statistics.success_ratio() == 1.0
    assert statistics.get(0) == STATUS_OK
    # 2. unsuccessful cell.
    await statistics.cell_unsuccessful(2, "unreachable")
    assert repr(statistics) == "<SweepStatistics(50.0%)>"
    assert statistics.error(2) == "unreachable"
    # 3. another successful cell.
    await statistics.cell_successful(1)
    assert round(abs(statistics.success_ratio() - 0.666), 2) == 0
    assert repr(statistics) == "<SweepStatistics(66.7%)>"
    assert statistics.failed_cells == [2]
    # 4. a retried cell replaces its earlier outcome.
    await statistics.cell_successful(2)
    assert statistics.get(2) == STATUS_OK
    assert statistics.error(2) is None
    assert statistics.failed_cells == []
    assert statistics.total == 3
    assert STATUS_ERROR not in (statistics.get(cell) for cell in range(3))
