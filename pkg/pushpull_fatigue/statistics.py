"""Sweep statistics."""
from typing import Dict, List, Optional

from .consts import STATUS_ERROR, STATUS_OK


class SweepStatistics:
    """Outcome bookkeeping of sweep cells."""

    def __init__(self) -> None:
        """Initialise statistics."""
        self._status: Dict[int, str] = {}
        self._errors: Dict[int, str] = {}

    def __repr__(self) -> str:
        """Return string representation of the statistics."""
        return "<SweepStatistics({:.1%})>".format(self.success_ratio())

    def get(self, cell: int) -> Optional[str]:
        """Get the status recorded for a cell."""
        return self._status.get(cell)

    def error(self, cell: int) -> Optional[str]:
        """Get the error recorded for a cell."""
        return self._errors.get(cell)

    async def cell_successful(self, cell: int) -> None:
        """Record a successful cell evaluation."""
        self._status[cell] = STATUS_OK
        self._errors.pop(cell, None)

    async def cell_unsuccessful(self, cell: int, error: str) -> None:
        """Record a failed cell evaluation."""
        self._status[cell] = STATUS_ERROR
        self._errors[cell] = error

    @property
    def total(self) -> int:
        """Return the number of evaluated cells."""
        return len(self._status)

    @property
    def failed_cells(self) -> List[int]:
        """Return the failed cells in grid order."""
        return sorted(
            cell for cell, status in self._status.items() if status == STATUS_ERROR
        )

    def success_ratio(self) -> float:
        """Calculate success ratio."""
        if self.total == 0:
            return 0
        return (self.total - len(self.failed_cells)) / self.total
