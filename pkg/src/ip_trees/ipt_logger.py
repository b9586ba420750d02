"""Utilities for capturing timestamped build and sampling events."""

from __future__ import annotations

import datetime
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Iterator, List, Optional

if TYPE_CHECKING:  # pragma: no cover
    from .ipt_tree import CrushStep, Violation


Formatter = Callable[["LogEntry"], str]
Clock = Callable[[], datetime.datetime]

CHANNEL_GENERAL = "GENERAL"
CHANNEL_CRUSH = "CRUSH"
CHANNEL_PAUSE = "PAUSE"
CHANNEL_SAMPLE = "SAMPLE"
CHANNEL_RECONSTRUCT = "RECONSTRUCT"
CHANNEL_CHECK = "CHECK"


@dataclass
class LogEntry:
    """A single log line enriched with timestamp and channel."""

    timestamp: datetime.datetime
    channel: str
    message: str

    def render(self, formatter: Optional[Formatter] = None) -> str:
        if formatter is None:
            return default_formatter(self)
        return formatter(self)


def default_formatter(entry: LogEntry) -> str:
    """Default textual representation used by :class:`BuildLogger`."""

    timestamp = entry.timestamp.isoformat()
    if not entry.channel or entry.channel == CHANNEL_GENERAL:
        return f"[{timestamp}] {entry.message}"
    return f"[{timestamp}] {entry.channel}: {entry.message}"


class BuildLogger:
    """Collects structured log entries for tree builds, samples and checks.

    The logger keeps an in-memory buffer of :class:`LogEntry` objects. It accepts
    a custom clock (deterministic tests), a maximum number of retained entries,
    and a formatter for exports. Engine functions take it as an optional
    ``logger=`` keyword and never log anywhere else.
    """

    def __init__(
        self,
        *,
        clock: Optional[Clock] = None,
        max_entries: Optional[int] = None,
        formatter: Optional[Formatter] = None,
    ) -> None:
        self._clock: Clock = clock or datetime.datetime.now
        self._max_entries = max_entries
        self._formatter = formatter
        self._logs: List[LogEntry] = []

    def __iter__(self) -> Iterator[LogEntry]:
        return iter(self._logs)

    def __len__(self) -> int:
        return len(self._logs)

    def log(self, message: str, *, channel: str = CHANNEL_GENERAL) -> None:
        """Record a message under the supplied channel."""

        entry = LogEntry(timestamp=self._clock(), channel=channel, message=message)
        self._logs.append(entry)
        if self._max_entries is not None and len(self._logs) > self._max_entries:
            # Drop the oldest entry to keep the history bounded.
            self._logs.pop(0)

    def log_crush(self, step: "CrushStep") -> None:
        self.log(
            f"axis={step.new_axis} site={step.site.describe()} "
            f"m={step.site_mass:.6g} a={step.crushed_mass:.6g} "
            f"atoms={len(step.string.atoms)} segments={len(step.string.segments)}",
            channel=CHANNEL_CRUSH,
        )

    def log_pause(self, step: "CrushStep") -> None:
        self.log(
            f"axis={step.new_axis} site={step.site.describe()} degenerate string, no new arc",
            channel=CHANNEL_PAUSE,
        )

    def log_violation(self, violation: "Violation") -> None:
        self.log(violation.describe(), channel=CHANNEL_CHECK)

    def tail(self, count: int) -> List[LogEntry]:
        """Return the ``count`` most recent log entries."""

        if count <= 0:
            return []
        return self._logs[-count:]

    def export(
        self,
        *,
        channel: Optional[str] = None,
        formatter: Optional[Formatter] = None,
        delimiter: str = "\n",
    ) -> str:
        """Export the log buffer as a delimited string."""

        entries = (
            entry for entry in self._logs if channel is None or entry.channel == channel
        )
        formatter = formatter or self._formatter
        return delimiter.join(entry.render(formatter) for entry in entries)
