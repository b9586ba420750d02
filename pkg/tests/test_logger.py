import datetime
import itertools

from ip_trees import BuildLogger, FadMeasure1D, L1Point, crush, new_tree
from ip_trees.ipt_logger import CHANNEL_CRUSH, CHANNEL_GENERAL, LogEntry


def fixed_clock():
    ticks = itertools.count()
    start = datetime.datetime(2024, 1, 1, 12, 0, 0)
    return lambda: start + datetime.timedelta(seconds=next(ticks))


def test_entries_carry_clock_and_channel():
    logger = BuildLogger(clock=fixed_clock())
    logger.log("hello")
    logger.log("axis=1", channel=CHANNEL_CRUSH)
    first, second = list(logger)
    assert first.timestamp == datetime.datetime(2024, 1, 1, 12, 0, 0)
    assert second.timestamp == datetime.datetime(2024, 1, 1, 12, 0, 1)
    assert first.render() == "[2024-01-01T12:00:00] hello"
    assert second.render() == "[2024-01-01T12:00:01] CRUSH: axis=1"


def test_max_entries_drops_the_oldest():
    logger = BuildLogger(clock=fixed_clock(), max_entries=2)
    for i in range(4):
        logger.log(f"line {i}")
    assert len(logger) == 2
    assert [entry.message for entry in logger] == ["line 2", "line 3"]
    assert [entry.message for entry in logger.tail(1)] == ["line 3"]
    assert logger.tail(0) == []


def test_export_filters_by_channel():
    logger = BuildLogger(clock=fixed_clock())
    crush(new_tree(), L1Point.origin(), 1.0, FadMeasure1D.lebesgue(), logger=logger)
    logger.log("done")
    crush_only = logger.export(channel=CHANNEL_CRUSH)
    assert crush_only.count("\n") == 0
    assert "CRUSH: axis=1" in crush_only
    general = logger.export(channel=CHANNEL_GENERAL, formatter=lambda e: e.message.upper())
    assert general == "DONE"


def test_custom_formatter_on_entry():
    entry = LogEntry(datetime.datetime(2024, 5, 1), CHANNEL_GENERAL, "x")
    assert entry.render(lambda e: f"<{e.message}>") == "<x>"
