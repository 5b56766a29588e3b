"""Extraction window planning under a platform's rolling-history limit.

Platform APIs commonly stop serving posts older than a rolling window
(about six months on the studied platform), so a requested historical
range must be intersected with what is actually reachable before the
study design is committed.
"""
from __future__ import annotations

import calendar
from dataclasses import dataclass
from datetime import datetime
from typing import Optional

from ..errors import InvalidRange


@dataclass(frozen=True)
class ExtractionWindowReport:
    requested_range: tuple[datetime, datetime]
    accessible_range: Optional[tuple[datetime, datetime]]
    warnings: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "requested_range": [t.isoformat() for t in self.requested_range],
            "accessible_range": (
                [t.isoformat() for t in self.accessible_range] if self.accessible_range else None
            ),
            "warnings": list(self.warnings),
        }


def subtract_months(moment: datetime, months: int) -> datetime:
    """Calendar-month subtraction with day-of-month clamping."""
    year = moment.year
    month = moment.month - months
    while month < 1:
        month += 12
        year -= 1
    day = min(moment.day, calendar.monthrange(year, month)[1])
    return moment.replace(year=year, month=month, day=day)


def plan_window(
    requested_range: tuple[datetime, datetime],
    now: datetime,
    rolling_months: int = 6,
) -> ExtractionWindowReport:
    """Intersect the requested range with the reachable rolling window."""
    start, end = requested_range
    if start > end:
        raise InvalidRange("range start is after its end")
    if end > now:
        raise InvalidRange("range end is in the future")
    if rolling_months < 1:
        raise InvalidRange("rolling window must cover at least one month")

    horizon = subtract_months(now, rolling_months)
    warnings: list[str] = []

    lo = max(start, horizon)
    hi = min(end, now)
    if lo > hi:
        warnings.append(
            f"requested range ends before the rolling {rolling_months}-month window opens "
            f"({horizon.isoformat()}); nothing is accessible"
        )
        return ExtractionWindowReport(requested_range, None, tuple(warnings))

    if lo > start:
        warnings.append(
            f"range truncated at {horizon.isoformat()}: posts older than "
            f"{rolling_months} months are not reachable"
        )
    return ExtractionWindowReport(requested_range, (lo, hi), tuple(warnings))
