"""Append-only audit trail.

One JSON object per line, never rewritten. Transformation batches,
retention events, deletions, and ledger activity all land here so a case
can demonstrate what was done to the data and when.
"""
from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Optional


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


class AuditTrail:
    """Appends events to a line-delimited JSON file.

    The clock is injectable so multi-year schedules stay testable.
    """

    def __init__(self, path: Path | str, clock: Optional[Callable[[], datetime]] = None):
        self.path = Path(path)
        self._clock = clock or _utc_now

    def append(self, kind: str, **details: Any) -> dict[str, Any]:
        event = {"at": self._clock().isoformat(), "kind": kind, **details}
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(event, sort_keys=True, default=str) + "\n")
        return event

    def events(self) -> list[dict[str, Any]]:
        if not self.path.exists():
            return []
        with self.path.open("r", encoding="utf-8") as handle:
            return [json.loads(line) for line in handle if line.strip()]
