"""Retention scheduling, deletion triggers, and legal holds.

Each dataset category carries a maximum storage duration and an alert
lead: an alert fires when the remaining lifetime drops below the lead, a
delete fires at expiry unless a legal hold suspends it (a hold_skip event
records the suppression). Every event fires at most once per dataset; the
scheduler marks what it has emitted on the manifest itself.

Durations use fixed-length years (365 days) and months (year/12) so
"5 years, alert 6 months early" means exactly 4.5 years in.

The clock is always an argument: a six-year schedule is simulated in
milliseconds by feeding ticks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Any, Optional

from ..audit import AuditTrail

YEAR = timedelta(days=365)
MONTH = YEAR / 12


class DatasetCategory:
    RAW_API_RESPONSE = "raw_api_response"
    PROCESSED_DATASET = "processed_dataset"
    AGGREGATE_OUTPUT = "aggregate_output"

    ALL = (RAW_API_RESPONSE, PROCESSED_DATASET, AGGREGATE_OUTPUT)


@dataclass
class DatasetManifest:
    """What was loaded where, and what has already been scheduled for it."""

    dataset_id: str
    category: str
    loaded_at: datetime
    storage_location: str
    replicas: list[str] = field(default_factory=list)
    legal_hold: bool = False
    transformation_log: list[str] = field(default_factory=list)
    retention_marks: list[str] = field(default_factory=list)  # events already emitted

    def __post_init__(self) -> None:
        if self.category not in DatasetCategory.ALL:
            raise ValueError(f"unknown dataset category: {self.category!r}")
        if self.storage_location not in self.replicas:
            # The primary location always counts as a replica target.
            self.replicas = [self.storage_location] + list(self.replicas)

    def to_dict(self) -> dict[str, Any]:
        return {
            "dataset_id": self.dataset_id,
            "category": self.category,
            "loaded_at": self.loaded_at.isoformat(),
            "storage_location": self.storage_location,
            "replicas": list(self.replicas),
            "legal_hold": self.legal_hold,
            "transformation_log": list(self.transformation_log),
            "retention_marks": list(self.retention_marks),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DatasetManifest":
        manifest = cls(
            dataset_id=data["dataset_id"],
            category=data["category"],
            loaded_at=datetime.fromisoformat(data["loaded_at"]),
            storage_location=data["storage_location"],
            replicas=[r for r in data.get("replicas", []) if r != data["storage_location"]],
            legal_hold=bool(data.get("legal_hold", False)),
            transformation_log=list(data.get("transformation_log", [])),
        )
        manifest.retention_marks = list(data.get("retention_marks", []))
        return manifest


@dataclass(frozen=True)
class CategoryPolicy:
    max_duration: timedelta
    alert_lead: timedelta

    def __post_init__(self) -> None:
        if self.alert_lead >= self.max_duration:
            raise ValueError("alert lead must be shorter than the maximum duration")

    def to_dict(self) -> dict[str, float]:
        return {"max_days": self.max_duration / timedelta(days=1), "alert_lead_days": self.alert_lead / timedelta(days=1)}


@dataclass(frozen=True)
class RetentionSchedule:
    """Per-category retention policy.

    Defaults: raw API responses 2 years, processed datasets 5 years, both
    with a 6-month alert lead. Aggregate outputs are publications and are
    not scheduled unless a policy is supplied.
    """

    policies: dict[str, CategoryPolicy] = field(
        default_factory=lambda: {
            DatasetCategory.RAW_API_RESPONSE: CategoryPolicy(2 * YEAR, 6 * MONTH),
            DatasetCategory.PROCESSED_DATASET: CategoryPolicy(5 * YEAR, 6 * MONTH),
        }
    )

    def policy_for(self, category: str) -> Optional[CategoryPolicy]:
        return self.policies.get(category)

    def to_dict(self) -> dict[str, Any]:
        return {category: policy.to_dict() for category, policy in sorted(self.policies.items())}


class RetentionEventKind:
    ALERT = "alert"
    DELETE = "delete"
    HOLD_SKIP = "hold_skip"


@dataclass(frozen=True)
class RetentionEvent:
    kind: str
    dataset_id: str
    due_at: datetime

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "dataset_id": self.dataset_id, "due_at": self.due_at.isoformat()}


def retention_tick(
    schedule: RetentionSchedule,
    manifests: list[DatasetManifest],
    now: datetime,
    audit: Optional[AuditTrail] = None,
) -> list[RetentionEvent]:
    """Evaluate every manifest at ``now`` and emit newly due events.

    A released legal hold lets the delete fire on a later tick even after
    a hold_skip was recorded.
    """
    events: list[RetentionEvent] = []
    for manifest in manifests:
        policy = schedule.policy_for(manifest.category)
        if policy is None:
            continue
        expiry = manifest.loaded_at + policy.max_duration
        alert_at = expiry - policy.alert_lead

        if now >= alert_at and RetentionEventKind.ALERT not in manifest.retention_marks:
            manifest.retention_marks.append(RetentionEventKind.ALERT)
            events.append(RetentionEvent(RetentionEventKind.ALERT, manifest.dataset_id, alert_at))

        if now >= expiry and RetentionEventKind.DELETE not in manifest.retention_marks:
            if manifest.legal_hold:
                if RetentionEventKind.HOLD_SKIP not in manifest.retention_marks:
                    manifest.retention_marks.append(RetentionEventKind.HOLD_SKIP)
                    events.append(RetentionEvent(RetentionEventKind.HOLD_SKIP, manifest.dataset_id, expiry))
            else:
                manifest.retention_marks.append(RetentionEventKind.DELETE)
                events.append(RetentionEvent(RetentionEventKind.DELETE, manifest.dataset_id, expiry))

    if audit is not None:
        for event in events:
            audit.append(f"retention.{event.kind}", dataset_id=event.dataset_id, due_at=event.due_at.isoformat())
    return events


@dataclass(frozen=True)
class DeletionReceipt:
    dataset_id: str
    confirmations: dict[str, bool]
    at: datetime

    @property
    def complete(self) -> bool:
        return all(self.confirmations.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "dataset_id": self.dataset_id,
            "confirmations": dict(sorted(self.confirmations.items())),
            "complete": self.complete,
            "at": self.at.isoformat(),
        }
