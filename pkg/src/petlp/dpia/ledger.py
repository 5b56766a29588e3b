"""The living impact-assessment document.

The document is an append-only event log: an init event, one update event
per completed stage pass, and reopen events when the processing changes.
Stage status (missing / complete / stale) is never stored, only derived by
replaying the log, so the audit trail and the state cannot disagree.

Gates read the derived status: a stage may start only when every earlier
stage is complete and not stale, and extraction additionally needs its
legal decisions in place.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Optional

from ..errors import MissingField, OutOfOrderStage
from ..policy.types import DpiaRequirement, DpiaStatus, LegalBasisDecision, TdmDecision, TdmException


class StageId(str, Enum):
    PRE_REGISTRATION = "pre_registration"
    EXTRACT = "extract"
    TRANSFORM = "transform"
    LOAD = "load"
    PRESENT = "present"


STAGE_ORDER: tuple[StageId, ...] = (
    StageId.PRE_REGISTRATION,
    StageId.EXTRACT,
    StageId.TRANSFORM,
    StageId.LOAD,
    StageId.PRESENT,
)


def stage_index(stage: StageId) -> int:
    return STAGE_ORDER.index(stage)


def stages_before(stage: StageId) -> tuple[StageId, ...]:
    return STAGE_ORDER[: stage_index(stage)]


def stages_from(stage: StageId) -> tuple[StageId, ...]:
    return STAGE_ORDER[stage_index(stage) :]


class StageState(str, Enum):
    MISSING = "missing"
    COMPLETE = "complete"
    STALE = "stale"


# Required field sets per stage, satisfied at append time. Extra fields are
# allowed and preserved: these lists are the floor, not the ceiling.
REQUIRED_FIELDS: dict[StageId, tuple[str, ...]] = {
    StageId.PRE_REGISTRATION: ("hypotheses", "study_design", "data_plan", "model_design", "expected_outputs"),
    StageId.EXTRACT: ("method", "volume", "special_categories", "notification", "technical_measures"),
    StageId.TRANSFORM: ("minimisation", "anonymisation_attempts", "dp_considered", "special_safeguards", "intermediate_copies"),
    StageId.LOAD: ("storage_location", "security", "access_controls", "retention", "deletion_protocols"),
    StageId.PRESENT: ("reidentification", "model_privacy", "copyright", "dissemination", "transparency"),
}


def _now() -> datetime:
    return datetime.now(timezone.utc)


def _check_required(stage: StageId, fields: dict[str, Any]) -> None:
    for name in REQUIRED_FIELDS[stage]:
        value = fields.get(name)
        if value is None or (isinstance(value, str) and not value.strip()):
            raise MissingField(name)


@dataclass(frozen=True)
class StageEntry:
    """One appended event. Entries are never mutated after append."""

    version: int
    type: str  # "init" | "update" | "reopen"
    stage: Optional[StageId]
    fields: dict[str, Any]
    author: str
    at: str  # ISO timestamp, fixed at append time
    change_description: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": self.version,
            "type": self.type,
            "stage": self.stage.value if self.stage else None,
            "fields": self.fields,
            "author": self.author,
            "at": self.at,
            "change_description": self.change_description,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "StageEntry":
        return cls(
            version=int(data["version"]),
            type=data["type"],
            stage=StageId(data["stage"]) if data.get("stage") else None,
            fields=dict(data.get("fields", {})),
            author=data.get("author", ""),
            at=data["at"],
            change_description=data.get("change_description", ""),
        )


def replay(entries: tuple[StageEntry, ...]) -> dict[StageId, StageState]:
    """Reconstruct stage status from the event log alone."""
    status = {stage: StageState.MISSING for stage in STAGE_ORDER}
    for entry in entries:
        if entry.type in ("init", "update") and entry.stage is not None:
            status[entry.stage] = StageState.COMPLETE
        elif entry.type == "reopen" and entry.stage is not None:
            for later in stages_from(entry.stage):
                if status[later] is StageState.COMPLETE:
                    status[later] = StageState.STALE
    return status


@dataclass(frozen=True)
class DpiaDocument:
    case_id: str
    versions: tuple[StageEntry, ...]

    @property
    def stage_status(self) -> dict[StageId, StageState]:
        return replay(self.versions)

    @property
    def version(self) -> int:
        return self.versions[-1].version if self.versions else 0

    def entries_for(self, stage: StageId) -> list[StageEntry]:
        return [e for e in self.versions if e.stage is stage and e.type in ("init", "update")]

    def to_dict(self) -> dict[str, Any]:
        return {
            "case_id": self.case_id,
            "versions": [entry.to_dict() for entry in self.versions],
            "stage_status": {stage.value: state.value for stage, state in self.stage_status.items()},
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DpiaDocument":
        return cls(
            case_id=data["case_id"],
            versions=tuple(StageEntry.from_dict(e) for e in data["versions"]),
        )


def init_dpia(
    case_id: str,
    pre_registration_fields: dict[str, Any],
    author: str = "",
    at: Optional[datetime] = None,
) -> DpiaDocument:
    """Open the document with its pre-registration entry."""
    if not case_id.strip():
        raise ValueError("case_id must be non-empty")
    _check_required(StageId.PRE_REGISTRATION, pre_registration_fields)
    entry = StageEntry(
        version=1,
        type="init",
        stage=StageId.PRE_REGISTRATION,
        fields=dict(pre_registration_fields),
        author=author,
        at=(at or _now()).isoformat(),
    )
    return DpiaDocument(case_id=case_id, versions=(entry,))


def record_update(
    doc: DpiaDocument,
    stage: StageId,
    fields: dict[str, Any],
    author: str = "",
    at: Optional[datetime] = None,
) -> DpiaDocument:
    """Append a completed stage pass; the stage becomes complete (stale cleared)."""
    _check_required(stage, fields)
    status = doc.stage_status
    for prior in stages_before(stage):
        if status[prior] is not StageState.COMPLETE:
            raise OutOfOrderStage(
                f"cannot record {stage.value}: stage {prior.value} is {status[prior].value}"
            )
    entry = StageEntry(
        version=doc.version + 1,
        type="update",
        stage=stage,
        fields=dict(fields),
        author=author,
        at=(at or _now()).isoformat(),
    )
    return DpiaDocument(case_id=doc.case_id, versions=doc.versions + (entry,))


def reopen_on_change(
    doc: DpiaDocument,
    change_description: str,
    earliest_affected_stage: StageId,
    author: str = "",
    at: Optional[datetime] = None,
) -> DpiaDocument:
    """Record a processing change; the affected suffix of completed stages
    goes stale and must be revisited. Nothing is deleted."""
    entry = StageEntry(
        version=doc.version + 1,
        type="reopen",
        stage=earliest_affected_stage,
        fields={},
        author=author,
        at=(at or _now()).isoformat(),
        change_description=change_description,
    )
    return DpiaDocument(case_id=doc.case_id, versions=doc.versions + (entry,))


@dataclass(frozen=True)
class GateDecisions:
    """The legal decisions a gate may require."""

    legal_basis: Optional[LegalBasisDecision] = None
    dpia_requirement: Optional[DpiaRequirement] = None
    tdm: Optional[TdmDecision] = None


@dataclass(frozen=True)
class GateResult:
    stage: StageId
    allowed: bool
    blockers: tuple[str, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"stage": self.stage.value, "allowed": self.allowed, "blockers": list(self.blockers)}


def gate_check(
    doc: Optional[DpiaDocument],
    stage: StageId,
    decisions: Optional[GateDecisions] = None,
    waived_stages: tuple[StageId, ...] = (),
) -> GateResult:
    """May this stage start? Blockers are enumerated, never raised.

    All earlier stages must be complete and not stale (``waived_stages``
    lets an orchestrator relax the ordering it explicitly supports, e.g.
    extract-load-transform). Extraction additionally requires a chosen
    legal basis, a satisfied DPIA requirement, and a TDM decision that
    actually permits mining.
    """
    decisions = decisions or GateDecisions()
    blockers: list[str] = []

    status = doc.stage_status if doc is not None else {s: StageState.MISSING for s in STAGE_ORDER}
    for prior in stages_before(stage):
        if prior in waived_stages:
            continue
        if status[prior] is StageState.MISSING:
            blockers.append(f"stage {prior.value} missing")
        elif status[prior] is StageState.STALE:
            blockers.append(f"stage {prior.value} stale; revisit it before continuing")

    if stage is StageId.EXTRACT:
        if decisions.legal_basis is None:
            blockers.append("no legal basis selected")
        if decisions.dpia_requirement is None:
            blockers.append("DPIA requirement not assessed")
        elif decisions.dpia_requirement.status is DpiaStatus.REQUIRED and (doc is None or not doc.versions):
            blockers.append("DPIA required but the document has no entries")
        if decisions.tdm is None:
            blockers.append("no TDM decision recorded")
        elif decisions.tdm.exception is TdmException.NONE:
            blockers.append("no lawful extraction basis: use is reserved and no exception applies")

    return GateResult(stage=stage, allowed=not blockers, blockers=tuple(blockers))
