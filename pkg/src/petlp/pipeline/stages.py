"""Stage execution behind the ledger's gates.

A stage action (the connector) runs only after its gate passes; a blocked
gate raises before anything touches data. On success the outcome hands
back the field template the stage's ledger update must complete, keeping
the document in step with what actually ran.

Connectors are synchronous callables with a declared timeout; only a
file-replay connector ships, since live platform clients are out of scope.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Optional, Protocol

from ..audit import AuditTrail
from ..dpia.ledger import REQUIRED_FIELDS, StageId, gate_check
from ..errors import ConnectorFailure, GateBlocked, PartialDeletion
from .case import PipelineCase
from .retention import DatasetManifest, DeletionReceipt

# Storing still-identifiable raw data ahead of transformation heightens the
# security duty; the obligation tag follows the case into its ledger.
ELT_OBLIGATION = "raw_form_storage_heightened_security"


class Connector(Protocol):
    timeout_s: float

    def __call__(self, case: PipelineCase, stage: StageId) -> Any: ...


@dataclass
class FileReplayConnector:
    """Replays previously captured records from a line-delimited JSON file."""

    path: Path | str
    timeout_s: float = 30.0

    def __call__(self, case: PipelineCase, stage: StageId) -> list[dict]:
        with Path(self.path).open("r", encoding="utf-8") as handle:
            return [json.loads(line) for line in handle if line.strip()]


@dataclass
class RecordingConnector:
    """Test double that records whether it was ever invoked."""

    timeout_s: float = 30.0
    calls: list[tuple[str, str]] = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        self.calls = []

    def __call__(self, case: PipelineCase, stage: StageId) -> str:
        self.calls.append((case.case_id, stage.value))
        return "ok"


@dataclass(frozen=True)
class StageOutcome:
    stage: StageId
    executed: bool
    connector_result: Any
    dpia_template: tuple[str, ...]
    obligations: tuple[str, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "stage": self.stage.value,
            "executed": self.executed,
            "dpia_template": list(self.dpia_template),
            "obligations": list(self.obligations),
        }


def run_stage(
    case: PipelineCase,
    stage: StageId,
    connector: Callable[[PipelineCase, StageId], Any],
    audit: Optional[AuditTrail] = None,
) -> StageOutcome:
    """Gate, execute, and hand back the ledger template for the stage."""
    if stage is StageId.PRE_REGISTRATION:
        raise ValueError("pre-registration is recorded through the ledger, not executed")

    waived: tuple[StageId, ...] = ()
    obligations: tuple[str, ...] = ()
    if case.elt_mode and stage is StageId.LOAD:
        # Extract-load-transform order is supported, at the price of
        # storing raw-form data under heightened security.
        waived = (StageId.TRANSFORM,)
        obligations = (ELT_OBLIGATION,)

    gate = gate_check(case.dpia, stage, case.decisions.as_gate_decisions(), waived_stages=waived)
    blockers = list(gate.blockers)
    if stage is StageId.PRESENT and case.context is not None and not case.context.intended_outputs:
        blockers.append("no intended outputs declared for the dissemination stage")
    if blockers:
        raise GateBlocked(stage.value, blockers)

    try:
        result = connector(case, stage)
    except Exception as exc:
        raise ConnectorFailure(f"stage {stage.value} connector failed: {exc}") from exc

    if audit is not None:
        audit.append("stage_run", case_id=case.case_id, stage=stage.value, obligations=list(obligations))
    return StageOutcome(
        stage=stage,
        executed=True,
        connector_result=result,
        dpia_template=REQUIRED_FIELDS[stage],
        obligations=obligations,
    )


def cascade_delete(
    manifest: DatasetManifest,
    delete_fn: Callable[[str, str], bool],
    now: Optional[datetime] = None,
    audit: Optional[AuditTrail] = None,
) -> DeletionReceipt:
    """Issue deletes to the primary and every replica; all must confirm.

    ``delete_fn(location, dataset_id)`` returns whether that location
    confirmed. Any unconfirmed location raises PartialDeletion carrying
    the receipt, so the caller can retry just the failures.
    """
    at = now or datetime.now(timezone.utc)
    confirmations: dict[str, bool] = {}
    for location in dict.fromkeys(manifest.replicas):  # preserve order, dedupe
        try:
            confirmations[location] = bool(delete_fn(location, manifest.dataset_id))
        except Exception:
            confirmations[location] = False

    receipt = DeletionReceipt(dataset_id=manifest.dataset_id, confirmations=confirmations, at=at)
    if audit is not None:
        audit.append("cascade_delete", **receipt.to_dict())
    if not receipt.complete:
        raise PartialDeletion(receipt)
    return receipt
