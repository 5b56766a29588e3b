"""The case record binding decisions, ledger, manifests, and schedule."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from ..dpia.ledger import DpiaDocument, GateDecisions, StageId, StageState
from ..policy.types import (
    DpiaRequirement,
    LegalBasisDecision,
    ProcessingContext,
    ResearcherProfile,
    TdmDecision,
    TransferAssessment,
)
from .ratelimit import RateLimiterConfig
from .retention import DatasetManifest, RetentionSchedule


@dataclass
class CaseDecisions:
    legal_basis: Optional[LegalBasisDecision] = None
    dpia_requirement: Optional[DpiaRequirement] = None
    tdm: Optional[TdmDecision] = None
    transfers: list[TransferAssessment] = field(default_factory=list)

    def as_gate_decisions(self) -> GateDecisions:
        return GateDecisions(
            legal_basis=self.legal_basis,
            dpia_requirement=self.dpia_requirement,
            tdm=self.tdm,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "legal_basis": self.legal_basis.to_dict() if self.legal_basis else None,
            "dpia_requirement": self.dpia_requirement.to_dict() if self.dpia_requirement else None,
            "tdm": self.tdm.to_dict() if self.tdm else None,
            "transfers": [t.to_dict() for t in self.transfers],
        }


@dataclass
class PipelineCase:
    """One research project moving through the pipeline.

    Decisions freeze once extraction has run on their strength; changing
    them afterwards requires reopening the impact assessment, which marks
    the dependent stages stale.
    """

    case_id: str
    profile: Optional[ResearcherProfile] = None
    context: Optional[ProcessingContext] = None
    decisions: CaseDecisions = field(default_factory=CaseDecisions)
    dpia: Optional[DpiaDocument] = None
    manifests: list[DatasetManifest] = field(default_factory=list)
    retention: RetentionSchedule = field(default_factory=RetentionSchedule)
    limiter_config: RateLimiterConfig = field(default_factory=RateLimiterConfig)
    extraction_channel: str = ""
    elt_mode: bool = False
    # Wizard session state: recorded answers and endpoint verdicts per tree.
    answers: dict[str, dict[str, str]] = field(default_factory=dict)
    verdicts: dict[str, dict[str, Any]] = field(default_factory=dict)

    def decisions_frozen(self) -> bool:
        if self.dpia is None:
            return False
        return self.dpia.stage_status[StageId.EXTRACT] is StageState.COMPLETE

    def set_decision(self, name: str, value: Any) -> None:
        if self.decisions_frozen():
            raise ValueError(
                "decisions are frozen once extraction has run; reopen the "
                "impact assessment to change them"
            )
        if name == "transfers":
            self.decisions.transfers = list(value)
        elif hasattr(self.decisions, name):
            setattr(self.decisions, name, value)
        else:
            raise ValueError(f"unknown decision slot: {name!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "case_id": self.case_id,
            "profile": self.profile.to_dict() if self.profile else None,
            "context": self.context.to_dict() if self.context else None,
            "decisions": self.decisions.to_dict(),
            "dpia": self.dpia.to_dict() if self.dpia else None,
            "manifests": [m.to_dict() for m in self.manifests],
            "retention": self.retention.to_dict(),
            "limiter_config": self.limiter_config.to_dict(),
            "extraction_channel": self.extraction_channel,
            "elt_mode": self.elt_mode,
            "answers": {tree: dict(nodes) for tree, nodes in sorted(self.answers.items())},
            "verdicts": {tree: dict(v) for tree, v in sorted(self.verdicts.items())},
        }
