"""Versioned, append-only living impact-assessment ledger."""

from .ledger import (
    DpiaDocument,
    GateDecisions,
    GateResult,
    REQUIRED_FIELDS,
    STAGE_ORDER,
    StageEntry,
    StageId,
    StageState,
    gate_check,
    init_dpia,
    record_update,
    reopen_on_change,
    replay,
    stage_index,
    stages_before,
    stages_from,
)
from .report import export_report
from .store import DpiaStore

__all__ = [
    "DpiaDocument",
    "GateDecisions",
    "GateResult",
    "REQUIRED_FIELDS",
    "STAGE_ORDER",
    "StageEntry",
    "StageId",
    "StageState",
    "gate_check",
    "init_dpia",
    "record_update",
    "reopen_on_change",
    "replay",
    "stage_index",
    "stages_before",
    "stages_from",
    "export_report",
    "DpiaStore",
]
