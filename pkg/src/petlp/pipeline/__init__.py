"""Pipeline orchestration: gates, limits, retention, golden run, service."""

from .api import ApiConfig, ApiState, create_app, serve_api, start_in_thread
from .case import CaseDecisions, PipelineCase
from .golden import GoldenCheck, GoldenReport, load_scenario, run_golden_case
from .ratelimit import Permit, RateLimiterConfig, SlidingWindowLimiter, acquire_permit
from .retention import (
    CategoryPolicy,
    DatasetCategory,
    DatasetManifest,
    DeletionReceipt,
    MONTH,
    RetentionEvent,
    RetentionEventKind,
    RetentionSchedule,
    YEAR,
    retention_tick,
)
from .stages import (
    ELT_OBLIGATION,
    FileReplayConnector,
    RecordingConnector,
    StageOutcome,
    cascade_delete,
    run_stage,
)

__all__ = [
    "ApiConfig",
    "ApiState",
    "create_app",
    "serve_api",
    "start_in_thread",
    "CaseDecisions",
    "PipelineCase",
    "GoldenCheck",
    "GoldenReport",
    "load_scenario",
    "run_golden_case",
    "Permit",
    "RateLimiterConfig",
    "SlidingWindowLimiter",
    "acquire_permit",
    "CategoryPolicy",
    "DatasetCategory",
    "DatasetManifest",
    "DeletionReceipt",
    "MONTH",
    "RetentionEvent",
    "RetentionEventKind",
    "RetentionSchedule",
    "YEAR",
    "retention_tick",
    "ELT_OBLIGATION",
    "FileReplayConnector",
    "RecordingConnector",
    "StageOutcome",
    "cascade_delete",
    "run_stage",
]
