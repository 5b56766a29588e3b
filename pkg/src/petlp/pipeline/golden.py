"""End-to-end golden scenario runner.

Executes the bundled reference case (qualification, legal basis, DPIA
trigger, reservation scan, TDM routing, transfers, retention simulation,
rate limiter behaviour, ledger walk, and release checks) and diffs every
endpoint against the expectations embedded in the scenario file. Any
mismatch raises with a structured diff; the run itself is deterministic.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Union

from ..dpia.ledger import StageId, gate_check, init_dpia, record_update
from ..errors import GateBlocked, GoldenMismatch
from ..optout.reservation import tdm_reservation
from ..optout.robots import parse_robots
from ..policy import engine
from ..policy.rulepacks import bundled_reddit_pack
from ..policy.types import (
    OutputKind,
    ProcessingContext,
    ResearcherProfile,
    TransferFlags,
    Wp29CriteriaSet,
)
from .case import CaseDecisions, PipelineCase
from .ratelimit import RateLimiterConfig, SlidingWindowLimiter
from .retention import (
    CategoryPolicy,
    DatasetManifest,
    MONTH,
    RetentionSchedule,
    RetentionEventKind,
    YEAR,
    retention_tick,
)
from .stages import RecordingConnector, run_stage


@dataclass(frozen=True)
class GoldenCheck:
    check: str
    expected: Any
    actual: Any

    @property
    def ok(self) -> bool:
        return self.expected == self.actual

    def to_dict(self) -> dict[str, Any]:
        return {"check": self.check, "expected": self.expected, "actual": self.actual, "ok": self.ok}


@dataclass(frozen=True)
class GoldenReport:
    case_id: str
    checks: tuple[GoldenCheck, ...]
    decisions: dict[str, Any]

    @property
    def ok(self) -> bool:
        return all(check.ok for check in self.checks)

    def mismatches(self) -> list[dict[str, Any]]:
        return [check.to_dict() for check in self.checks if not check.ok]

    def to_dict(self) -> dict[str, Any]:
        return {
            "case_id": self.case_id,
            "ok": self.ok,
            "checks": [check.to_dict() for check in self.checks],
        }


def load_scenario(path: Optional[Union[Path, str]] = None) -> dict[str, Any]:
    if path is None:
        raw = resources.files("petlp.data").joinpath("golden_scenario.json").read_text("utf-8")
    else:
        raw = Path(path).read_text("utf-8")
    return json.loads(raw)


def _simulate_retention(scenario: dict[str, Any]) -> tuple[RetentionSchedule, dict[str, dict[str, Any]]]:
    """Run each category's dataset through a virtual clock and capture when
    its alert and delete actually fire."""
    retention_conf = scenario["retention"]
    loaded_at = datetime.fromisoformat(retention_conf["loaded_at"])
    policies = {
        category: CategoryPolicy(p["max_years"] * YEAR, p["alert_lead_months"] * MONTH)
        for category, p in retention_conf["policies"].items()
    }
    schedule = RetentionSchedule(policies=policies)

    observed: dict[str, dict[str, Any]] = {}
    for category, policy in policies.items():
        manifest = DatasetManifest(
            dataset_id=f"golden-{category}",
            category=category,
            loaded_at=loaded_at,
            storage_location="eu-primary",
            replicas=["eu-backup"],
        )
        alert_at = loaded_at + policy.max_duration - policy.alert_lead
        expiry = loaded_at + policy.max_duration
        ticks = [
            alert_at - timedelta(seconds=1),
            alert_at,
            alert_at + timedelta(days=30),
            expiry - timedelta(seconds=1),
            expiry,
            expiry + timedelta(days=30),
        ]
        events = []
        for now in ticks:
            events.extend((now, e) for e in retention_tick(schedule, [manifest], now))
        observed[category] = {
            "alert_days": next(
                ((e.due_at - loaded_at) / timedelta(days=1) for _, e in events if e.kind == RetentionEventKind.ALERT),
                None,
            ),
            "delete_days": next(
                ((e.due_at - loaded_at) / timedelta(days=1) for _, e in events if e.kind == RetentionEventKind.DELETE),
                None,
            ),
            "event_kinds": [e.kind for _, e in events],
        }
    return schedule, observed


def _limiter_behaviour(config: RateLimiterConfig) -> dict[str, Any]:
    # A uniform schedule at exactly the advertised rate must never be denied;
    # one extra request inside the window must be.
    uniform = SlidingWindowLimiter(config)
    spacing = config.window_seconds / config.capacity_per_window
    denials = 0
    for i in range(config.capacity_per_window * 3):
        if not uniform.acquire_permit(i * spacing).granted:
            denials += 1

    burst = SlidingWindowLimiter(config)
    for i in range(config.capacity_per_window):
        burst.acquire_permit(i * 0.1)
    extra = burst.acquire_permit(config.capacity_per_window * 0.1)
    return {"uniform_denials": denials, "burst_extra_granted": extra.granted}


def run_golden_case(
    scenario: Optional[Union[Path, str, dict]] = None,
    raise_on_mismatch: bool = True,
) -> GoldenReport:
    data = scenario if isinstance(scenario, dict) else load_scenario(scenario)
    expected = data["expected"]
    checks: list[GoldenCheck] = []
    decisions_export: dict[str, Any] = {}

    profile = ResearcherProfile.from_dict(data["profile"])
    context = ProcessingContext.from_dict(data["context"])
    criteria = Wp29CriteriaSet.from_dict(data["wp29_criteria"])

    qualification = engine.qualify_research_organisation(profile)
    decisions_export["qualification"] = qualification.to_dict()
    checks.append(GoldenCheck("qualification.qualifies", expected["qualification"], qualification.qualifies))

    legal_basis = engine.select_legal_basis(profile, context)
    decisions_export["legal_basis"] = legal_basis.to_dict()
    checks.append(GoldenCheck("legal_basis.basis", expected["legal_basis"], legal_basis.basis.value))
    checks.append(
        GoldenCheck(
            "legal_basis.art9_condition",
            expected["art9_condition"],
            legal_basis.art9_condition.value if legal_basis.art9_condition else None,
        )
    )

    dpia_requirement = engine.assess_dpia_requirement(criteria, context)
    decisions_export["dpia_requirement"] = dpia_requirement.to_dict()
    checks.append(GoldenCheck("dpia.status", expected["dpia_status"], dpia_requirement.status.value))
    checks.append(
        GoldenCheck(
            "dpia.trigger_count_at_least",
            True,
            dpia_requirement.trigger_count >= expected["dpia_trigger_count_min"],
        )
    )

    extraction = data["extraction"]
    policy = parse_robots(extraction["robots_txt"])
    reservation = tdm_reservation(policy, extraction["agent"], extraction["scope_paths"])
    decisions_export["reservation"] = reservation.to_dict()
    checks.append(GoldenCheck("reservation.reserved", expected["reservation_reserved"], reservation.reserved))

    tdm = engine.evaluate_tdm(profile, profile.purpose, reservation, extraction["lawful_access"])
    decisions_export["tdm"] = tdm.to_dict()
    checks.append(GoldenCheck("tdm.exception", expected["tdm_exception"], tdm.exception.value))
    checks.append(GoldenCheck("tdm.tos_override", expected["tos_override"], tdm.tos_override))

    checks.append(GoldenCheck("extraction.channel", expected["extraction_channel"], extraction["channel"]))
    limiter_config = RateLimiterConfig(
        capacity_per_window=extraction["rate_limit"]["capacity_per_window"],
        window_seconds=extraction["rate_limit"]["window_seconds"],
    )
    per_minute = limiter_config.capacity_per_window * 60.0 / limiter_config.window_seconds
    checks.append(GoldenCheck("extraction.rate_limit_per_minute", float(expected["rate_limit_per_minute"]), per_minute))
    behaviour = _limiter_behaviour(limiter_config)
    checks.append(GoldenCheck("limiter.uniform_schedule_denials", 0, behaviour["uniform_denials"]))
    checks.append(GoldenCheck("limiter.burst_over_capacity_denied", False, behaviour["burst_extra_granted"]))

    mechanisms = []
    for transfer in data["transfers"]:
        flags = TransferFlags(**transfer.get("flags", {}))
        assessment = engine.assess_transfer(tuple(transfer["route"]), flags)
        mechanisms.append(assessment.mechanism.value)
    decisions_export["transfer_mechanisms"] = mechanisms
    checks.append(GoldenCheck("transfers.mechanisms", expected["transfer_mechanisms"], mechanisms))

    schedule, retention_observed = _simulate_retention(data)
    for category, days in expected["retention_days"].items():
        checks.append(
            GoldenCheck(f"retention.{category}.delete_days", days, retention_observed[category]["delete_days"])
        )
    for category, days in expected["alert_after_days"].items():
        checks.append(
            GoldenCheck(f"retention.{category}.alert_days", days, retention_observed[category]["alert_days"])
        )

    # Ledger walk: pre-registration then every stage, gate checked first.
    fields = data["dpia_fields"]
    doc = init_dpia(data["case_id"], fields["pre_registration"], at=datetime(2025, 1, 1, tzinfo=timezone.utc))
    case = PipelineCase(
        case_id=data["case_id"],
        profile=profile,
        context=context,
        decisions=CaseDecisions(legal_basis=legal_basis, dpia_requirement=dpia_requirement, tdm=tdm),
        dpia=doc,
        retention=schedule,
        limiter_config=limiter_config,
        extraction_channel=extraction["channel"],
    )
    connector = RecordingConnector()
    stages_run: list[str] = []
    for stage in (StageId.EXTRACT, StageId.TRANSFORM, StageId.LOAD, StageId.PRESENT):
        try:
            outcome = run_stage(case, stage, connector)
        except GateBlocked as exc:
            decisions_export["gate_blocked"] = {"stage": stage.value, "blockers": exc.blockers}
            break
        stages_run.append(outcome.stage.value)
        case.dpia = record_update(
            case.dpia, stage, fields[stage.value], at=datetime(2025, 1, 1, tzinfo=timezone.utc)
        )
    checks.append(GoldenCheck("pipeline.stages_run", ["extract", "transform", "load", "present"], stages_run))
    final_gate = gate_check(case.dpia, StageId.PRESENT, case.decisions.as_gate_decisions())
    checks.append(GoldenCheck("pipeline.present_gate_allowed", True, final_gate.allowed))

    pack = bundled_reddit_pack()
    safeguards = frozenset(data["safeguards"])
    release: dict[str, str] = {}
    for kind_name in data["release_outputs"]:
        decision = engine.check_distribution(OutputKind(kind_name), pack, tdm, safeguards)
        release[kind_name] = decision.verdict.value
        decisions_export[f"distribution.{kind_name}"] = decision.to_dict()
    for kind_name, verdict in expected["distribution"].items():
        checks.append(GoldenCheck(f"distribution.{kind_name}", verdict, release.get(kind_name)))

    report = GoldenReport(case_id=data["case_id"], checks=tuple(checks), decisions=decisions_export)
    if raise_on_mismatch and not report.ok:
        raise GoldenMismatch(report.mismatches())
    return report
