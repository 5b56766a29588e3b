"""Command-line interface.

Subcommands mirror the library: one-shot assessments, ledger maintenance,
opt-out scanning, record transforms, retention ticks, the golden scenario
run, and the wizard service.
"""
from __future__ import annotations

import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

import click

from . import dpia as dpia_mod
from .audit import AuditTrail
from .errors import GoldenMismatch, PetlpError
from .optout import detect_llms_txt, parse_robots, plan_window, resolve_reservation, tdm_reservation
from .pipeline import (
    ApiConfig,
    DatasetManifest,
    RetentionSchedule,
    CategoryPolicy,
    MONTH,
    YEAR,
    retention_tick,
    run_golden_case,
    serve_api,
)
from .policy import engine
from .policy.types import (
    OutputKind,
    ProcessingContext,
    ResearcherProfile,
    TransferFlags,
    Wp29CriteriaSet,
)
from .policy.rulepacks import bundled_reddit_pack, load_rule_pack
from .transform import (
    DpReleaseSpec,
    MinimisationPlan,
    PseudonymisationSpec,
    apply_minimisation,
    dp_release,
    generalise_timestamps,
    k_anonymity,
    pseudonymise,
    scan_verbatim_leak,
)

SALT_ENV = "PETLP_SALT"
SALT_FILE_ENV = "PETLP_SALT_FILE"


def _read_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _read_records(path: str) -> list[dict]:
    with open(path, "r", encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def _write_records(records: list[dict], path: Optional[str]) -> None:
    out = sys.stdout if path in (None, "-") else open(path, "w", encoding="utf-8")
    try:
        for record in records:
            out.write(json.dumps(record, sort_keys=True) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


def _emit(payload: Any, path: Optional[str] = None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    if path in (None, "-"):
        click.echo(text)
    else:
        Path(path).write_text(text + "\n", encoding="utf-8")


def _resolve_salt() -> Optional[str]:
    if os.environ.get(SALT_ENV):
        return os.environ[SALT_ENV]
    salt_file = os.environ.get(SALT_FILE_ENV)
    if salt_file and Path(salt_file).exists():
        return Path(salt_file).read_text(encoding="utf-8").strip()
    return None


def _parse_instant(value: str) -> datetime:
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    parsed = datetime.fromisoformat(text)
    return parsed if parsed.tzinfo else parsed.replace(tzinfo=timezone.utc)


def _audit_option(path: Optional[str]) -> Optional[AuditTrail]:
    return AuditTrail(path) if path else None


@click.group()
def cli() -> None:
    """Compliance-aware pipeline toolkit for social media research."""


# --- assess -------------------------------------------------------------------


@cli.command()
@click.option("--case", "case_path", required=True, type=click.Path(exists=True), help="Case inputs JSON")
@click.option("--out", "out_path", default=None, help="Write decisions JSON here instead of stdout")
def assess(case_path: str, out_path: Optional[str]) -> None:
    """Run the decision engine over a case file and emit traced decisions."""
    data = _read_json(case_path)
    profile = ResearcherProfile.from_dict(data["profile"])
    context = ProcessingContext.from_dict(data["context"])
    decisions: dict[str, Any] = {}

    decisions["qualification"] = engine.qualify_research_organisation(profile).to_dict()
    decisions["legal_basis"] = engine.select_legal_basis(profile, context).to_dict()
    if "wp29_criteria" in data:
        criteria = Wp29CriteriaSet.from_dict(data["wp29_criteria"])
        decisions["dpia_requirement"] = engine.assess_dpia_requirement(criteria, context).to_dict()

    extraction = data.get("extraction", {})
    if "robots_txt" in extraction:
        policy = parse_robots(extraction["robots_txt"])
        reservation = tdm_reservation(policy, extraction.get("agent", "*"), extraction.get("scope_paths", ["/"]))
        decisions["reservation"] = reservation.to_dict()
        tdm = engine.evaluate_tdm(profile, profile.purpose, reservation, extraction.get("lawful_access", True))
        decisions["tdm"] = tdm.to_dict()
        pack = bundled_reddit_pack() if context.platform_id == "reddit" else None
        if pack is not None and data.get("release_outputs"):
            safeguards = frozenset(data.get("safeguards", []))
            decisions["distribution"] = {
                kind: engine.check_distribution(OutputKind(kind), pack, tdm, safeguards).to_dict()
                for kind in data["release_outputs"]
            }

    for transfer in data.get("transfers", []):
        assessment = engine.assess_transfer(tuple(transfer["route"]), TransferFlags(**transfer.get("flags", {})))
        decisions.setdefault("transfers", []).append(assessment.to_dict())

    _emit(decisions, out_path)


# --- dpia ----------------------------------------------------------------------


@cli.group()
def dpia() -> None:
    """Living impact-assessment ledger."""


@dpia.command("init")
@click.option("--store", "store_dir", required=True, type=click.Path(), help="Ledger directory")
@click.option("--case-id", required=True)
@click.option("--fields", "fields_path", required=True, type=click.Path(exists=True))
@click.option("--author", default="")
def dpia_init(store_dir: str, case_id: str, fields_path: str, author: str) -> None:
    store = dpia_mod.DpiaStore(store_dir)
    doc = store.create(case_id, _read_json(fields_path), author=author)
    _emit(doc.to_dict())


@dpia.command("update")
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.option("--case-id", required=True)
@click.option("--stage", required=True, type=click.Choice([s.value for s in dpia_mod.STAGE_ORDER]))
@click.option("--fields", "fields_path", required=True, type=click.Path(exists=True))
@click.option("--author", default="")
def dpia_update(store_dir: str, case_id: str, stage: str, fields_path: str, author: str) -> None:
    store = dpia_mod.DpiaStore(store_dir)
    doc = store.record_update(case_id, dpia_mod.StageId(stage), _read_json(fields_path), author=author)
    _emit(doc.to_dict())


@dpia.command("reopen")
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.option("--case-id", required=True)
@click.option("--stage", required=True, type=click.Choice([s.value for s in dpia_mod.STAGE_ORDER]))
@click.option("--change", "change_description", required=True)
@click.option("--author", default="")
def dpia_reopen(store_dir: str, case_id: str, stage: str, change_description: str, author: str) -> None:
    store = dpia_mod.DpiaStore(store_dir)
    doc = store.reopen(case_id, change_description, dpia_mod.StageId(stage), author=author)
    _emit(doc.to_dict())


@dpia.command("gate")
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.option("--case-id", required=True)
@click.option("--stage", required=True, type=click.Choice([s.value for s in dpia_mod.STAGE_ORDER]))
@click.option("--decisions", "decisions_path", default=None, type=click.Path(exists=True),
              help="Decisions JSON from 'petlp assess'")
def dpia_gate(store_dir: str, case_id: str, stage: str, decisions_path: Optional[str]) -> None:
    from .policy.types import DpiaRequirement, LegalBasisDecision, TdmDecision  # noqa: F401

    store = dpia_mod.DpiaStore(store_dir)
    doc = store.load(case_id)
    gate_decisions = dpia_mod.GateDecisions()
    if decisions_path:
        raw = _read_json(decisions_path)
        gate_decisions = dpia_mod.GateDecisions(
            legal_basis=_rehydrate_legal_basis(raw.get("legal_basis")),
            dpia_requirement=_rehydrate_dpia_requirement(raw.get("dpia_requirement")),
            tdm=_rehydrate_tdm(raw.get("tdm")),
        )
    result = dpia_mod.gate_check(doc, dpia_mod.StageId(stage), gate_decisions)
    _emit(result.to_dict())
    if not result.allowed:
        sys.exit(1)


@dpia.command("export")
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.option("--case-id", required=True)
@click.option("--format", "fmt", default="markdown", type=click.Choice(["json", "markdown"]))
@click.option("--out", "out_path", default=None)
def dpia_export(store_dir: str, case_id: str, fmt: str, out_path: Optional[str]) -> None:
    store = dpia_mod.DpiaStore(store_dir)
    rendered = dpia_mod.export_report(store.load(case_id), fmt)
    if out_path in (None, "-"):
        click.echo(rendered)
    else:
        Path(out_path).write_text(rendered, encoding="utf-8")


def _rehydrate_trace(raw: dict) -> "Any":
    from .policy.trace import DecisionTrace, TraceEntry

    return DecisionTrace(
        tuple(TraceEntry(e["rule_id"], e["citation"], e["inputs_digest"], e["conclusion"]) for e in raw["entries"])
    )


def _rehydrate_legal_basis(raw: Optional[dict]):
    if not raw:
        return None
    from .policy.types import Art9Condition, LegalBasis, LegalBasisDecision

    return LegalBasisDecision(
        basis=LegalBasis(raw["basis"]),
        lia_required=raw["lia_required"],
        art9_condition=Art9Condition(raw["art9_condition"]) if raw.get("art9_condition") else None,
        safeguards_required=tuple(raw.get("safeguards_required", [])),
        trace=_rehydrate_trace(raw["trace"]),
    )


def _rehydrate_dpia_requirement(raw: Optional[dict]):
    if not raw:
        return None
    from .policy.types import DpiaRequirement, DpiaStatus

    return DpiaRequirement(DpiaStatus(raw["status"]), raw["trigger_count"], _rehydrate_trace(raw["trace"]))


def _rehydrate_tdm(raw: Optional[dict]):
    if not raw:
        return None
    from .policy.types import RetentionAllowance, TdmDecision, TdmException

    return TdmDecision(
        exception=TdmException(raw["exception"]),
        tos_override=raw["tos_override"],
        retention_allowance=RetentionAllowance(raw["retention_allowance"]),
        obligations=tuple(raw.get("obligations", [])),
        trace=_rehydrate_trace(raw["trace"]),
    )


# --- opt-out scanning -----------------------------------------------------------


@cli.command("scan-robots")
@click.option("--file", "robots_path", required=True, type=click.Path(exists=True))
@click.option("--agent", default="*")
@click.option("--scope", "scope_paths", multiple=True, default=("/",), show_default=True)
@click.option("--llms-txt", "llms_present", is_flag=True, help="An llms.txt file is published (advisory)")
@click.option("--tos-flagged", is_flag=True, help="Operator flags a terms-of-service reservation")
@click.option("--tos-machine-readable", is_flag=True,
              help="Treat prose terms as machine readable (open question, default off)")
def scan_robots(robots_path: str, agent: str, scope_paths: tuple[str, ...], llms_present: bool,
                tos_flagged: bool, tos_machine_readable: bool) -> None:
    """Print the reservation verdict for an exclusion file as JSON."""
    from .optout import tos_reservation

    text = Path(robots_path).read_bytes().decode("utf-8", errors="replace")
    policy = parse_robots(text)
    robots_status = tdm_reservation(policy, agent, list(scope_paths))
    combined = resolve_reservation(
        robots_status,
        tos_reservation(tos_flagged, tos_machine_readable),
        detect_llms_txt(llms_present),
    )
    _emit(
        {
            "policy": policy.to_dict(),
            "robots": robots_status.to_dict(),
            "combined": combined.to_dict(),
        }
    )


@cli.command("plan-window")
@click.option("--start", required=True)
@click.option("--end", required=True)
@click.option("--now", "now_str", required=True)
@click.option("--rolling-months", default=6, show_default=True)
def plan_window_cmd(start: str, end: str, now_str: str, rolling_months: int) -> None:
    """Intersect a requested range with the platform's rolling window."""
    report = plan_window(
        (_parse_instant(start), _parse_instant(end)), _parse_instant(now_str), rolling_months
    )
    _emit(report.to_dict())


# --- transforms -----------------------------------------------------------------


@cli.group()
def transform() -> None:
    """Privacy-preserving record transforms."""


_AUDIT_OPT = click.option("--audit", "audit_path", default=None, help="Append batch events to this audit file")


@transform.command("minimise")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--plan", "plan_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None)
@_AUDIT_OPT
def transform_minimise(records_path: str, plan_path: str, out_path: Optional[str], audit_path: Optional[str]) -> None:
    plan = MinimisationPlan.from_dict(_read_json(plan_path))
    _write_records(apply_minimisation(_read_records(records_path), plan, _audit_option(audit_path)), out_path)


@transform.command("pseudonymise")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None)
@_AUDIT_OPT
def transform_pseudonymise(records_path: str, spec_path: str, out_path: Optional[str], audit_path: Optional[str]) -> None:
    spec = PseudonymisationSpec.from_dict(_read_json(spec_path), salt=_resolve_salt())
    _write_records(pseudonymise(_read_records(records_path), spec, _audit_option(audit_path)), out_path)


@transform.command("generalise")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--field", "fields", multiple=True, required=True, help="Timestamp field to bucket (repeatable)")
@click.option("--out", "out_path", default=None)
@_AUDIT_OPT
def transform_generalise(records_path: str, fields: tuple[str, ...], out_path: Optional[str], audit_path: Optional[str]) -> None:
    _write_records(
        generalise_timestamps(_read_records(records_path), list(fields), audit=_audit_option(audit_path)), out_path
    )


@transform.command("kanon")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--qi", "quasi_identifiers", multiple=True, required=True)
@click.option("--k", "threshold", default=2, show_default=True)
def transform_kanon(records_path: str, quasi_identifiers: tuple[str, ...], threshold: int) -> None:
    report = k_anonymity(_read_records(records_path), list(quasi_identifiers), threshold)
    _emit(report.to_dict())


@transform.command("dp-release")
@click.option("--counts", "counts_path", required=True, type=click.Path(exists=True),
              help="JSON list of true counts")
@click.option("--epsilon", required=True, type=float)
@click.option("--sensitivity", default=1.0, show_default=True, type=float)
@click.option("--seed", required=True, type=int)
def transform_dp_release(counts_path: str, epsilon: float, sensitivity: float, seed: int) -> None:
    spec = DpReleaseSpec(epsilon=epsilon, sensitivity=sensitivity)
    _emit({"noisy_counts": dp_release(_read_json(counts_path), spec, seed), "scale": spec.scale})


@transform.command("leak-scan")
@click.option("--output", "output_path", required=True, type=click.Path(exists=True),
              help="Text file about to be published")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True),
              help="JSONL of {doc_id, text} source documents")
@click.option("--threshold", default=11, show_default=True)
def transform_leak_scan(output_path: str, corpus_path: str, threshold: int) -> None:
    corpus = {row["doc_id"]: row["text"] for row in _read_records(corpus_path)}
    report = scan_verbatim_leak(Path(output_path).read_text(encoding="utf-8"), corpus, threshold)
    _emit(report.to_dict())
    if not report.clean:
        sys.exit(1)


# --- retention -------------------------------------------------------------------


@cli.command("retention-tick")
@click.option("--manifests", "manifests_path", required=True, type=click.Path(exists=True),
              help="JSON list of dataset manifests")
@click.option("--schedule", "schedule_path", default=None, type=click.Path(exists=True),
              help="Optional schedule JSON {category: {max_years, alert_lead_months}}")
@click.option("--now", "now_str", required=True)
@click.option("--apply", "apply_marks", is_flag=True, help="Write emitted-event marks back to the manifest file")
@_AUDIT_OPT
def retention_tick_cmd(manifests_path: str, schedule_path: Optional[str], now_str: str,
                       apply_marks: bool, audit_path: Optional[str]) -> None:
    manifests = [DatasetManifest.from_dict(m) for m in _read_json(manifests_path)]
    if schedule_path:
        policies = {
            category: CategoryPolicy(p["max_years"] * YEAR, p["alert_lead_months"] * MONTH)
            for category, p in _read_json(schedule_path).items()
        }
        schedule = RetentionSchedule(policies=policies)
    else:
        schedule = RetentionSchedule()
    events = retention_tick(schedule, manifests, _parse_instant(now_str), _audit_option(audit_path))
    _emit({"events": [e.to_dict() for e in events]})
    if apply_marks:
        Path(manifests_path).write_text(
            json.dumps([m.to_dict() for m in manifests], indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


# --- golden and serve ---------------------------------------------------------------


@cli.command()
@click.option("--scenario", "scenario_path", default=None, type=click.Path(exists=True),
              help="Scenario file (defaults to the bundled one)")
@click.option("--decisions", "with_decisions", is_flag=True,
              help="Include the full traced decisions in the output")
def golden(scenario_path: Optional[str], with_decisions: bool) -> None:
    """Run the bundled end-to-end scenario and diff against expectations."""
    try:
        report = run_golden_case(scenario_path)
    except GoldenMismatch as exc:
        _emit({"ok": False, "mismatches": exc.diffs})
        sys.exit(1)
    payload = report.to_dict()
    if with_decisions:
        payload["decisions"] = report.decisions
    _emit(payload)


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8008, show_default=True, type=int)
def serve(host: str, port: int) -> None:
    """Serve the wizard API."""
    serve_api(ApiConfig(host=host, port=port)).run()


@cli.command("rule-pack")
@click.option("--file", "pack_path", default=None, type=click.Path(exists=True),
              help="Validate a rule pack file (defaults to the bundled pack)")
def rule_pack(pack_path: Optional[str]) -> None:
    """Validate and print a platform rule pack."""
    pack = load_rule_pack(Path(pack_path).read_text(encoding="utf-8")) if pack_path else bundled_reddit_pack()
    _emit(pack.to_dict())


def main() -> None:
    try:
        cli(standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.Abort:
        sys.exit(130)
    except PetlpError as exc:
        _emit({"error": {"code": exc.code, "message": str(exc)}})
        sys.exit(2)


if __name__ == "__main__":
    main()
