"""Stage gating, connectors, ELT mode, and decision freezing."""
from datetime import datetime, timezone

import pytest

from petlp.dpia import StageId, init_dpia, record_update, reopen_on_change
from petlp.dpia.ledger import REQUIRED_FIELDS
from petlp.errors import ConnectorFailure, GateBlocked
from petlp.pipeline import (
    CaseDecisions,
    ELT_OBLIGATION,
    FileReplayConnector,
    PipelineCase,
    RecordingConnector,
    run_stage,
)
from petlp.policy import engine
from petlp.policy.trees import surrogate_tdm
from petlp.policy.types import TdmException, Wp29CriteriaSet

T0 = datetime(2025, 1, 1, tzinfo=timezone.utc)

PRE_REG = {
    "hypotheses": "h",
    "study_design": "d",
    "data_plan": "p",
    "model_design": "m",
    "expected_outputs": "o",
}


def _fields(stage: StageId) -> dict:
    return {name: "documented" for name in REQUIRED_FIELDS[stage]}


def _ready_case(university_profile, reddit_context, **overrides) -> PipelineCase:
    decisions = CaseDecisions(
        legal_basis=engine.select_legal_basis(university_profile, reddit_context),
        dpia_requirement=engine.assess_dpia_requirement(
            Wp29CriteriaSet(large_scale=True, innovative_use=True), reddit_context
        ),
        tdm=surrogate_tdm(TdmException.ARTICLE3),
    )
    case = PipelineCase(
        case_id="case-1",
        profile=university_profile,
        context=reddit_context,
        decisions=decisions,
        dpia=init_dpia("case-1", PRE_REG, at=T0),
    )
    for name, value in overrides.items():
        setattr(case, name, value)
    return case


def test_extract_runs_and_returns_its_template(university_profile, reddit_context):
    case = _ready_case(university_profile, reddit_context)
    connector = RecordingConnector()
    outcome = run_stage(case, StageId.EXTRACT, connector)
    assert outcome.executed
    assert connector.calls == [("case-1", "extract")]
    assert outcome.dpia_template == REQUIRED_FIELDS[StageId.EXTRACT]


def test_blocked_gate_never_invokes_connector(university_profile, reddit_context):
    case = _ready_case(university_profile, reddit_context)
    case.decisions.tdm = surrogate_tdm(TdmException.NONE)
    connector = RecordingConnector()
    with pytest.raises(GateBlocked) as excinfo:
        run_stage(case, StageId.EXTRACT, connector)
    assert connector.calls == []
    assert any("no lawful extraction basis" in b for b in excinfo.value.blockers)


def test_transform_blocked_until_extract_recorded(university_profile, reddit_context):
    case = _ready_case(university_profile, reddit_context)
    connector = RecordingConnector()
    with pytest.raises(GateBlocked):
        run_stage(case, StageId.TRANSFORM, connector)
    case.dpia = record_update(case.dpia, StageId.EXTRACT, _fields(StageId.EXTRACT), at=T0)
    assert run_stage(case, StageId.TRANSFORM, connector).executed


def test_elt_mode_permits_load_before_transform_with_obligation(university_profile, reddit_context):
    case = _ready_case(university_profile, reddit_context, elt_mode=True)
    case.dpia = record_update(case.dpia, StageId.EXTRACT, _fields(StageId.EXTRACT), at=T0)
    connector = RecordingConnector()
    outcome = run_stage(case, StageId.LOAD, connector)
    assert outcome.executed
    assert ELT_OBLIGATION in outcome.obligations


def test_without_elt_mode_load_stays_blocked(university_profile, reddit_context):
    case = _ready_case(university_profile, reddit_context)
    case.dpia = record_update(case.dpia, StageId.EXTRACT, _fields(StageId.EXTRACT), at=T0)
    with pytest.raises(GateBlocked):
        run_stage(case, StageId.LOAD, RecordingConnector())


def test_connector_failure_propagates(university_profile, reddit_context):
    case = _ready_case(university_profile, reddit_context)

    def broken(case, stage):
        raise RuntimeError("api unreachable")

    with pytest.raises(ConnectorFailure):
        run_stage(case, StageId.EXTRACT, broken)


def test_file_replay_connector_reads_records(tmp_path, university_profile, reddit_context):
    path = tmp_path / "capture.jsonl"
    path.write_text('{"selftext": "a"}\n{"selftext": "b"}\n', encoding="utf-8")
    case = _ready_case(university_profile, reddit_context)
    outcome = run_stage(case, StageId.EXTRACT, FileReplayConnector(path))
    assert outcome.connector_result == [{"selftext": "a"}, {"selftext": "b"}]


def test_pre_registration_is_not_runnable(university_profile, reddit_context):
    case = _ready_case(university_profile, reddit_context)
    with pytest.raises(ValueError):
        run_stage(case, StageId.PRE_REGISTRATION, RecordingConnector())


def test_present_requires_declared_outputs(university_profile, reddit_context):
    import dataclasses

    bare_context = dataclasses.replace(reddit_context, intended_outputs=frozenset())
    case = _ready_case(university_profile, bare_context)
    for stage in (StageId.EXTRACT, StageId.TRANSFORM, StageId.LOAD):
        case.dpia = record_update(case.dpia, stage, _fields(stage), at=T0)
    with pytest.raises(GateBlocked) as excinfo:
        run_stage(case, StageId.PRESENT, RecordingConnector())
    assert any("intended outputs" in b for b in excinfo.value.blockers)


def test_decisions_freeze_after_extract_and_thaw_on_reopen(university_profile, reddit_context):
    case = _ready_case(university_profile, reddit_context)
    case.set_decision("tdm", surrogate_tdm(TdmException.ARTICLE3))  # still allowed
    case.dpia = record_update(case.dpia, StageId.EXTRACT, _fields(StageId.EXTRACT), at=T0)
    with pytest.raises(ValueError):
        case.set_decision("tdm", surrogate_tdm(TdmException.ARTICLE4))
    case.dpia = reopen_on_change(case.dpia, "platform terms changed", StageId.EXTRACT, at=T0)
    case.set_decision("tdm", surrogate_tdm(TdmException.ARTICLE4))
    assert case.decisions.tdm.exception is TdmException.ARTICLE4
