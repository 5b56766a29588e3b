"""Decision engine behaviour: qualification, DPIA triggers, legal basis,
LIA, TDM routing, transfers, and distribution checks."""
import dataclasses
import itertools

import pytest
from hypothesis import given, strategies as st

from petlp.errors import (
    EmptyInterest,
    ForbiddenBasis,
    MissingRulePack,
    NoLawfulRoute,
    UnknownOutputKind,
    UnlawfulAccess,
)
from petlp.optout.reservation import ReservationBasis, ReservationStatus
from petlp.policy import engine
from petlp.policy.rulepacks import bundled_reddit_pack
from petlp.policy.trees import surrogate_tdm
from petlp.policy.types import (
    BalancingFactor,
    DpiaStatus,
    EntityKind,
    LegalBasis,
    LiaInputs,
    LiaLimb,
    OutputKind,
    ProcessingContext,
    ProfitHandling,
    Purpose,
    ResearcherProfile,
    RetentionAllowance,
    SubjectScale,
    TdmException,
    TransferFlags,
    TransferInstrument,
    TransferMechanism,
    Verdict,
    WP29_CRITERIA,
    Wp29CriteriaSet,
)

RESERVED = ReservationStatus(True, ReservationBasis.ROBOTS_DISALLOW, "blanket disallow")
NOT_RESERVED = ReservationStatus.none()


def _context(**overrides) -> ProcessingContext:
    base = dict(
        platform_id="reddit",
        data_publicly_accessible=True,
        special_category_possible=False,
        subject_count_scale=SubjectScale.SMALL,
        vulnerable_subjects=False,
        combines_datasets=False,
        innovative_technology=False,
        profiling_of_public_social_media=False,
    )
    base.update(overrides)
    return ProcessingContext(**base)


# --- qualification -------------------------------------------------------------


def test_university_qualifies(university_profile):
    result = engine.qualify_research_organisation(university_profile)
    assert result.qualifies
    assert result.failed_criteria == ()
    assert result.trace.rule_ids[-1] == "qual.qualifies"


def test_commercial_entity_does_not_qualify(commercial_profile):
    result = engine.qualify_research_organisation(commercial_profile)
    assert not result.qualifies
    assert "primary_goal_research" in result.failed_criteria
    assert "profit_or_mission" in result.failed_criteria


def test_captured_nonprofit_fails_independence():
    profile = ResearcherProfile(
        entity_kind=EntityKind.RESEARCH_INSTITUTE,
        primary_goal_research=True,
        profit_handling=ProfitHandling.NOT_FOR_PROFIT,
        public_interest_mission=True,
        decisive_commercial_influence=True,
        preferential_commercial_access=True,
        purpose=Purpose.SCIENTIFIC_RESEARCH,
    )
    result = engine.qualify_research_organisation(profile)
    assert not result.qualifies
    assert result.failed_criteria == ("commercial_independence",)


def test_decisive_influence_alone_is_not_disqualifying():
    profile = ResearcherProfile(
        entity_kind=EntityKind.RESEARCH_INSTITUTE,
        primary_goal_research=True,
        profit_handling=ProfitHandling.REINVESTS_PROFITS,
        public_interest_mission=False,
        decisive_commercial_influence=True,
        preferential_commercial_access=False,
        purpose=Purpose.SCIENTIFIC_RESEARCH,
    )
    assert engine.qualify_research_organisation(profile).qualifies


def test_public_authority_requires_task_scope():
    with pytest.raises(ValueError):
        ResearcherProfile(
            entity_kind=EntityKind.PUBLIC_AUTHORITY,
            primary_goal_research=True,
            profit_handling=ProfitHandling.NOT_FOR_PROFIT,
            public_interest_mission=True,
            decisive_commercial_influence=False,
            preferential_commercial_access=False,
            purpose=Purpose.SCIENTIFIC_RESEARCH,
        )


def test_mixed_purpose_requires_commercialisation_flag(university_profile):
    with pytest.raises(ValueError):
        dataclasses.replace(university_profile, purpose=Purpose.MIXED)
    dataclasses.replace(university_profile, purpose=Purpose.MIXED, commercialisation_planned=True)


# --- DPIA trigger ----------------------------------------------------------------


def test_five_criteria_require_dpia():
    criteria = Wp29CriteriaSet(
        evaluation_scoring=True,
        sensitive_or_highly_personal=True,
        large_scale=True,
        matching_combining=True,
        innovative_use=True,
    )
    requirement = engine.assess_dpia_requirement(criteria, _context())
    assert requirement.status is DpiaStatus.REQUIRED
    assert requirement.trigger_count == 5


def test_zero_criteria_not_required():
    requirement = engine.assess_dpia_requirement(Wp29CriteriaSet(), _context())
    assert requirement.status is DpiaStatus.NOT_REQUIRED
    assert requirement.trigger_count == 0


def test_single_criterion_recommended():
    requirement = engine.assess_dpia_requirement(Wp29CriteriaSet(large_scale=True), _context())
    assert requirement.status is DpiaStatus.RECOMMENDED
    assert requirement.trigger_count == 1


def test_profiling_public_social_media_forces_requirement():
    requirement = engine.assess_dpia_requirement(
        Wp29CriteriaSet(), _context(profiling_of_public_social_media=True)
    )
    assert requirement.status is DpiaStatus.REQUIRED
    assert requirement.trace.rule_ids == ("dpia.profiling_public_social_media",)


@given(
    flags=st.lists(st.booleans(), min_size=9, max_size=9),
    extra=st.integers(min_value=0, max_value=8),
)
def test_adding_a_criterion_never_relaxes_the_status(flags, extra):
    """Monotone trigger: turning one more flag on never moves the status
    toward not_required."""
    severity = {DpiaStatus.NOT_REQUIRED: 0, DpiaStatus.RECOMMENDED: 1, DpiaStatus.REQUIRED: 2}
    base = Wp29CriteriaSet(**dict(zip(WP29_CRITERIA, flags)))
    raised_flags = list(flags)
    raised_flags[extra] = True
    raised = Wp29CriteriaSet(**dict(zip(WP29_CRITERIA, raised_flags)))
    context = _context()
    assert severity[engine.assess_dpia_requirement(raised, context).status] >= severity[
        engine.assess_dpia_requirement(base, context).status
    ]


# --- legal basis -----------------------------------------------------------------


def test_public_university_gets_public_task_with_art9(university_profile, reddit_context):
    decision = engine.select_legal_basis(university_profile, reddit_context)
    assert decision.basis is LegalBasis.PUBLIC_TASK_6_1_E
    assert decision.art9_condition is not None and decision.art9_condition.value == "art9_2_j"
    assert not decision.lia_required
    assert {"data_minimisation", "pseudonymisation", "ethical_oversight"} <= set(decision.safeguards_required)


def test_private_company_defaults_to_legitimate_interest(commercial_profile):
    decision = engine.select_legal_basis(commercial_profile, _context())
    assert decision.basis is LegalBasis.LEGITIMATE_INTEREST_6_1_F
    assert decision.lia_required


def test_public_authority_may_not_claim_legitimate_interest(university_profile):
    with pytest.raises(ForbiddenBasis):
        engine.select_legal_basis(
            university_profile, _context(), requested=LegalBasis.LEGITIMATE_INTEREST_6_1_F
        )


def test_consent_available_for_user_mediated_collection(commercial_profile):
    decision = engine.select_legal_basis(commercial_profile, _context(), requested=LegalBasis.CONSENT_6_1_A)
    assert decision.basis is LegalBasis.CONSENT_6_1_A
    assert not decision.lia_required


def test_art9_condition_tracks_special_category_flag(university_profile):
    without = engine.select_legal_basis(university_profile, _context(special_category_possible=False))
    with_flag = engine.select_legal_basis(university_profile, _context(special_category_possible=True))
    assert without.art9_condition is None
    assert with_flag.art9_condition is not None


def _valid_profile(kind: EntityKind, purpose: Purpose) -> ResearcherProfile:
    return ResearcherProfile(
        entity_kind=kind,
        primary_goal_research=purpose is Purpose.SCIENTIFIC_RESEARCH,
        profit_handling=ProfitHandling.NOT_FOR_PROFIT,
        public_interest_mission=False,
        decisive_commercial_influence=False,
        preferential_commercial_access=False,
        purpose=purpose,
        official_task_scope="statutory remit" if kind is EntityKind.PUBLIC_AUTHORITY else "",
        commercialisation_planned=True if purpose is Purpose.MIXED else None,
    )


def test_basis_routing_is_exhaustive_and_deterministic():
    """Every (entity kind, purpose, request) combination yields exactly one
    outcome: a decision or ForbiddenBasis, identically on repeat."""
    requests = [None, *LegalBasis]
    for kind, purpose, requested in itertools.product(EntityKind, Purpose, requests):
        profile = _valid_profile(kind, purpose)
        outcomes = []
        for _ in range(2):
            try:
                outcome = engine.select_legal_basis(profile, _context(), requested).basis.value
            except ForbiddenBasis:
                outcome = "forbidden"
            outcomes.append(outcome)
        assert outcomes[0] == outcomes[1]


# --- LIA -------------------------------------------------------------------------


def _lia(**overrides) -> LiaInputs:
    base = dict(
        interest_statement="advance public knowledge of online political discourse",
        less_intrusive_alternative_exists=False,
        balancing_factors=(
            BalancingFactor("scientific value", 3),
            BalancingFactor("public data", 1),
            BalancingFactor("surveillance feeling", -2),
        ),
    )
    base.update(overrides)
    return LiaInputs(**base)


def test_lia_passes_on_favourable_balance():
    outcome = engine.run_lia(_lia())
    assert outcome.passed and outcome.failing_limb is None
    assert outcome.trace.rule_ids[-1] == "lia.pass"


def test_lia_fails_necessity_when_synthetic_data_suffices():
    outcome = engine.run_lia(_lia(less_intrusive_alternative_exists=True))
    assert not outcome.passed
    assert outcome.failing_limb is LiaLimb.NECESSITY


def test_lia_fails_balancing_when_subject_harms_dominate():
    outcome = engine.run_lia(
        _lia(
            balancing_factors=(
                BalancingFactor("scientific value", 2),
                BalancingFactor("vulnerable subjects", -3),
                BalancingFactor("surveillance effect", -2),
            )
        )
    )
    assert outcome.failing_limb is LiaLimb.BALANCING


def test_lia_tie_fails_balancing_conservatively():
    outcome = engine.run_lia(
        _lia(balancing_factors=(BalancingFactor("value", 2), BalancingFactor("risk", -2)))
    )
    assert outcome.failing_limb is LiaLimb.BALANCING


def test_lia_blank_statement_is_an_error():
    with pytest.raises(EmptyInterest):
        engine.run_lia(_lia(interest_statement="   "))


def test_lia_unlawful_interest_fails_legitimacy():
    outcome = engine.run_lia(_lia(interest_lawful=False))
    assert outcome.failing_limb is LiaLimb.LEGITIMACY


# --- TDM -------------------------------------------------------------------------


def test_qualifying_org_gets_research_exception_despite_reservation(university_profile):
    decision = engine.evaluate_tdm(university_profile, Purpose.SCIENTIFIC_RESEARCH, RESERVED, True)
    assert decision.exception is TdmException.ARTICLE3
    assert decision.tos_override
    assert decision.retention_allowance is RetentionAllowance.VERIFICATION_RETENTION


def test_commercial_with_reservation_has_no_exception(commercial_profile):
    decision = engine.evaluate_tdm(commercial_profile, Purpose.COMMERCIAL, RESERVED, True)
    assert decision.exception is TdmException.NONE
    assert not decision.tos_override


def test_commercial_without_reservation_uses_general_exception(commercial_profile):
    decision = engine.evaluate_tdm(commercial_profile, Purpose.COMMERCIAL, NOT_RESERVED, True)
    assert decision.exception is TdmException.ARTICLE4
    assert decision.retention_allowance is RetentionAllowance.NECESSITY_BOUNDED


def test_unlawful_access_blocks_everything(university_profile):
    with pytest.raises(UnlawfulAccess):
        engine.evaluate_tdm(university_profile, Purpose.SCIENTIFIC_RESEARCH, NOT_RESERVED, False)


def test_mixed_purpose_forfeits_research_exception(university_profile):
    profile = dataclasses.replace(university_profile, purpose=Purpose.MIXED, commercialisation_planned=True)
    decision = engine.evaluate_tdm(profile, Purpose.MIXED, RESERVED, True)
    assert decision.exception is TdmException.NONE
    assert "tdm.mixed_purpose_commercial" in decision.trace.rule_ids


# --- transfers ---------------------------------------------------------------------


@pytest.mark.parametrize("route", [("EU", "EU"), ("DE", "DE"), ("DE", "FR")])
def test_intra_eea_needs_no_mechanism(route):
    assessment = engine.assess_transfer(route, TransferFlags())
    assert assessment.mechanism is TransferMechanism.NONE_NEEDED


def test_adequacy_country_from_config():
    assessment = engine.assess_transfer(("DE", "JP"), TransferFlags())
    assert assessment.mechanism is TransferMechanism.ADEQUACY_45


def test_dpf_coverage_counts_as_adequacy():
    assessment = engine.assess_transfer(("DE", "US"), TransferFlags(dpf_covered=True))
    assert assessment.mechanism is TransferMechanism.ADEQUACY_45


def test_scc_route_to_us():
    assessment = engine.assess_transfer(("DE", "US"), TransferFlags(scc_available=True))
    assert assessment.mechanism is TransferMechanism.SAFEGUARDS_46
    assert assessment.instrument is TransferInstrument.SCC


def test_one_off_transfer_may_use_derogation():
    assessment = engine.assess_transfer(("DE", "US"), TransferFlags())
    assert assessment.mechanism is TransferMechanism.DEROGATION_49


def test_repetitive_transfer_without_safeguards_has_no_route():
    with pytest.raises(NoLawfulRoute):
        engine.assess_transfer(("DE", "US"), TransferFlags(repetitive=True))


# --- distribution --------------------------------------------------------------------


@pytest.fixture(scope="module")
def pack():
    return bundled_reddit_pack()


def test_model_weights_blocked_without_permission(pack):
    decision = engine.check_distribution(
        OutputKind.MODEL_WEIGHTS, pack, surrogate_tdm(TdmException.ARTICLE3), frozenset()
    )
    assert decision.verdict is Verdict.BLOCKED


def test_model_weights_conditional_with_permission(pack):
    decision = engine.check_distribution(
        OutputKind.MODEL_WEIGHTS, pack, surrogate_tdm(TdmException.ARTICLE3), frozenset({"platform_permission"})
    )
    assert decision.verdict is Verdict.ALLOWED_WITH_CONDITIONS
    assert "verbatim_output_testing" in decision.conditions


def test_ids_only_release_is_conditional_hydration(pack):
    decision = engine.check_distribution(
        OutputKind.DATASET_IDS_ONLY, pack, surrogate_tdm(TdmException.ARTICLE3), frozenset()
    )
    assert decision.verdict is Verdict.ALLOWED_WITH_CONDITIONS
    assert decision.conditions == ("hydration_only",)


def test_quotes_blocked_pending_leak_scan(pack):
    decision = engine.check_distribution(
        OutputKind.PAPER_WITH_QUOTES, pack, surrogate_tdm(TdmException.ARTICLE3), frozenset()
    )
    assert decision.verdict is Verdict.BLOCKED


def test_aggregate_stats_with_dp_safeguard_allowed(pack):
    decision = engine.check_distribution(
        OutputKind.AGGREGATE_STATS, pack, surrogate_tdm(TdmException.ARTICLE3), frozenset({"dp"})
    )
    assert decision.verdict is Verdict.ALLOWED
    assert "dist.dp_satisfies_anonymisation" in decision.trace.rule_ids


def test_no_exception_blocks_all_outputs(pack):
    for kind in OutputKind:
        if not pack.rules_for(kind):
            continue
        decision = engine.check_distribution(kind, pack, surrogate_tdm(TdmException.NONE), frozenset({"dp"}))
        assert decision.verdict is Verdict.BLOCKED


def test_research_exception_never_upgrades_raw_dataset(pack):
    decision = engine.check_distribution(
        OutputKind.DATASET_RAW, pack, surrogate_tdm(TdmException.ARTICLE3), frozenset({"dp", "anonymised"})
    )
    assert decision.verdict is Verdict.BLOCKED
    assert "dist.creation_not_distribution" in decision.trace.rule_ids


def test_research_exception_never_more_permissive_than_the_pack(pack):
    """Over every output kind and safeguard subset, the verdict under the
    research exception equals the pack-governed verdict: statute only ever
    tightens, never loosens."""
    tags = ["platform_permission", "anonymised", "dp", "verbatim_leak_scan", "hydration_only"]
    for kind in OutputKind:
        if not pack.rules_for(kind):
            continue
        for mask in range(2 ** len(tags)):
            safeguards = frozenset(tag for bit, tag in enumerate(tags) if mask & (1 << bit))
            with_research = engine.check_distribution(kind, pack, surrogate_tdm(TdmException.ARTICLE3), safeguards)
            pack_only = engine.check_distribution(kind, pack, surrogate_tdm(TdmException.ARTICLE4), safeguards)
            assert with_research.verdict is pack_only.verdict, (kind, sorted(safeguards))
            assert with_research.conditions == pack_only.conditions


def test_missing_pack_and_unknown_kind(pack):
    with pytest.raises(MissingRulePack):
        engine.check_distribution(OutputKind.PAPER, None, surrogate_tdm(TdmException.ARTICLE3), frozenset())
    with pytest.raises(UnknownOutputKind):
        engine.check_distribution(OutputKind.PAPER, pack, surrogate_tdm(TdmException.ARTICLE3), frozenset())


# --- cross-cutting properties ----------------------------------------------------------


def test_identical_inputs_identical_traces(university_profile, reddit_context):
    first = engine.select_legal_basis(university_profile, reddit_context)
    second = engine.select_legal_basis(university_profile, reddit_context)
    assert first.trace == second.trace


def test_every_decision_trace_cites_sources(university_profile, reddit_context, pack):
    decisions = [
        engine.qualify_research_organisation(university_profile),
        engine.select_legal_basis(university_profile, reddit_context),
        engine.assess_dpia_requirement(Wp29CriteriaSet(large_scale=True), reddit_context),
        engine.evaluate_tdm(university_profile, Purpose.SCIENTIFIC_RESEARCH, RESERVED, True),
        engine.assess_transfer(("DE", "US"), TransferFlags(scc_available=True)),
        engine.check_distribution(OutputKind.AGGREGATE_STATS, pack, surrogate_tdm(TdmException.ARTICLE3), frozenset()),
    ]
    for decision in decisions:
        assert decision.trace.entries
        assert all(entry.citation for entry in decision.trace.entries)
