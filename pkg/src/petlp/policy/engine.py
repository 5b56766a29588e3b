"""The legal decision engine.

Pure functions from researcher and processing facts to citation-traced
verdicts: research-organisation qualification, DPIA triggering, legal
basis routing, legitimate interest assessment, TDM exception selection,
transfer mechanisms, and distribution checks against platform rule packs.

All operations are deterministic and side-effect free. Identical inputs
yield identical verdicts and identical trace rule-id sequences.
"""
from __future__ import annotations

import json
from importlib import resources
from typing import Optional

from ..errors import (
    EmptyInterest,
    ForbiddenBasis,
    MissingRulePack,
    NoLawfulRoute,
    UnknownOutputKind,
    UnlawfulAccess,
)
from .trace import TraceBuilder
from .types import (
    Art9Condition,
    BalancingFactor,
    DistributionDecision,
    DpiaRequirement,
    DpiaStatus,
    EntityKind,
    LegalBasis,
    LegalBasisDecision,
    LiaInputs,
    LiaLimb,
    LiaOutcome,
    OutputKind,
    PlatformRulePack,
    ProcessingContext,
    ProfitHandling,
    Purpose,
    QualificationResult,
    ResearcherProfile,
    RetentionAllowance,
    TdmDecision,
    TdmException,
    TransferAssessment,
    TransferFlags,
    TransferInstrument,
    TransferMechanism,
    Verdict,
    Wp29CriteriaSet,
    effective_safeguards,
)

# Reservation status is defined next to the robots machinery but consumed here.
from ..optout.reservation import ReservationStatus


def _load_region_config() -> dict:
    raw = resources.files("petlp.data").joinpath("transfer_regions.json").read_text("utf-8")
    return json.loads(raw)


_REGIONS = _load_region_config()
EEA_REGIONS: frozenset[str] = frozenset(_REGIONS["eea"])
ADEQUACY_REGIONS: frozenset[str] = frozenset(_REGIONS["adequacy"])


def qualify_research_organisation(profile: ResearcherProfile) -> QualificationResult:
    """Decide whether the profile is a research organisation for TDM purposes.

    Three cumulative criteria: research as primary goal; not-for-profit
    operation (or full profit reinvestment) or a recognised public
    interest mission; and no commercial undertaking holding both decisive
    influence and preferential access to results.
    """
    trace = TraceBuilder(profile.to_dict())
    failed: list[str] = []

    if profile.primary_goal_research:
        trace.fire("qual.primary_goal", "primary goal is scientific research")
    else:
        failed.append("primary_goal_research")
        trace.fire("qual.primary_goal", "primary goal is not scientific research")

    nonprofit = profile.profit_handling in (ProfitHandling.NOT_FOR_PROFIT, ProfitHandling.REINVESTS_PROFITS)
    if nonprofit or profile.public_interest_mission:
        trace.fire(
            "qual.profit_or_mission",
            "operates not-for-profit / reinvests profits" if nonprofit else "recognised public interest mission",
        )
    else:
        failed.append("profit_or_mission")
        trace.fire("qual.profit_or_mission", "for-profit operation without a public interest mission")

    captured = profile.decisive_commercial_influence and profile.preferential_commercial_access
    if captured:
        failed.append("commercial_independence")
        trace.fire("qual.independence", "decisive commercial influence with preferential access to results")
    else:
        trace.fire("qual.independence", "no preferential access for a controlling undertaking")

    qualifies = not failed
    trace.fire(
        "qual.qualifies" if qualifies else "qual.not_qualifying",
        "qualifies as research organisation" if qualifies else f"fails: {', '.join(failed)}",
    )
    return QualificationResult(qualifies=qualifies, failed_criteria=tuple(failed), trace=trace.build())


def assess_dpia_requirement(criteria: Wp29CriteriaSet, context: ProcessingContext) -> DpiaRequirement:
    """Count high-risk criteria and map to a DPIA requirement status.

    Two or more criteria: required. One: recommended. Zero: not required.
    Profiling of public social media data forces "required" outright.
    """
    trace = TraceBuilder({"criteria": criteria.to_dict(), "context": context.to_dict()})
    count = criteria.count()

    if context.profiling_of_public_social_media:
        trace.fire(
            "dpia.profiling_public_social_media",
            f"profiling of public social media data; DPIA required (criteria count {count})",
        )
        return DpiaRequirement(DpiaStatus.REQUIRED, count, trace.build())

    if count >= 2:
        trace.fire("dpia.two_or_more", f"{count} high-risk criteria met: {', '.join(criteria.met())}")
        status = DpiaStatus.REQUIRED
    elif count == 1:
        trace.fire("dpia.single_criterion", f"single criterion met: {criteria.met()[0]}; DPIA recommended")
        status = DpiaStatus.RECOMMENDED
    else:
        trace.fire("dpia.zero_criteria", "no high-risk criteria met")
        status = DpiaStatus.NOT_REQUIRED
    return DpiaRequirement(status, count, trace.build())


def _within_official_task(profile: ResearcherProfile) -> bool:
    # Universities carry a research remit in their constitutional documents;
    # other public authorities must have declared an official task scope
    # (enforced at construction). Research purpose keeps them inside it.
    public_body = profile.entity_kind in (EntityKind.UNIVERSITY, EntityKind.PUBLIC_AUTHORITY)
    return public_body and profile.purpose is Purpose.SCIENTIFIC_RESEARCH


def select_legal_basis(
    profile: ResearcherProfile,
    context: ProcessingContext,
    requested: Optional[LegalBasis] = None,
) -> LegalBasisDecision:
    """Route the controller to a lawful basis, honouring a request when permitted.

    Public bodies acting within their research task take public task; they
    may not claim legitimate interests for that processing (ForbiddenBasis).
    Everyone else defaults to legitimate interests with a mandatory LIA.
    Consent may always be requested for user-mediated collection.
    """
    trace = TraceBuilder(
        {
            "profile": profile.to_dict(),
            "context": context.to_dict(),
            "requested": requested.value if requested else None,
        }
    )
    within_task = _within_official_task(profile)
    lia_required = False

    if requested is LegalBasis.CONSENT_6_1_A:
        basis = LegalBasis.CONSENT_6_1_A
        trace.fire("basis.consent", "explicit consent selected for user-mediated collection")
    elif requested is LegalBasis.LEGITIMATE_INTEREST_6_1_F and within_task:
        error = ForbiddenBasis(
            "legitimate interests are unavailable to public authorities "
            "processing within their official tasks"
        )
        error.rule_id = "basis.forbidden_li_public_authority"
        raise error
    elif requested is LegalBasis.PUBLIC_TASK_6_1_E and not within_task:
        # Private entities may invoke public task only for a legally
        # established public interest mission pursued as research.
        if profile.public_interest_mission and profile.purpose is Purpose.SCIENTIFIC_RESEARCH:
            basis = LegalBasis.PUBLIC_TASK_6_1_E
            trace.fire("basis.public_task", "legally established public interest research mission")
        else:
            error = ForbiddenBasis("no legally established public interest task covers this processing")
            error.rule_id = "basis.public_task_unavailable"
            raise error
    elif within_task:
        basis = LegalBasis.PUBLIC_TASK_6_1_E
        trace.fire("basis.public_task", "public body processing within its research task")
    else:
        basis = LegalBasis.LEGITIMATE_INTEREST_6_1_F
        lia_required = True
        trace.fire("basis.legitimate_interest", "non-public controller; legitimate interests with documented LIA")

    safeguards: list[str] = []
    art9: Optional[Art9Condition] = None
    if context.special_category_possible:
        art9 = Art9Condition.ART9_2_J
        trace.fire("basis.art9_research_condition", "special category data possible; research condition engaged")
        safeguards += ["data_minimisation", "pseudonymisation", "ethical_oversight"]
        trace.fire("basis.art89_safeguards", "research safeguards attach: " + ", ".join(safeguards))
    if context.data_publicly_accessible and basis is not LegalBasis.CONSENT_6_1_A:
        safeguards.append("art14_public_notice")
        trace.fire("basis.art14_public_notice", "scraped-at-scale data; public notice required")

    return LegalBasisDecision(
        basis=basis,
        lia_required=lia_required,
        art9_condition=art9,
        safeguards_required=tuple(safeguards),
        trace=trace.build(),
    )


def run_lia(inputs: LiaInputs) -> LiaOutcome:
    """Run the three-limb legitimate interest assessment.

    Necessity fails when a less intrusive alternative exists. Balancing
    sums signed integer factor weights; a non-positive total fails (ties
    resolve against the controller).
    """
    if not inputs.interest_statement.strip():
        raise EmptyInterest("interest statement must not be blank")

    trace = TraceBuilder(inputs.to_dict())

    if not inputs.interest_lawful:
        trace.fire("lia.legitimacy", "declared interest is not lawful; legitimacy limb fails")
        return LiaOutcome(False, LiaLimb.LEGITIMACY, trace.build())
    trace.fire("lia.legitimacy", "lawful interest articulated")

    if inputs.less_intrusive_alternative_exists:
        trace.fire("lia.necessity", "a less intrusive alternative achieves the purpose; necessity fails")
        return LiaOutcome(False, LiaLimb.NECESSITY, trace.build())
    trace.fire("lia.necessity", "no less intrusive alternative identified")

    positive = sum(f.weight for f in inputs.balancing_factors if f.weight > 0)
    negative = -sum(f.weight for f in inputs.balancing_factors if f.weight < 0)
    if positive <= negative:
        trace.fire("lia.balancing", f"subject-side factors ({negative}) outweigh or tie controller-side ({positive})")
        return LiaOutcome(False, LiaLimb.BALANCING, trace.build())
    trace.fire("lia.balancing", f"controller-side factors ({positive}) outweigh subject-side ({negative})")

    trace.fire("lia.pass", "all three limbs satisfied")
    return LiaOutcome(True, None, trace.build())


def evaluate_tdm(
    profile: ResearcherProfile,
    purpose: Purpose,
    reservation: ReservationStatus,
    lawful_access: bool,
) -> TdmDecision:
    """Select the applicable TDM exception.

    Qualifying research organisations mining for scientific research take
    the contract-proof research exception. Everyone else falls back to the
    general exception, which a machine-readable reservation excludes.
    Mixed purposes count as commercial: planned commercialisation forfeits
    the research exception.
    """
    if not lawful_access:
        raise UnlawfulAccess("no TDM exception applies without lawful access to the content")

    trace = TraceBuilder(
        {
            "profile": profile.to_dict(),
            "purpose": purpose.value,
            "reservation": reservation.to_dict(),
            "lawful_access": lawful_access,
        }
    )

    effective_purpose = purpose
    if purpose is Purpose.MIXED:
        trace.fire("tdm.mixed_purpose_commercial", "planned commercialisation; treated as commercial purpose")
        effective_purpose = Purpose.COMMERCIAL

    qualification = qualify_research_organisation(profile)
    if qualification.qualifies and effective_purpose is Purpose.SCIENTIFIC_RESEARCH:
        trace.fire("tdm.article3", "qualifying research organisation mining for scientific research")
        trace.fire("tdm.tos_override", "contrary contractual terms are unenforceable")
        trace.fire("tdm.verification_retention", "secure retention permitted for result verification")
        return TdmDecision(
            exception=TdmException.ARTICLE3,
            tos_override=True,
            retention_allowance=RetentionAllowance.VERIFICATION_RETENTION,
            obligations=("secure_storage", "verification_purpose_only"),
            trace=trace.build(),
        )

    if reservation.reserved:
        trace.fire("tdm.reserved", f"use expressly reserved ({reservation.basis.value}); no exception applies")
        return TdmDecision(
            exception=TdmException.NONE,
            tos_override=False,
            retention_allowance=RetentionAllowance.NONE,
            obligations=(),
            trace=trace.build(),
        )

    trace.fire("tdm.article4", "no express reservation; general TDM exception applies")
    trace.fire("tdm.necessity_retention", "copies retained only as long as necessary for the mining")
    return TdmDecision(
        exception=TdmException.ARTICLE4,
        tos_override=False,
        retention_allowance=RetentionAllowance.NECESSITY_BOUNDED,
        obligations=("necessity_bounded_retention", "monitor_reservation_changes"),
        trace=trace.build(),
    )


def assess_transfer(route: tuple[str, str], flags: TransferFlags) -> TransferAssessment:
    """Pick the transfer mechanism for a (source, destination) route.

    Same-region and intra-EEA flows need nothing. Adequacy (or DPF
    coverage) comes next, then Standard Contractual Clauses, and finally
    the derogations, which only cover non-repetitive transfers.
    """
    source, dest = route
    if not source.strip() or not dest.strip():
        raise ValueError("transfer route regions must be named")

    trace = TraceBuilder({"route": list(route), "flags": flags.to_dict()})

    if source == dest or (source in EEA_REGIONS and dest in EEA_REGIONS):
        trace.fire("transfer.intra_eea", f"{source} to {dest} stays within one jurisdiction or the EEA")
        return TransferAssessment(route, TransferMechanism.NONE_NEEDED, None, trace.build())

    if flags.adequacy_listed or dest in ADEQUACY_REGIONS or flags.dpf_covered:
        detail = "destination covered by the Data Privacy Framework" if flags.dpf_covered and not (
            flags.adequacy_listed or dest in ADEQUACY_REGIONS
        ) else "destination benefits from an adequacy decision"
        trace.fire("transfer.adequacy", detail)
        return TransferAssessment(route, TransferMechanism.ADEQUACY_45, None, trace.build())

    if flags.scc_available:
        trace.fire("transfer.scc", "Standard Contractual Clauses in place")
        return TransferAssessment(route, TransferMechanism.SAFEGUARDS_46, TransferInstrument.SCC, trace.build())

    if not flags.repetitive:
        trace.fire("transfer.derogation", "non-repetitive transfer; explicit-consent derogation available")
        return TransferAssessment(
            route, TransferMechanism.DEROGATION_49, TransferInstrument.EXPLICIT_CONSENT, trace.build()
        )

    raise NoLawfulRoute(
        f"no mechanism covers repetitive transfers from {source} to {dest} "
        "without adequacy or appropriate safeguards"
    )


def check_distribution(
    output_kind: OutputKind,
    rule_pack: Optional[PlatformRulePack],
    tdm: TdmDecision,
    safeguards: frozenset[str] | set[str],
) -> DistributionDecision:
    """Check one output kind against the platform rule pack and statute.

    The pack rule whose precondition set is satisfied and most specific
    wins. Conditional permissions become unconditional once every attached
    condition is covered by a safeguard. Statute only ever tightens the
    result: an extraction without any TDM exception blocks everything, and
    the research exception never upgrades a pack verdict, because dataset
    creation rights do not imply distribution rights.
    """
    if rule_pack is None:
        raise MissingRulePack("no rule pack loaded for this platform")

    held = effective_safeguards(safeguards)
    trace = TraceBuilder(
        {
            "output_kind": output_kind.value,
            "platform_id": rule_pack.platform_id,
            "tdm_exception": tdm.exception.value,
            "safeguards": sorted(held),
        }
    )

    if tdm.exception is TdmException.NONE:
        trace.fire("dist.no_lawful_source", "extraction had no TDM exception; distribution blocked")
        return DistributionDecision(output_kind, Verdict.BLOCKED, (), trace.build())

    candidates = rule_pack.rules_for(output_kind)
    if not candidates:
        raise UnknownOutputKind(f"rule pack {rule_pack.platform_id!r} has no rule for {output_kind.value!r}")

    applicable = [rule for rule in candidates if rule.when <= held]
    if not applicable:
        # Rules exist but every one presupposes a safeguard we lack.
        trace.fire(
            "dist.pack_verdict",
            "no pack rule's preconditions are met; blocked by default",
            citation=candidates[0].citation,
        )
        return DistributionDecision(output_kind, Verdict.BLOCKED, (), trace.build())

    rule = max(applicable, key=lambda r: len(r.when))
    outstanding = tuple(tag for tag in rule.conditions if tag not in held)
    trace.fire(
        "dist.pack_verdict",
        f"pack rule gives {rule.verdict.value}"
        + (f" subject to: {', '.join(rule.conditions)}" if rule.conditions else ""),
        citation=rule.citation,
    )

    verdict = rule.verdict
    conditions = tuple(rule.conditions)
    if verdict is Verdict.ALLOWED_WITH_CONDITIONS and not outstanding:
        if "dp" in held and "anonymised" in rule.conditions and "anonymised" not in set(safeguards):
            trace.fire("dist.dp_satisfies_anonymisation", "differential privacy satisfies the anonymisation condition")
        trace.fire("dist.conditions_satisfied", "all attached conditions are covered by declared safeguards")
        verdict = Verdict.ALLOWED
        conditions = ()
    elif verdict is Verdict.ALLOWED_WITH_CONDITIONS:
        conditions = outstanding

    if output_kind is OutputKind.DATASET_RAW and tdm.exception is TdmException.ARTICLE3:
        # Creation rights never imply distribution rights; the research
        # exception leaves the pack verdict untouched.
        trace.fire("dist.creation_not_distribution", "research TDM exception does not add distribution rights")

    return DistributionDecision(output_kind, verdict, conditions, trace.build())
