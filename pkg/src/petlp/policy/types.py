"""Domain types for the legal decision engine."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

from .trace import DecisionTrace


class EntityKind(str, Enum):
    UNIVERSITY = "university"
    RESEARCH_INSTITUTE = "research_institute"
    PUBLIC_AUTHORITY = "public_authority"
    COMMERCIAL = "commercial"
    NONPROFIT_OTHER = "nonprofit_other"


class ProfitHandling(str, Enum):
    NOT_FOR_PROFIT = "not_for_profit"
    REINVESTS_PROFITS = "reinvests_profits"
    FOR_PROFIT = "for_profit"


class Purpose(str, Enum):
    SCIENTIFIC_RESEARCH = "scientific_research"
    COMMERCIAL = "commercial"
    MIXED = "mixed"


class SubjectScale(str, Enum):
    SMALL = "small"
    LARGE = "large"


class OutputKind(str, Enum):
    PAPER = "paper"
    PAPER_WITH_QUOTES = "paper_with_quotes"
    DATASET_RAW = "dataset_raw"
    DATASET_IDS_ONLY = "dataset_ids_only"
    MODEL_WEIGHTS = "model_weights"
    AGGREGATE_STATS = "aggregate_stats"


class LegalBasis(str, Enum):
    CONSENT_6_1_A = "consent_6_1_a"
    PUBLIC_TASK_6_1_E = "public_task_6_1_e"
    LEGITIMATE_INTEREST_6_1_F = "legitimate_interest_6_1_f"


class Art9Condition(str, Enum):
    ART9_2_J = "art9_2_j"


class DpiaStatus(str, Enum):
    REQUIRED = "required"
    RECOMMENDED = "recommended"
    NOT_REQUIRED = "not_required"


class LiaLimb(str, Enum):
    LEGITIMACY = "legitimacy"
    NECESSITY = "necessity"
    BALANCING = "balancing"


class TdmException(str, Enum):
    ARTICLE3 = "article3"
    ARTICLE4 = "article4"
    NONE = "none"


class RetentionAllowance(str, Enum):
    VERIFICATION_RETENTION = "verification_retention"
    NECESSITY_BOUNDED = "necessity_bounded"
    NONE = "none"


class TransferMechanism(str, Enum):
    NONE_NEEDED = "none_needed"
    ADEQUACY_45 = "adequacy_45"
    SAFEGUARDS_46 = "safeguards_46"
    DEROGATION_49 = "derogation_49"


class TransferInstrument(str, Enum):
    SCC = "scc"
    BCR = "bcr"
    ADMIN_ARRANGEMENT = "admin_arrangement"
    EXPLICIT_CONSENT = "explicit_consent"
    PUBLIC_INTEREST = "public_interest"


class Verdict(str, Enum):
    ALLOWED = "allowed"
    ALLOWED_WITH_CONDITIONS = "allowed_with_conditions"
    BLOCKED = "blocked"


@dataclass(frozen=True)
class ResearcherProfile:
    """Who is processing; drives qualification and legal-basis routing.

    ``official_task_scope`` is mandatory for public authorities.
    ``commercialisation_planned`` must be declared when purpose is mixed.
    """

    entity_kind: EntityKind
    primary_goal_research: bool
    profit_handling: ProfitHandling
    public_interest_mission: bool
    decisive_commercial_influence: bool
    preferential_commercial_access: bool
    purpose: Purpose
    official_task_scope: str = ""
    commercialisation_planned: Optional[bool] = None

    def __post_init__(self) -> None:
        if self.entity_kind is EntityKind.PUBLIC_AUTHORITY and not self.official_task_scope.strip():
            raise ValueError("public authorities must declare an official task scope")
        if self.purpose is Purpose.MIXED and self.commercialisation_planned is None:
            raise ValueError("mixed purpose requires a declared commercialisation plan flag")

    def to_dict(self) -> dict[str, Any]:
        return {
            "entity_kind": self.entity_kind.value,
            "primary_goal_research": self.primary_goal_research,
            "profit_handling": self.profit_handling.value,
            "public_interest_mission": self.public_interest_mission,
            "decisive_commercial_influence": self.decisive_commercial_influence,
            "preferential_commercial_access": self.preferential_commercial_access,
            "purpose": self.purpose.value,
            "official_task_scope": self.official_task_scope,
            "commercialisation_planned": self.commercialisation_planned,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ResearcherProfile":
        return cls(
            entity_kind=EntityKind(data["entity_kind"]),
            primary_goal_research=bool(data["primary_goal_research"]),
            profit_handling=ProfitHandling(data["profit_handling"]),
            public_interest_mission=bool(data["public_interest_mission"]),
            decisive_commercial_influence=bool(data["decisive_commercial_influence"]),
            preferential_commercial_access=bool(data["preferential_commercial_access"]),
            purpose=Purpose(data["purpose"]),
            official_task_scope=data.get("official_task_scope", ""),
            commercialisation_planned=data.get("commercialisation_planned"),
        )


@dataclass(frozen=True)
class ProcessingContext:
    """What is being processed and how risky the setting is."""

    platform_id: str
    data_publicly_accessible: bool
    special_category_possible: bool
    subject_count_scale: SubjectScale
    vulnerable_subjects: bool
    combines_datasets: bool
    innovative_technology: bool
    profiling_of_public_social_media: bool
    intended_outputs: frozenset[OutputKind] = frozenset()
    cross_border: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if not self.platform_id.strip():
            raise ValueError("platform_id must be non-empty")

    def to_dict(self) -> dict[str, Any]:
        return {
            "platform_id": self.platform_id,
            "data_publicly_accessible": self.data_publicly_accessible,
            "special_category_possible": self.special_category_possible,
            "subject_count_scale": self.subject_count_scale.value,
            "vulnerable_subjects": self.vulnerable_subjects,
            "combines_datasets": self.combines_datasets,
            "innovative_technology": self.innovative_technology,
            "profiling_of_public_social_media": self.profiling_of_public_social_media,
            "intended_outputs": sorted(kind.value for kind in self.intended_outputs),
            "cross_border": [list(route) for route in self.cross_border],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ProcessingContext":
        return cls(
            platform_id=data["platform_id"],
            data_publicly_accessible=bool(data["data_publicly_accessible"]),
            special_category_possible=bool(data["special_category_possible"]),
            subject_count_scale=SubjectScale(data["subject_count_scale"]),
            vulnerable_subjects=bool(data["vulnerable_subjects"]),
            combines_datasets=bool(data["combines_datasets"]),
            innovative_technology=bool(data["innovative_technology"]),
            profiling_of_public_social_media=bool(data["profiling_of_public_social_media"]),
            intended_outputs=frozenset(OutputKind(k) for k in data.get("intended_outputs", [])),
            cross_border=tuple((r[0], r[1]) for r in data.get("cross_border", [])),
        )


WP29_CRITERIA = (
    "evaluation_scoring",
    "automated_decision_significant_effect",
    "systematic_monitoring",
    "sensitive_or_highly_personal",
    "large_scale",
    "matching_combining",
    "vulnerable_subjects",
    "innovative_use",
    "rights_or_service_prevention",
)


@dataclass(frozen=True)
class Wp29CriteriaSet:
    """The nine WP29 high-risk indicators."""

    evaluation_scoring: bool = False
    automated_decision_significant_effect: bool = False
    systematic_monitoring: bool = False
    sensitive_or_highly_personal: bool = False
    large_scale: bool = False
    matching_combining: bool = False
    vulnerable_subjects: bool = False
    innovative_use: bool = False
    rights_or_service_prevention: bool = False

    def count(self) -> int:
        return sum(1 for name in WP29_CRITERIA if getattr(self, name))

    def met(self) -> list[str]:
        return [name for name in WP29_CRITERIA if getattr(self, name)]

    def to_dict(self) -> dict[str, bool]:
        return {name: getattr(self, name) for name in WP29_CRITERIA}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Wp29CriteriaSet":
        return cls(**{name: bool(data.get(name, False)) for name in WP29_CRITERIA})


@dataclass(frozen=True)
class QualificationResult:
    qualifies: bool
    failed_criteria: tuple[str, ...]
    trace: DecisionTrace

    def to_dict(self) -> dict[str, Any]:
        return {
            "qualifies": self.qualifies,
            "failed_criteria": list(self.failed_criteria),
            "trace": self.trace.to_dict(),
        }


@dataclass(frozen=True)
class DpiaRequirement:
    status: DpiaStatus
    trigger_count: int
    trace: DecisionTrace

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": self.status.value,
            "trigger_count": self.trigger_count,
            "trace": self.trace.to_dict(),
        }


@dataclass(frozen=True)
class LegalBasisDecision:
    basis: LegalBasis
    lia_required: bool
    art9_condition: Optional[Art9Condition]
    safeguards_required: tuple[str, ...]
    trace: DecisionTrace

    def __post_init__(self) -> None:
        if self.basis is LegalBasis.LEGITIMATE_INTEREST_6_1_F and not self.lia_required:
            raise ValueError("legitimate interest basis always requires an LIA")

    def to_dict(self) -> dict[str, Any]:
        return {
            "basis": self.basis.value,
            "lia_required": self.lia_required,
            "art9_condition": self.art9_condition.value if self.art9_condition else None,
            "safeguards_required": list(self.safeguards_required),
            "trace": self.trace.to_dict(),
        }


@dataclass(frozen=True)
class BalancingFactor:
    """One weighed consideration in the LIA balancing limb.

    Positive weights favour the controller, negative weights the data
    subjects. Weights are integers; sophistication beyond that is not
    supported by the guidance.
    """

    name: str
    weight: int

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "weight": self.weight}


@dataclass(frozen=True)
class LiaInputs:
    interest_statement: str
    less_intrusive_alternative_exists: bool
    balancing_factors: tuple[BalancingFactor, ...]
    interest_lawful: bool = True

    def to_dict(self) -> dict[str, Any]:
        return {
            "interest_statement": self.interest_statement,
            "less_intrusive_alternative_exists": self.less_intrusive_alternative_exists,
            "balancing_factors": [f.to_dict() for f in self.balancing_factors],
            "interest_lawful": self.interest_lawful,
        }


@dataclass(frozen=True)
class LiaOutcome:
    passed: bool
    failing_limb: Optional[LiaLimb]
    trace: DecisionTrace

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "failing_limb": self.failing_limb.value if self.failing_limb else None,
            "trace": self.trace.to_dict(),
        }


@dataclass(frozen=True)
class TdmDecision:
    exception: TdmException
    tos_override: bool
    retention_allowance: RetentionAllowance
    obligations: tuple[str, ...]
    trace: DecisionTrace

    def __post_init__(self) -> None:
        if self.exception is TdmException.ARTICLE3:
            if not self.tos_override or self.retention_allowance is not RetentionAllowance.VERIFICATION_RETENTION:
                raise ValueError("research exception implies terms override and verification retention")
        if self.exception is TdmException.ARTICLE4 and self.retention_allowance is not RetentionAllowance.NECESSITY_BOUNDED:
            raise ValueError("general exception implies necessity-bounded retention")

    def to_dict(self) -> dict[str, Any]:
        return {
            "exception": self.exception.value,
            "tos_override": self.tos_override,
            "retention_allowance": self.retention_allowance.value,
            "obligations": list(self.obligations),
            "trace": self.trace.to_dict(),
        }


@dataclass(frozen=True)
class TransferFlags:
    adequacy_listed: bool = False
    dpf_covered: bool = False
    scc_available: bool = False
    repetitive: bool = False

    def to_dict(self) -> dict[str, bool]:
        return {
            "adequacy_listed": self.adequacy_listed,
            "dpf_covered": self.dpf_covered,
            "scc_available": self.scc_available,
            "repetitive": self.repetitive,
        }


@dataclass(frozen=True)
class TransferAssessment:
    route: tuple[str, str]
    mechanism: TransferMechanism
    instrument: Optional[TransferInstrument]
    trace: DecisionTrace

    def to_dict(self) -> dict[str, Any]:
        return {
            "route": list(self.route),
            "mechanism": self.mechanism.value,
            "instrument": self.instrument.value if self.instrument else None,
            "trace": self.trace.to_dict(),
        }


@dataclass(frozen=True)
class PackRule:
    output_kind: OutputKind
    when: frozenset[str]
    verdict: Verdict
    conditions: tuple[str, ...]
    citation: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "output_kind": self.output_kind.value,
            "when": sorted(self.when),
            "verdict": self.verdict.value,
            "conditions": list(self.conditions),
            "citation": self.citation,
        }


@dataclass(frozen=True)
class PlatformRulePack:
    platform_id: str
    rules: tuple[PackRule, ...]
    source: str = ""

    def rules_for(self, output_kind: OutputKind) -> list[PackRule]:
        return [rule for rule in self.rules if rule.output_kind is output_kind]

    def to_dict(self) -> dict[str, Any]:
        return {
            "platform_id": self.platform_id,
            "source": self.source,
            "rules": [rule.to_dict() for rule in self.rules],
        }


@dataclass(frozen=True)
class DistributionDecision:
    output_kind: OutputKind
    verdict: Verdict
    conditions: tuple[str, ...]
    trace: DecisionTrace

    def to_dict(self) -> dict[str, Any]:
        return {
            "output_kind": self.output_kind.value,
            "verdict": self.verdict.value,
            "conditions": list(self.conditions),
            "trace": self.trace.to_dict(),
        }


# Safeguard tags that imply other tags when checking rule conditions.
# Differential privacy on released aggregates is the stronger anonymisation
# measure, so it satisfies an "anonymised" condition.
SAFEGUARD_IMPLICATIONS: dict[str, frozenset[str]] = {
    "dp": frozenset({"anonymised"}),
}


def effective_safeguards(safeguards: frozenset[str] | set[str]) -> frozenset[str]:
    out = set(safeguards)
    for tag in list(out):
        out |= SAFEGUARD_IMPLICATIONS.get(tag, frozenset())
    return frozenset(out)
