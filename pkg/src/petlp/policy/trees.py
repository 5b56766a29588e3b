"""Interactive decision trees over the engine.

Each tree collects the inputs one verdict needs, node by node, then hands
them to the corresponding engine operation. The trees carry no rule logic
of their own: endpoints are computed by the same functions the library
exposes, which is what keeps wizard verdicts and direct calls identical.

Answers are stored as ``{node_id: option_value}`` so an alternative answer
can be substituted at any node and the remaining recorded answers reused
(the what-if evaluation).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from ..errors import (
    ForbiddenBasis,
    InvalidChoice,
    NoLawfulRoute,
    UnknownNode,
    UnlawfulAccess,
)
from . import engine
from .rulepacks import bundled_reddit_pack
from .trace import TraceBuilder
from .types import (
    DpiaStatus,
    EntityKind,
    LegalBasis,
    OutputKind,
    ProcessingContext,
    ProfitHandling,
    Purpose,
    ResearcherProfile,
    RetentionAllowance,
    SubjectScale,
    TdmDecision,
    TdmException,
    TransferFlags,
    WP29_CRITERIA,
    Wp29CriteriaSet,
)
from ..optout.reservation import ReservationBasis, ReservationStatus

YES_NO = (("yes", "Yes"), ("no", "No"))


@dataclass(frozen=True)
class TreeOption:
    value: str
    label: str
    next_node: Optional[str] = None  # overrides the node's default successor

    def to_dict(self) -> dict:
        return {"value": self.value, "label": self.label, "next_node": self.next_node}


@dataclass(frozen=True)
class TreeNode:
    id: str
    question: str
    citation: str
    options: tuple[TreeOption, ...]
    next_node: Optional[str] = None  # default successor; None ends the walk

    def option(self, value: str) -> TreeOption:
        for opt in self.options:
            if opt.value == value:
                return opt
        raise InvalidChoice(f"node {self.id}: {value!r} is not one of {[o.value for o in self.options]}")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "question": self.question,
            "citation": self.citation,
            "options": [o.to_dict() for o in self.options],
            "next_node": self.next_node,
        }


@dataclass(frozen=True)
class EndpointVerdict:
    tree_id: str
    verdict: str
    summary: str
    decision: Optional[dict] = None  # full decision export, trace embedded

    @property
    def trace_rule_ids(self) -> list[str]:
        if not self.decision or "trace" not in self.decision:
            return []
        return [entry["rule_id"] for entry in self.decision["trace"]["entries"]]

    def to_dict(self) -> dict:
        return {
            "tree_id": self.tree_id,
            "verdict": self.verdict,
            "summary": self.summary,
            "decision": self.decision,
            "trace_rule_ids": self.trace_rule_ids,
        }


@dataclass(frozen=True)
class DecisionTree:
    id: str
    title: str
    stage: str
    root: str
    nodes: dict[str, TreeNode]
    evaluate: Callable[[dict[str, str]], EndpointVerdict] = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "stage": self.stage,
            "root": self.root,
            "nodes": [self.nodes[node_id].to_dict() for node_id in self._walk_order()],
        }

    def _walk_order(self) -> list[str]:
        seen: list[str] = []
        pending = [self.root]
        while pending:
            node_id = pending.pop(0)
            if node_id in seen or node_id not in self.nodes:
                continue
            seen.append(node_id)
            node = self.nodes[node_id]
            for opt in node.options:
                if opt.next_node:
                    pending.append(opt.next_node)
            if node.next_node:
                pending.append(node.next_node)
        return seen


@dataclass(frozen=True)
class Step:
    """One walk result: either the next question or the endpoint verdict."""

    kind: str  # "ask" | "verdict"
    node: Optional[TreeNode] = None
    verdict: Optional[EndpointVerdict] = None
    path: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "node": self.node.to_dict() if self.node else None,
            "verdict": self.verdict.to_dict() if self.verdict else None,
            "path": list(self.path),
        }


def advance(tree: DecisionTree, answers: dict[str, str]) -> Step:
    """Walk from the root using recorded answers until a question is open
    or the endpoint is reached."""
    path: list[str] = []
    node_id: Optional[str] = tree.root
    while node_id is not None:
        node = tree.nodes[node_id]
        if node.id not in answers:
            return Step("ask", node=node, path=tuple(path))
        value = answers[node.id]
        option = node.option(value)  # raises InvalidChoice on stale answers
        path.append(node.id)
        node_id = option.next_node if option.next_node is not None else node.next_node
    return Step("verdict", verdict=tree.evaluate(answers), path=tuple(path))


def answer(tree: DecisionTree, answers: dict[str, str], node_id: str, choice: str) -> Step:
    """Record one answer at the currently open node and advance."""
    step = advance(tree, answers)
    if step.kind != "ask":
        raise UnknownNode(f"tree {tree.id} is already complete")
    assert step.node is not None
    if step.node.id != node_id:
        raise UnknownNode(f"node {node_id!r} is not current (expected {step.node.id!r})")
    step.node.option(choice)  # validate before recording
    answers[node_id] = choice
    return advance(tree, answers)


def whatif(tree: DecisionTree, answers: dict[str, str], node_id: str, alternative: str) -> Step:
    """Evaluate an alternative answer without touching the recorded ones."""
    if node_id not in tree.nodes:
        raise UnknownNode(f"tree {tree.id} has no node {node_id!r}")
    tree.nodes[node_id].option(alternative)
    trial = dict(answers)
    trial[node_id] = alternative
    return advance(tree, trial)


# --- node builders -----------------------------------------------------------

def _boolean(node_id: str, question: str, citation: str, next_node: Optional[str]) -> TreeNode:
    return TreeNode(node_id, question, citation, tuple(TreeOption(v, l) for v, l in YES_NO), next_node)


def _choice(node_id: str, question: str, citation: str, values: list[tuple[str, str]], next_node: Optional[str]) -> TreeNode:
    return TreeNode(node_id, question, citation, tuple(TreeOption(v, l) for v, l in values), next_node)


def _truthy(answers: dict[str, str], node_id: str) -> bool:
    return answers.get(node_id) == "yes"


# --- qualification tree ------------------------------------------------------

_QUAL_NODES = [
    _choice(
        "qual.node.entity_kind",
        "What kind of entity is carrying out the research?",
        "DSM Directive (EU) 2019/790 Art. 2(1)",
        [
            ("university", "University (including its libraries)"),
            ("research_institute", "Research institute"),
            ("public_authority", "Public authority"),
            ("commercial", "Commercial company"),
            ("nonprofit_other", "Other non-profit body"),
        ],
        "qual.node.primary_goal",
    ),
    _boolean(
        "qual.node.primary_goal",
        "Is conducting scientific research the entity's primary goal?",
        "DSM Directive (EU) 2019/790 Art. 2(1)",
        "qual.node.profit_handling",
    ),
    _choice(
        "qual.node.profit_handling",
        "How does the entity handle profits?",
        "DSM Directive (EU) 2019/790 Art. 2(1)(a)",
        [
            ("not_for_profit", "Operates not-for-profit"),
            ("reinvests_profits", "Reinvests all profits in research"),
            ("for_profit", "Distributes profits commercially"),
        ],
        "qual.node.public_interest_mission",
    ),
    _boolean(
        "qual.node.public_interest_mission",
        "Does the entity pursue a public interest mission recognised by a Member State?",
        "DSM Directive (EU) 2019/790 Art. 2(1)(b)",
        "qual.node.decisive_influence",
    ),
    _boolean(
        "qual.node.decisive_influence",
        "Does a commercial undertaking exercise decisive influence over the entity?",
        "DSM Directive (EU) 2019/790 Recital 12",
        "qual.node.preferential_access",
    ),
    _boolean(
        "qual.node.preferential_access",
        "Would that undertaking enjoy preferential access to the research results?",
        "DSM Directive (EU) 2019/790 Recital 12",
        None,
    ),
]


def _profile_from_qual_answers(answers: dict[str, str]) -> ResearcherProfile:
    kind = EntityKind(answers["qual.node.entity_kind"])
    return ResearcherProfile(
        entity_kind=kind,
        primary_goal_research=_truthy(answers, "qual.node.primary_goal"),
        profit_handling=ProfitHandling(answers["qual.node.profit_handling"]),
        public_interest_mission=_truthy(answers, "qual.node.public_interest_mission"),
        decisive_commercial_influence=_truthy(answers, "qual.node.decisive_influence"),
        preferential_commercial_access=_truthy(answers, "qual.node.preferential_access"),
        purpose=Purpose.SCIENTIFIC_RESEARCH,
        official_task_scope="declared official research task" if kind is EntityKind.PUBLIC_AUTHORITY else "",
    )


def _eval_qualification(answers: dict[str, str]) -> EndpointVerdict:
    result = engine.qualify_research_organisation(_profile_from_qual_answers(answers))
    if result.qualifies:
        summary = "Qualifying research organisation: the contract-proof research TDM exception is available."
    else:
        summary = "Not a qualifying research organisation (failed: " + ", ".join(result.failed_criteria) + ")."
    return EndpointVerdict(
        "research_qualification",
        "qualifies" if result.qualifies else "not_qualifying",
        summary,
        result.to_dict(),
    )


# --- legal basis tree --------------------------------------------------------

_BASIS_NODES = [
    _choice(
        "basis.node.entity_kind",
        "What kind of entity is the controller?",
        "GDPR Art. 6(1)",
        [
            ("university", "University"),
            ("research_institute", "Research institute"),
            ("public_authority", "Public authority"),
            ("commercial", "Commercial company"),
            ("nonprofit_other", "Other non-profit body"),
        ],
        "basis.node.purpose",
    ),
    _choice(
        "basis.node.purpose",
        "What is the purpose of the processing?",
        "GDPR Art. 5(1)(b)",
        [
            ("scientific_research", "Scientific research"),
            ("commercial", "Commercial"),
            ("mixed", "Mixed (commercialisation planned)"),
        ],
        "basis.node.public_interest_mission",
    ),
    _boolean(
        "basis.node.public_interest_mission",
        "Does the controller have a legally established public interest mission?",
        "GDPR Art. 6(1)(e)",
        "basis.node.requested",
    ),
    _choice(
        "basis.node.requested",
        "Is a specific legal basis being requested?",
        "GDPR Art. 6(1)",
        [
            ("default", "No, route me to the default"),
            ("consent_6_1_a", "Consent (user-mediated collection)"),
            ("public_task_6_1_e", "Public task"),
            ("legitimate_interest_6_1_f", "Legitimate interests"),
        ],
        "basis.node.special_category",
    ),
    _boolean(
        "basis.node.special_category",
        "Could the data reveal or allow inference of special category data?",
        "GDPR Art. 9(1)",
        None,
    ),
]


def _eval_legal_basis(answers: dict[str, str]) -> EndpointVerdict:
    purpose = Purpose(answers["basis.node.purpose"])
    profile = ResearcherProfile(
        entity_kind=EntityKind(answers["basis.node.entity_kind"]),
        primary_goal_research=purpose is Purpose.SCIENTIFIC_RESEARCH,
        profit_handling=ProfitHandling.NOT_FOR_PROFIT,
        public_interest_mission=_truthy(answers, "basis.node.public_interest_mission"),
        decisive_commercial_influence=False,
        preferential_commercial_access=False,
        purpose=purpose,
        official_task_scope=(
            "declared official research task"
            if EntityKind(answers["basis.node.entity_kind"]) is EntityKind.PUBLIC_AUTHORITY
            else ""
        ),
        commercialisation_planned=True if purpose is Purpose.MIXED else None,
    )
    context = ProcessingContext(
        platform_id="wizard",
        data_publicly_accessible=True,
        special_category_possible=_truthy(answers, "basis.node.special_category"),
        subject_count_scale=SubjectScale.LARGE,
        vulnerable_subjects=False,
        combines_datasets=False,
        innovative_technology=True,
        profiling_of_public_social_media=False,
    )
    requested_raw = answers["basis.node.requested"]
    requested = None if requested_raw == "default" else LegalBasis(requested_raw)
    try:
        decision = engine.select_legal_basis(profile, context, requested)
    except ForbiddenBasis as exc:
        trace = TraceBuilder({"answers": answers})
        trace.fire(getattr(exc, "rule_id", "basis.forbidden_li_public_authority"), str(exc))
        return EndpointVerdict(
            "legal_basis",
            "forbidden_basis",
            f"The requested basis is unavailable: {exc}",
            {"error": exc.code, "trace": trace.build().to_dict()},
        )
    extras = []
    if decision.lia_required:
        extras.append("a documented LIA is mandatory")
    if decision.art9_condition:
        extras.append("special category condition with research safeguards")
    summary = f"Legal basis: {decision.basis.value}" + (f" ({'; '.join(extras)})" if extras else "")
    return EndpointVerdict("legal_basis", decision.basis.value, summary, decision.to_dict())


# --- DPIA tree ---------------------------------------------------------------

_DPIA_QUESTIONS = {
    "evaluation_scoring": "Does the processing evaluate or score individuals (e.g. profiling their behaviour or opinions)?",
    "automated_decision_significant_effect": "Does automated decision-making produce legal or similarly significant effects?",
    "systematic_monitoring": "Does it systematically monitor individuals, including in publicly accessible spaces?",
    "sensitive_or_highly_personal": "Does it involve sensitive or highly personal data (including inferable attributes)?",
    "large_scale": "Is the processing large scale (subjects, volume, duration or geographic extent)?",
    "matching_combining": "Does it match or combine datasets from different sources or purposes?",
    "vulnerable_subjects": "Does it concern vulnerable data subjects (children, patients, employees)?",
    "innovative_use": "Does it apply innovative technology (e.g. novel AI systems)?",
    "rights_or_service_prevention": "Could it prevent data subjects from exercising a right or using a service?",
}

_DPIA_NODES = []
for _index, _name in enumerate(WP29_CRITERIA):
    _next = (
        "dpia.node." + WP29_CRITERIA[_index + 1]
        if _index + 1 < len(WP29_CRITERIA)
        else "dpia.node.profiling_public_social_media"
    )
    _DPIA_NODES.append(
        _boolean(
            f"dpia.node.{_name}",
            _DPIA_QUESTIONS[_name],
            "WP29 DPIA Guidelines (WP 248 rev.01) pp. 9-11",
            _next,
        )
    )
_DPIA_NODES.append(
    _boolean(
        "dpia.node.profiling_public_social_media",
        "Is public social media data gathered to generate profiles?",
        "WP29 DPIA Guidelines (WP 248 rev.01), social media profiling example",
        None,
    )
)


def _eval_dpia(answers: dict[str, str]) -> EndpointVerdict:
    criteria = Wp29CriteriaSet(**{name: _truthy(answers, f"dpia.node.{name}") for name in WP29_CRITERIA})
    context = ProcessingContext(
        platform_id="wizard",
        data_publicly_accessible=True,
        special_category_possible=criteria.sensitive_or_highly_personal,
        subject_count_scale=SubjectScale.LARGE if criteria.large_scale else SubjectScale.SMALL,
        vulnerable_subjects=criteria.vulnerable_subjects,
        combines_datasets=criteria.matching_combining,
        innovative_technology=criteria.innovative_use,
        profiling_of_public_social_media=_truthy(answers, "dpia.node.profiling_public_social_media"),
    )
    requirement = engine.assess_dpia_requirement(criteria, context)
    labels = {
        DpiaStatus.REQUIRED: "A DPIA is required before processing starts.",
        DpiaStatus.RECOMMENDED: "A DPIA is recommended (single criterion met).",
        DpiaStatus.NOT_REQUIRED: "No DPIA obligation, though one remains good practice.",
    }
    return EndpointVerdict(
        "dpia_requirement",
        requirement.status.value,
        f"{labels[requirement.status]} Criteria met: {requirement.trigger_count}.",
        requirement.to_dict(),
    )


# --- extraction / TDM tree ---------------------------------------------------

_TDM_NODES = [
    _choice(
        "tdm.node.researcher_status",
        "What is the researcher's institutional status?",
        "DSM Directive (EU) 2019/790 Art. 2(1)",
        [
            ("qualifying_research_org", "Qualifying research organisation"),
            ("commercial_or_other", "Commercial or other non-qualifying entity"),
        ],
        "tdm.node.purpose",
    ),
    _choice(
        "tdm.node.purpose",
        "What is the purpose of the mining?",
        "DSM Directive (EU) 2019/790 Art. 3(1)",
        [
            ("scientific_research", "Scientific research"),
            ("commercial", "Commercial"),
            ("mixed", "Mixed (commercialisation planned)"),
        ],
        "tdm.node.lawful_access",
    ),
    _boolean(
        "tdm.node.lawful_access",
        "Is the content lawfully accessible to the researcher?",
        "DSM Directive (EU) 2019/790 Arts. 3(1), 4(1)",
        "tdm.node.reservation",
    ),
    _choice(
        "tdm.node.reservation",
        "Has the rightholder reserved use by machine-readable means?",
        "DSM Directive (EU) 2019/790 Art. 4(3); Recital 18",
        [
            ("none", "No reservation found"),
            ("robots_disallow", "Yes: crawler-exclusion file disallows the mined scope"),
            ("tos_machine_readable", "Yes: terms treated as machine-readable reservation"),
        ],
        None,
    ),
]

_QUALIFYING_SURROGATE = ResearcherProfile(
    entity_kind=EntityKind.UNIVERSITY,
    primary_goal_research=True,
    profit_handling=ProfitHandling.NOT_FOR_PROFIT,
    public_interest_mission=True,
    decisive_commercial_influence=False,
    preferential_commercial_access=False,
    purpose=Purpose.SCIENTIFIC_RESEARCH,
)

_COMMERCIAL_SURROGATE = ResearcherProfile(
    entity_kind=EntityKind.COMMERCIAL,
    primary_goal_research=False,
    profit_handling=ProfitHandling.FOR_PROFIT,
    public_interest_mission=False,
    decisive_commercial_influence=False,
    preferential_commercial_access=False,
    purpose=Purpose.COMMERCIAL,
)

_TDM_SUMMARIES = {
    TdmException.ARTICLE3: "Extraction permitted under the research TDM exception; contrary platform terms are overridden.",
    TdmException.ARTICLE4: "Extraction permitted under the general TDM exception while no reservation is in place.",
    TdmException.NONE: "Extraction blocked by machine-readable reservation; no research exception applies.",
}


def _eval_tdm(answers: dict[str, str]) -> EndpointVerdict:
    qualifying = answers["tdm.node.researcher_status"] == "qualifying_research_org"
    profile = _QUALIFYING_SURROGATE if qualifying else _COMMERCIAL_SURROGATE
    purpose = Purpose(answers["tdm.node.purpose"])
    if purpose is Purpose.MIXED:
        profile = ResearcherProfile(
            entity_kind=profile.entity_kind,
            primary_goal_research=profile.primary_goal_research,
            profit_handling=profile.profit_handling,
            public_interest_mission=profile.public_interest_mission,
            decisive_commercial_influence=False,
            preferential_commercial_access=False,
            purpose=Purpose.MIXED,
            commercialisation_planned=True,
        )
    reservation_answer = answers["tdm.node.reservation"]
    if reservation_answer == "robots_disallow":
        reservation = ReservationStatus(True, ReservationBasis.ROBOTS_DISALLOW, "declared in wizard")
    elif reservation_answer == "tos_machine_readable":
        reservation = ReservationStatus(True, ReservationBasis.TOS_FLAG, "declared in wizard")
    else:
        reservation = ReservationStatus.none()
    lawful = _truthy(answers, "tdm.node.lawful_access")
    try:
        decision = engine.evaluate_tdm(profile, purpose, reservation, lawful)
    except UnlawfulAccess as exc:
        trace = TraceBuilder({"answers": answers})
        trace.fire("tdm.unlawful_access", str(exc))
        return EndpointVerdict(
            "extraction_tdm",
            "blocked_unlawful_access",
            "Extraction blocked: content is not lawfully accessible, so no TDM exception applies.",
            {"error": exc.code, "trace": trace.build().to_dict()},
        )
    return EndpointVerdict("extraction_tdm", decision.exception.value, _TDM_SUMMARIES[decision.exception], decision.to_dict())


# --- transfer tree (branching) -----------------------------------------------

_TRANSFER_NODES = [
    TreeNode(
        "transfer.node.intra_eea",
        "Does the data stay within one jurisdiction or the EEA?",
        "GDPR Art. 44",
        (TreeOption("yes", "Yes", next_node=None), TreeOption("no", "No", next_node="transfer.node.adequacy")),
        None,
    ),
    TreeNode(
        "transfer.node.adequacy",
        "Is the destination covered by an adequacy decision (or DPF for US recipients)?",
        "GDPR Art. 45",
        (TreeOption("yes", "Yes", next_node=None), TreeOption("no", "No", next_node="transfer.node.scc")),
        None,
    ),
    TreeNode(
        "transfer.node.scc",
        "Are Standard Contractual Clauses (or equivalent Art. 46 safeguards) in place?",
        "GDPR Art. 46",
        (TreeOption("yes", "Yes", next_node=None), TreeOption("no", "No", next_node="transfer.node.repetitive")),
        None,
    ),
    _boolean(
        "transfer.node.repetitive",
        "Is the transfer repetitive or systematic?",
        "GDPR Art. 49(1)",
        None,
    ),
]


def _eval_transfer(answers: dict[str, str]) -> EndpointVerdict:
    if _truthy(answers, "transfer.node.intra_eea"):
        route = ("EEA", "EEA")
        flags = TransferFlags()
    else:
        route = ("EEA", "XX")
        flags = TransferFlags(
            adequacy_listed=_truthy(answers, "transfer.node.adequacy"),
            dpf_covered=False,
            scc_available=_truthy(answers, "transfer.node.scc"),
            repetitive=_truthy(answers, "transfer.node.repetitive"),
        )
    try:
        assessment = engine.assess_transfer(route, flags)
    except NoLawfulRoute as exc:
        trace = TraceBuilder({"answers": answers})
        trace.fire("transfer.no_route", str(exc))
        return EndpointVerdict(
            "transfer",
            "no_lawful_route",
            "The transfer may not proceed: no adequacy, safeguard, or derogation covers it.",
            {"error": exc.code, "trace": trace.build().to_dict()},
        )
    summaries = {
        "none_needed": "No transfer mechanism needed.",
        "adequacy_45": "Transfer rests on an adequacy decision.",
        "safeguards_46": "Transfer rests on appropriate safeguards (SCCs).",
        "derogation_49": "One-off transfer possible under a derogation; keep it non-repetitive.",
    }
    return EndpointVerdict("transfer", assessment.mechanism.value, summaries[assessment.mechanism.value], assessment.to_dict())


# --- distribution tree ---------------------------------------------------------

_DIST_NODES = [
    _choice(
        "dist.node.output_kind",
        "What kind of research output is being released?",
        "Reddit Developer Platform Wiki; LAION v. Kneschke (2024)",
        [
            ("paper", "Paper (paraphrased findings only)"),
            ("paper_with_quotes", "Paper containing verbatim quotes"),
            ("dataset_raw", "Raw dataset"),
            ("dataset_ids_only", "Identifier-only dataset (hydration)"),
            ("model_weights", "Trained model weights"),
            ("aggregate_stats", "Aggregated statistics"),
        ],
        "dist.node.tdm_exception",
    ),
    _choice(
        "dist.node.tdm_exception",
        "Which TDM exception covered the extraction?",
        "DSM Directive (EU) 2019/790 Arts. 3-4",
        [
            ("article3", "Research exception"),
            ("article4", "General exception"),
            ("none", "None"),
        ],
        "dist.node.platform_permission",
    ),
    _boolean(
        "dist.node.platform_permission",
        "Has the platform granted explicit permission for this release?",
        "Reddit Developer Terms s.4",
        "dist.node.anonymised",
    ),
    _boolean(
        "dist.node.anonymised",
        "Is the released information anonymised (no individual-level records)?",
        "Reddit Developer Platform Wiki; GDPR Recital 26",
        "dist.node.dp_applied",
    ),
    _boolean(
        "dist.node.dp_applied",
        "Is differential privacy applied to the released figures?",
        "EDPB Opinion 28/2024 para. 52",
        "dist.node.leak_scan",
    ),
    _boolean(
        "dist.node.leak_scan",
        "Has a verbatim-leak scan been run cleanly over the output?",
        "Infopaq International (C-5/08)",
        None,
    ),
]


def surrogate_tdm(exception: TdmException) -> TdmDecision:
    """A minimal, correctly-traced TDM decision for a known exception value."""
    trace = TraceBuilder({"exception": exception.value})
    if exception is TdmException.ARTICLE3:
        trace.fire("tdm.article3", "declared: research exception covered the extraction")
        return TdmDecision(exception, True, RetentionAllowance.VERIFICATION_RETENTION, (), trace.build())
    if exception is TdmException.ARTICLE4:
        trace.fire("tdm.article4", "declared: general exception covered the extraction")
        return TdmDecision(exception, False, RetentionAllowance.NECESSITY_BOUNDED, (), trace.build())
    trace.fire("tdm.reserved", "declared: no exception covered the extraction")
    return TdmDecision(exception, False, RetentionAllowance.NONE, (), trace.build())


def _eval_distribution(answers: dict[str, str]) -> EndpointVerdict:
    safeguards = set()
    if _truthy(answers, "dist.node.platform_permission"):
        safeguards.add("platform_permission")
    if _truthy(answers, "dist.node.anonymised"):
        safeguards.add("anonymised")
    if _truthy(answers, "dist.node.dp_applied"):
        safeguards.add("dp")
    if _truthy(answers, "dist.node.leak_scan"):
        safeguards.add("verbatim_leak_scan")
    decision = engine.check_distribution(
        OutputKind(answers["dist.node.output_kind"]),
        bundled_reddit_pack(),
        surrogate_tdm(TdmException(answers["dist.node.tdm_exception"])),
        frozenset(safeguards),
    )
    summaries = {
        "allowed": "Release allowed.",
        "allowed_with_conditions": "Release allowed once the outstanding conditions are met: "
        + ", ".join(decision.conditions) + ".",
        "blocked": "Release blocked.",
    }
    return EndpointVerdict("distribution", decision.verdict.value, summaries[decision.verdict.value], decision.to_dict())


def _tree(tree_id: str, title: str, stage: str, nodes: list[TreeNode], evaluate) -> DecisionTree:
    return DecisionTree(tree_id, title, stage, nodes[0].id, {n.id: n for n in nodes}, evaluate)


ALL_TREES: dict[str, DecisionTree] = {
    tree.id: tree
    for tree in [
        _tree(
            "research_qualification",
            "Research organisation qualification",
            "pre_registration",
            _QUAL_NODES,
            _eval_qualification,
        ),
        _tree("legal_basis", "Legal basis selection", "pre_registration", _BASIS_NODES, _eval_legal_basis),
        _tree("dpia_requirement", "DPIA requirement", "pre_registration", _DPIA_NODES, _eval_dpia),
        _tree("extraction_tdm", "Extraction and TDM exceptions", "extract", _TDM_NODES, _eval_tdm),
        _tree("transfer", "International transfers", "load", _TRANSFER_NODES, _eval_transfer),
        _tree("distribution", "Output distribution", "present", _DIST_NODES, _eval_distribution),
    ]
}


def get_tree(tree_id: str) -> DecisionTree:
    try:
        return ALL_TREES[tree_id]
    except KeyError:
        raise UnknownNode(f"no decision tree named {tree_id!r}") from None


def tree_for_node(node_id: str) -> DecisionTree:
    for tree in ALL_TREES.values():
        if node_id in tree.nodes:
            return tree
    raise UnknownNode(f"no decision tree contains node {node_id!r}")
